#include "dynshort/bounded_dist.hpp"

#include <gmpxx.h>

#include <set>

#include "dynshort/poly.hpp"
#include "dynshort/rng.hpp"

namespace dynshort {
namespace {

/// (I - X·A)^{-1} = sum_k X^k A^k over F[X]/<X^{trunc_len}>, assembled by
/// repeated sparse multiplication with A (row u of A^{k+1} is the sum of the
/// A^k rows of u's out-neighbors).
template <class F>
Mat<PolyRing<F>> walk_series_inverse(const PolyRing<F>& ring, const DynGraph& g) {
    const F& base = ring.base();
    const int n = g.n();
    Mat<PolyRing<F>> minv(ring, n, n);
    Mat<F> cur = Mat<F>::identity(base, n);
    Mat<F> nxt(base, n, n);
    for (size_t k = 0; k < ring.trunc_len(); ++k) {
        bool any = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (base.is_zero(cur.at(i, j))) continue;
                base.assign(ring.coef(minv.at(i, j), k), cur.at(i, j));
                any = true;
            }
        }
        if (!any || k + 1 == ring.trunc_len()) break;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) base.clear(nxt.at(i, j));
        for (int u = 0; u < n; ++u) {
            for (int v : g.neighbors(u)) {
                for (int j = 0; j < n; ++j) base.add_into(nxt.at(u, j), cur.at(v, j));
            }
        }
        std::swap(cur, nxt);
    }
    return minv;
}

template <class F>
class AlgebraicBounded final : public BoundedDistance {
public:
    using R = PolyRing<F>;
    using Sub = SubmatrixInverse<R>;

    AlgebraicBounded(F base, std::string tag, int n, int h, bool directed, IndexSet s, IndexSet t,
                     const std::vector<std::pair<int, int>>& edges, InverseCaps caps)
        : ring_(std::move(base), static_cast<size_t>(h) + 1),
          tag_(std::move(tag)),
          h_(h),
          mirror_(n, directed, edges),
          inv_(Sub::from_inverse(ring_, walk_series_inverse(ring_, mirror_), std::move(s),
                                 std::move(t), caps,
                                 directed ? Sub::Mode::general : Sub::Mode::symmetric)) {}

    int n() const override { return mirror_.n(); }
    int hop_bound() const override { return h_; }
    bool directed() const override { return mirror_.directed(); }
    const IndexSet& sources() const override { return inv_.s_set(); }
    const IndexSet& targets() const override { return inv_.t_set(); }

    void insert_edge(int u, int v) override {
        mirror_.insert_edge(u, v);
        apply_edge(u, v, /*insert=*/true);
    }
    void delete_edge(int u, int v) override {
        mirror_.delete_edge(u, v);
        apply_edge(u, v, /*insert=*/false);
    }
    void set_update(SetSide side, bool add, int v) override {
        if (v < 0 || v >= n()) throw SetError("bounded distance: vertex out of range");
        inv_.set_update(side == SetSide::sources ? Sub::Side::S : Sub::Side::T, add, v);
    }

    DistMatrix distances() const override {
        const Mat<R>& block = inv_.block();
        DistMatrix out(block.rows(), block.cols());
        for (int i = 0; i < block.rows(); ++i) {
            for (int j = 0; j < block.cols(); ++j) {
                int d = ring_.min_nonzero_degree(block.at(i, j));
                out.at(i, j) = d < 0 ? kNoPath : static_cast<Dist>(d);
            }
        }
        return out;
    }

    std::string backend() const override { return tag_; }
    DynInvStats stats() const override { return inv_.stats(); }

private:
    void apply_edge(int u, int v, bool insert) {
        // A[u][v] += ±1, so M = I - X·A changes by ∓X at (u,v). With h = 0
        // the delta truncates to zero and distances beyond hop 0 are not
        // representable anyway.
        std::vector<typename R::Limb> delta(ring_.width());
        ring_.clear(delta.data());
        if (h_ < 1) return;
        const F& base = ring_.base();
        base.set_one(ring_.coef(delta.data(), 1));
        if (insert) base.neg_into(ring_.coef(delta.data(), 1));
        if (mirror_.directed()) {
            inv_.entry_update(u, v, delta.data());
        } else {
            inv_.sym_edge_update(u, v, delta.data());
        }
    }

    R ring_;
    std::string tag_;
    int h_;
    DynGraph mirror_;
    Sub inv_;
};

class BfsBounded final : public BoundedDistance {
public:
    BfsBounded(int n, int h, bool directed, IndexSet s, IndexSet t,
               const std::vector<std::pair<int, int>>& edges)
        : h_(h), mirror_(n, directed, edges), s_(std::move(s)), t_(std::move(t)) {}

    int n() const override { return mirror_.n(); }
    int hop_bound() const override { return h_; }
    bool directed() const override { return mirror_.directed(); }
    const IndexSet& sources() const override { return s_; }
    const IndexSet& targets() const override { return t_; }

    void insert_edge(int u, int v) override { mirror_.insert_edge(u, v); }
    void delete_edge(int u, int v) override { mirror_.delete_edge(u, v); }
    void set_update(SetSide side, bool add, int v) override {
        if (v < 0 || v >= n()) throw SetError("bounded distance: vertex out of range");
        IndexSet& set = side == SetSide::sources ? s_ : t_;
        if (add) {
            if (!set.add(v)) throw SetError("bounded distance: vertex already in set");
        } else if (!set.remove(v)) {
            throw SetError("bounded distance: vertex not in set");
        }
    }

    DistMatrix distances() const override {
        DistMatrix out(s_.size(), t_.size());
        for (int i = 0; i < s_.size(); ++i) {
            auto d = bfs_from(mirror_, s_[i], h_);
            for (int j = 0; j < t_.size(); ++j) out.at(i, j) = d[static_cast<size_t>(t_[j])];
        }
        return out;
    }

    std::string backend() const override { return "bfs"; }
    DynInvStats stats() const override { return {}; }

private:
    int h_;
    DynGraph mirror_;
    IndexSet s_;
    IndexSet t_;
};

/// Minimum over independent prime-field copies; a distance survives iff some
/// copy's prime misses the walk count, so the minimum is exact w.h.p.
class RandomizedBounded final : public BoundedDistance {
public:
    explicit RandomizedBounded(std::vector<std::unique_ptr<BoundedDistance>> copies)
        : copies_(std::move(copies)) {}

    int n() const override { return copies_.front()->n(); }
    int hop_bound() const override { return copies_.front()->hop_bound(); }
    bool directed() const override { return copies_.front()->directed(); }
    const IndexSet& sources() const override { return copies_.front()->sources(); }
    const IndexSet& targets() const override { return copies_.front()->targets(); }

    void insert_edge(int u, int v) override {
        for (auto& c : copies_) c->insert_edge(u, v);
    }
    void delete_edge(int u, int v) override {
        for (auto& c : copies_) c->delete_edge(u, v);
    }
    void set_update(SetSide side, bool add, int v) override {
        for (auto& c : copies_) c->set_update(side, add, v);
    }

    DistMatrix distances() const override {
        DistMatrix out = copies_.front()->distances();
        for (size_t k = 1; k < copies_.size(); ++k) {
            DistMatrix d = copies_[k]->distances();
            for (int i = 0; i < out.rows(); ++i)
                for (int j = 0; j < out.cols(); ++j) out.at(i, j) = min_dist(out.at(i, j), d.at(i, j));
        }
        return out;
    }

    std::string backend() const override {
        return "fp64x" + std::to_string(copies_.size());
    }
    DynInvStats stats() const override {
        DynInvStats st;
        for (const auto& c : copies_) st += c->stats();
        return st;
    }

private:
    std::vector<std::unique_ptr<BoundedDistance>> copies_;
};

void check_vertices(const IndexSet& set, int n, const char* name) {
    for (int v : set) {
        if (v < 0 || v >= n) {
            throw DimensionError(std::string("bounded distance: ") + name + " vertex out of range");
        }
    }
}

}  // namespace

std::unique_ptr<BoundedDistance> make_bounded_distance(
    int n, int h, bool directed, IndexSet sources, IndexSet targets,
    const std::vector<std::pair<int, int>>& edges, const BoundedDistOptions& opts) {
    using Engine = BoundedDistOptions::Engine;
    if (n < 1) throw DimensionError("bounded distance: need at least one vertex");
    if (h < 0) throw DimensionError("bounded distance: negative hop bound");
    check_vertices(sources, n, "source");
    check_vertices(targets, n, "target");

    bool use_bfs =
        opts.engine == Engine::bfs || (opts.engine == Engine::automatic && h > opts.bfs_fallback_hops);
    if (use_bfs) {
        return std::make_unique<BfsBounded>(n, h, directed, std::move(sources), std::move(targets),
                                            edges);
    }

    InverseCaps caps = opts.caps;
    if (caps.inner <= 0 || caps.outer <= 0) caps = InverseCaps::defaults_for(n);
    if (sources.size() > caps.outer || targets.size() > caps.outer) {
        throw DimensionError("bounded distance: source/target set exceeds the outer cap");
    }

    if (opts.field.mode == FieldConfig::Mode::randomized) {
        const int c = opts.field.effective_copies(n);
        Rng rng(opts.field.seed);
        std::set<u64> used;
        std::vector<std::unique_ptr<BoundedDistance>> copies;
        copies.reserve(static_cast<size_t>(c));
        while (static_cast<int>(copies.size()) < c) {
            u64 p = random_prime_62(rng);
            if (!used.insert(p).second) continue;
            copies.push_back(std::make_unique<AlgebraicBounded<Fp64Ring>>(
                Fp64Ring(p), "fp64", n, h, directed, sources, targets, edges, caps));
        }
        return std::make_unique<RandomizedBounded>(std::move(copies));
    }

    // Deterministic mode: a prime above n^h keeps every h-bounded walk count
    // nonzero; the backend is picked by the prime's width.
    mpz_class p = opts.field.modulus.empty() ? bounded_walk_prime(n, h)
                                             : mpz_class(opts.field.modulus);
    size_t bits = mpz_sizeinbase(p.get_mpz_t(), 2);
    if (bits <= 63) {
        return std::make_unique<AlgebraicBounded<Fp64Ring>>(Fp64Ring(p.get_ui()), "fp64", n, h,
                                                            directed, std::move(sources),
                                                            std::move(targets), edges, caps);
    }
    if (bits <= 126) {
        return std::make_unique<AlgebraicBounded<Fp128Ring>>(Fp128Ring(p), "fp128", n, h, directed,
                                                             std::move(sources), std::move(targets),
                                                             edges, caps);
    }
    return std::make_unique<AlgebraicBounded<FpBigRing>>(FpBigRing(p), "fpbig", n, h, directed,
                                                         std::move(sources), std::move(targets),
                                                         edges, caps);
}

}  // namespace dynshort
