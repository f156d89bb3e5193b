#pragma once

#include <cassert>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "dynshort/errors.hpp"
#include "dynshort/matrix.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Three-layer dynamic matrix inverse.
//
//   BatchInverse      — keeps M^{-1} = Minner^{-1} + U'V'^T with U',V' capped
//                       at `outer` columns; batches of up to `inner` entry
//                       changes are absorbed by one Woodbury step; explicit
//                       inverse columns are kept for a dynamic index set T.
//   EntryInverse      — single-entry updates on top of a BatchInverse;
//                       accumulates up to `inner` rank-1 changes in sparse
//                       U,V with N = (I + V^T M''^{-1} U)^{-1} grown one
//                       row/column per update, then flushes them as one batch.
//   SubmatrixInverse  — maintains the explicit block M^{-1}_{S,T} after every
//                       update: a primal EntryInverse answers rows over T, a
//                       second copy on M^T answers columns over S. A symmetric
//                       mode keeps one copy over S ∪ T and halves the work.
//
// All layers are generic over the span-based ring concept (field contexts or
// PolyRing). Non-singularity after each update is a caller promise; a failing
// pivot raises SingularError. Each state is single-writer.
// ---------------------------------------------------------------------------

/// Column caps for the layered representation. The defaults mirror the
/// exponents that guide the asymptotic analysis; at this scale they are
/// tuning knobs.
struct InverseCaps {
    int inner = 8;
    int outer = 64;

    static InverseCaps defaults_for(int n) {
        InverseCaps c;
        c.inner = static_cast<int>(std::ceil(std::pow(std::max(n, 2), 0.55)));
        c.outer = static_cast<int>(std::ceil(std::pow(std::max(n, 2), 0.85)));
        return c;
    }
};

/// Counters for rebuild events; the harness reports these as latency spikes.
struct DynInvStats {
    long batches = 0;  // Woodbury batch absorptions
    long folds = 0;    // U'V'^T recompositions into the dense inverse
    long merges = 0;   // T_dyn merges into T_init (explicit column fills)
    long flushes = 0;  // entry-layer flushes into the batch layer

    DynInvStats& operator+=(const DynInvStats& o) {
        batches += o.batches;
        folds += o.folds;
        merges += o.merges;
        flushes += o.flushes;
        return *this;
    }
};

/// One entry change: M[i][j] += delta.
template <class R>
struct EntryChange {
    int i = 0, j = 0;
    std::vector<typename R::Limb> delta;
};

template <class R>
EntryChange<R> make_change(const R& ring, int i, int j, const typename R::Limb* delta) {
    EntryChange<R> c;
    c.i = i;
    c.j = j;
    c.delta.resize(ring.width());
    ring.assign(c.delta.data(), delta);
    return c;
}

namespace detail {

/// Ring-generic dense inversion: Gauss-Jordan over a field, X-adic Newton
/// over a truncated polynomial ring.
template <class R>
struct RingInv {
    static Mat<R> inv(const R& ring, const Mat<R>& m) { return mat_inv_field(ring, m); }
};
template <class F>
struct RingInv<PolyRing<F>> {
    static Mat<PolyRing<F>> inv(const PolyRing<F>& ring, const Mat<PolyRing<F>>& m) {
        return mat_inv_poly(ring, m);
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Batch layer.
// ---------------------------------------------------------------------------
template <class R>
class BatchInverse {
public:
    using Limb = typename R::Limb;

    BatchInverse(const R& ring, const Mat<R>& m, IndexSet t, InverseCaps caps)
        : BatchInverse(ring, detail::RingInv<R>::inv(ring, m), std::move(t), caps, 0) {}

    /// Adopt a precomputed inverse (initialization from a known closed form).
    static BatchInverse from_inverse(const R& ring, Mat<R> minv, IndexSet t, InverseCaps caps) {
        return BatchInverse(ring, std::move(minv), std::move(t), caps, 0);
    }

    int n() const { return minv_.rows(); }
    const IndexSet& index_set() const { return t_all_; }
    const InverseCaps& caps() const { return caps_; }
    const DynInvStats& stats() const { return stats_; }
    int outer_cols() const { return r_; }
    int dyn_size() const { return t_dyn_.size(); }

    /// M^{-1}[i][j], exactly.
    void query_entry(Limb* out, int i, int j) const {
        ring_.assign(out, minv_.at(i, j));
        for (size_t b = 0; b < ublocks_.size(); ++b) {
            const Mat<R>& ub = ublocks_[b];
            const Mat<R>& vb = vblocks_[b];
            const Limb* urow = ub.at(i, 0);
            const Limb* vrow = vb.at(j, 0);
            for (int k = 0; k < ub.cols(); ++k) {
                ring_.mul_add(out, urow + k * ring_.width(), vrow + k * ring_.width());
            }
        }
    }

    /// M^{-1}[i][T] in sorted-T order; out must hold |T| elements.
    void query_row_T(Limb* out, int i) const {
        const size_t w = ring_.width();
        for (int t = 0; t < t_all_.size(); ++t) {
            int idx = t_all_[t];
            int r = t_init_.rank(idx);
            if (r >= 0) {
                ring_.assign(out + t * w, cols_.at(i, r));
            } else {
                query_entry(out + t * w, i, idx);
            }
        }
    }

    /// Absorb a batch of entry changes (|changes| <= caps.inner) with one
    /// Woodbury step; folds U'V'^T into the dense inverse past caps.outer.
    void update(const std::vector<EntryChange<R>>& changes) {
        const int c = static_cast<int>(changes.size());
        if (c == 0) return;
        if (c > caps_.inner) throw DimensionError("BatchInverse: batch larger than inner cap");
        const size_t w = ring_.width();
        const int nn = n();

        // Q = M^{-1} U: column k is delta_k * (column i_k of the current inverse).
        Mat<R> q(ring_, nn, c);
        std::vector<Limb> col(static_cast<size_t>(nn) * w);
        for (int k = 0; k < c; ++k) {
            inverse_column(col.data(), changes[static_cast<size_t>(k)].i);
            const Limb* d = changes[static_cast<size_t>(k)].delta.data();
            for (int i = 0; i < nn; ++i) ring_.mul(q.at(i, k), col.data() + i * w, d);
        }
        // S = V^T M^{-1}: row l is row j_l of the current inverse.
        Mat<R> s(ring_, c, nn);
        for (int l = 0; l < c; ++l) inverse_row(s.at(l, 0), changes[static_cast<size_t>(l)].j);
        // R = V^T Q is made of rows j_l of Q; W = (I + R)^{-1}.
        Mat<R> p = Mat<R>::identity(ring_, c);
        for (int l = 0; l < c; ++l) {
            for (int k = 0; k < c; ++k) {
                ring_.add_into(p.at(l, k), q.at(changes[static_cast<size_t>(l)].j, k));
            }
        }
        Mat<R> wmat = detail::RingInv<R>::inv(ring_, p);  // SingularError on bad pivot
        Mat<R> y = mat_mul(ring_, wmat, s);               // c x n

        // Explicit T_init columns: C -= Q * Y[:, T_init].
        if (t_init_.size() > 0) {
            Mat<R> yt(ring_, c, t_init_.size());
            for (int k = 0; k < c; ++k)
                for (int t = 0; t < t_init_.size(); ++t) ring_.assign(yt.at(k, t), y.at(k, t_init_[t]));
            for (int i = 0; i < nn; ++i) {
                for (int k = 0; k < c; ++k) {
                    const Limb* qik = q.at(i, k);
                    if (ring_.is_zero(qik)) continue;
                    for (int t = 0; t < t_init_.size(); ++t) {
                        ring_.mul(tmp_.data(), qik, yt.at(k, t));
                        ring_.sub_into(cols_.at(i, t), tmp_.data());
                    }
                }
            }
        }

        // Append U' <- [U' | Q], V' <- [V' | -Y^T].
        Mat<R> vb(ring_, nn, c);
        for (int j = 0; j < nn; ++j)
            for (int k = 0; k < c; ++k) {
                ring_.assign(vb.at(j, k), y.at(k, j));
                ring_.neg_into(vb.at(j, k));
            }
        ublocks_.push_back(std::move(q));
        vblocks_.push_back(std::move(vb));
        r_ += c;
        ++stats_.batches;
        if (r_ > caps_.outer) fold();
    }

    void set_add(int index) {
        if (t_all_.contains(index)) throw SetError("BatchInverse: index already in T");
        t_dyn_.add(index);
        t_all_.add(index);
        if (t_dyn_.size() > caps_.inner) merge_dyn();
    }

    void set_remove(int index) {
        if (!t_all_.contains(index)) throw SetError("BatchInverse: index not in T");
        t_all_.remove(index);
        if (t_dyn_.remove(index)) return;
        // Drop the explicit column.
        int r = t_init_.rank(index);
        Mat<R> nc(ring_, n(), t_init_.size() - 1);
        for (int i = 0; i < n(); ++i) {
            for (int t = 0, o = 0; t < t_init_.size(); ++t) {
                if (t == r) continue;
                ring_.assign(nc.at(i, o++), cols_.at(i, t));
            }
        }
        cols_ = std::move(nc);
        t_init_.remove(index);
    }

private:
    BatchInverse(const R& ring, Mat<R> minv, IndexSet t, InverseCaps caps, int)
        : ring_(ring),
          caps_(caps),
          minv_(std::move(minv)),
          t_init_(std::move(t)),
          t_all_(t_init_),
          tmp_(ring.width()) {
        if (minv_.rows() != minv_.cols()) throw DimensionError("BatchInverse: matrix not square");
        cols_ = Mat<R>(ring_, n(), t_init_.size());
        for (int i = 0; i < n(); ++i)
            for (int t = 0; t < t_init_.size(); ++t) ring_.assign(cols_.at(i, t), minv_.at(i, t_init_[t]));
    }

    // out[0..n) = column j of the current inverse.
    void inverse_column(Limb* out, int j) const {
        const size_t w = ring_.width();
        for (int i = 0; i < n(); ++i) ring_.assign(out + i * w, minv_.at(i, j));
        for (size_t b = 0; b < ublocks_.size(); ++b) {
            const Mat<R>& ub = ublocks_[b];
            const Mat<R>& vb = vblocks_[b];
            const Limb* vrow = vb.at(j, 0);
            for (int i = 0; i < n(); ++i) {
                const Limb* urow = ub.at(i, 0);
                for (int k = 0; k < ub.cols(); ++k) {
                    ring_.mul_add(out + i * w, urow + k * w, vrow + k * w);
                }
            }
        }
    }

    // out[0..n) = row i of the current inverse.
    void inverse_row(Limb* out, int i) const {
        const size_t w = ring_.width();
        for (int j = 0; j < n(); ++j) ring_.assign(out + j * w, minv_.at(i, j));
        for (size_t b = 0; b < ublocks_.size(); ++b) {
            const Mat<R>& ub = ublocks_[b];
            const Mat<R>& vb = vblocks_[b];
            const Limb* urow = ub.at(i, 0);
            for (int k = 0; k < ub.cols(); ++k) {
                const Limb* u = urow + k * w;
                if (ring_.is_zero(u)) continue;
                for (int j = 0; j < n(); ++j) {
                    ring_.mul_add(out + j * w, u, vb.at(j, k));
                }
            }
        }
    }

    // M'^{-1} += U'V'^T; empties the blocks.
    void fold() {
        const size_t w = ring_.width();
        for (size_t b = 0; b < ublocks_.size(); ++b) {
            const Mat<R>& ub = ublocks_[b];
            Mat<R> vbt = mat_transpose(ring_, vblocks_[b]);
            for (int i = 0; i < n(); ++i) {
                const Limb* urow = ub.at(i, 0);
                for (int k = 0; k < ub.cols(); ++k) {
                    const Limb* u = urow + k * w;
                    if (ring_.is_zero(u)) continue;
                    const Limb* vrow = vbt.at(k, 0);
                    Limb* mrow = minv_.at(i, 0);
                    for (int j = 0; j < n(); ++j) {
                        ring_.mul_add(mrow + j * w, u, vrow + j * w);
                    }
                }
            }
        }
        ublocks_.clear();
        vblocks_.clear();
        r_ = 0;
        ++stats_.folds;
    }

    // Compute explicit columns for all of T_dyn and promote them into T_init.
    void merge_dyn() {
        const size_t w = ring_.width();
        IndexSet merged = t_all_;
        Mat<R> nc(ring_, n(), merged.size());
        std::vector<Limb> col(static_cast<size_t>(n()) * w);
        for (int t = 0; t < merged.size(); ++t) {
            int idx = merged[t];
            int r = t_init_.rank(idx);
            if (r >= 0) {
                for (int i = 0; i < n(); ++i) ring_.assign(nc.at(i, t), cols_.at(i, r));
            } else {
                inverse_column(col.data(), idx);
                for (int i = 0; i < n(); ++i) ring_.assign(nc.at(i, t), col.data() + i * w);
            }
        }
        cols_ = std::move(nc);
        t_init_ = std::move(merged);
        t_dyn_ = IndexSet();
        ++stats_.merges;
    }

    R ring_;
    InverseCaps caps_;
    Mat<R> minv_;                  // M'^{-1}
    std::vector<Mat<R>> ublocks_;  // U' as appended n x c blocks
    std::vector<Mat<R>> vblocks_;  // V' likewise (sign already folded in)
    int r_ = 0;                    // total U'/V' columns
    IndexSet t_init_, t_dyn_, t_all_;
    Mat<R> cols_;  // explicit inverse columns over T_init
    DynInvStats stats_;
    mutable std::vector<Limb> tmp_;
};

// ---------------------------------------------------------------------------
// Entry layer.
// ---------------------------------------------------------------------------
template <class R>
class EntryInverse {
public:
    using Limb = typename R::Limb;

    EntryInverse(const R& ring, const Mat<R>& m, IndexSet t, InverseCaps caps)
        : ring_(ring), inner_(ring, m, std::move(t), caps) {}

    static EntryInverse from_inverse(const R& ring, Mat<R> minv, IndexSet t, InverseCaps caps) {
        return EntryInverse(ring, BatchInverse<R>::from_inverse(ring, std::move(minv), std::move(t), caps));
    }

    int n() const { return inner_.n(); }
    const IndexSet& index_set() const { return inner_.index_set(); }
    int pending_cols() const { return k_; }
    int outer_cols() const { return inner_.outer_cols(); }
    DynInvStats stats() const {
        DynInvStats s = inner_.stats();
        s.flushes = flushes_;
        return s;
    }

    /// M[i][j] += delta. One sparse column pair is appended and N is grown by
    /// a bordered (Schur) step; every caps.inner updates flush to the inner
    /// batch layer.
    void update(int i, int j, const Limb* delta) {
        const size_t w = ring_.width();
        const int k = k_;
        // Border vectors of P_new = I + V^T M''^{-1} U_new:
        //   b[l]  = delta   * M''^{-1}[j_l, i]
        //   c[l]  = delta_l * M''^{-1}[j, i_l]
        //   dd    = 1 + delta * M''^{-1}[j, i]
        std::vector<Limb> b(static_cast<size_t>(k) * w), cvec(static_cast<size_t>(k) * w);
        std::vector<Limb> e(w), dd(w);
        for (int l = 0; l < k; ++l) {
            inner_.query_entry(e.data(), vj_[static_cast<size_t>(l)], i);
            ring_.mul(&b[l * w], e.data(), delta);
            inner_.query_entry(e.data(), j, ui_[static_cast<size_t>(l)]);
            ring_.mul(&cvec[l * w], e.data(), delta_ptr(l));
        }
        inner_.query_entry(e.data(), j, i);
        ring_.mul(dd.data(), e.data(), delta);
        std::vector<Limb> one(w);
        ring_.set_one(one.data());
        ring_.add_into(dd.data(), one.data());

        Mat<R> nnew(ring_, k + 1, k + 1);
        std::vector<Limb> sinv(w);
        if (k == 0) {
            if (!ring_.try_inv(sinv.data(), dd.data())) {
                throw SingularError("EntryInverse: update pivot is not invertible");
            }
            ring_.assign(nnew.at(0, 0), sinv.data());
        } else {
            // nb = N b ; cn = c^T N ; s = dd - c^T N b
            std::vector<Limb> nb(static_cast<size_t>(k) * w), cn(static_cast<size_t>(k) * w), s(w);
            for (int r = 0; r < k; ++r)
                for (int l = 0; l < k; ++l) ring_.mul_add(&nb[r * w], n_.at(r, l), &b[l * w]);
            for (int l = 0; l < k; ++l)
                for (int r = 0; r < k; ++r) ring_.mul_add(&cn[l * w], &cvec[r * w], n_.at(r, l));
            ring_.assign(s.data(), dd.data());
            for (int r = 0; r < k; ++r) {
                ring_.mul(e.data(), &cvec[r * w], &nb[r * w]);
                ring_.sub_into(s.data(), e.data());
            }
            if (!ring_.try_inv(sinv.data(), s.data())) {
                throw SingularError("EntryInverse: update pivot is not invertible");
            }
            // N_new = [[N + (Nb) s^{-1} (cN), -(Nb) s^{-1}], [-s^{-1} (cN), s^{-1}]]
            for (int r = 0; r < k; ++r) {
                std::vector<Limb> nbs(w);
                ring_.mul(nbs.data(), &nb[r * w], sinv.data());
                for (int l = 0; l < k; ++l) {
                    ring_.assign(nnew.at(r, l), n_.at(r, l));
                    ring_.mul_add(nnew.at(r, l), nbs.data(), &cn[l * w]);
                }
                ring_.assign(nnew.at(r, k), nbs.data());
                ring_.neg_into(nnew.at(r, k));
            }
            for (int l = 0; l < k; ++l) {
                ring_.mul(nnew.at(k, l), sinv.data(), &cn[l * w]);
                ring_.neg_into(nnew.at(k, l));
            }
            ring_.assign(nnew.at(k, k), sinv.data());
        }
        n_ = std::move(nnew);

        // VM gains the row (M''^{-1})[j, T].
        const IndexSet& tset = inner_.index_set();
        Mat<R> vmn(ring_, k + 1, tset.size());
        for (int r = 0; r < k; ++r)
            for (int t = 0; t < tset.size(); ++t) ring_.assign(vmn.at(r, t), vm_.at(r, t));
        inner_.query_row_T(vmn.at(k, 0), j);
        vm_ = std::move(vmn);

        ui_.push_back(i);
        vj_.push_back(j);
        deltas_.insert(deltas_.end(), delta, delta + w);
        pending_.push_back(make_change(ring_, i, j, delta));
        ++k_;
        if (k_ >= inner_.caps().inner) flush();
    }

    void set_add(int index) {
        inner_.set_add(index);
        rebuild_vm_insert(index);
    }
    void set_remove(int index) {
        int pos = inner_.index_set().rank(index);
        inner_.set_remove(index);
        if (pos >= 0) rebuild_vm_drop(pos);
    }

    /// M^{-1}[i][j] = M''^{-1}[i][j] - u^T N w.
    void query_entry(Limb* out, int i, int j) const {
        inner_.query_entry(out, i, j);
        if (k_ == 0) return;
        const size_t w = ring_.width();
        std::vector<Limb> u(static_cast<size_t>(k_) * w), wv(static_cast<size_t>(k_) * w), e(w);
        fill_u(u.data(), i);
        int jr = inner_.index_set().rank(j);
        for (int l = 0; l < k_; ++l) {
            if (jr >= 0) {
                ring_.assign(&wv[l * w], vm_.at(l, jr));
            } else {
                inner_.query_entry(&wv[l * w], vj_[static_cast<size_t>(l)], j);
            }
        }
        // out -= u^T (N w)
        std::vector<Limb> nw(static_cast<size_t>(k_) * w);
        for (int r = 0; r < k_; ++r)
            for (int l = 0; l < k_; ++l) ring_.mul_add(&nw[r * w], n_.at(r, l), &wv[l * w]);
        for (int r = 0; r < k_; ++r) {
            ring_.mul(e.data(), &u[r * w], &nw[r * w]);
            ring_.sub_into(out, e.data());
        }
    }

    /// M^{-1}[i][T] in sorted-T order.
    void query_row_T(Limb* out, int i) const {
        inner_.query_row_T(out, i);
        if (k_ == 0) return;
        const size_t w = ring_.width();
        const int tsize = inner_.index_set().size();
        std::vector<Limb> u(static_cast<size_t>(k_) * w), un(static_cast<size_t>(k_) * w), e(w);
        fill_u(u.data(), i);
        for (int l = 0; l < k_; ++l)
            for (int r = 0; r < k_; ++r) ring_.mul_add(&un[l * w], &u[r * w], n_.at(r, l));
        for (int t = 0; t < tsize; ++t) {
            for (int l = 0; l < k_; ++l) {
                ring_.mul(e.data(), &un[l * w], vm_.at(l, t));
                ring_.sub_into(out + t * w, e.data());
            }
        }
    }

    /// Push the accumulated entry changes into the batch layer as one batch.
    void flush() {
        if (k_ == 0) return;
        inner_.update(pending_);
        pending_.clear();
        ui_.clear();
        vj_.clear();
        deltas_.clear();
        n_ = Mat<R>();
        vm_ = Mat<R>(ring_, 0, inner_.index_set().size());
        k_ = 0;
        ++flushes_;
    }

private:
    EntryInverse(const R& ring, BatchInverse<R> inner) : ring_(ring), inner_(std::move(inner)) {}

    const Limb* delta_ptr(int l) const { return deltas_.data() + static_cast<size_t>(l) * ring_.width(); }

    // u[l] = delta_l * M''^{-1}[i, i_l]
    void fill_u(Limb* u, int i) const {
        const size_t w = ring_.width();
        std::vector<Limb> e(w);
        for (int l = 0; l < k_; ++l) {
            inner_.query_entry(e.data(), i, ui_[static_cast<size_t>(l)]);
            ring_.mul(u + l * w, e.data(), delta_ptr(l));
        }
    }

    void rebuild_vm_insert(int index) {
        const IndexSet& tset = inner_.index_set();  // already includes `index`
        Mat<R> vmn(ring_, k_, tset.size());
        int newpos = tset.rank(index);
        for (int l = 0; l < k_; ++l) {
            for (int t = 0, o = 0; t < tset.size(); ++t) {
                if (t == newpos) {
                    inner_.query_entry(vmn.at(l, t), vj_[static_cast<size_t>(l)], index);
                } else {
                    ring_.assign(vmn.at(l, t), vm_.at(l, o++));
                }
            }
        }
        vm_ = std::move(vmn);
    }

    void rebuild_vm_drop(int pos) {
        const IndexSet& tset = inner_.index_set();
        Mat<R> vmn(ring_, k_, tset.size());
        for (int l = 0; l < k_; ++l) {
            for (int t = 0, o = 0; t < tset.size() + 1; ++t) {
                if (t == pos) continue;
                ring_.assign(vmn.at(l, o++), vm_.at(l, t));
            }
        }
        vm_ = std::move(vmn);
    }

    R ring_;
    BatchInverse<R> inner_;
    std::vector<int> ui_, vj_;  // sparse U, V: column l is delta_l e_{i_l} / e_{j_l}
    std::vector<Limb> deltas_;
    std::vector<EntryChange<R>> pending_;
    Mat<R> n_;   // (I + V^T M''^{-1} U)^{-1}
    Mat<R> vm_;  // (V^T M''^{-1})[:, T]
    int k_ = 0;
    long flushes_ = 0;
};

// ---------------------------------------------------------------------------
// Submatrix layer.
// ---------------------------------------------------------------------------
template <class R>
class SubmatrixInverse {
public:
    using Limb = typename R::Limb;
    enum class Side { S, T };
    enum class Mode { general, symmetric };

    SubmatrixInverse(const R& ring, const Mat<R>& m, IndexSet s, IndexSet t, InverseCaps caps,
                     Mode mode = Mode::general)
        : SubmatrixInverse(AdoptTag{}, ring, detail::RingInv<R>::inv(ring, m), std::move(s),
                           std::move(t), caps, mode) {}

    /// Adopt a precomputed full inverse.
    static SubmatrixInverse from_inverse(const R& ring, const Mat<R>& minv, IndexSet s, IndexSet t,
                                         InverseCaps caps, Mode mode = Mode::general) {
        return SubmatrixInverse(AdoptTag{}, ring, minv, std::move(s), std::move(t), caps, mode);
    }

    Mode mode() const { return mode_; }
    const IndexSet& s_set() const { return s_; }
    const IndexSet& t_set() const { return t_; }
    /// The maintained block M^{-1}_{S,T}; rows in sorted-S order, columns in
    /// sorted-T order. Valid until the next update.
    const Mat<R>& block() const { return block_; }

    DynInvStats stats() const {
        DynInvStats st = primal_->stats();
        if (trans_) st += trans_->stats();
        return st;
    }

    /// M[i][j] += delta (general mode).
    void entry_update(int i, int j, const Limb* delta) {
        if (mode_ != Mode::general) {
            throw DimensionError("SubmatrixInverse: entry_update requires general mode");
        }
        const size_t w = ring_.width();
        std::vector<Limb> row(static_cast<size_t>(t_.size()) * w);
        std::vector<Limb> col(static_cast<size_t>(s_.size()) * w);
        std::vector<Limb> piv(w), one(w), scale(w), f(w), e(w);
        primal_->query_row_T(row.data(), j);  // M^{-1}[j, T]
        trans_->query_row_T(col.data(), i);   // M^{-1}[S, i]
        primal_->query_entry(piv.data(), j, i);
        ring_.mul(e.data(), piv.data(), delta);
        ring_.set_one(one.data());
        ring_.add_into(e.data(), one.data());  // 1 + delta M^{-1}[j,i]
        if (!ring_.try_inv(piv.data(), e.data())) {
            throw SingularError("SubmatrixInverse: rank-1 pivot is not invertible");
        }
        ring_.mul(scale.data(), piv.data(), delta);
        for (int si = 0; si < s_.size(); ++si) {
            ring_.mul(f.data(), col.data() + si * w, scale.data());
            if (ring_.is_zero(f.data())) continue;
            for (int tj = 0; tj < t_.size(); ++tj) {
                ring_.mul(e.data(), f.data(), row.data() + tj * w);
                ring_.sub_into(block_.at(si, tj), e.data());
            }
        }
        primal_->update(i, j, delta);
        trans_->update(j, i, delta);
    }

    /// Undirected (symmetric) edge update: M[u][v] += delta and M[v][u] +=
    /// delta in one rank-2 step (symmetric mode).
    void sym_edge_update(int u, int v, const Limb* delta) {
        if (mode_ != Mode::symmetric) {
            throw DimensionError("SubmatrixInverse: sym_edge_update requires symmetric mode");
        }
        const size_t w = ring_.width();
        const IndexSet& all = primal_->index_set();
        if (u == v) {
            sym_diag_update(u, delta);
            return;
        }
        std::vector<Limb> ru(static_cast<size_t>(all.size()) * w), rv(ru.size());
        primal_->query_row_T(ru.data(), u);
        primal_->query_row_T(rv.data(), v);
        std::vector<Limb> muu(w), muv(w), mvv(w);
        primal_->query_entry(muu.data(), u, u);
        primal_->query_entry(muv.data(), u, v);
        primal_->query_entry(mvv.data(), v, v);

        // P = I + Vbar^T M^{-1} Ubar for Ubar = [d e_u, d e_v], Vbar = [e_v, e_u];
        // by symmetry M^{-1}[v,u] = M^{-1}[u,v].
        Mat<R> p = Mat<R>::identity(ring_, 2);
        ring_.mul_add(p.at(0, 0), delta, muv.data());
        ring_.mul_add(p.at(0, 1), delta, mvv.data());
        ring_.mul_add(p.at(1, 0), delta, muu.data());
        ring_.mul_add(p.at(1, 1), delta, muv.data());
        Mat<R> pinv = inv2x2(p);

        // X = (M^{-1} Ubar)_{S,*}: X[:,0] = d M^{-1}[S,u], X[:,1] = d M^{-1}[S,v];
        // symmetric, so M^{-1}[s,u] = ru[pos(s)].
        Mat<R> x(ring_, s_.size(), 2);
        for (int si = 0; si < s_.size(); ++si) {
            int pos = all.rank(s_[si]);
            ring_.mul(x.at(si, 0), delta, ru.data() + pos * w);
            ring_.mul(x.at(si, 1), delta, rv.data() + pos * w);
        }
        // Y = (Vbar^T M^{-1})_{*,T}: Y[0,:] = M^{-1}[v,T], Y[1,:] = M^{-1}[u,T].
        Mat<R> y(ring_, 2, t_.size());
        for (int tj = 0; tj < t_.size(); ++tj) {
            int pos = all.rank(t_[tj]);
            ring_.assign(y.at(0, tj), rv.data() + pos * w);
            ring_.assign(y.at(1, tj), ru.data() + pos * w);
        }
        Mat<R> z = mat_mul(ring_, pinv, y);  // 2 x |T|
        std::vector<Limb> e(w);
        for (int si = 0; si < s_.size(); ++si) {
            for (int tj = 0; tj < t_.size(); ++tj) {
                ring_.mul(e.data(), x.at(si, 0), z.at(0, tj));
                ring_.sub_into(block_.at(si, tj), e.data());
                ring_.mul(e.data(), x.at(si, 1), z.at(1, tj));
                ring_.sub_into(block_.at(si, tj), e.data());
            }
        }
        primal_->update(u, v, delta);
        primal_->update(v, u, delta);
    }

    void set_update(Side side, bool add, int index) {
        const size_t w = ring_.width();
        if (mode_ == Mode::general) {
            if (side == Side::T) {
                if (add) {
                    std::vector<Limb> col(static_cast<size_t>(s_.size()) * w);
                    trans_->query_row_T(col.data(), index);  // M^{-1}[S, index]
                    primal_->set_add(index);
                    if (!t_.add(index)) throw SetError("SubmatrixInverse: index already in T");
                    insert_col(t_.rank(index), col.data());
                } else {
                    if (!t_.contains(index)) throw SetError("SubmatrixInverse: index not in T");
                    int r = t_.rank(index);
                    primal_->set_remove(index);
                    t_.remove(index);
                    drop_col(r);
                }
            } else {
                if (add) {
                    std::vector<Limb> row(static_cast<size_t>(t_.size()) * w);
                    primal_->query_row_T(row.data(), index);  // M^{-1}[index, T]
                    trans_->set_add(index);
                    if (!s_.add(index)) throw SetError("SubmatrixInverse: index already in S");
                    insert_row(s_.rank(index), row.data());
                } else {
                    if (!s_.contains(index)) throw SetError("SubmatrixInverse: index not in S");
                    int r = s_.rank(index);
                    trans_->set_remove(index);
                    s_.remove(index);
                    drop_row(r);
                }
            }
            return;
        }
        // Symmetric mode: one copy over S ∪ T with reference counts.
        if (add) {
            IndexSet& own = (side == Side::T) ? t_ : s_;
            if (own.contains(index)) throw SetError("SubmatrixInverse: index already in set");
            ref_add(index);
            const IndexSet& all = primal_->index_set();
            std::vector<Limb> row(static_cast<size_t>(all.size()) * w);
            primal_->query_row_T(row.data(), index);  // M^{-1}[index, S∪T]
            own.add(index);
            if (side == Side::T) {
                std::vector<Limb> col(static_cast<size_t>(s_.size()) * w);
                for (int si = 0; si < s_.size(); ++si)
                    ring_.assign(col.data() + si * w, row.data() + all.rank(s_[si]) * w);
                insert_col(t_.rank(index), col.data());
            } else {
                std::vector<Limb> rv(static_cast<size_t>(t_.size()) * w);
                for (int tj = 0; tj < t_.size(); ++tj)
                    ring_.assign(rv.data() + tj * w, row.data() + all.rank(t_[tj]) * w);
                insert_row(s_.rank(index), rv.data());
            }
        } else {
            IndexSet& own = (side == Side::T) ? t_ : s_;
            if (!own.contains(index)) throw SetError("SubmatrixInverse: index not in set");
            int r = own.rank(index);
            own.remove(index);
            if (side == Side::T) {
                drop_col(r);
            } else {
                drop_row(r);
            }
            ref_remove(index);
        }
    }

private:
    struct AdoptTag {};

    SubmatrixInverse(AdoptTag, const R& ring, const Mat<R>& minv, IndexSet s, IndexSet t,
                     InverseCaps caps, Mode mode)
        : ring_(ring), mode_(mode), s_(std::move(s)), t_(std::move(t)) {
        block_ = mat_submatrix(ring_, minv, s_, t_);
        if (mode_ == Mode::general) {
            primal_ = std::make_unique<EntryInverse<R>>(
                EntryInverse<R>::from_inverse(ring_, minv, t_, caps));
            trans_ = std::make_unique<EntryInverse<R>>(
                EntryInverse<R>::from_inverse(ring_, mat_transpose(ring_, minv), s_, caps));
        } else {
            refcnt_.assign(static_cast<size_t>(minv.rows()), 0);
            IndexSet all = s_;
            for (int idx : t_.items()) all.add(idx);
            for (int idx : s_.items()) ++refcnt_[static_cast<size_t>(idx)];
            for (int idx : t_.items()) ++refcnt_[static_cast<size_t>(idx)];
            primal_ = std::make_unique<EntryInverse<R>>(
                EntryInverse<R>::from_inverse(ring_, minv, all, caps));
        }
    }

    Mat<R> inv2x2(const Mat<R>& p) const {
        const size_t w = ring_.width();
        std::vector<Limb> det(w), t(w), dinv(w);
        ring_.mul(det.data(), p.at(0, 0), p.at(1, 1));
        ring_.mul(t.data(), p.at(0, 1), p.at(1, 0));
        ring_.sub_into(det.data(), t.data());
        if (!ring_.try_inv(dinv.data(), det.data())) {
            throw SingularError("SubmatrixInverse: rank-2 pivot is not invertible");
        }
        Mat<R> r(ring_, 2, 2);
        ring_.mul(r.at(0, 0), p.at(1, 1), dinv.data());
        ring_.mul(r.at(1, 1), p.at(0, 0), dinv.data());
        ring_.mul(r.at(0, 1), p.at(0, 1), dinv.data());
        ring_.neg_into(r.at(0, 1));
        ring_.mul(r.at(1, 0), p.at(1, 0), dinv.data());
        ring_.neg_into(r.at(1, 0));
        return r;
    }

    void sym_diag_update(int u, const Limb* delta) {
        const size_t w = ring_.width();
        const IndexSet& all = primal_->index_set();
        std::vector<Limb> ru(static_cast<size_t>(all.size()) * w);
        primal_->query_row_T(ru.data(), u);
        std::vector<Limb> muu(w), piv(w), one(w), scale(w), e(w), f(w);
        primal_->query_entry(muu.data(), u, u);
        ring_.mul(piv.data(), delta, muu.data());
        ring_.set_one(one.data());
        ring_.add_into(piv.data(), one.data());
        std::vector<Limb> pivinv(w);
        if (!ring_.try_inv(pivinv.data(), piv.data())) {
            throw SingularError("SubmatrixInverse: rank-1 pivot is not invertible");
        }
        ring_.mul(scale.data(), pivinv.data(), delta);
        for (int si = 0; si < s_.size(); ++si) {
            ring_.mul(f.data(), ru.data() + all.rank(s_[si]) * w, scale.data());
            if (ring_.is_zero(f.data())) continue;
            for (int tj = 0; tj < t_.size(); ++tj) {
                ring_.mul(e.data(), f.data(), ru.data() + all.rank(t_[tj]) * w);
                ring_.sub_into(block_.at(si, tj), e.data());
            }
        }
        primal_->update(u, u, delta);
    }

    void ref_add(int index) {
        if (refcnt_[static_cast<size_t>(index)]++ == 0) primal_->set_add(index);
    }
    void ref_remove(int index) {
        if (--refcnt_[static_cast<size_t>(index)] == 0) primal_->set_remove(index);
    }

    void insert_row(int at, const Limb* row) {
        const size_t w = ring_.width();
        Mat<R> nb(ring_, block_.rows() + 1, block_.cols());
        for (int i = 0, o = 0; i < nb.rows(); ++i) {
            if (i == at) {
                for (int j = 0; j < nb.cols(); ++j) ring_.assign(nb.at(i, j), row + j * w);
            } else {
                for (int j = 0; j < nb.cols(); ++j) ring_.assign(nb.at(i, j), block_.at(o, j));
                ++o;
            }
        }
        block_ = std::move(nb);
    }
    void drop_row(int at) {
        Mat<R> nb(ring_, block_.rows() - 1, block_.cols());
        for (int i = 0, o = 0; i < block_.rows(); ++i) {
            if (i == at) continue;
            for (int j = 0; j < block_.cols(); ++j) ring_.assign(nb.at(o, j), block_.at(i, j));
            ++o;
        }
        block_ = std::move(nb);
    }
    void insert_col(int at, const Limb* col) {
        const size_t w = ring_.width();
        Mat<R> nb(ring_, block_.rows(), block_.cols() + 1);
        for (int i = 0; i < nb.rows(); ++i) {
            for (int j = 0, o = 0; j < nb.cols(); ++j) {
                if (j == at) {
                    ring_.assign(nb.at(i, j), col + i * w);
                } else {
                    ring_.assign(nb.at(i, j), block_.at(i, o++));
                }
            }
        }
        block_ = std::move(nb);
    }
    void drop_col(int at) {
        Mat<R> nb(ring_, block_.rows(), block_.cols() - 1);
        for (int i = 0; i < block_.rows(); ++i) {
            for (int j = 0, o = 0; j < block_.cols(); ++j) {
                if (j == at) continue;
                ring_.assign(nb.at(i, o++), block_.at(i, j));
            }
        }
        block_ = std::move(nb);
    }

    R ring_;
    Mode mode_;
    IndexSet s_, t_;
    Mat<R> block_;
    std::unique_ptr<EntryInverse<R>> primal_;  // rows over T (general) or S∪T (symmetric)
    std::unique_ptr<EntryInverse<R>> trans_;   // on M^T, rows over S (general mode only)
    std::vector<int> refcnt_;                  // symmetric mode: S/T multiplicity per index
};

}  // namespace dynshort
