#include "dynshort/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynshort/errors.hpp"

namespace dynshort {

namespace {

std::pair<int, int> key(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

void min_merge(std::map<std::pair<int, int>, Dist>& acc, int u, int v, Dist w) {
    if (u == v) return;
    auto [it, fresh] = acc.try_emplace(key(u, v), w);
    if (!fresh && w < it->second) it->second = w;
}

// Smallest integer q >= 1 with q^k >= n (integer-exact n^{1/k} ceiling).
int root_ceil(int n, int k) {
    for (int q = 1;; ++q) {
        long long p = 1;
        for (int i = 0; i < k && p < n; ++i) p *= q;
        if (p >= n) return q;
    }
}

}  // namespace

std::vector<WeightedEdge> static_near_additive(const DynGraph& g, double eps, int k) {
    if (eps <= 0.0) throw DimensionError("near-additive emulator: eps must be positive");
    const int n = g.n();
    std::map<std::pair<int, int>, Dist> acc;
    auto to_vector = [&acc] {
        std::vector<WeightedEdge> out;
        out.reserve(acc.size());
        for (const auto& [uv, w] : acc) out.push_back({uv.first, uv.second, w});
        return out;
    };

    if (n <= 4) {
        for (const auto& [u, v] : g.edges()) min_merge(acc, u, v, 1);
        return to_vector();
    }
    if (k < 2) k = 2;
    // The level analysis assumes eps <= 1/2; clamping only strengthens the
    // stretch and never hurts the size bound.
    const double e = std::min(eps, 0.5);
    const int d1 = root_ceil(n, k);

    // Level 1: all edges of light nodes, one unit edge from each heavy node
    // to its smallest-id hitting-set neighbor.
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) > d1) continue;
        for (int x : g.neighbors(v)) min_merge(acc, v, x, 1);
    }
    std::vector<int> centers = static_greedy_hitting_set(g, d1);
    std::vector<char> is_center(static_cast<size_t>(n), 0);
    for (int c : centers) is_center[static_cast<size_t>(c)] = 1;
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) < d1) continue;
        const auto& nb = g.neighbors(v);
        int rep = -1;
        int window = std::min<int>(d1, static_cast<int>(nb.size()));
        for (int i = 0; i < window && rep < 0; ++i) {
            if (is_center[static_cast<size_t>(nb[static_cast<size_t>(i)])]) {
                rep = nb[static_cast<size_t>(i)];
            }
        }
        for (size_t i = 0; rep < 0 && i < nb.size(); ++i) {
            if (is_center[nb[i]]) rep = nb[i];
        }
        if (rep >= 0) min_merge(acc, v, rep, 1);
    }

    // Levels 2..k: interconnect sparse neighborhoods, promote crowded ones
    // through a greedy hitting set over center balls; hop radii grow
    // geometrically so every promotion stays reachable.
    int r = 1;  // worst distance from a covered node to its current center
    for (int lvl = 2; lvl <= k && !centers.empty(); ++lvl) {
        const int h = static_cast<int>(std::ceil(std::pow(2.0, lvl) / e)) + 2 * r;
        if (lvl == k) {
            for (int c : centers) {
                auto dist = bfs_from(g, c, h);
                for (int b : centers) {
                    if (b != c && reachable(dist[static_cast<size_t>(b)])) {
                        min_merge(acc, c, b, dist[static_cast<size_t>(b)]);
                    }
                }
            }
            break;
        }
        const long s = d1;  // crowdedness threshold
        std::vector<std::vector<std::pair<int, Dist>>> balls(centers.size());
        std::fill(is_center.begin(), is_center.end(), 0);
        for (int c : centers) is_center[static_cast<size_t>(c)] = 1;
        for (size_t i = 0; i < centers.size(); ++i) {
            auto dist = bfs_from(g, centers[i], h);
            for (int b : centers) {
                Dist db = dist[static_cast<size_t>(b)];
                if (b != centers[i] && reachable(db)) balls[i].push_back({b, db});
            }
        }
        detail::GreedyCover cover(n);
        std::vector<size_t> crowded;
        for (size_t i = 0; i < centers.size(); ++i) {
            if (static_cast<long>(balls[i].size()) >= s) {
                std::vector<int> members;
                members.reserve(balls[i].size());
                for (const auto& [b, w] : balls[i]) members.push_back(b);
                cover.add_set(std::move(members));
                crowded.push_back(i);
            }
        }
        cover.finish();
        std::vector<int> promoted = cover.picks();
        std::sort(promoted.begin(), promoted.end());
        std::vector<char> in_q(static_cast<size_t>(n), 0);
        for (int q : promoted) in_q[static_cast<size_t>(q)] = 1;
        size_t ci = 0;
        for (size_t i = 0; i < centers.size(); ++i) {
            bool is_crowded = ci < crowded.size() && crowded[ci] == i;
            if (is_crowded) ++ci;
            if (is_crowded && in_q[static_cast<size_t>(centers[i])]) continue;
            if (is_crowded) {
                for (const auto& [b, w] : balls[i]) {  // one edge to a promoted rep
                    if (in_q[static_cast<size_t>(b)]) {
                        min_merge(acc, centers[i], b, w);
                        break;
                    }
                }
            } else {
                for (const auto& [b, w] : balls[i]) min_merge(acc, centers[i], b, w);
            }
        }
        centers = std::move(promoted);
        r += h;
    }
    return to_vector();
}

Emulator::~Emulator() = default;
Emulator::Emulator(Emulator&&) noexcept = default;
Emulator& Emulator::operator=(Emulator&&) noexcept = default;

Emulator::Emulator(DynGraph g, EmulatorVariant variant, EmulatorOptions opts)
    : variant_(variant), eps_(opts.eps) {
    if (g.directed()) throw DimensionError("emulators require an undirected graph");
    if (eps_ <= 0.0 || eps_ > 1.0) {
        throw DimensionError("emulator: eps must be in (0, 1]");
    }
    const int n = g.n();
    if (variant_ == EmulatorVariant::sparse) {
        k_ = std::max(2, opts.k);
        rebuild_every_ = std::max(1, opts.rebuild_every);
        // The additive term is purely nominal once it dwarfs any n this
        // build handles; cap it so the double -> int cast can never leave
        // the representable range.
        beta_ = static_cast<int>(std::min(std::ceil(std::pow(3.0 / eps_, k_)), 1.0e9));
        EmulatorOptions inner_opts = opts;
        inner_opts.eps = eps_ / 3.0;
        inner_ = std::make_unique<Emulator>(std::move(g), EmulatorVariant::e4, inner_opts);
        d_ = inner_->degree_threshold();
        hop_ = inner_->hop_bound();
        rebuild_sparse();
        return;
    }

    if (variant_ == EmulatorVariant::e2) {
        d_ = std::max(1, static_cast<int>(std::ceil(std::sqrt(n * std::log(std::max(n, 2))))));
        hop_ = static_cast<int>(std::ceil(2.0 / eps_)) + 1;
        beta_ = 2;
    } else {
        d_ = std::max(1, static_cast<int>(std::ceil(
                             std::cbrt(n) * std::sqrt(std::log(std::max(n, 2))))));
        hop_ = static_cast<int>(std::ceil(4.0 / eps_)) + 2;
        beta_ = 4;
    }
    hs_ = std::make_unique<HittingSet>(std::move(g), d_);
    a_set_ = hs_->members();
    const DynGraph& cur = hs_->graph();
    IndexSet sources(std::vector<int>(a_set_.begin(), a_set_.end()));
    IndexSet targets = variant_ == EmulatorVariant::e2 ? IndexSet::full(n) : sources;
    BoundedDistOptions bopts;
    bopts.field = opts.field;
    bopts.caps = InverseCaps::defaults_for(n);
    bopts.caps.outer = n;  // hitting sets (and V itself) may exceed the default cap
    bounded_ = make_bounded_distance(n, hop_, /*directed=*/false, std::move(sources),
                                     std::move(targets), cur.edges(), bopts);
    seed_light_edges();
    rebuild_reps();
    rebuild_weighted();
}

const DynGraph& Emulator::graph() const {
    return variant_ == EmulatorVariant::sparse ? inner_->graph() : hs_->graph();
}

const HittingSet& Emulator::hitting_set() const {
    return variant_ == EmulatorVariant::sparse ? inner_->hitting_set() : *hs_;
}

int Emulator::node_count() const {
    if (variant_ == EmulatorVariant::sparse) {
        return std::max(sparse_nodes_, inner_->graph().n());
    }
    return hs_->graph().n();
}

bool Emulator::stale() const { return variant_ == EmulatorVariant::sparse && stale_; }

void Emulator::seed_light_edges() {
    const DynGraph& g = hs_->graph();
    for (const auto& [u, v] : g.edges()) {
        if (g.degree(u) <= d_ || g.degree(v) <= d_) light_.insert(key(u, v));
    }
}

void Emulator::update(EdgeOp op, int u, int v) {
    if (variant_ == EmulatorVariant::sparse) {
        inner_->update(op, u, v);
        if (++since_rebuild_ >= rebuild_every_) {
            rebuild_sparse();
        } else {
            stale_ = true;
        }
        return;
    }

    // Pipeline order: hitting set (mutates the graph), then the bounded
    // distance channel, then edge assembly.
    auto changes = hs_->update(op, u, v);
    if (op == EdgeOp::insert) {
        bounded_->insert_edge(u, v);
    } else {
        bounded_->delete_edge(u, v);
    }
    for (const auto& c : changes) {
        if (c.add) {
            a_set_.insert(c.node);
        } else {
            a_set_.erase(c.node);
        }
        bounded_->set_update(SetSide::sources, c.add, c.node);
        if (variant_ == EmulatorVariant::e4) {
            bounded_->set_update(SetSide::targets, c.add, c.node);
        }
    }

    // Light edges change only for endpoints whose degree crossed d.
    const DynGraph& g = hs_->graph();
    if (op == EdgeOp::insert) {
        for (int w : {u, v}) {
            if (g.degree(w) != d_ + 1) continue;  // w just became heavy
            for (int x : g.neighbors(w)) {
                if (g.degree(x) > d_) light_.erase(key(w, x));
            }
        }
        if (g.degree(u) <= d_ || g.degree(v) <= d_) light_.insert(key(u, v));
    } else {
        light_.erase(key(u, v));
        for (int w : {u, v}) {
            if (g.degree(w) != d_) continue;  // w just became light
            for (int x : g.neighbors(w)) light_.insert(key(w, x));
        }
    }

    rebuild_reps();
    rebuild_weighted();
}

void Emulator::rebuild_reps() {
    reps_.clear();
    if (variant_ != EmulatorVariant::e4) return;
    const DynGraph& g = hs_->graph();
    for (int v = 0; v < g.n(); ++v) {
        if (g.degree(v) < d_) continue;
        for (int w : g.neighbors(v)) {  // smallest-id hitting-set neighbor
            if (a_set_.count(w) > 0) {
                reps_[key(v, w)] = 1;
                break;
            }
        }
    }
}

void Emulator::rebuild_weighted() {
    weighted_.clear();
    if (a_set_.empty()) return;
    const std::vector<int> rows(a_set_.begin(), a_set_.end());
    DistMatrix dm = bounded_->distances();
    for (size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < dm.cols(); ++j) {
            Dist dist = dm.at(static_cast<int>(i), j);
            int b = variant_ == EmulatorVariant::e2 ? j : rows[static_cast<size_t>(j)];
            if (dist >= 1 && rows[i] != b) min_merge(weighted_, rows[i], b, dist);
        }
    }
}

void Emulator::rebuild_sparse() {
    const int n = inner_->graph().n();
    auto base = inner_->edges();
    long aux = 0;
    for (const auto& e : base) aux += std::max<Dist>(e.w - 1, 0);
    const int total = n + static_cast<int>(aux);
    std::vector<std::pair<int, int>> unit;
    int next = n;
    for (const auto& e : base) {
        if (e.w <= 1) {
            unit.push_back({e.u, e.v});
            continue;
        }
        int prev = e.u;
        for (Dist step = 1; step < e.w; ++step) {  // fresh auxiliary chain
            unit.push_back({prev, next});
            prev = next++;
        }
        unit.push_back({prev, e.v});
    }
    DynGraph unfolded(total, /*directed=*/false, unit);
    sparse_edges_ = static_near_additive(unfolded, eps_ / 3.0, k_);
    sparse_nodes_ = total;
    since_rebuild_ = 0;
    stale_ = false;
}

std::vector<WeightedEdge> Emulator::edges() const {
    if (variant_ == EmulatorVariant::sparse) return sparse_edges_;
    std::map<std::pair<int, int>, Dist> acc = weighted_;
    for (const auto& uv : light_) min_merge(acc, uv.first, uv.second, 1);
    for (const auto& [uv, w] : reps_) min_merge(acc, uv.first, uv.second, w);
    std::vector<WeightedEdge> out;
    out.reserve(acc.size());
    for (const auto& [uv, w] : acc) out.push_back({uv.first, uv.second, w});
    return out;
}

WeightedGraph Emulator::weighted_view() const {
    WeightedGraph h(node_count());
    for (const auto& e : edges()) h.add_edge(e.u, e.v, e.w);
    return h;
}

std::string Emulator::dump() const {
    std::ostringstream out;
    for (const auto& e : edges()) out << e.u << ", " << e.v << ", " << e.w << "\n";
    return out.str();
}

}  // namespace dynshort
