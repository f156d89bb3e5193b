#include "dynshort/extras.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>
#include <utility>

#include "dynshort/errors.hpp"
#include "dynshort/oracles.hpp"

namespace dynshort {

namespace {

// `count` distinct nodes of [0, n) by partial Fisher-Yates; ascending.
std::vector<int> sample_distinct(Rng& rng, int n, int count) {
    std::vector<int> pool(static_cast<size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const int m = std::min(count, n);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    pool.resize(static_cast<size_t>(m));
    std::sort(pool.begin(), pool.end());
    return pool;
}

// ceil(scale * ln n) sample size, clamped into [1, n].
int sample_size(double scale, int n) {
    const double raw = std::ceil(scale * std::log(static_cast<double>(std::max(n, 2))));
    const int count = n >= 2 ? static_cast<int>(raw) : 1;
    return std::min(n, std::max(1, count));
}

double clamp_eps(double eps) {
    if (eps <= 0.0) throw DimensionError("estimator accuracy must be positive");
    return std::min(eps, 1.0);
}

void apply_edge(DynGraph& g, EdgeOp op, int u, int v) {
    if (op == EdgeOp::insert) {
        g.insert_edge(u, v);
    } else {
        g.delete_edge(u, v);
    }
}

void apply_edge(BoundedDistance& ch, EdgeOp op, int u, int v) {
    if (op == EdgeOp::insert) {
        ch.insert_edge(u, v);
    } else {
        ch.delete_edge(u, v);
    }
}

// Shared channel setup: exact distances up to `hop` with set caps wide
// enough for source/target sets as large as V.
BoundedDistOptions channel_options(int n, FieldConfig field) {
    BoundedDistOptions bopts;
    bopts.field = field;
    bopts.caps = InverseCaps::defaults_for(n);
    bopts.caps.outer = n;
    return bopts;
}

int capped_hop(double raw, int n) {
    const double capped = std::min(raw, static_cast<double>(std::max(1, n - 1)));
    return std::max(1, static_cast<int>(std::ceil(capped)));
}

// Dijkstra started from every center at once on the emulator view. dist[v]
// is min_c d(c, v); owner[v] is the closest center, smallest id on ties,
// -1 when no center reaches v.
void relay_from_centers(const WeightedGraph& g, const std::vector<int>& centers,
                        std::vector<Dist>& dist, std::vector<int>& owner) {
    dist.assign(static_cast<size_t>(g.n()), kNoPath);
    owner.assign(static_cast<size_t>(g.n()), -1);
    using Item = std::tuple<Dist, int, int>;  // (distance, owner, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int c : centers) {
        dist[static_cast<size_t>(c)] = 0;
        owner[static_cast<size_t>(c)] = c;
        heap.emplace(0, c, c);
    }
    while (!heap.empty()) {
        auto [d, own, u] = heap.top();
        heap.pop();
        if (d != dist[static_cast<size_t>(u)] || own != owner[static_cast<size_t>(u)]) continue;
        for (auto [v, w] : g.arcs(u)) {
            const Dist nd = d + w;
            auto& dv = dist[static_cast<size_t>(v)];
            auto& ov = owner[static_cast<size_t>(v)];
            if (!reachable(dv) || nd < dv || (nd == dv && own < ov)) {
                dv = nd;
                ov = own;
                heap.emplace(nd, own, v);
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------- exact s-t

ExactStDistance::~ExactStDistance() = default;
ExactStDistance::ExactStDistance(ExactStDistance&&) noexcept = default;
ExactStDistance& ExactStDistance::operator=(ExactStDistance&&) noexcept = default;

ExactStDistance::ExactStDistance(DynGraph g, int s, int t, int h, ExactStOptions opts)
    : s_(s), t_(t), h_(h), seed_(opts.seed), graph_(std::move(g)) {
    const int n = graph_.n();
    if (s < 0 || s >= n || t < 0 || t >= n) {
        throw DimensionError("exact s-t distance: endpoint out of range");
    }
    if (h < 1) throw DimensionError("exact s-t distance: hop window must be >= 1");

    Rng rng(seed_);
    std::vector<int> nodes =
        sample_distinct(rng, n, sample_size(2.0 * n / static_cast<double>(h), n));
    nodes.push_back(s);
    nodes.push_back(t);
    hset_ = IndexSet(std::move(nodes));  // sorts and drops duplicates

    channel_ = make_bounded_distance(n, h_, graph_.directed(), hset_, hset_, graph_.edges(),
                                     channel_options(n, opts.field));
}

const std::vector<int>& ExactStDistance::hitting_nodes() const { return hset_.items(); }

Dist ExactStDistance::update(EdgeOp op, int u, int v) {
    apply_edge(graph_, op, u, v);  // validates; GraphError leaves all state intact
    apply_edge(*channel_, op, u, v);
    return query();
}

Dist ExactStDistance::query() const {
    const DistMatrix dm = channel_->distances();
    const int m = hset_.size();
    WeightedGraph overlay(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const Dist d = dm.at(i, j);
            if (reachable(d) && d > 0) overlay.add_arc(i, j, d);
        }
    }
    const std::vector<Dist> dist = dijkstra(overlay, hset_.rank(s_));
    return dist[static_cast<size_t>(hset_.rank(t_))];
}

// ---------------------------------------------------------------- diameter

DiameterEstimator::~DiameterEstimator() = default;
DiameterEstimator::DiameterEstimator(DiameterEstimator&&) noexcept = default;
DiameterEstimator& DiameterEstimator::operator=(DiameterEstimator&&) noexcept = default;

DiameterEstimator::DiameterEstimator(DynGraph g, DiameterOptions opts)
    : eps_(clamp_eps(opts.eps)),
      resample_(opts.resample_each_update),
      seed_(opts.seed),
      rng_(opts.seed) {
    if (g.directed()) throw DimensionError("diameter estimation expects an undirected graph");
    const int n = g.n();
    probe_count_ = sample_size(2.0 * std::sqrt(static_cast<double>(n)), n);

    EmulatorOptions eopts;
    eopts.eps = eps_ / 6.0;
    eopts.k = opts.levels;
    eopts.field = opts.field;
    emulator_ = std::make_unique<Emulator>(g, EmulatorVariant::sparse, eopts);

    hop_ = capped_hop(std::ceil(6.0 * emulator_->beta() / eps_), n);
    channel_ = make_bounded_distance(n, hop_, false, IndexSet::full(n), IndexSet::full(n),
                                     g.edges(), channel_options(n, opts.field));

    probes_ = IndexSet(sample_distinct(rng_, n, probe_count_));
    probe_pass();
}

const DynGraph& DiameterEstimator::graph() const { return emulator_->graph(); }

const std::vector<int>& DiameterEstimator::probe_set() const { return probes_.items(); }

Dist DiameterEstimator::update(EdgeOp op, int u, int v) {
    emulator_->update(op, u, v);  // validates; GraphError leaves all state intact
    apply_edge(*channel_, op, u, v);
    if (resample_) probes_ = IndexSet(sample_distinct(rng_, graph().n(), probe_count_));
    probe_pass();
    return estimate_;
}

void DiameterEstimator::probe_pass() {
    const int n = graph().n();
    const DistMatrix block = channel_->distances();
    const WeightedGraph view = emulator_->weighted_view();
    std::map<int, std::vector<Dist>> rows;
    const auto emu_row = [&](int u) -> const std::vector<Dist>& {
        auto it = rows.find(u);
        if (it == rows.end()) it = rows.emplace(u, dijkstra(view, u)).first;
        return it->second;
    };
    const auto estimate_from = [&](int u, int v) {
        return min_dist(block.at(u, v), emu_row(u)[static_cast<size_t>(v)]);
    };

    // Farthest node from the probe set: maximize min_{s in S} d^(s, u),
    // kNoPath counting as +infinity; ties go to the smallest id.
    const auto farther = [](Dist a, Dist b) {  // a strictly farther than b
        if (!reachable(a)) return reachable(b);
        return reachable(b) && a > b;
    };
    far_ = 0;
    Dist far_radius = kNoPath;
    for (int s : probes_.items()) far_radius = min_dist(far_radius, estimate_from(s, 0));
    for (int u = 1; u < n; ++u) {
        Dist radius = kNoPath;
        for (int s : probes_.items()) radius = min_dist(radius, estimate_from(s, u));
        if (farther(radius, far_radius)) {
            far_ = u;
            far_radius = radius;
        }
    }

    // The ceil(sqrt(n)) nodes closest to w, by (estimate, id).
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const std::vector<Dist>& wrow = emu_row(far_);
    std::vector<Dist> to_w(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
        to_w[static_cast<size_t>(v)] = min_dist(block.at(far_, v), wrow[static_cast<size_t>(v)]);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Dist da = to_w[static_cast<size_t>(a)];
        const Dist db = to_w[static_cast<size_t>(b)];
        if (reachable(da) != reachable(db)) return reachable(da);
        if (da != db) return da < db;
        return a < b;
    });
    const int near_count = std::min(
        n, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(std::max(n, 1))))));
    near_.assign(order.begin(), order.begin() + near_count);
    std::sort(near_.begin(), near_.end());

    // Largest estimate from (S u W) x V; any unreachable pair means the
    // diameter is infinite.
    std::vector<int> anchors = probes_.items();
    anchors.insert(anchors.end(), near_.begin(), near_.end());
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
    Dist best = 0;
    for (int u : anchors) {
        for (int v = 0; v < n; ++v) {
            const Dist d = estimate_from(u, v);
            if (!reachable(d)) {
                estimate_ = kNoPath;
                return;
            }
            best = std::max(best, d);
        }
    }
    estimate_ = best;
}

// ---------------------------------------------------------------- apsp

ApspDistanceOracle::~ApspDistanceOracle() = default;
ApspDistanceOracle::ApspDistanceOracle(ApspDistanceOracle&&) noexcept = default;
ApspDistanceOracle& ApspDistanceOracle::operator=(ApspDistanceOracle&&) noexcept = default;

ApspDistanceOracle::ApspDistanceOracle(DynGraph g, ApspOracleOptions opts)
    : eps_(clamp_eps(opts.eps)),
      resample_(opts.resample_each_update),
      seed_(opts.seed),
      rng_(opts.seed) {
    if (g.directed()) throw DimensionError("all-pairs oracle expects an undirected graph");
    const int n = g.n();
    window_ = opts.window > 0
                  ? opts.window
                  : std::max(1, static_cast<int>(std::ceil(
                                    std::pow(static_cast<double>(std::max(n, 2)), 0.2125))));
    center_count_ = sample_size(2.0 * n / static_cast<double>(window_), n);

    EmulatorOptions eopts;
    eopts.eps = eps_ / 6.0;
    eopts.k = sparse_levels(n, eps_);
    eopts.field = opts.field;
    emulator_ = std::make_unique<Emulator>(g, EmulatorVariant::sparse, eopts);

    h1_ = capped_hop(std::ceil(6.0 * window_ / eps_), n);
    h2_ = capped_hop(std::ceil(6.0 * emulator_->beta() / eps_), n);

    short_channel_ = make_bounded_distance(n, h1_, false, IndexSet::full(n), IndexSet::full(n),
                                           g.edges(), channel_options(n, opts.field));
    centers_ = IndexSet(sample_distinct(rng_, n, center_count_));
    center_channel_ = make_bounded_distance(n, h2_, false, centers_, IndexSet::full(n),
                                            g.edges(), channel_options(n, opts.field));
}

const DynGraph& ApspDistanceOracle::graph() const { return emulator_->graph(); }

const std::vector<int>& ApspDistanceOracle::centers() const { return centers_.items(); }

void ApspDistanceOracle::update(EdgeOp op, int u, int v) {
    emulator_->update(op, u, v);  // validates; GraphError leaves all state intact
    apply_edge(*short_channel_, op, u, v);
    apply_edge(*center_channel_, op, u, v);
    if (resample_) resample_centers();
    pass_fresh_ = false;
}

void ApspDistanceOracle::resample_centers() {
    const IndexSet fresh(sample_distinct(rng_, graph().n(), center_count_));
    // Removals first so the set never exceeds its cap.
    for (int c : centers_.items()) {
        if (!fresh.contains(c)) center_channel_->set_update(SetSide::sources, false, c);
    }
    for (int c : fresh.items()) {
        if (!centers_.contains(c)) center_channel_->set_update(SetSide::sources, true, c);
    }
    centers_ = fresh;
}

void ApspDistanceOracle::ensure_pass() const {
    if (pass_fresh_) return;
    short_block_ = short_channel_->distances();
    center_block_ = center_channel_->distances();
    view_ = emulator_->weighted_view();
    relay_from_centers(*view_, centers_.items(), relay_dist_, relay_owner_);
    center_rows_.clear();
    pass_fresh_ = true;
}

const std::vector<Dist>& ApspDistanceOracle::center_row(int c) const {
    auto it = center_rows_.find(c);
    if (it == center_rows_.end()) it = center_rows_.emplace(c, dijkstra(*view_, c)).first;
    return it->second;
}

int ApspDistanceOracle::closest_center(int u) const {
    const int n = graph().n();
    if (u < 0 || u >= n) throw DimensionError("all-pairs oracle: node out of range");
    ensure_pass();
    return relay_owner_[static_cast<size_t>(u)];
}

Dist ApspDistanceOracle::query(int u, int v) const {
    const int n = graph().n();
    if (u < 0 || u >= n || v < 0 || v >= n) {
        throw DimensionError("all-pairs oracle: node out of range");
    }
    if (u == v) return 0;
    ensure_pass();
    const Dist direct = short_block_->at(u, v);
    const int p = relay_owner_[static_cast<size_t>(u)];
    if (p < 0) return direct;
    const int pr = centers_.rank(p);
    const Dist leg_u = min_dist(center_block_->at(pr, u), relay_dist_[static_cast<size_t>(u)]);
    const Dist leg_v = min_dist(center_block_->at(pr, v), center_row(p)[static_cast<size_t>(v)]);
    return min_dist(direct, add_dist(leg_u, leg_v));
}

}  // namespace dynshort
