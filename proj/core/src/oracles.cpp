#include "dynshort/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "dynshort/errors.hpp"

namespace dynshort {

int sparse_levels(int n, double eps) {
    const int cap = std::max(2, static_cast<int>(std::ceil(std::log2(std::max(n, 4)))));
    const double log_inv = std::log(1.0 / eps);
    if (log_inv <= 1e-12) return cap;
    const double levels = std::log(static_cast<double>(n)) / log_inv;
    const int k = static_cast<int>(std::ceil(std::sqrt(std::max(0.0, levels / 2.0))));
    return std::min(std::max(k, 2), cap);
}

namespace {

DistanceEstimate combine(Dist channel_value, Dist emu_value) {
    // Ties go to the direct channel, which is exact within its hop bound.
    if (reachable(emu_value) && (!reachable(channel_value) || emu_value < channel_value)) {
        return {emu_value, Channel::emulator};
    }
    return {channel_value, Channel::algebraic};
}

}  // namespace

DistanceOracle::~DistanceOracle() = default;
DistanceOracle::DistanceOracle(DistanceOracle&&) noexcept = default;
DistanceOracle& DistanceOracle::operator=(DistanceOracle&&) noexcept = default;

DistanceOracle DistanceOracle::make_st(DynGraph g, int s, int t, double eps,
                                       OracleOptions opts) {
    return DistanceOracle(std::move(g), OracleKind::st, {s}, t, eps, opts);
}

DistanceOracle DistanceOracle::make_sssp(DynGraph g, int s, double eps, OracleOptions opts) {
    return DistanceOracle(std::move(g), OracleKind::sssp, {s}, -1, eps, opts);
}

DistanceOracle DistanceOracle::make_mssp(DynGraph g, std::vector<int> sources, double eps,
                                         OracleOptions opts) {
    return DistanceOracle(std::move(g), OracleKind::mssp, std::move(sources), -1, eps, opts);
}

DistanceOracle DistanceOracle::make_apsp(DynGraph g, double eps, OracleOptions opts) {
    std::vector<int> all(static_cast<size_t>(g.n()));
    for (int v = 0; v < g.n(); ++v) all[static_cast<size_t>(v)] = v;
    return DistanceOracle(std::move(g), OracleKind::apsp, std::move(all), -1, eps, opts);
}

DistanceOracle::DistanceOracle(DynGraph g, OracleKind kind, std::vector<int> sources, int t,
                               double eps, OracleOptions opts)
    : kind_(kind), t_(t), sources_(std::move(sources)) {
    const int n = g.n();
    if (n <= 0) throw DimensionError("distance oracle: graph must be non-empty");
    if (g.directed()) throw DimensionError("distance oracle: graph must be undirected");
    if (sources_.empty()) throw DimensionError("distance oracle: need at least one source");
    std::set<int> seen;
    for (int s : sources_) {
        if (s < 0 || s >= n) throw DimensionError("distance oracle: source out of range");
        if (!seen.insert(s).second) throw DimensionError("distance oracle: duplicate source");
    }
    if (kind_ == OracleKind::st && (t_ < 0 || t_ >= n)) {
        throw DimensionError("distance oracle: target out of range");
    }

    const double lo = 2.0 / n;
    exact_ = eps < lo;
    eps_ = std::min(std::max(eps, lo), 1.0);

    BoundedDistOptions bopts;
    bopts.field = opts.field;
    bopts.engine = opts.engine;
    bopts.caps = InverseCaps::defaults_for(n);
    bopts.caps.outer = n;

    IndexSet s_set(sources_);
    IndexSet t_set = kind_ == OracleKind::st ? IndexSet(std::vector<int>{t_})
                                             : IndexSet::full(n);

    if (exact_) {
        // Requested eps below 2/n: serve exact distances from a full-depth
        // breadth-first channel and skip the emulator entirely.
        hop_ = std::max(1, n - 1);
        bopts.engine = BoundedDistOptions::Engine::bfs;
        exact_mirror_ = std::make_unique<DynGraph>(g);
        channel_ = make_bounded_distance(n, hop_, false, std::move(s_set), std::move(t_set),
                                         g.edges(), bopts);
        return;
    }

    EmulatorOptions eopts;
    eopts.field = opts.field;
    eopts.eps = eps_ / 2.0;  // halved so the additive term folds into (1+eps)
    switch (kind_) {
        case OracleKind::st:
            hop_ = static_cast<int>(std::ceil(8.0 / eps_)) + 2;
            emulator_ = std::make_unique<Emulator>(std::move(g), EmulatorVariant::e4, eopts);
            break;
        case OracleKind::sssp:
            hop_ = static_cast<int>(std::ceil(4.0 / eps_));
            emulator_ = std::make_unique<Emulator>(std::move(g), EmulatorVariant::e2, eopts);
            break;
        case OracleKind::mssp:
        case OracleKind::apsp:
            eopts.k = sparse_levels(n, eps_);
            eopts.rebuild_every = std::max(1, opts.rebuild_every);
            emulator_ =
                std::make_unique<Emulator>(std::move(g), EmulatorVariant::sparse, eopts);
            // Hop ceil(6*beta/eps), capped at full depth where the channel
            // is exact anyway.
            hop_ = static_cast<int>(std::min<double>(
                std::ceil(6.0 * emulator_->beta() / eps_), std::max(1, n - 1)));
            break;
    }
    channel_ = make_bounded_distance(n, hop_, false, std::move(s_set), std::move(t_set),
                                     emulator_->graph().edges(), bopts);
}

const DynGraph& DistanceOracle::graph() const {
    return exact_ ? *exact_mirror_ : emulator_->graph();
}

void DistanceOracle::update(EdgeOp op, int u, int v) {
    // The structure mutated first validates the edge op; on a throw the
    // remaining channels are untouched.
    if (exact_) {
        if (op == EdgeOp::insert) {
            exact_mirror_->insert_edge(u, v);
        } else {
            exact_mirror_->delete_edge(u, v);
        }
    } else {
        emulator_->update(op, u, v);
    }
    if (op == EdgeOp::insert) {
        channel_->insert_edge(u, v);
    } else {
        channel_->delete_edge(u, v);
    }
}

std::vector<DistanceEstimate> DistanceOracle::combine_row(
    int row, const DistMatrix& channel_dm, const std::vector<Dist>& emu_dist) const {
    const int n = graph().n();
    std::vector<DistanceEstimate> out(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
        Dist ch = channel_dm.at(row, v);
        Dist em = emu_dist.empty() ? kNoPath : emu_dist[static_cast<size_t>(v)];
        out[static_cast<size_t>(v)] = combine(ch, em);
    }
    return out;
}

DistanceEstimate DistanceOracle::st_query() const {
    if (kind_ != OracleKind::st) throw DimensionError("st_query: oracle kind is not st");
    Dist ch = channel_->distances().at(0, 0);
    if (exact_) return {ch, Channel::algebraic};
    auto emu = dijkstra(emulator_->weighted_view(), sources_[0]);
    return combine(ch, emu[static_cast<size_t>(t_)]);
}

std::vector<DistanceEstimate> DistanceOracle::sssp_query() const {
    if (kind_ != OracleKind::sssp) {
        throw DimensionError("sssp_query: oracle kind is not sssp");
    }
    DistMatrix dm = channel_->distances();
    std::vector<Dist> emu;
    if (!exact_) emu = dijkstra(emulator_->weighted_view(), sources_[0]);
    return combine_row(0, dm, emu);
}

std::vector<std::vector<DistanceEstimate>> DistanceOracle::mssp_query() const {
    if (kind_ != OracleKind::mssp && kind_ != OracleKind::apsp) {
        throw DimensionError("mssp_query: oracle kind is not mssp/apsp");
    }
    DistMatrix dm = channel_->distances();
    WeightedGraph view(0);
    if (!exact_) view = emulator_->weighted_view();
    std::vector<std::vector<DistanceEstimate>> out;
    out.reserve(sources_.size());
    for (int s : sources_) {
        std::vector<Dist> emu;
        if (!exact_) emu = dijkstra(view, s);
        out.push_back(combine_row(channel_->sources().rank(s), dm, emu));
    }
    return out;
}

std::vector<std::vector<DistanceEstimate>> DistanceOracle::apsp_query() const {
    if (kind_ != OracleKind::apsp) throw DimensionError("apsp_query: oracle kind is not apsp");
    return mssp_query();
}

}  // namespace dynshort
