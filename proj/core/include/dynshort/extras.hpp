#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dynshort/bounded_dist.hpp"
#include "dynshort/emulator.hpp"
#include "dynshort/field.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/rng.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Randomized distance estimators built from the same two ingredients as the
// composed oracles -- exact hop-bounded channels and near-additive emulators
// -- plus seeded node sampling:
//
//   ExactStDistance     exact s-t distance: a sampled hitting set H >= {s,t}
//                       whose h-bounded pairwise distances are contracted
//                       into a weighted overlay, answered by Dijkstra,
//   DiameterEstimator   two-sided diameter estimate from a sampled probe
//                       set, the farthest node w it sees, and the sqrt(n)
//                       nodes closest to w,
//   ApspDistanceOracle  (1+eps) point-to-point queries composed from a
//                       short-range channel and center-relay estimates.
//
// All randomness flows from one generator seeded per instance, so a fixed
// seed replays the identical sample sequence. The estimators that resample
// per update (DiameterEstimator, ApspDistanceOracle) do so by default; the
// fixed-sample mode (resample_each_update = false) holds the initial draw,
// which weakens the per-update success guarantee and is meant for adversary
// experiments only. ExactStDistance draws its hitting set once: the set is
// oblivious to the update sequence, and the answer it certifies is exact, so
// nothing about the draw leaks through the answers.
// ---------------------------------------------------------------------------

struct ExactStOptions {
    FieldConfig field = FieldConfig::deterministic();
    std::uint64_t seed = 1;
};

/// Exact s-t distance under edge updates, correct with high probability.
///
/// Construction samples a hitting set H >= {s,t} of ceil(2*(n/h)*ln n) nodes
/// (capped at n) and starts an h-bounded H x H distance channel. Each query
/// contracts the channel's matrix into a weighted overlay on H and runs
/// Dijkstra from s. Whenever every h-hop window of some shortest s-t path
/// contains an H node -- which the sample size guarantees with high
/// probability -- the reported value equals d_G(s,t) exactly. Directed and
/// undirected graphs are both supported.
class ExactStDistance {
public:
    /// Throws DimensionError for h < 1 or s/t out of range.
    ExactStDistance(DynGraph g, int s, int t, int h, ExactStOptions opts = {});
    ~ExactStDistance();
    ExactStDistance(ExactStDistance&&) noexcept;
    ExactStDistance& operator=(ExactStDistance&&) noexcept;

    /// Applies the edge update and returns the fresh query() value.
    /// GraphError (duplicate insert / missing delete) leaves state intact.
    Dist update(EdgeOp op, int u, int v);

    /// Dijkstra over the current contraction; kNoPath when s,t disconnected.
    Dist query() const;

    int source() const { return s_; }
    int target() const { return t_; }
    int hop_bound() const { return h_; }
    std::uint64_t seed() const { return seed_; }
    /// The sampled hitting set, ascending; always contains source and target.
    const std::vector<int>& hitting_nodes() const;
    const DynGraph& graph() const { return graph_; }

private:
    int s_;
    int t_;
    int h_;
    std::uint64_t seed_;
    DynGraph graph_;
    IndexSet hset_;
    std::unique_ptr<BoundedDistance> channel_;
};

struct DiameterOptions {
    /// Accuracy of the two-sided bound; clamped into (0, 1].
    double eps = 0.25;
    /// Levels of the sparse emulator backing the long-range estimates.
    int levels = 2;
    std::uint64_t seed = 1;
    /// Redraw the probe set after every update (the analyzed behaviour).
    bool resample_each_update = true;
    FieldConfig field = FieldConfig::deterministic();
};

/// Maintains an estimate D^ of the diameter D of an undirected unweighted
/// graph with, w.h.p. on every update,
///
///     (2/3 - eps) * D - 1/3  <=  D^  <=  (1 + eps) * D.
///
/// After each update the estimator (1) redraws a probe set S of
/// ceil(2*sqrt(n)*ln n) nodes, (2) forms estimates d^(u,v) as the minimum of
/// an exact hop-bounded channel and Dijkstra over a sparse near-additive
/// emulator at eps/6, (3) picks the node w farthest from S, (4) collects the
/// ceil(sqrt(n)) nodes W closest to w, and (5) reports the largest estimate
/// seen from S u W to all of V. A disconnected graph reports kNoPath
/// (infinite diameter).
class DiameterEstimator {
public:
    /// Throws DimensionError for a directed graph or eps <= 0.
    explicit DiameterEstimator(DynGraph g, DiameterOptions opts = {});
    ~DiameterEstimator();
    DiameterEstimator(DiameterEstimator&&) noexcept;
    DiameterEstimator& operator=(DiameterEstimator&&) noexcept;

    /// Applies the edge update, reruns the probe pass, and returns the fresh
    /// estimate. GraphError leaves state intact.
    Dist update(EdgeOp op, int u, int v);

    /// Latest estimate; kNoPath encodes an infinite diameter.
    Dist estimate() const { return estimate_; }

    double eps() const { return eps_; }
    /// Hop bound of the exact channel: min(ceil(6*beta/eps), n-1).
    int hop_bound() const { return hop_; }
    bool resampling() const { return resample_; }
    std::uint64_t seed() const { return seed_; }
    /// Probe set S of the latest pass, ascending.
    const std::vector<int>& probe_set() const;
    /// Farthest-from-S node w of the latest pass.
    int far_node() const { return far_; }
    /// The ceil(sqrt(n)) nodes closest to w in the latest pass, ascending.
    const std::vector<int>& near_set() const { return near_; }
    const DynGraph& graph() const;
    const Emulator& emulator() const { return *emulator_; }

private:
    void probe_pass();

    double eps_ = 0.25;
    int hop_ = 1;
    bool resample_ = true;
    std::uint64_t seed_ = 1;
    int probe_count_ = 1;
    Rng rng_;
    std::unique_ptr<Emulator> emulator_;
    std::unique_ptr<BoundedDistance> channel_;  // full V x V, exact to hop_
    IndexSet probes_;
    int far_ = -1;
    std::vector<int> near_;
    Dist estimate_ = 0;
};

struct ApspOracleOptions {
    /// Approximation target; clamped into (0, 1].
    double eps = 0.5;
    /// Path-hitting window h; non-positive selects ceil(n^0.2125).
    int window = 0;
    std::uint64_t seed = 1;
    /// Redraw the center set after every update (the analyzed behaviour).
    bool resample_each_update = true;
    FieldConfig field = FieldConfig::deterministic();
};

/// All-pairs (1+eps)-approximate distance queries on an undirected
/// unweighted graph under edge updates.
///
/// Two exact hop-bounded channels and one sparse emulator cooperate:
///   - a short-range channel exact up to h1 = ceil(6*window/eps),
///   - a center channel holding h2-bounded distances from a sampled center
///     set S of ceil(2*(n/window)*ln n) nodes, h2 = ceil(6*beta/eps),
///   - a sparse near-additive emulator H at eps/6 supplying long-range
///     estimates and each node's closest center p(u).
/// A query returns min( d^h1(u,v),
///                      min(d^h2(p(u),u), d_H(p(u),u))
///                    + min(d^h2(p(u),v), d_H(p(u),v)) ),
/// which never undercuts d_G(u,v) and is within (1+eps) of it w.h.p.
/// Disconnected pairs report kNoPath.
class ApspDistanceOracle {
public:
    /// Throws DimensionError for a directed graph or eps <= 0.
    explicit ApspDistanceOracle(DynGraph g, ApspOracleOptions opts = {});
    ~ApspDistanceOracle();
    ApspDistanceOracle(ApspDistanceOracle&&) noexcept;
    ApspDistanceOracle& operator=(ApspDistanceOracle&&) noexcept;

    /// GraphError (duplicate insert / missing delete) leaves state intact.
    void update(EdgeOp op, int u, int v);

    /// Estimate for the pair (u, v); 0 when u == v.
    Dist query(int u, int v) const;

    double eps() const { return eps_; }
    /// The path-hitting window h.
    int window() const { return window_; }
    /// Hop bound of the short-range channel (h1, capped at n-1).
    int hop_short() const { return h1_; }
    /// Hop bound of the center channel (h2, capped at n-1).
    int hop_center() const { return h2_; }
    bool resampling() const { return resample_; }
    std::uint64_t seed() const { return seed_; }
    /// Current center set S, ascending.
    const std::vector<int>& centers() const;
    /// Closest center to u on the emulator (smallest id on ties); -1 when no
    /// center is reachable from u.
    int closest_center(int u) const;
    const DynGraph& graph() const;
    const Emulator& emulator() const { return *emulator_; }

private:
    void resample_centers();
    void ensure_pass() const;
    const std::vector<Dist>& center_row(int c) const;

    double eps_ = 0.5;
    int window_ = 1;
    int h1_ = 1;
    int h2_ = 1;
    bool resample_ = true;
    std::uint64_t seed_ = 1;
    int center_count_ = 1;
    Rng rng_;
    std::unique_ptr<Emulator> emulator_;
    std::unique_ptr<BoundedDistance> short_channel_;   // V x V at h1
    std::unique_ptr<BoundedDistance> center_channel_;  // S x V at h2
    IndexSet centers_;

    // Per-update pass, materialized lazily on first query after a change.
    mutable bool pass_fresh_ = false;
    mutable std::optional<DistMatrix> short_block_;
    mutable std::optional<DistMatrix> center_block_;
    mutable std::optional<WeightedGraph> view_;
    mutable std::vector<Dist> relay_dist_;  // d_H(p(u), u) per node u
    mutable std::vector<int> relay_owner_;  // p(u) per node u, -1 unreachable
    mutable std::map<int, std::vector<Dist>> center_rows_;  // d_H(c, .) memo
};

}  // namespace dynshort
