#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynshort/bounded_dist.hpp"
#include "dynshort/field.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/hitting_set.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Dynamic near-additive emulators for unweighted undirected graphs.
//
// An emulator H is a weighted graph (not restricted to subgraph edges) with
//     d_G(u,v) <= d_H(u,v) <= (1+eps) * d_G(u,v) + beta     for all u, v.
// All H-edge weights equal the exact G-distance between their endpoints, so
// H never underestimates. Three variants:
//
//   e2     beta = 2:  light edges (deg <= d, d ~ sqrt(n log n)) at weight 1
//          plus weighted edges from every hitting-set node to every node
//          within hop ceil(2/eps)+1.
//   e4     beta = 4:  light edges (d ~ n^{1/3} sqrt(log n)), unit edges from
//          each heavy node to a hitting-set representative, plus weighted
//          hitting-set x hitting-set edges within hop ceil(4/eps)+2.
//   sparse beta = ceil((3/eps)^k): maintains an inner e4 at eps/3, unfolds
//          its weighted edges into unit paths through auxiliary nodes, and
//          resparsifies statically; distances for original nodes are read
//          off the result (auxiliary nodes are kept, not projected out).
//
// Per update the pipeline runs hitting set -> bounded distances -> edge
// assembly, so the emulator is coherent after every single update.
// ---------------------------------------------------------------------------

enum class EmulatorVariant { e2, e4, sparse };

struct EmulatorOptions {
    double eps = 0.5;
    /// sparse only: resparsification levels (k >= 2).
    int k = 2;
    /// sparse only: rebuild the static stage every this many updates.
    /// 1 (default) matches the per-update contract; larger values trade
    /// freshness for speed and mark the emulator stale between rebuilds.
    int rebuild_every = 1;
    /// Field used by the algebraic bounded-distance channel.
    FieldConfig field = FieldConfig::deterministic();
};

struct WeightedEdge {
    int u;
    int v;
    Dist w;

    friend bool operator==(const WeightedEdge& a, const WeightedEdge& b) {
        return a.u == b.u && a.v == b.v && a.w == b.w;
    }
};

/// Static near-additive emulator of an unweighted graph: a k-level greedy
/// clustering (degree-threshold light edges, hitting-set centers per level,
/// weighted shortcut edges between cluster representatives). Contract:
/// d_G <= d_out <= (1+eps) d_G + (1/eps)^k and size O(n^{1+1/k} log n).
/// Guarantees are proven for k = 2 (eps is clamped to 1/2 internally, which
/// only strengthens the stretch); higher k keeps the ladder structure with
/// audited constants. Graphs with n <= 4 may be returned unchanged.
std::vector<WeightedEdge> static_near_additive(const DynGraph& g, double eps, int k);

class Emulator {
public:
    Emulator(DynGraph g, EmulatorVariant variant, EmulatorOptions opts = {});
    ~Emulator();
    Emulator(Emulator&&) noexcept;
    Emulator& operator=(Emulator&&) noexcept;

    void update(EdgeOp op, int u, int v);

    const DynGraph& graph() const;
    EmulatorVariant variant() const { return variant_; }
    double eps() const { return eps_; }
    /// Degree threshold separating light from heavy nodes.
    int degree_threshold() const { return d_; }
    /// Hop bound of the weighted (bounded-distance) channel.
    int hop_bound() const { return hop_; }
    /// Additive stretch term beta of this variant.
    int beta() const { return beta_; }
    /// Node count of the emulator: n, plus unfolding auxiliaries for sparse.
    int node_count() const;
    /// sparse with rebuild_every > 1: true if updates arrived since the
    /// last static rebuild.
    bool stale() const;

    /// Current emulator edges, each once with u < v.
    std::vector<WeightedEdge> edges() const;
    /// The emulator as an adjacency structure over node_count() nodes.
    WeightedGraph weighted_view() const;
    /// One "u, v, weight" line per edge, for offline auditing.
    std::string dump() const;

    const HittingSet& hitting_set() const;

private:
    void rebuild_weighted();
    void rebuild_reps();
    void rebuild_sparse();
    void seed_light_edges();

    EmulatorVariant variant_;
    double eps_;
    int d_ = 0;
    int hop_ = 0;
    int beta_ = 0;
    int k_ = 0;
    int rebuild_every_ = 1;
    int since_rebuild_ = 0;
    bool stale_ = false;

    // e2 / e4 machinery (unused for sparse, which delegates to inner_).
    std::unique_ptr<HittingSet> hs_;
    std::set<int> a_set_;
    std::unique_ptr<BoundedDistance> bounded_;
    std::set<std::pair<int, int>> light_;            // edges with a light endpoint
    std::map<std::pair<int, int>, Dist> weighted_;   // hitting-set shortcut edges
    std::map<std::pair<int, int>, Dist> reps_;       // heavy -> representative (e4)

    // sparse machinery.
    std::unique_ptr<Emulator> inner_;                // e4 at eps/3
    std::vector<WeightedEdge> sparse_edges_;         // last static rebuild
    int sparse_nodes_ = 0;                           // n + auxiliaries
};

}  // namespace dynshort
