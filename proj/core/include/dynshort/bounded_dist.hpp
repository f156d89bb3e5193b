#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dynshort/dyn_inverse.hpp"
#include "dynshort/field.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/matrix.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Hop-bounded dynamic distances: after every edge or set update, the exact
// S x T distance matrix truncated at h hops (entries beyond h are kNoPath).
//
// The algebraic engine maintains (I - X·A)^{-1} over F[X]/<X^{h+1}> with the
// layered dynamic inverse; the reported distance is the smallest k with a
// nonzero coefficient of X^k, which counts walks of length k and is exact as
// long as the field characteristic exceeds the walk count (deterministic
// mode) or no chosen prime divides it (randomized mode, minimum over
// independent copies). A BFS engine recomputes from adjacency instead and is
// the realization of choice once h is large enough that truncated polynomial
// arithmetic loses to plain traversal.
// ---------------------------------------------------------------------------

enum class SetSide { sources, targets };

struct BoundedDistOptions {
    enum class Engine {
        automatic,  // BFS for h > bfs_fallback_hops, algebraic otherwise
        algebraic,
        bfs,
    };

    FieldConfig field = FieldConfig::deterministic();
    /// Non-positive entries = InverseCaps::defaults_for(n).
    InverseCaps caps{0, 0};
    int bfs_fallback_hops = 24;
    Engine engine = Engine::automatic;
};

class BoundedDistance {
public:
    virtual ~BoundedDistance() = default;

    virtual int n() const = 0;
    virtual int hop_bound() const = 0;
    virtual bool directed() const = 0;
    virtual const IndexSet& sources() const = 0;
    virtual const IndexSet& targets() const = 0;

    /// Edge updates; GraphError on duplicate insert / missing delete.
    virtual void insert_edge(int u, int v) = 0;
    virtual void delete_edge(int u, int v) = 0;
    /// Membership updates on S or T; SetError on duplicate add / missing
    /// remove.
    virtual void set_update(SetSide side, bool add, int v) = 0;

    /// Snapshot of the h-bounded S x T distances, rows and columns in
    /// ascending node id. Returned by value so readers never see torn state.
    virtual DistMatrix distances() const = 0;

    /// Engine description for reports (e.g. "fp64", "fp128x21", "bfs").
    virtual std::string backend() const = 0;

    /// Rebuild counters of the underlying inverse (zero for the BFS engine).
    virtual DynInvStats stats() const = 0;
};

/// Build an engine for the given graph; `edges` must be duplicate-free.
std::unique_ptr<BoundedDistance> make_bounded_distance(
    int n, int h, bool directed, IndexSet sources, IndexSet targets,
    const std::vector<std::pair<int, int>>& edges, const BoundedDistOptions& opts = {});

}  // namespace dynshort
