#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynshort/errors.hpp"

namespace dynshort {

// ---------------------------------------------------------------------------
// Graph containers and textbook traversals shared by the distance structures
// and the verification harness. Distances are exact non-negative integers;
// "no path" (or "beyond the hop bound") is the sentinel kNoPath, never a big
// number, so downstream min() compositions cannot overflow.
// ---------------------------------------------------------------------------

using Dist = std::int64_t;

constexpr Dist kNoPath = -1;

/// Update-stream vocabulary shared by the dynamic structures and the harness.
enum class EdgeOp { insert, remove };

inline bool reachable(Dist d) { return d >= 0; }

/// min treating kNoPath as +infinity.
inline Dist min_dist(Dist a, Dist b) {
    if (!reachable(a)) return b;
    if (!reachable(b)) return a;
    return a < b ? a : b;
}

/// Concatenation: kNoPath absorbs.
inline Dist add_dist(Dist a, Dist b) {
    if (!reachable(a) || !reachable(b)) return kNoPath;
    return a + b;
}

/// Dense rectangular distance table (rows x cols of Dist).
class DistMatrix {
public:
    DistMatrix() = default;
    DistMatrix(int rows, int cols, Dist fill = kNoPath)
        : rows_(rows), cols_(cols),
          data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Dist& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    Dist at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    friend bool operator==(const DistMatrix& a, const DistMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Dist> data_;
};

/// Simple dynamic graph over vertices 0..n-1 with sorted adjacency lists.
/// Directed graphs store out-neighbors; undirected graphs mirror each edge.
/// No parallel edges, no self-loops; violations raise GraphError.
class DynGraph {
public:
    DynGraph(int n, bool directed) : directed_(directed), adj_(static_cast<size_t>(n)) {}
    DynGraph(int n, bool directed, const std::vector<std::pair<int, int>>& edges)
        : DynGraph(n, directed) {
        for (auto [u, v] : edges) insert_edge(u, v);
    }

    int n() const { return static_cast<int>(adj_.size()); }
    bool directed() const { return directed_; }
    long edge_count() const { return edges_; }

    bool has_edge(int u, int v) const;
    void insert_edge(int u, int v);
    void delete_edge(int u, int v);

    /// Out-degree (== degree for undirected graphs).
    int degree(int u) const { return static_cast<int>(adj_[check(u)].size()); }
    /// Sorted neighbor ids.
    const std::vector<int>& neighbors(int u) const { return adj_[check(u)]; }
    /// All edges, each once (u < v for undirected).
    std::vector<std::pair<int, int>> edges() const;

private:
    size_t check(int u) const {
        if (u < 0 || u >= n()) throw GraphError("DynGraph: vertex out of range");
        return static_cast<size_t>(u);
    }
    void add_arc(int u, int v);
    void remove_arc(int u, int v);

    bool directed_;
    long edges_ = 0;
    std::vector<std::vector<int>> adj_;
};

/// Hop-capped BFS distances from one source; hop_cap < 0 = unbounded.
std::vector<Dist> bfs_from(const DynGraph& g, int source, int hop_cap = -1);

/// BFS with the whole source set at distance 0.
std::vector<Dist> bfs_from_set(const DynGraph& g, const std::vector<int>& sources,
                               int hop_cap = -1);

/// Weighted graph (adjacency with arc weights) for emulator / contraction
/// distance computations. Arcs are directed; add_edge installs both arcs.
class WeightedGraph {
public:
    explicit WeightedGraph(int n) : adj_(static_cast<size_t>(n)) {}

    int n() const { return static_cast<int>(adj_.size()); }
    void add_arc(int u, int v, Dist w) { adj_[static_cast<size_t>(u)].emplace_back(v, w); }
    void add_edge(int u, int v, Dist w) {
        add_arc(u, v, w);
        add_arc(v, u, w);
    }
    const std::vector<std::pair<int, Dist>>& arcs(int u) const {
        return adj_[static_cast<size_t>(u)];
    }
    long arc_count() const {
        long c = 0;
        for (const auto& a : adj_) c += static_cast<long>(a.size());
        return c;
    }

private:
    std::vector<std::vector<std::pair<int, Dist>>> adj_;
};

/// Dijkstra with a binary heap; weights must be non-negative.
std::vector<Dist> dijkstra(const WeightedGraph& g, int source);

}  // namespace dynshort
