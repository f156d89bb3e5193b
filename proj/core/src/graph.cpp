#include "dynshort/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace dynshort {

bool DynGraph::has_edge(int u, int v) const {
    const auto& a = adj_[check(u)];
    check(v);
    return std::binary_search(a.begin(), a.end(), v);
}

void DynGraph::add_arc(int u, int v) {
    auto& a = adj_[static_cast<size_t>(u)];
    a.insert(std::lower_bound(a.begin(), a.end(), v), v);
}

void DynGraph::remove_arc(int u, int v) {
    auto& a = adj_[static_cast<size_t>(u)];
    a.erase(std::lower_bound(a.begin(), a.end(), v));
}

void DynGraph::insert_edge(int u, int v) {
    check(u);
    check(v);
    if (u == v) throw GraphError("DynGraph: self-loop");
    if (has_edge(u, v)) throw GraphError("DynGraph: duplicate edge insert");
    add_arc(u, v);
    if (!directed_) add_arc(v, u);
    ++edges_;
}

void DynGraph::delete_edge(int u, int v) {
    check(u);
    check(v);
    if (u == v) throw GraphError("DynGraph: self-loop");
    if (!has_edge(u, v)) throw GraphError("DynGraph: deleting a missing edge");
    remove_arc(u, v);
    if (!directed_) remove_arc(v, u);
    --edges_;
}

std::vector<std::pair<int, int>> DynGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(edges_));
    for (int u = 0; u < n(); ++u) {
        for (int v : adj_[static_cast<size_t>(u)]) {
            if (directed_ || u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

std::vector<Dist> bfs_from(const DynGraph& g, int source, int hop_cap) {
    return bfs_from_set(g, {source}, hop_cap);
}

std::vector<Dist> bfs_from_set(const DynGraph& g, const std::vector<int>& sources, int hop_cap) {
    std::vector<Dist> dist(static_cast<size_t>(g.n()), kNoPath);
    std::deque<int> queue;
    for (int s : sources) {
        if (s < 0 || s >= g.n()) throw GraphError("bfs: source out of range");
        if (dist[static_cast<size_t>(s)] == 0) continue;
        dist[static_cast<size_t>(s)] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        Dist du = dist[static_cast<size_t>(u)];
        if (hop_cap >= 0 && du >= hop_cap) continue;
        for (int v : g.neighbors(u)) {
            auto& dv = dist[static_cast<size_t>(v)];
            if (dv != kNoPath) continue;
            dv = du + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

std::vector<Dist> dijkstra(const WeightedGraph& g, int source) {
    std::vector<Dist> dist(static_cast<size_t>(g.n()), kNoPath);
    using Item = std::pair<Dist, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist[static_cast<size_t>(source)] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[static_cast<size_t>(u)]) continue;
        for (auto [v, w] : g.arcs(u)) {
            Dist nd = d + w;
            auto& dv = dist[static_cast<size_t>(v)];
            if (dv == kNoPath || nd < dv) {
                dv = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

}  // namespace dynshort
