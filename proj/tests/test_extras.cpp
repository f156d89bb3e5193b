#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "dynshort/emulator.hpp"
#include "dynshort/errors.hpp"
#include "dynshort/extras.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/rng.hpp"
#include "reference.hpp"

namespace ref = refimpl;

using dynshort::ApspDistanceOracle;
using dynshort::ApspOracleOptions;
using dynshort::DiameterEstimator;
using dynshort::DiameterOptions;
using dynshort::DimensionError;
using dynshort::Dist;
using dynshort::DynGraph;
using dynshort::EdgeOp;
using dynshort::ExactStDistance;
using dynshort::ExactStOptions;
using dynshort::GraphError;
using dynshort::kNoPath;
using dynshort::Rng;

namespace {

ref::EdgeList random_edges(int n, double p, Rng& rng) {
    ref::EdgeList edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.chance(p)) edges.emplace_back(u, v);
        }
    }
    return edges;
}

ref::EdgeList path_edges(int n) {
    ref::EdgeList edges;
    for (int u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
    return edges;
}

ref::EdgeList clique_edges(int n, int offset = 0) {
    ref::EdgeList edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) edges.emplace_back(u + offset, v + offset);
    }
    return edges;
}

// Toggle a uniformly random pair: insert when absent, delete when present.
// Mutates `edges` (the reference mirror) and returns the operation applied.
std::tuple<EdgeOp, int, int> toggle_step(int n, ref::EdgeList& edges, Rng& rng) {
    const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (v >= u) ++v;
    const auto key = std::minmax(u, v);
    auto it = std::find(edges.begin(), edges.end(),
                        std::make_pair(key.first, key.second));
    if (it == edges.end()) {
        edges.emplace_back(key.first, key.second);
        return {EdgeOp::insert, key.first, key.second};
    }
    edges.erase(it);
    return {EdgeOp::remove, key.first, key.second};
}

// True diameter from a distance closure: largest finite entry, or kNoPath
// when some pair is unreachable.
Dist closure_diameter(const std::vector<std::vector<ref::i64>>& d) {
    Dist best = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        for (size_t j = 0; j < d.size(); ++j) {
            if (d[i][j] == ref::kUnreached) return kNoPath;
            best = std::max<Dist>(best, d[i][j]);
        }
    }
    return best;
}

void check_diameter_bound(Dist estimate, Dist truth, double eps) {
    if (truth == kNoPath) {
        CHECK(estimate == kNoPath);
        return;
    }
    REQUIRE(estimate != kNoPath);
    const double lower = (2.0 / 3.0 - eps) * static_cast<double>(truth) - 1.0 / 3.0;
    CHECK(static_cast<double>(estimate) >= lower - 1e-9);
    CHECK(static_cast<double>(estimate) <= (1.0 + eps) * static_cast<double>(truth) + 1e-9);
}

}  // namespace

// ---------------------------------------------------------------- exact s-t

TEST_CASE("exact st: short pairs answer through the direct entry") {
    // d(s,t) <= h, so the contraction holds the exact distance as one edge
    // regardless of which other nodes were sampled.
    const int n = 6;
    DynGraph g(n, false, path_edges(n));
    ExactStDistance est(g, 0, 5, 6, {});
    CHECK(est.query() == 5);
    CHECK(est.update(EdgeOp::insert, 0, 3) == 3);
    CHECK(est.update(EdgeOp::remove, 0, 3) == 5);
    CHECK(est.source() == 0);
    CHECK(est.target() == 5);
    CHECK(est.hop_bound() == 6);
    CHECK(est.graph().n() == n);
}

TEST_CASE("exact st: disconnected endpoints report no path") {
    ref::EdgeList edges = clique_edges(4);
    auto right = clique_edges(4, 4);
    edges.insert(edges.end(), right.begin(), right.end());
    ExactStDistance est(DynGraph(8, false, edges), 0, 7, 3, {});
    CHECK(est.query() == kNoPath);
    CHECK(est.update(EdgeOp::insert, 2, 5) == 3);
    CHECK(est.update(EdgeOp::remove, 2, 5) == kNoPath);
}

TEST_CASE("exact st: sampled set always contains the endpoints and replays") {
    const int n = 100;
    Rng rng(7);
    DynGraph g(n, false, random_edges(n, 0.05, rng));
    ExactStOptions opts;
    opts.seed = 11;
    ExactStDistance a(g, 3, 96, 25, opts);
    ExactStDistance b(g, 3, 96, 25, opts);
    const auto& nodes = a.hitting_nodes();
    CHECK(std::binary_search(nodes.begin(), nodes.end(), 3));
    CHECK(std::binary_search(nodes.begin(), nodes.end(), 96));
    CHECK(std::is_sorted(nodes.begin(), nodes.end()));
    // ceil(2*(100/25)*ln 100) = 37 samples, plus endpoints not already drawn.
    CHECK(nodes.size() >= 37);
    CHECK(nodes.size() <= 39);
    CHECK(a.seed() == 11);
    CHECK(b.hitting_nodes() == nodes);  // same seed, same draw
    CHECK(a.query() == b.query());

    ExactStOptions other;
    other.seed = 12;
    ExactStDistance c(g, 3, 96, 25, other);
    CHECK(c.hitting_nodes() != nodes);  // a different draw with this seed
}

TEST_CASE("exact st: algebraic stream matches breadth-first search") {
    // h = 9 keeps the algebraic engine engaged; the draw leaves fewer than h
    // nodes outside H, so every h-window is hit and equality is guaranteed.
    const int n = 50;
    for (std::uint64_t seed : {21u, 22u}) {
        Rng rng(seed);
        ref::EdgeList edges = random_edges(n, 0.08, rng);
        ExactStOptions opts;
        opts.seed = seed * 31;
        ExactStDistance est(DynGraph(n, false, edges), 4, 47, 9, opts);
        CHECK(static_cast<int>(est.hitting_nodes().size()) < n);
        CHECK(est.query() == ref::bfs(n, edges, false, 4)[47]);
        for (int step = 0; step < 80; ++step) {
            auto [op, u, v] = toggle_step(n, edges, rng);
            const Dist got = est.update(op, u, v);
            CHECK(got == ref::bfs(n, edges, false, 4)[47]);
        }
    }
}

TEST_CASE("exact st: breadth-first backend stream matches the oracle") {
    // h = 25 crosses the engine's traversal threshold; the sample is a real
    // subset (37 of 100 nodes plus endpoints).
    const int n = 100;
    for (std::uint64_t seed : {5u, 6u}) {
        Rng rng(seed);
        ref::EdgeList edges = random_edges(n, 0.03, rng);
        ExactStOptions opts;
        opts.seed = seed + 100;
        ExactStDistance est(DynGraph(n, false, edges), 0, 99, 25, opts);
        for (int step = 0; step < 60; ++step) {
            auto [op, u, v] = toggle_step(n, edges, rng);
            const Dist got = est.update(op, u, v);
            CHECK(got == ref::bfs(n, edges, false, 0)[99]);
        }
    }
}

TEST_CASE("exact st: directed stream matches directed breadth-first search") {
    const int n = 30;
    Rng rng(17);
    ref::EdgeList arcs;
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u != v && rng.chance(0.08)) arcs.emplace_back(u, v);
        }
    }
    DynGraph g(n, true, arcs);
    ExactStOptions opts;
    opts.seed = 9;
    ExactStDistance est(g, 1, 28, 6, opts);
    CHECK(est.query() == ref::bfs(n, arcs, true, 1)[28]);
    for (int step = 0; step < 40; ++step) {
        const int u = static_cast<int>(rng.below(n));
        int v = static_cast<int>(rng.below(n - 1));
        if (v >= u) ++v;
        auto it = std::find(arcs.begin(), arcs.end(), std::make_pair(u, v));
        EdgeOp op = it == arcs.end() ? EdgeOp::insert : EdgeOp::remove;
        if (op == EdgeOp::insert) {
            arcs.emplace_back(u, v);
        } else {
            arcs.erase(it);
        }
        CHECK(est.update(op, u, v) == ref::bfs(n, arcs, true, 1)[28]);
    }
}

TEST_CASE("exact st: invalid parameters and edge errors") {
    DynGraph g(6, false, path_edges(6));
    CHECK_THROWS_AS(ExactStDistance(g, 0, 5, 0, {}), DimensionError);
    CHECK_THROWS_AS(ExactStDistance(g, -1, 5, 3, {}), DimensionError);
    CHECK_THROWS_AS(ExactStDistance(g, 0, 6, 3, {}), DimensionError);

    ExactStDistance est(g, 0, 5, 4, {});
    const Dist before = est.query();
    CHECK_THROWS_AS(est.update(EdgeOp::insert, 0, 1), GraphError);
    CHECK_THROWS_AS(est.update(EdgeOp::remove, 0, 2), GraphError);
    CHECK(est.query() == before);
    CHECK(est.update(EdgeOp::insert, 0, 2) == 4);
}

// ---------------------------------------------------------------- diameter

TEST_CASE("diameter: clique estimates stay exact through an update") {
    DiameterOptions opts;
    opts.eps = 0.25;
    opts.seed = 3;
    DiameterEstimator est(DynGraph(10, false, clique_edges(10)), opts);
    CHECK(est.estimate() == 1);
    CHECK(est.update(EdgeOp::remove, 0, 1) == 2);
    CHECK(est.update(EdgeOp::insert, 0, 1) == 1);
    CHECK(est.eps() == 0.25);
    CHECK(est.hop_bound() >= 1);
    CHECK(est.hop_bound() <= 9);
}

TEST_CASE("diameter: path bound holds across seeds and updates") {
    const int n = 30;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ref::EdgeList edges = path_edges(n);
        DiameterOptions opts;
        opts.eps = 0.25;
        opts.seed = seed;
        DiameterEstimator est(DynGraph(n, false, edges), opts);
        check_diameter_bound(est.estimate(), 29, opts.eps);

        const auto apply = [&](EdgeOp op, int u, int v) {
            if (op == EdgeOp::insert) {
                edges.emplace_back(std::min(u, v), std::max(u, v));
            } else {
                edges.erase(std::find(edges.begin(), edges.end(),
                                      std::make_pair(std::min(u, v), std::max(u, v))));
            }
            const Dist got = est.update(op, u, v);
            check_diameter_bound(got, closure_diameter(ref::floyd_warshall_unit(n, edges, false)),
                                 opts.eps);
        };
        apply(EdgeOp::insert, 5, 20);
        apply(EdgeOp::remove, 5, 20);
        apply(EdgeOp::insert, 0, 29);  // close the path into a cycle
    }
}

TEST_CASE("diameter: random graphs stay within the two-sided bound") {
    const int n = 100;
    for (std::uint64_t seed : {31u, 32u, 33u, 34u, 35u}) {
        Rng rng(seed);
        ref::EdgeList edges = random_edges(n, 0.03, rng);
        DiameterOptions opts;
        opts.eps = 0.25;
        opts.seed = seed;
        DiameterEstimator est(DynGraph(n, false, edges), opts);
        // A real sample: 93 of 100 nodes.
        CHECK(static_cast<int>(est.probe_set().size()) < n);
        check_diameter_bound(est.estimate(),
                             closure_diameter(ref::floyd_warshall_unit(n, edges, false)),
                             opts.eps);
        for (int step = 0; step < 8; ++step) {
            auto [op, u, v] = toggle_step(n, edges, rng);
            const Dist got = est.update(op, u, v);
            check_diameter_bound(got, closure_diameter(ref::floyd_warshall_unit(n, edges, false)),
                                 opts.eps);
        }
    }
}

TEST_CASE("diameter: disconnection reads as an infinite diameter") {
    ref::EdgeList edges = clique_edges(6);
    auto right = clique_edges(6, 6);
    edges.insert(edges.end(), right.begin(), right.end());
    DiameterOptions opts;
    opts.eps = 0.5;
    DiameterEstimator est(DynGraph(12, false, edges), opts);
    CHECK(est.estimate() == kNoPath);
    CHECK(est.update(EdgeOp::insert, 0, 6) == 3);
    CHECK(est.update(EdgeOp::remove, 0, 6) == kNoPath);
}

TEST_CASE("diameter: probe procedure exposes its intermediates") {
    const int n = 100;
    Rng rng(41);
    ref::EdgeList edges = random_edges(n, 0.04, rng);
    DiameterOptions opts;
    opts.eps = 0.25;
    opts.seed = 8;
    DiameterEstimator est(DynGraph(n, false, edges), opts);
    CHECK(est.resampling());
    CHECK(est.far_node() >= 0);
    CHECK(est.far_node() < n);
    // ceil(sqrt(100)) closest nodes, sorted, always including the far node
    // itself (its own estimate is zero).
    CHECK(est.near_set().size() == 10);
    CHECK(std::is_sorted(est.near_set().begin(), est.near_set().end()));
    CHECK(std::binary_search(est.near_set().begin(), est.near_set().end(), est.far_node()));
    const int beta = est.emulator().beta();
    CHECK(est.hop_bound() ==
          std::min(n - 1, static_cast<int>(std::ceil(6.0 * beta / est.eps()))));

    // The default redraws probes every update; the fixed mode holds them.
    auto probes = est.probe_set();
    bool moved = false;
    for (auto [op, u, v] :
         {std::tuple{EdgeOp::insert, 0, 1}, std::tuple{EdgeOp::remove, 0, 1},
          std::tuple{EdgeOp::insert, 2, 3}}) {
        if (est.graph().has_edge(u, v) == (op == EdgeOp::insert)) continue;
        est.update(op, u, v);
        moved = moved || est.probe_set() != probes;
        probes = est.probe_set();
    }
    CHECK(moved);

    DiameterOptions fixed = opts;
    fixed.resample_each_update = false;
    DiameterEstimator pinned(DynGraph(n, false, edges), fixed);
    CHECK_FALSE(pinned.resampling());
    const auto held = pinned.probe_set();
    pinned.update(EdgeOp::insert, 0, 2);
    pinned.update(EdgeOp::remove, 0, 2);
    CHECK(pinned.probe_set() == held);
}

TEST_CASE("diameter: parameter validation and clamping") {
    DynGraph g(5, false, path_edges(5));
    DiameterOptions opts;
    opts.eps = 0.0;
    CHECK_THROWS_AS(DiameterEstimator(g, opts), DimensionError);
    opts.eps = -0.5;
    CHECK_THROWS_AS(DiameterEstimator(g, opts), DimensionError);
    CHECK_THROWS_AS(DiameterEstimator(DynGraph(5, true), DiameterOptions{}), DimensionError);

    opts.eps = 3.0;  // clamps to 1
    DiameterEstimator est(g, opts);
    CHECK(est.eps() == 1.0);
    check_diameter_bound(est.estimate(), 4, est.eps());
}

// ---------------------------------------------------------------- apsp

TEST_CASE("apsp oracle: identical endpoints answer zero") {
    Rng rng(2);
    ref::EdgeList edges = random_edges(20, 0.1, rng);
    ApspDistanceOracle oracle(DynGraph(20, false, edges), {});
    for (int u = 0; u < 20; ++u) CHECK(oracle.query(u, u) == 0);
}

TEST_CASE("apsp oracle: short path answers are exact") {
    // Every distance sits below the short channel's bound, so the direct
    // entry answers exactly.
    const int n = 8;
    ref::EdgeList edges = path_edges(n);
    ApspDistanceOracle oracle(DynGraph(n, false, edges), {});
    CHECK(oracle.window() == 2);  // ceil(8^0.2125)
    CHECK(oracle.hop_short() == 7);
    const auto truth = ref::floyd_warshall_unit(n, edges, false);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            CHECK(oracle.query(u, v) == truth[static_cast<size_t>(u)][static_cast<size_t>(v)]);
        }
    }
}

TEST_CASE("apsp oracle: algebraic channels with center churn stay exact") {
    // n = 25 with window 8 keeps both hop bounds at 24, inside the algebraic
    // engine's range, and draws 21 of 25 centers so every resample actually
    // churns the source set of the center channel.
    const int n = 25;
    Rng rng(51);
    ref::EdgeList edges = random_edges(n, 0.15, rng);
    ApspOracleOptions opts;
    opts.eps = 1.0;
    opts.window = 8;
    opts.seed = 5;
    ApspDistanceOracle oracle(DynGraph(n, false, edges), opts);
    CHECK(oracle.hop_short() == 24);
    CHECK(oracle.hop_center() == 24);
    CHECK(static_cast<int>(oracle.centers().size()) == 21);
    for (int step = 0; step < 20; ++step) {
        auto [op, u, v] = toggle_step(n, edges, rng);
        oracle.update(op, u, v);
        const auto truth = ref::floyd_warshall_unit(n, edges, false);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                CHECK(oracle.query(a, b) ==
                      truth[static_cast<size_t>(a)][static_cast<size_t>(b)]);
            }
        }
    }
}

TEST_CASE("apsp oracle: pinned stream stays within the guarantee") {
    // 100 updates, 50 random pairs each: answers never undercut the true
    // distance and never exceed (1+eps) times it; disconnected pairs report
    // kNoPath.
    const int n = 100;
    Rng rng(77);
    ref::EdgeList edges = random_edges(n, 0.1, rng);
    ApspOracleOptions opts;
    opts.eps = 0.5;
    opts.window = 3;  // ceil(100^0.2)
    opts.seed = 13;
    ApspDistanceOracle oracle(DynGraph(n, false, edges), opts);
    CHECK(oracle.window() == 3);
    CHECK(oracle.hop_short() == 36);  // ceil(6*3/0.5)

    for (int step = 0; step < 100; ++step) {
        auto [op, u, v] = toggle_step(n, edges, rng);
        oracle.update(op, u, v);
        const auto truth = ref::floyd_warshall_unit(n, edges, false);
        for (int q = 0; q < 50; ++q) {
            const int a = static_cast<int>(rng.below(n));
            const int b = static_cast<int>(rng.below(n));
            const Dist got = oracle.query(a, b);
            const ref::i64 want = truth[static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (want == ref::kUnreached) {
                CHECK(got == kNoPath);
                continue;
            }
            REQUIRE(got != kNoPath);
            CHECK(got >= want);
            CHECK(static_cast<double>(got) <= 1.5 * static_cast<double>(want) + 1e-9);
        }
    }
}

TEST_CASE("apsp oracle: center relay structure and resampling modes") {
    const int n = 60;
    Rng rng(61);
    ref::EdgeList edges = random_edges(n, 0.08, rng);
    ApspOracleOptions opts;
    opts.eps = 0.5;
    opts.window = 20;  // 25 of 60 centers: a strict subset
    opts.seed = 19;
    ApspDistanceOracle oracle(DynGraph(n, false, edges), opts);
    const auto& centers = oracle.centers();
    CHECK(centers.size() == 25);
    CHECK(std::is_sorted(centers.begin(), centers.end()));
    for (int u = 0; u < n; ++u) {
        const int p = oracle.closest_center(u);
        if (p == -1) continue;
        CHECK(std::binary_search(centers.begin(), centers.end(), p));
    }

    // Same parameters and seed: the draw and the answers replay.
    ApspDistanceOracle replay(DynGraph(n, false, edges), opts);
    CHECK(replay.centers() == centers);
    CHECK(replay.query(0, n - 1) == oracle.query(0, n - 1));

    // Default mode redraws centers; fixed mode holds them.
    auto before = oracle.centers();
    oracle.update(EdgeOp::insert, 0, 1);
    oracle.update(EdgeOp::remove, 0, 1);
    bool churned = oracle.centers() != before;
    CHECK(churned);

    ApspOracleOptions fixed = opts;
    fixed.resample_each_update = false;
    ApspDistanceOracle pinned(DynGraph(n, false, edges), fixed);
    const auto held = pinned.centers();
    pinned.update(EdgeOp::insert, 0, 1);
    pinned.update(EdgeOp::remove, 0, 1);
    CHECK(pinned.centers() == held);
    CHECK_FALSE(pinned.resampling());
}

TEST_CASE("apsp oracle: disconnected pairs report no path") {
    ref::EdgeList edges = clique_edges(5);
    auto right = clique_edges(5, 5);
    edges.insert(edges.end(), right.begin(), right.end());
    ApspOracleOptions opts;
    opts.eps = 0.5;
    ApspDistanceOracle oracle(DynGraph(10, false, edges), opts);
    CHECK(oracle.query(0, 9) == kNoPath);
    CHECK(oracle.query(0, 4) == 1);
    oracle.update(EdgeOp::insert, 4, 5);
    CHECK(oracle.query(0, 9) == 3);
}

TEST_CASE("apsp oracle: validation, clamping, and edge errors") {
    DynGraph g(8, false, path_edges(8));
    ApspOracleOptions opts;
    opts.eps = 0.0;
    CHECK_THROWS_AS(ApspDistanceOracle(g, opts), DimensionError);
    opts.eps = -1.0;
    CHECK_THROWS_AS(ApspDistanceOracle(g, opts), DimensionError);
    CHECK_THROWS_AS(ApspDistanceOracle(DynGraph(4, true), ApspOracleOptions{}), DimensionError);

    opts.eps = 2.0;  // clamps to 1
    ApspDistanceOracle oracle(g, opts);
    CHECK(oracle.eps() == 1.0);
    CHECK_THROWS_AS(oracle.query(-1, 0), DimensionError);
    CHECK_THROWS_AS(oracle.query(0, 8), DimensionError);
    CHECK_THROWS_AS(oracle.closest_center(8), DimensionError);

    const Dist before = oracle.query(0, 7);
    CHECK_THROWS_AS(oracle.update(EdgeOp::insert, 0, 1), GraphError);
    CHECK_THROWS_AS(oracle.update(EdgeOp::remove, 0, 7), GraphError);
    CHECK(oracle.query(0, 7) == before);
    oracle.update(EdgeOp::insert, 0, 7);
    CHECK(oracle.query(0, 7) == 1);
}

// ---------------------------------------------------------------- overflow

TEST_CASE("sparse emulator additive term saturates instead of overflowing") {
    // (3/eps)^k overflows a 32-bit value for small eps and deep ladders; the
    // reported term must saturate and stay positive. The hop caps downstream
    // bind long before a term this large matters.
    dynshort::EmulatorOptions eopts;
    eopts.eps = 0.01;
    eopts.k = 8;  // (300)^8 ~ 6.5e19
    dynshort::Emulator em(DynGraph(12, false, path_edges(12)),
                          dynshort::EmulatorVariant::sparse, eopts);
    CHECK(em.beta() == 1000000000);
}
