#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "dynshort/errors.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/oracles.hpp"
#include "dynshort/rng.hpp"
#include "reference.hpp"

namespace ref = refimpl;

using dynshort::Channel;
using dynshort::DistanceEstimate;
using dynshort::DistanceOracle;
using dynshort::DynGraph;
using dynshort::EdgeOp;
using dynshort::kNoPath;
using dynshort::OracleKind;

namespace {

std::vector<std::pair<int, int>> random_edges(int n, double p, dynshort::Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.unit() < p) edges.push_back({u, v});
        }
    }
    return edges;
}

/// Empty string when the estimate row from one source satisfies, per node:
/// soundness, the (1+eps) bound, infinite agreement, and exactness with an
/// algebraic tag whenever the true distance is within the channel hop bound.
std::string audit_row(const std::vector<DistanceEstimate>& row,
                      const std::vector<ref::i64>& truth, double eps, int hop) {
    for (size_t v = 0; v < truth.size(); ++v) {
        std::ostringstream why;
        if (truth[v] == ref::kUnreached) {
            if (row[v].value == kNoPath) continue;
            why << "node " << v << ": estimate " << row[v].value << " for unreachable node";
            return why.str();
        }
        if (row[v].value == kNoPath) {
            why << "node " << v << ": unreachable estimate, true distance " << truth[v];
            return why.str();
        }
        if (row[v].value < truth[v]) {
            why << "node " << v << ": underestimate " << row[v].value << " < " << truth[v];
            return why.str();
        }
        if (static_cast<double>(row[v].value) >
            (1.0 + eps) * static_cast<double>(truth[v]) + 1e-9) {
            why << "node " << v << ": estimate " << row[v].value << " over (1+eps)*"
                << truth[v];
            return why.str();
        }
        if (truth[v] <= hop) {
            if (row[v].value != truth[v]) {
                why << "node " << v << ": inexact within hop bound (" << row[v].value
                    << " vs " << truth[v] << ")";
                return why.str();
            }
            if (row[v].channel != Channel::algebraic) {
                why << "node " << v << ": non-algebraic tag within hop bound";
                return why.str();
            }
        }
    }
    return "";
}

}  // namespace

TEST_CASE("st oracle: coincident endpoints, short pairs, and disconnection") {
    std::vector<std::pair<int, int>> path;
    for (int v = 0; v + 1 < 12; ++v) path.push_back({v, v + 1});
    DynGraph g(14, false, path);  // nodes 12, 13 isolated

    auto same = DistanceOracle::make_st(g, 3, 3, 0.5);
    REQUIRE(same.st_query().value == 0);
    REQUIRE(same.st_query().channel == Channel::algebraic);

    auto near = DistanceOracle::make_st(g, 0, 9, 0.5);
    REQUIRE(near.hop_bound() == 18);  // ceil(8/eps)+2
    REQUIRE(near.st_query().value == 9);
    REQUIRE(near.st_query().channel == Channel::algebraic);

    auto cut = DistanceOracle::make_st(g, 0, 13, 0.5);
    REQUIRE(cut.st_query().value == kNoPath);
    cut.update(EdgeOp::insert, 11, 13);
    REQUIRE(cut.st_query().value == 12);
}

TEST_CASE("st oracle holds its guarantee through a random stream") {
    const int n = 100;
    const double eps = 0.5;
    dynshort::Rng rng(0x57E57);
    DynGraph g(n, false, random_edges(n, 0.12, rng));
    auto oracle = DistanceOracle::make_st(g, 0, n - 1, eps);
    for (int step = 0; step <= 60; ++step) {
        if (step > 0) {
            int u = 0;
            int v = 0;
            while (u == v) {
                u = rng.below(n);
                v = rng.below(n);
            }
            EdgeOp op = oracle.graph().has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
            oracle.update(op, u, v);
        }
        auto truth = ref::bfs(n, oracle.graph().edges(), false, 0);
        auto est = oracle.st_query();
        std::vector<DistanceEstimate> row{est};
        std::vector<ref::i64> want{truth[static_cast<size_t>(n - 1)]};
        auto msg = audit_row(row, want, eps, oracle.hop_bound());
        REQUIRE_MESSAGE(msg.empty(), "step " << step << ": " << msg);
    }
}

TEST_CASE("sssp oracle: channel exactness inside the hop bound, emulator beyond") {
    std::vector<std::pair<int, int>> path;
    for (int v = 0; v + 1 < 30; ++v) path.push_back({v, v + 1});
    DynGraph g(31, false, path);  // node 30 isolated
    auto oracle = DistanceOracle::make_sssp(g, 0, 1.0);
    REQUIRE(oracle.hop_bound() == 4);  // ceil(4/eps)

    auto row = oracle.sssp_query();
    for (int v = 0; v < 30; ++v) {
        REQUIRE(row[static_cast<size_t>(v)].value == v);  // the emulator is the path itself
        if (v <= 4) {
            REQUIRE(row[static_cast<size_t>(v)].channel == Channel::algebraic);
        } else {
            REQUIRE(row[static_cast<size_t>(v)].channel == Channel::emulator);
        }
    }
    REQUIRE(row[30].value == kNoPath);
}

TEST_CASE("sssp oracle holds its guarantee through a random stream") {
    const int n = 120;
    const double eps = 0.5;
    dynshort::Rng rng(0x555);
    DynGraph g(n, false, random_edges(n, 0.25, rng));
    auto oracle = DistanceOracle::make_sssp(g, 7, eps);
    REQUIRE(oracle.hop_bound() == 8);
    for (int step = 0; step <= 60; ++step) {
        if (step > 0) {
            int u = 0;
            int v = 0;
            while (u == v) {
                u = rng.below(n);
                v = rng.below(n);
            }
            EdgeOp op = oracle.graph().has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
            oracle.update(op, u, v);
        }
        auto truth = ref::bfs(n, oracle.graph().edges(), false, 7);
        auto msg = audit_row(oracle.sssp_query(), truth, eps, oracle.hop_bound());
        REQUIRE_MESSAGE(msg.empty(), "step " << step << ": " << msg);
    }
}

TEST_CASE("single-source mssp obeys the same guarantee as sssp") {
    const int n = 60;
    dynshort::Rng rng(0x135);
    DynGraph g(n, false, random_edges(n, 0.1, rng));
    auto oracle = DistanceOracle::make_mssp(g, {5}, 0.5);
    auto rows = oracle.mssp_query();
    REQUIRE(rows.size() == 1);
    auto truth = ref::bfs(n, oracle.graph().edges(), false, 5);
    REQUIRE(audit_row(rows[0], truth, 0.5, oracle.hop_bound()).empty());
}

TEST_CASE("apsp oracle on tiny graphs") {
    DynGraph pair(2, false, {{0, 1}});
    auto o2 = DistanceOracle::make_apsp(pair, 0.5);
    REQUIRE(o2.exact_mode());  // eps below 2/n switches to exact
    auto m2 = o2.apsp_query();
    REQUIRE(m2[0][0].value == 0);
    REQUIRE(m2[0][1].value == 1);
    REQUIRE(m2[1][0].value == 1);
    REQUIRE(m2[1][1].value == 0);

    DynGraph tri(3, false, {{0, 1}, {1, 2}, {0, 2}});
    auto o3 = DistanceOracle::make_apsp(tri, 1.0);
    REQUIRE_FALSE(o3.exact_mode());
    auto m3 = o3.apsp_query();
    for (int u = 0; u < 3; ++u) {
        for (int v = 0; v < 3; ++v) REQUIRE(m3[u][v].value == (u == v ? 0 : 1));
    }

    DynGraph lone(6, false, {});
    auto o6 = DistanceOracle::make_apsp(lone, 0.5);
    auto m6 = o6.apsp_query();
    for (int u = 0; u < 6; ++u) {
        for (int v = 0; v < 6; ++v) {
            REQUIRE(m6[u][v].value == (u == v ? 0 : kNoPath));
        }
    }
}

TEST_CASE("apsp oracle matches all-pairs truth through a random stream") {
    const int n = 80;
    const double eps = 0.5;
    dynshort::Rng rng(0xA959);
    DynGraph g(n, false, random_edges(n, 0.1, rng));
    auto oracle = DistanceOracle::make_apsp(g, eps);
    for (int step = 0; step <= 100; ++step) {
        if (step > 0) {
            int u = 0;
            int v = 0;
            while (u == v) {
                u = rng.below(n);
                v = rng.below(n);
            }
            EdgeOp op = oracle.graph().has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
            oracle.update(op, u, v);
        }
        if (step % 5 != 0) continue;  // full-matrix audit every fifth tick
        auto truth = ref::floyd_warshall_unit(n, oracle.graph().edges(), false);
        auto rows = oracle.apsp_query();
        for (int s = 0; s < n; ++s) {
            auto msg = audit_row(rows[static_cast<size_t>(s)], truth[static_cast<size_t>(s)],
                                 eps, oracle.hop_bound());
            REQUIRE_MESSAGE(msg.empty(), "step " << step << " source " << s << ": " << msg);
        }
    }
}

TEST_CASE("mssp oracle with ten sources through a random stream") {
    const int n = 100;
    const double eps = 0.5;
    std::vector<int> sources = {0, 7, 13, 22, 31, 45, 58, 66, 79, 93};
    dynshort::Rng rng(0x10555);
    DynGraph g(n, false, random_edges(n, 0.08, rng));
    auto oracle = DistanceOracle::make_mssp(g, sources, eps);
    for (int step = 0; step <= 100; ++step) {
        if (step > 0) {
            int u = 0;
            int v = 0;
            while (u == v) {
                u = rng.below(n);
                v = rng.below(n);
            }
            EdgeOp op = oracle.graph().has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
            oracle.update(op, u, v);
        }
        auto rows = oracle.mssp_query();
        REQUIRE(rows.size() == sources.size());
        for (size_t i = 0; i < sources.size(); ++i) {
            auto truth = ref::bfs(n, oracle.graph().edges(), false, sources[i]);
            auto msg = audit_row(rows[i], truth, eps, oracle.hop_bound());
            REQUIRE_MESSAGE(msg.empty(),
                            "step " << step << " source " << sources[i] << ": " << msg);
        }
    }
}

TEST_CASE("eps below 2/n switches to flagged exact mode") {
    const int n = 30;
    dynshort::Rng rng(0xE4AC7);
    DynGraph g(n, false, random_edges(n, 0.1, rng));
    auto oracle = DistanceOracle::make_sssp(g, 0, 1e-9);
    REQUIRE(oracle.exact_mode());
    REQUIRE(oracle.eps() == 2.0 / n);
    for (int step = 0; step <= 30; ++step) {
        if (step > 0) {
            int u = 0;
            int v = 0;
            while (u == v) {
                u = rng.below(n);
                v = rng.below(n);
            }
            EdgeOp op = oracle.graph().has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
            oracle.update(op, u, v);
        }
        auto truth = ref::bfs(n, oracle.graph().edges(), false, 0);
        auto row = oracle.sssp_query();
        for (int v = 0; v < n; ++v) {
            ref::i64 want = truth[static_cast<size_t>(v)];
            REQUIRE(row[static_cast<size_t>(v)].value ==
                    (want == ref::kUnreached ? kNoPath : want));
            REQUIRE(row[static_cast<size_t>(v)].channel == Channel::algebraic);
        }
    }
}

TEST_CASE("eps above one is clamped to one") {
    DynGraph g(20, false, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    auto oracle = DistanceOracle::make_sssp(g, 0, 5.0);
    REQUIRE(oracle.eps() == 1.0);
    REQUIRE(oracle.hop_bound() == 4);
    auto truth = ref::bfs(20, oracle.graph().edges(), false, 0);
    REQUIRE(audit_row(oracle.sssp_query(), truth, 1.0, 4).empty());
}

TEST_CASE("oracle construction and queries validate their inputs") {
    DynGraph g(8, false, {{0, 1}, {1, 2}});
    REQUIRE_THROWS_AS(DistanceOracle::make_st(g, -1, 2, 0.5), dynshort::DimensionError);
    REQUIRE_THROWS_AS(DistanceOracle::make_st(g, 0, 8, 0.5), dynshort::DimensionError);
    REQUIRE_THROWS_AS(DistanceOracle::make_sssp(g, 9, 0.5), dynshort::DimensionError);
    REQUIRE_THROWS_AS(DistanceOracle::make_mssp(g, {}, 0.5), dynshort::DimensionError);
    REQUIRE_THROWS_AS(DistanceOracle::make_mssp(g, {1, 1}, 0.5), dynshort::DimensionError);
    DynGraph dir(4, true, {{0, 1}});
    REQUIRE_THROWS_AS(DistanceOracle::make_sssp(dir, 0, 0.5), dynshort::DimensionError);

    auto st = DistanceOracle::make_st(g, 0, 2, 0.5);
    REQUIRE_THROWS_AS(st.sssp_query(), dynshort::DimensionError);
    REQUIRE_THROWS_AS(st.mssp_query(), dynshort::DimensionError);
    auto ss = DistanceOracle::make_sssp(g, 0, 0.5);
    REQUIRE_THROWS_AS(ss.st_query(), dynshort::DimensionError);
    auto ms = DistanceOracle::make_mssp(g, {0, 1}, 0.5);
    REQUIRE_THROWS_AS(ms.apsp_query(), dynshort::DimensionError);  // mssp is not apsp
    REQUIRE(ms.mssp_query().size() == 2);
}

TEST_CASE("graph errors propagate and leave the oracle consistent") {
    DynGraph g(10, false, {{0, 1}, {1, 2}, {2, 3}});
    auto oracle = DistanceOracle::make_sssp(g, 0, 0.5);
    auto before = oracle.sssp_query();
    REQUIRE_THROWS_AS(oracle.update(EdgeOp::insert, 0, 1), dynshort::GraphError);
    REQUIRE_THROWS_AS(oracle.update(EdgeOp::remove, 4, 5), dynshort::GraphError);
    REQUIRE(oracle.sssp_query() == before);
    oracle.update(EdgeOp::insert, 3, 4);
    auto truth = ref::bfs(10, oracle.graph().edges(), false, 0);
    REQUIRE(audit_row(oracle.sssp_query(), truth, 0.5, oracle.hop_bound()).empty());
}
