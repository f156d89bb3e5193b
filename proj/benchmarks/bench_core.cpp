#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "dynshort/bounded_dist.hpp"
#include "dynshort/emulator.hpp"
#include "dynshort/field.hpp"
#include "dynshort/graph.hpp"
#include "dynshort/hitting_set.hpp"
#include "dynshort/poly.hpp"
#include "dynshort/rng.hpp"

namespace {

using dynshort::DynGraph;
using dynshort::EdgeOp;
using dynshort::Rng;

std::vector<std::pair<int, int>> random_edges(int n, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (rng.unit() < p) edges.push_back({u, v});
        }
    }
    return edges;
}

// Toggle pseudo-random node pairs so the structure keeps a steady density.
template <class F>
void toggle_stream(benchmark::State& state, DynGraph& mirror, F&& apply) {
    Rng rng(0xBE7C);
    const int n = mirror.n();
    for (auto _ : state) {
        int u = 0;
        int v = 0;
        while (u == v) {
            u = rng.below(n);
            v = rng.below(n);
        }
        EdgeOp op = mirror.has_edge(u, v) ? EdgeOp::remove : EdgeOp::insert;
        if (op == EdgeOp::insert) {
            mirror.insert_edge(u, v);
        } else {
            mirror.delete_edge(u, v);
        }
        apply(op, u, v);
    }
}

void BM_poly_mul(benchmark::State& state) {
    Rng rng(0x901D);
    dynshort::Fp64Ring base(dynshort::random_prime_62(rng));
    dynshort::PolyRing<dynshort::Fp64Ring> ring(base, static_cast<size_t>(state.range(0)));
    auto a = dynshort::poly_zero(ring);
    auto b = dynshort::poly_zero(ring);
    for (auto& c : a.coeffs) c = rng.below(base.modulus());
    for (auto& c : b.coeffs) c = rng.below(base.modulus());
    auto r = dynshort::poly_zero(ring);
    for (auto _ : state) {
        ring.mul(r.coeffs.data(), a.coeffs.data(), b.coeffs.data());
        benchmark::DoNotOptimize(r.coeffs.data());
    }
}
BENCHMARK(BM_poly_mul)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_bounded_toggle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int h = 4;
    Rng rng(0xB0D);
    DynGraph mirror(n, false, random_edges(n, 8.0 / n, rng));
    std::vector<int> nodes;
    for (int v = 0; v < 8; ++v) nodes.push_back(v);
    auto bd = dynshort::make_bounded_distance(n, h, false, dynshort::IndexSet(nodes),
                                              dynshort::IndexSet(nodes), mirror.edges(), {});
    toggle_stream(state, mirror, [&](EdgeOp op, int u, int v) {
        if (op == EdgeOp::insert) {
            bd->insert_edge(u, v);
        } else {
            bd->delete_edge(u, v);
        }
        benchmark::DoNotOptimize(bd.get());
    });
}
BENCHMARK(BM_bounded_toggle)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_bounded_distances(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(0xD157);
    DynGraph g(n, false, random_edges(n, 8.0 / n, rng));
    std::vector<int> nodes;
    for (int v = 0; v < 8; ++v) nodes.push_back(v);
    auto bd = dynshort::make_bounded_distance(n, 4, false, dynshort::IndexSet(nodes),
                                              dynshort::IndexSet(nodes), g.edges(), {});
    for (auto _ : state) {
        auto dm = bd->distances();
        benchmark::DoNotOptimize(dm.at(0, 0));
    }
}
BENCHMARK(BM_bounded_distances)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_hitting_set_toggle(benchmark::State& state) {
    const int n = 400;
    Rng rng(0x817);
    DynGraph g(n, false, random_edges(n, 24.0 / n, rng));
    DynGraph mirror = g;
    dynshort::HittingSet hs(std::move(g), 20);
    toggle_stream(state, mirror, [&](EdgeOp op, int u, int v) {
        auto changes = hs.update(op, u, v);
        benchmark::DoNotOptimize(changes.data());
    });
}
BENCHMARK(BM_hitting_set_toggle)->Unit(benchmark::kMicrosecond);

void BM_emulator_toggle(benchmark::State& state) {
    const int n = 80;
    auto variant = state.range(0) == 2 ? dynshort::EmulatorVariant::e2
                                       : dynshort::EmulatorVariant::e4;
    Rng rng(0xE8);
    DynGraph g(n, false, random_edges(n, 0.15, rng));
    DynGraph mirror = g;
    dynshort::Emulator em(std::move(g), variant, {});
    toggle_stream(state, mirror, [&](EdgeOp op, int u, int v) {
        em.update(op, u, v);
        benchmark::DoNotOptimize(em.edges().data());
    });
}
BENCHMARK(BM_emulator_toggle)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_sparse_emulator_toggle(benchmark::State& state) {
    const int n = 80;
    Rng rng(0x59);
    DynGraph g(n, false, random_edges(n, 0.15, rng));
    DynGraph mirror = g;
    dynshort::EmulatorOptions opts;
    opts.k = 2;
    dynshort::Emulator em(std::move(g), dynshort::EmulatorVariant::sparse, opts);
    toggle_stream(state, mirror, [&](EdgeOp op, int u, int v) {
        em.update(op, u, v);
        benchmark::DoNotOptimize(em.edges().data());
    });
}
BENCHMARK(BM_sparse_emulator_toggle)->Unit(benchmark::kMillisecond);

void BM_static_near_additive(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(0x57A);
    DynGraph g(n, false, random_edges(n, 0.1, rng));
    for (auto _ : state) {
        auto out = dynshort::static_near_additive(g, 0.5, 2);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_static_near_additive)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
