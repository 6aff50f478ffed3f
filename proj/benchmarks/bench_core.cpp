// Hot paths, sized like the acceptance sweeps: eigensolvers, basis assembly,
// the duality tables, and the full commuting-operator pipeline.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "heunlim/limiting.hpp"
#include "heunlim/linalg.hpp"
#include "heunlim/operators.hpp"
#include "heunlim/orthopoly.hpp"

namespace {

using namespace heunlim;

heunlim::SymTridiag laplacian_tridiag(int m) {
    SymTridiag t;
    t.diag.assign(m, 2.0);
    t.offdiag.assign(m > 0 ? m - 1 : 0, -1.0);
    return t;
}

void bm_sym_tridiag_eig(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const SymTridiag t = laplacian_tridiag(m);
    for (auto _ : state) {
        EigenDecomposition d = sym_tridiag_eig(t);
        benchmark::DoNotOptimize(d.values.data());
    }
}
BENCHMARK(bm_sym_tridiag_eig)->Arg(16)->Arg(33)->Arg(65)->Arg(129);

void bm_dense_sym_eig(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = 1.0 / (1.0 + i + j);
    for (auto _ : state) {
        EigenDecomposition d = dense_sym_eig(a);
        benchmark::DoNotOptimize(d.values.data());
    }
}
BENCHMARK(bm_dense_sym_eig)->Arg(16)->Arg(33)->Arg(65);

void bm_hahn_basis(benchmark::State& state) {
    const HahnParams p{0.3, 0.7, static_cast<int>(state.range(0))};
    for (auto _ : state) {
        HahnBasis b = hahn_basis(p);
        benchmark::DoNotOptimize(b.vectors(0, 0));
    }
}
BENCHMARK(bm_hahn_basis)->Arg(16)->Arg(32)->Arg(64);

void bm_duality_data(benchmark::State& state) {
    const HahnParams p{0.3, 0.7, static_cast<int>(state.range(0))};
    const HahnBasis b = hahn_basis(p);
    for (auto _ : state) {
        DualityData d = duality_data(p, b);
        benchmark::DoNotOptimize(d.phi(0, 0));
    }
}
BENCHMARK(bm_duality_data)->Arg(16)->Arg(32)->Arg(64);

void bm_kernel_matrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const HahnParams p{0.3, 0.7, n};
    const HahnBasis b = hahn_basis(p);
    const LimitingConfig c{p, n / 3, (2 * n) / 3};
    for (auto _ : state) {
        KernelMatrix k = kernel_matrix(c, b);
        benchmark::DoNotOptimize(k.k(0, 0));
    }
}
BENCHMARK(bm_kernel_matrix)->Arg(16)->Arg(32)->Arg(64);

void bm_commuting_tau(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const HahnParams p{0.3, 0.7, n};
    const HahnBasis b = hahn_basis(p);
    const LimitingConfig c{p, n / 3, (2 * n) / 3};
    for (auto _ : state) {
        CommutingSolution s = commuting_tau(c, b);
        benchmark::DoNotOptimize(s.m_matrix(0, 0));
    }
}
BENCHMARK(bm_commuting_tau)->Arg(16)->Arg(32)->Arg(64);

void bm_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const HahnParams p{0.3, 0.7, n};
    const HahnBasis b = hahn_basis(p);
    const LimitingConfig c{p, n / 3, (2 * n) / 3};
    for (auto _ : state) {
        SpectralReport r = solve(c, b);
        benchmark::DoNotOptimize(r.v1_eigs_direct.data());
    }
}
BENCHMARK(bm_solve)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
