#include <benchmark/benchmark.h>

#include <random>

#include "pcf/filter.hpp"
#include "pcf/minimax.hpp"
#include "pcf/oracle.hpp"
#include "pcf/spectral.hpp"

namespace {

using namespace pcf;

MaPolynomial random_factor(int dim, int order, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Matrix> c;
    for (int u = 0; u <= order; ++u) {
        Matrix m(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) m(i, j) = Complex(normal(rng), normal(rng)) * 0.25 * std::pow(0.5, u);
        }
        if (u == 0) {
            for (int i = 0; i < dim; ++i) m(i, i) = 2.0;
        }
        c.push_back(m);
    }
    return MaPolynomial(std::move(c));
}

// args: K, L, F
void BM_Factorize(benchmark::State& state) {
    const auto f = density_from_ma(random_factor(state.range(0), state.range(1), 1), state.range(2));
    for (auto _ : state) benchmark::DoNotOptimize(factorize(f, state.range(1)));
}
BENCHMARK(BM_Factorize)->Args({1, 4, 256})->Args({1, 4, 1024})->Args({2, 4, 1024})->Args({4, 8, 1024})
    ->Unit(benchmark::kMillisecond);

// args: K, L
void BM_Characteristic(benchmark::State& state) {
    const int dim = state.range(0);
    const int order = state.range(1);
    const auto phi = random_factor(dim, order, 2);
    const auto psi = random_factor(dim, order, 3);
    const auto d = factorize(density_from_ma(phi, 1024) + density_from_ma(psi, 1024), order).factor;
    const auto b = invert_factor(d, default_inverse_order(order, 3));
    const FunctionalWeights a(std::vector<Vector>(4, Vector::Ones(dim)));
    for (auto _ : state) benchmark::DoNotOptimize(spectral_characteristic_via_g(d, b, psi, a));
}
BENCHMARK(BM_Characteristic)->Args({1, 4})->Args({4, 8})->Unit(benchmark::kMicrosecond);

// args: K, horizon
void BM_FiniteHorizonMmse(benchmark::State& state) {
    const int dim = state.range(0);
    const auto f = density_from_ma(random_factor(dim, 4, 4), 1024);
    const auto g = density_from_ma(random_factor(dim, 2, 5), 1024);
    const FunctionalWeights a(std::vector<Vector>(2, Vector::Ones(dim)));
    for (auto _ : state) benchmark::DoNotOptimize(finite_horizon_mmse(f, g, a, state.range(1)));
}
BENCHMARK(BM_FiniteHorizonMmse)->Args({1, 200})->Args({3, 200})->Unit(benchmark::kMillisecond);

void BM_EmpiricalMse(benchmark::State& state) {
    const auto phi = MaPolynomial::scalar({1.0, 0.5});
    const auto psi = MaPolynomial::scalar({1.0});
    FilterCharacteristic h;
    h.coeffs.assign(65, Vector::Constant(1, 0.1));
    const auto a = FunctionalWeights::scalar(std::vector<Complex>{1.0});
    const SimulationSpec spec{phi, psi, 65, 1000, 1};
    for (auto _ : state) benchmark::DoNotOptimize(empirical_mse(h, spec, a));
}
BENCHMARK(BM_EmpiricalMse)->Unit(benchmark::kMillisecond);

void BM_SolveWhiteClass(benchmark::State& state) {
    const DensityClassD00 cls{{1.0}, {1.0}};
    const auto a = FunctionalWeights::scalar(std::vector<Complex>{1.0});
    SolverOptions opts;
    opts.restarts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_least_favorable(cls, a, Route::via_g, opts));
}
BENCHMARK(BM_SolveWhiteClass)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
