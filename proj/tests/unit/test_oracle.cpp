#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcf/error.hpp"
#include "pcf/oracle.hpp"

using namespace pcf;
using pcf::testing::ma_covariance;
using pcf::testing::normal_equation_filter;
using pcf::testing::random_lower_ma;
using pcf::testing::random_weights;

namespace {

SpectralDensityGrid white(double s2, int grid, int dim = 1) {
    return SpectralDensityGrid::constant(s2 * Matrix::Identity(dim, dim), grid);
}

FunctionalWeights one() { return FunctionalWeights::scalar(std::vector<Complex>{1.0}); }

FilterCharacteristic scalar_filter(std::vector<Complex> c) {
    FilterCharacteristic h;
    for (const auto& v : c) h.coeffs.push_back(Vector::Constant(1, v));
    return h;
}

}  // namespace

TEST(Mmse, NoNoiseIsExact) {
    EXPECT_NEAR(finite_horizon_mmse(white(1.0, 64), SpectralDensityGrid::zero(1, 64), one(), 5).value, 0.0,
                1e-12);
    const auto f = density_from_ma(MaPolynomial::scalar({1.0, 0.5}), 64);
    EXPECT_NEAR(finite_horizon_mmse(f, SpectralDensityGrid::zero(1, 64), one(), 10).value, 0.0, 1e-12);
}

TEST(Mmse, WhiteWhiteSingleBlock) {
    EXPECT_NEAR(finite_horizon_mmse(white(1.0, 16), white(1.0, 16), one(), 1).value, 0.5, 1e-12);
}

TEST(Mmse, MovingAverageSignalConvergesToInfiniteHorizon) {
    const auto f = density_from_ma(MaPolynomial::scalar({1.0, 0.5}), 1024);
    const double value = finite_horizon_mmse(f, white(1.0, 1024), one(), 200).value;
    EXPECT_NEAR(value, (std::sqrt(65.0) - 7.0) / 2.0, 1e-4);
}

TEST(Mmse, DecreasesWithHorizon) {
    std::mt19937_64 rng(7);
    const MaPolynomial phi(random_lower_ma(2, 2, rng));
    const MaPolynomial psi(random_lower_ma(2, 1, rng));
    const FunctionalWeights a(random_weights(2, 2, rng));
    const auto f = density_from_ma(phi, 128);
    const auto g = density_from_ma(psi, 128);
    double previous = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= 30; n += 4) {
        const double v = finite_horizon_mmse(f, g, a, n).value;
        EXPECT_LE(v, previous + 1e-12);
        EXPECT_GE(v, -1e-12);
        previous = v;
    }
}

TEST(Mmse, MatchesTimeDomainNormalEquations) {
    std::mt19937_64 rng(8);
    const MaPolynomial phi(random_lower_ma(2, 2, rng));
    const MaPolynomial psi(random_lower_ma(2, 1, rng));
    const FunctionalWeights a(random_weights(2, 2, rng));
    std::vector<Matrix> rf, rg;
    for (int j = 0; j <= 2; ++j) rf.push_back(ma_covariance(phi.coeffs(), j));
    for (int j = 0; j <= 1; ++j) rg.push_back(ma_covariance(psi.coeffs(), j));
    const double reference = normal_equation_filter(rf, rg, a.coeffs(), 12).mse;
    const double value = finite_horizon_mmse(density_from_ma(phi, 64), density_from_ma(psi, 64), a, 12).value;
    EXPECT_NEAR(value, reference, 1e-10);
}

TEST(Mmse, Errors) {
    const auto w = white(1.0, 16);
    EXPECT_THROW(finite_horizon_mmse(w, white(1.0, 32), one(), 2), Error);
    EXPECT_THROW(finite_horizon_mmse(w, w, FunctionalWeights::scalar(std::vector<Complex>{1.0, 1.0, 1.0}), 1), Error);
    EXPECT_THROW(finite_horizon_mmse(w, w, one(), 12), Error);  // lag beyond half the grid
}

TEST(Simulation, PathsAreIndependentOfEvaluationOrder) {
    SimulationSpec spec{MaPolynomial::scalar({1.0, 0.5}), MaPolynomial::scalar({1.0}), 8, 5, 42};
    const auto sim = simulate_ma(spec);
    const auto third = simulate_path(spec, 3);
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_EQ(sim.signal[3][j], third.signal[j]);
        EXPECT_EQ(sim.noise[3][j], third.noise[j]);
    }
    spec.seed = 43;
    EXPECT_NE(simulate_path(spec, 3).signal[0], third.signal[0]);
}

TEST(Simulation, VarianceOfWhiteSignal) {
    const std::size_t n = 4000;
    const int h = 10;
    const SimulationSpec spec{MaPolynomial::scalar({1.0}), MaPolynomial::scalar({0.5}), h, n, 1};
    const auto sim = simulate_ma(spec);
    double signal = 0.0, noise = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < h; ++j) {
            signal += std::norm(sim.signal[i][j](0));
            noise += std::norm(sim.noise[i][j](0));
        }
    }
    const double count = static_cast<double>(n) * h;
    EXPECT_NEAR(signal / count, 1.0, 3.0 / std::sqrt(count));
    EXPECT_NEAR(noise / count, 0.25, 3.0 / std::sqrt(count));
}

TEST(Simulation, AutocovarianceOfMovingAverage) {
    const std::size_t n = 4000;
    const int h = 10;
    const SimulationSpec spec{MaPolynomial::scalar({1.0, 0.5}), MaPolynomial::scalar({1.0}), h, n, 2};
    const auto sim = simulate_ma(spec);
    Complex r0 = 0.0, r1 = 0.0, r2 = 0.0;
    double c0 = 0, c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < h; ++j) {
            const Complex x = sim.signal[i][j](0);
            r0 += x * std::conj(x);
            ++c0;
            if (j + 1 < h) {
                r1 += sim.signal[i][j + 1](0) * std::conj(x);
                ++c1;
            }
            if (j + 2 < h) {
                r2 += sim.signal[i][j + 2](0) * std::conj(x);
                ++c2;
            }
        }
    }
    const double tol = 5.0 / std::sqrt(static_cast<double>(n) * h);
    EXPECT_NEAR(std::abs(r0 / c0 - 1.25), 0.0, tol);
    EXPECT_NEAR(std::abs(r1 / c1 - 0.5), 0.0, tol);
    EXPECT_NEAR(std::abs(r2 / c2), 0.0, tol);
}

TEST(Simulation, MatrixCovarianceAtLagZero) {
    std::mt19937_64 rng(9);
    const MaPolynomial phi(random_lower_ma(2, 1, rng));
    const std::size_t n = 6000;
    const SimulationSpec spec{phi, MaPolynomial::identity(2), 4, n, 3};
    Matrix acc = Matrix::Zero(2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = simulate_path(spec, i);
        for (int j = 0; j < 4; ++j) acc += p.signal[j] * p.signal[j].adjoint();
    }
    acc /= static_cast<double>(n) * 4;
    const Matrix expected = ma_covariance(phi.coeffs(), 0);
    EXPECT_LT((acc - expected).cwiseAbs().maxCoeff(), 5.0 * expected.cwiseAbs().maxCoeff() / std::sqrt(n * 4.0));
}

TEST(Simulation, Validation) {
    EXPECT_THROW(simulate_ma({MaPolynomial::scalar({1.0, 0.5, 0.1}), MaPolynomial::scalar({1.0}), 1, 1, 0}), Error);
    EXPECT_THROW(simulate_ma({MaPolynomial::identity(2), MaPolynomial::scalar({1.0}), 4, 1, 0}), Error);
    EXPECT_THROW(simulate_ma({MaPolynomial::scalar({1.0}), MaPolynomial::scalar({1.0}), 4, 0, 0}), Error);
}

TEST(EmpiricalMse, IdentityFilterWithoutNoiseIsExact) {
    const SimulationSpec spec{MaPolynomial::scalar({1.0, 0.5}), MaPolynomial::scalar({0.0}), 6, 200, 4};
    const auto a = FunctionalWeights::scalar(std::vector<Complex>{1.0, -0.5, 2.0});
    const auto est = empirical_mse(scalar_filter({1.0, -0.5, 2.0}), spec, a);
    EXPECT_EQ(est.mean, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST(EmpiricalMse, WhiteWhiteOptimalFilter) {
    const SimulationSpec spec{MaPolynomial::scalar({1.0}), MaPolynomial::scalar({1.0}), 1, 20000, 5};
    const auto est = empirical_mse(scalar_filter({0.5}), spec, one());
    EXPECT_NEAR(est.mean, 0.5, kMonteCarloBand * est.std_error);
    const auto identity = empirical_mse(scalar_filter({1.0}), spec, one());
    EXPECT_NEAR(identity.mean, 1.0, kMonteCarloBand * identity.std_error);
    EXPECT_GT(identity.mean, est.mean);
}

TEST(EmpiricalMse, HorizonMustCoverFilter) {
    const SimulationSpec spec{MaPolynomial::scalar({1.0}), MaPolynomial::scalar({1.0}), 1, 10, 5};
    EXPECT_THROW(empirical_mse(scalar_filter({0.5, 0.1}), spec, one()), Error);
}
