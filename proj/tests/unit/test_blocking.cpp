#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "pcf/blocking.hpp"
#include "pcf/error.hpp"

using namespace pcf;

namespace {

constexpr double kPi = std::numbers::pi;

// k with harmonic_of(k) == m, 0-based
int index_of_harmonic(int m, int dim) {
    for (int k = 1; k <= dim; ++k) {
        if (harmonic_of(k) == m) return k - 1;
    }
    return -1;
}

SampledPath sample(double period, int n, int periods, const std::function<Complex(double)>& x) {
    SampledPath p;
    p.period = period;
    p.samples_per_period = n;
    for (int s = 0; s < n * periods; ++s) p.values.push_back(x((s + 0.5) * period / n));
    return p;
}

}  // namespace

TEST(Harmonics, EnumeratesBilateralOrder) {
    const std::vector<int> expected{0, 1, -1, 2, -2, 3, -3};
    for (int k = 1; k <= 7; ++k) EXPECT_EQ(harmonic_of(k), expected[k - 1]);
}

TEST(Harmonics, IsInjective) {
    std::set<int> seen;
    for (int k = 1; k <= 101; ++k) EXPECT_TRUE(seen.insert(harmonic_of(k)).second);
}

TEST(BlockPath, ConstantPathKeepsOnlyZeroHarmonic) {
    const double period = 2.0;
    const Complex c(1.5, -0.5);
    const auto seq = block_path(sample(period, 16, 1, [&](double) { return c; }), 3);
    ASSERT_EQ(seq.size(), 1u);
    EXPECT_NEAR(std::abs(seq[0](0) - c * std::sqrt(period)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(seq[0](1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(seq[0](2)), 0.0, 1e-12);
}

TEST(BlockPath, PureHarmonicLandsOnItsIndex) {
    const auto seq = block_path(sample(1.0, 64, 1, [](double t) { return std::polar(1.0, 2.0 * kPi * t); }), 3);
    const int k = index_of_harmonic(1, 3);
    ASSERT_EQ(k, 1);
    EXPECT_NEAR(std::abs(seq[0](k) - 1.0), 0.0, 1e-10);
    for (int j = 0; j < 3; ++j) {
        if (j != k) EXPECT_NEAR(std::abs(seq[0](j)), 0.0, 1e-10);
    }
}

TEST(BlockPath, MatchesDirectQuadrature) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    const double period = 0.7;
    const int n = 12;
    const int dim = 5;
    SampledPath p;
    p.period = period;
    p.samples_per_period = n;
    for (int s = 0; s < 3 * n; ++s) {
        const double re = normal(rng);
        const double im = normal(rng);
        p.values.emplace_back(re, im);
    }
    const auto seq = block_path(p, dim);
    for (int j = 0; j < 3; ++j) {
        for (int k = 1; k <= dim; ++k) {
            Complex direct = 0.0;
            for (int s = 0; s < n; ++s) {
                const double u = (s + 0.5) * period / n;
                direct += p.values[j * n + s] * std::exp(Complex(0.0, -2.0 * kPi * harmonic_of(k) * u / period));
            }
            direct *= (period / n) / std::sqrt(period);
            EXPECT_NEAR(std::abs(seq[j](k - 1) - direct), 0.0, 1e-12);
        }
    }
}

TEST(BlockPath, IdenticalPeriodsGiveIdenticalBlocks) {
    const auto seq = block_path(sample(1.0, 8, 2, [](double t) { return Complex(std::sin(2.0 * kPi * t), 0.0); }), 4);
    ASSERT_EQ(seq.size(), 2u);
    EXPECT_LT((seq[0] - seq[1]).norm(), 1e-14);
}

TEST(BlockPath, Linearity) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    SampledPath x, y, z;
    for (SampledPath* p : {&x, &y, &z}) {
        p->period = 1.0;
        p->samples_per_period = 10;
    }
    const Complex alpha(0.3, -1.2), beta(2.0, 0.5);
    for (int s = 0; s < 20; ++s) {
        const Complex a(normal(rng), normal(rng)), b(normal(rng), normal(rng));
        x.values.push_back(a);
        y.values.push_back(b);
        z.values.push_back(alpha * a + beta * b);
    }
    const auto bx = block_path(x, 6), by = block_path(y, 6), bz = block_path(z, 6);
    for (std::size_t j = 0; j < bz.size(); ++j) EXPECT_LT((bz[j] - (alpha * bx[j] + beta * by[j])).norm(), 1e-12);
}

TEST(BlockPath, ParsevalForBandLimitedPaths) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    const double period = 1.3;
    const int n = 16;
    const int dim = 5;
    std::vector<Vector> blocks(2, Vector(dim));
    for (auto& b : blocks) {
        for (int k = 0; k < dim; ++k) b(k) = Complex(normal(rng), normal(rng));
    }
    const SampledPath path = unblock(BlockedSequence(dim, blocks), period, n);
    const auto seq = block_path(path, dim);
    for (int j = 0; j < 2; ++j) {
        double energy = 0.0;
        for (int s = 0; s < n; ++s) energy += std::norm(path.values[j * n + s]);
        EXPECT_NEAR(seq[j].squaredNorm(), energy * period / n, 1e-9);
    }
}

TEST(BlockPath, ParsevalInequalityWithTruncation) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    SampledPath p;
    p.period = 1.0;
    p.samples_per_period = 16;
    for (int s = 0; s < 16; ++s) p.values.emplace_back(normal(rng), normal(rng));
    double energy = 0.0;
    for (const auto& v : p.values) energy += std::norm(v);
    EXPECT_LE(block_path(p, 5)[0].squaredNorm(), energy / 16 + 1e-12);
}

TEST(BlockPath, Errors) {
    SampledPath empty;
    empty.samples_per_period = 4;
    EXPECT_THROW(block_path(empty, 2), Error);
    try {
        block_path(sample(1.0, 4, 1, [](double) { return Complex(1.0); }), 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolution);
    }
    SampledPath ragged = sample(1.0, 4, 1, [](double) { return Complex(1.0); });
    ragged.values.pop_back();
    EXPECT_THROW(block_path(ragged, 2), Error);
}

TEST(BlockWeights, IndicatorOnePeriod) {
    const double period = 2.0;
    std::vector<Complex> samples(8, 1.0);
    samples.resize(16, 0.0);
    const auto a = block_weights(samples, period, 8, 2);
    ASSERT_EQ(a.max_lag(), 1);
    EXPECT_NEAR(std::abs(a[0](0) - std::sqrt(period)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a[0](1)), 0.0, 1e-12);
    EXPECT_NEAR(a[1].norm(), 0.0, 1e-12);
}

TEST(BlockWeights, IndicatorTwoPeriods) {
    const auto a = block_weights(std::vector<Complex>(16, 1.0), 1.0, 8, 3);
    EXPECT_LT((a[0] - a[1]).norm(), 1e-14);
    EXPECT_NEAR(std::abs(a[0](0) - 1.0), 0.0, 1e-12);
}

TEST(BlockWeights, CosineSplitsBetweenPlusAndMinusOne) {
    const int n = 32;
    std::vector<Complex> samples;
    for (int s = 0; s < n; ++s) samples.emplace_back(std::cos(2.0 * kPi * (s + 0.5) / n), 0.0);
    const auto a = block_weights(samples, 1.0, n, 3);
    EXPECT_NEAR(std::abs(a[0](index_of_harmonic(0, 3))), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(a[0](index_of_harmonic(1, 3)) - 0.5), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(a[0](index_of_harmonic(-1, 3)) - 0.5), 0.0, 1e-10);
}

TEST(FunctionalWeightsTest, StoresSummabilityMetadata) {
    std::vector<Vector> coeffs{Vector::Constant(2, Complex(1.0, 0.0)), Vector::Constant(2, Complex(0.0, 2.0))};
    const FunctionalWeights a(coeffs);
    EXPECT_NEAR(a.abs_sum(), std::sqrt(2.0) + std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(a.weighted_square_sum(), 1.0 * 2.0 + 2.0 * 8.0, 1e-12);
    EXPECT_NEAR(a.squared_norm(), 10.0, 1e-12);
}

TEST(Unblock, ZeroAndConstant) {
    const auto zero = unblock(BlockedSequence(3, {Vector::Zero(3)}), 1.0, 8);
    for (const auto& v : zero.values) EXPECT_EQ(std::abs(v), 0.0);
    Vector b = Vector::Zero(3);
    b(0) = 2.0 * std::sqrt(4.0);
    const auto path = unblock(BlockedSequence(3, {b}), 4.0, 8);
    for (const auto& v : path.values) EXPECT_NEAR(std::abs(v - 2.0), 0.0, 1e-12);
}

TEST(Unblock, RoundTripBandLimited) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal;
    Vector b(5);
    for (int k = 0; k < 5; ++k) b(k) = Complex(normal(rng), normal(rng));
    const auto back = block_path(unblock(BlockedSequence(5, {b}), 1.0, 64), 5);
    EXPECT_LT((back[0] - b).norm(), 1e-10);
}

TEST(Unblock, ResolutionError) {
    EXPECT_THROW(unblock(BlockedSequence(5, {Vector::Zero(5)}), 1.0, 4), Error);
}
