#pragma once

// Reference computations for the tests. None of these go through the
// library's FFT, factorization or filter code; they are slow, direct
// evaluations of the defining sums.

#include <random>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/spectral.hpp"

namespace pcf::testing {

/// sum_u c(u) e^{-i u lambda}, term by term.
Matrix eval_direct(const std::vector<Matrix>& c, double lambda);

/// P(lambda_r) P(lambda_r)^* on the grid lambda_r = -pi + 2 pi r / F.
std::vector<Matrix> density_direct(const std::vector<Matrix>& c, int grid_size);

/// MA autocovariance R(j) = sum_u c(u + j) c(u)^*, j >= 0.
Matrix ma_covariance(const std::vector<Matrix>& c, int j);

/// Canonical factor by block Cholesky of the n-block Toeplitz covariance
/// (the last block row converges to d(0..order)); lower-triangular d(0).
std::vector<Matrix> bauer_factor(const std::vector<Matrix>& covariances, int order, int n_blocks);

/// Wiener filter from the time-domain normal equations on `horizon` blocks:
/// returns h_0..h_{horizon-1} for estimating sum_j a_j^T zeta_{-j}.
struct NormalEquationFilter {
    std::vector<Vector> h;
    double mse = 0.0;
};
NormalEquationFilter normal_equation_filter(const std::vector<Matrix>& signal_cov,
                                            const std::vector<Matrix>& noise_cov, const std::vector<Vector>& a,
                                            int horizon);

/// (1/F) sum_r (A - h)^T f conj(A - h) + h^T g conj(h), with A and h
/// evaluated term by term.
double quadratic_mse(const std::vector<Vector>& a, const std::vector<Vector>& h, const std::vector<Matrix>& f,
                     const std::vector<Matrix>& g);

/// Random K x K MA(order) with lower-triangular positive-diagonal c(0) and
/// geometrically decaying higher coefficients.
std::vector<Matrix> random_lower_ma(int dim, int order, std::mt19937_64& rng);

std::vector<Vector> random_weights(int dim, int max_lag, std::mt19937_64& rng);

double max_abs_diff(const std::vector<Matrix>& x, const std::vector<Matrix>& y);

}  // namespace pcf::testing
