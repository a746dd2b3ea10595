#pragma once

#include <cstddef>
#include <vector>

#include "pcf/types.hpp"

namespace pcf {

class MaPolynomial;

/// K x K Hermitian positive semidefinite matrix function sampled on the grid
/// lambda_r = -pi + 2*pi*r/F, r = 0..F-1.
class SpectralDensityGrid {
public:
    SpectralDensityGrid() = default;
    /// Validates Hermitian symmetry and positive semidefiniteness at every point.
    SpectralDensityGrid(int dim, std::vector<Matrix> values);

    /// Skips validation; the caller guarantees Hermitian PSD values (for
    /// example products P P^* computed on the grid).
    static SpectralDensityGrid unchecked(int dim, std::vector<Matrix> values);
    static SpectralDensityGrid constant(const Matrix& value, int grid_size);
    static SpectralDensityGrid zero(int dim, int grid_size);

    static double frequency(int r, int grid_size);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(values_.size()); }
    const Matrix& operator[](std::size_t r) const { return values_[r]; }
    const std::vector<Matrix>& values() const { return values_; }

    /// (1/2pi) * integral of the k-th diagonal entry (k is 0-based).
    double moment(int k) const;
    std::vector<double> moments() const;
    double min_eigenvalue() const;
    bool is_zero() const;

    SpectralDensityGrid operator+(const SpectralDensityGrid& other) const;
    SpectralDensityGrid scaled(double factor) const;

private:
    int dim_ = 0;
    std::vector<Matrix> values_;
};

/// One-sided matrix polynomial P(lambda) = sum_u c(u) e^{-i u lambda}, u = 0..L,
/// with K x M coefficients.
class MaPolynomial {
public:
    MaPolynomial() = default;
    explicit MaPolynomial(std::vector<Matrix> coeffs);

    static MaPolynomial zero(int rows, int cols, int order = 0);
    static MaPolynomial identity(int dim, double scale = 1.0);
    static MaPolynomial scalar(const std::vector<Complex>& coeffs);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Matrix& operator[](std::size_t u) const { return coeffs_[u]; }
    const std::vector<Matrix>& coeffs() const { return coeffs_; }

    /// Coefficient at lag u, zero beyond the stored order.
    Matrix at(int u) const;
    Matrix eval(double lambda) const;
    /// Values at every point of a size-F density grid.
    std::vector<Matrix> on_grid(int grid_size) const;
    /// sum_u |c(u)|_F^2
    double energy() const;
    bool is_zero() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Matrix> coeffs_;
};

/// Matrix covariances R(0..Lmax) with R(-j) = R(j)^*.
struct CovarianceSequence {
    int dim = 0;
    std::vector<Matrix> lags;

    int max_lag() const { return static_cast<int>(lags.size()) - 1; }
    /// R(j) for any |j| <= max_lag().
    Matrix at(int j) const;
    /// Block Toeplitz matrix [R(j - i)]_{i,j = 0..n-1}.
    Matrix block_toeplitz(int n) const;
    bool is_psd(int n, double tol = 1e-10) const;
};

struct FactorizeOptions {
    double tol = 1e-10;
    int max_iter = 200;
    double pd_eps = 1e-10;
};

struct Factorization {
    MaPolynomial factor;
    double residual = 0.0;
    int iterations = 0;
};

/// Result of subtracting a known density from P P^*.
struct ResidualDensity {
    int dim = 0;
    std::vector<Matrix> values;
    std::vector<int> negative_points;
    double min_eigenvalue = 0.0;

    bool feasible() const { return negative_points.empty(); }
    /// Throws infeasible_candidate when any grid point is negative.
    SpectralDensityGrid density() const;
};

SpectralDensityGrid density_from_ma(const MaPolynomial& p, int grid_size);

CovarianceSequence covariances_from_density(const SpectralDensityGrid& f, int max_lag);

/// Canonical (minimum-phase) factor d(0..L) of a uniformly positive definite
/// density, normalized so that d(0) is lower triangular with a positive real
/// diagonal.
Factorization factorize(const SpectralDensityGrid& density, int order,
                        const FactorizeOptions& options = {});

/// sup_r |S_r - P(l_r) P(l_r)^*|_F / |S_r|_F
double factorization_residual(const SpectralDensityGrid& density, const MaPolynomial& factor);

/// Coefficients b(0..order) of the power-series inverse of a square factor,
/// b(lambda) d(lambda) = I.
MaPolynomial invert_factor(const MaPolynomial& d, int order);

/// |b(order)|_F, the last retained coefficient of an inverse series.
double tail_norm(const MaPolynomial& b);

ResidualDensity residual_density_subtract(const MaPolynomial& sum_factor,
                                          const SpectralDensityGrid& known,
                                          bool strict = false);

}  // namespace pcf
