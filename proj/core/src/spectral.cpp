#include "pcf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grid_fft.hpp"
#include "pcf/error.hpp"
#include "pcf/text_io.hpp"

namespace pcf {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = 1e-10;

double scale_of(const Matrix& m) { return std::max(1.0, m.norm()); }

double min_eig(const Matrix& m) {
    if (m.rows() == 1) return m(0, 0).real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// d(0) -> d(0) U with U unitary such that d(0) U is lower triangular with a
// positive real diagonal; the same U is applied to every coefficient.
void normalize_leading(std::vector<Matrix>& coeffs) {
    const Matrix& d0 = coeffs.front();
    const Eigen::HouseholderQR<Matrix> qr(d0.adjoint());
    Matrix unitary = qr.householderQ();
    const Matrix lower = (d0 * unitary).eval();
    for (Eigen::Index k = 0; k < lower.rows(); ++k) {
        const Complex diag = lower(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) unitary.col(k) *= std::conj(diag) / mag;
    }
    for (auto& c : coeffs) c = (c * unitary).eval();
    // Exact zeros above the diagonal; they are rounding noise at this point.
    Matrix& lead = coeffs.front();
    for (Eigen::Index i = 0; i < lead.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < lead.cols(); ++j) lead(i, j) = 0.0;
        lead(i, i) = lead(i, i).real();
    }
}

// sup_r |S_r - P_r P_r^*|_F / sup_r |S_r|_F
double grid_residual(const std::vector<Matrix>& target, const std::vector<Matrix>& factor_values) {
    double worst = 0.0;
    double scale = 0.0;
    if (!target.empty() && target.front().rows() == 1) {
        for (std::size_t r = 0; r < target.size(); ++r) {
            const Complex t = target[r](0, 0);
            scale = std::max(scale, std::abs(t));
            worst = std::max(worst, std::abs(t - std::norm(factor_values[r](0, 0))));
        }
        return worst / std::max(scale, std::numeric_limits<double>::min());
    }
    Matrix diff;
    for (std::size_t r = 0; r < target.size(); ++r) {
        const Matrix& p = factor_values[r];
        scale = std::max(scale, target[r].norm());
        diff = target[r];
        diff.noalias() -= p * p.adjoint();
        worst = std::max(worst, diff.norm());
    }
    return worst / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectralDensityGrid

SpectralDensityGrid::SpectralDensityGrid(int dim, std::vector<Matrix> values)
    : dim_(dim), values_(std::move(values)) {
    if (dim_ < 1) throw Error(ErrorKind::invalid_argument, "density dimension must be >= 1");
    if (values_.empty()) throw Error(ErrorKind::empty_input, "density grid is empty");
    for (std::size_t r = 0; r < values_.size(); ++r) {
        const Matrix& v = values_[r];
        if (v.rows() != dim_ || v.cols() != dim_) {
            throw Error(ErrorKind::dimension_mismatch, "density value " + std::to_string(r) + " is not K x K");
        }
        if ((v - v.adjoint()).norm() > kHermitianTol * scale_of(v)) {
            throw Error(ErrorKind::invalid_argument, "density value at grid point " + std::to_string(r) +
                                                         " is not Hermitian");
        }
        if (min_eig(v) < -kPsdTol * scale_of(v)) {
            throw Error(ErrorKind::invalid_argument, "density value at grid point " + std::to_string(r) +
                                                         " is not positive semidefinite");
        }
    }
}

SpectralDensityGrid SpectralDensityGrid::unchecked(int dim, std::vector<Matrix> values) {
    SpectralDensityGrid g;
    g.dim_ = dim;
    g.values_ = std::move(values);
    return g;
}

SpectralDensityGrid SpectralDensityGrid::constant(const Matrix& value, int grid_size) {
    if (grid_size < 1) throw Error(ErrorKind::invalid_argument, "grid size must be >= 1");
    return SpectralDensityGrid(static_cast<int>(value.rows()), std::vector<Matrix>(grid_size, value));
}

SpectralDensityGrid SpectralDensityGrid::zero(int dim, int grid_size) {
    return constant(Matrix::Zero(dim, dim), grid_size);
}

double SpectralDensityGrid::frequency(int r, int grid_size) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * r / grid_size;
}

double SpectralDensityGrid::moment(int k) const {
    double s = 0.0;
    for (const auto& v : values_) s += v(k, k).real();
    return s / static_cast<double>(values_.size());
}

std::vector<double> SpectralDensityGrid::moments() const {
    std::vector<double> out(dim_);
    for (int k = 0; k < dim_; ++k) out[k] = moment(k);
    return out;
}

double SpectralDensityGrid::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : values_) m = std::min(m, min_eig(v));
    return m;
}

bool SpectralDensityGrid::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const Matrix& v) { return v.isZero(0.0); });
}

SpectralDensityGrid SpectralDensityGrid::operator+(const SpectralDensityGrid& other) const {
    if (other.dim_ != dim_ || other.size() != size()) {
        throw Error(ErrorKind::grid_mismatch, "cannot add densities on different grids");
    }
    std::vector<Matrix> sum(values_.size());
    for (std::size_t r = 0; r < values_.size(); ++r) sum[r] = values_[r] + other.values_[r];
    return unchecked(dim_, std::move(sum));
}

SpectralDensityGrid SpectralDensityGrid::scaled(double factor) const {
    if (factor < 0.0) throw Error(ErrorKind::invalid_argument, "density scale factor must be >= 0");
    std::vector<Matrix> out(values_.size());
    for (std::size_t r = 0; r < values_.size(); ++r) out[r] = factor * values_[r];
    return unchecked(dim_, std::move(out));
}

// ---------------------------------------------------------------------------
// MaPolynomial

MaPolynomial::MaPolynomial(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::empty_input, "polynomial has no coefficients");
    rows_ = static_cast<int>(coeffs_.front().rows());
    cols_ = static_cast<int>(coeffs_.front().cols());
    if (rows_ < 1 || cols_ < 1) throw Error(ErrorKind::invalid_argument, "polynomial coefficients are empty matrices");
    for (const auto& c : coeffs_) {
        if (c.rows() != rows_ || c.cols() != cols_) {
            throw Error(ErrorKind::dimension_mismatch, "polynomial coefficients differ in shape");
        }
    }
}

MaPolynomial MaPolynomial::zero(int rows, int cols, int order) {
    return MaPolynomial(std::vector<Matrix>(order + 1, Matrix::Zero(rows, cols)));
}

MaPolynomial MaPolynomial::identity(int dim, double scale) {
    return MaPolynomial({scale * Matrix::Identity(dim, dim)});
}

MaPolynomial MaPolynomial::scalar(const std::vector<Complex>& coeffs) {
    std::vector<Matrix> m;
    m.reserve(coeffs.size());
    for (const Complex c : coeffs) m.push_back(Matrix::Constant(1, 1, c));
    return MaPolynomial(std::move(m));
}

Matrix MaPolynomial::at(int u) const {
    if (u < 0 || u > order()) return Matrix::Zero(rows_, cols_);
    return coeffs_[u];
}

Matrix MaPolynomial::eval(double lambda) const {
    Matrix out = Matrix::Zero(rows_, cols_);
    for (std::size_t u = 0; u < coeffs_.size(); ++u) {
        out += std::polar(1.0, -static_cast<double>(u) * lambda) * coeffs_[u];
    }
    return out;
}

std::vector<Matrix> MaPolynomial::on_grid(int grid_size) const {
    return detail::lags_to_grid(coeffs_, grid_size);
}

double MaPolynomial::energy() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += c.squaredNorm();
    return s;
}

bool MaPolynomial::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Matrix& c) { return c.isZero(0.0); });
}

// ---------------------------------------------------------------------------
// CovarianceSequence

Matrix CovarianceSequence::at(int j) const {
    if (std::abs(j) > max_lag()) {
        throw Error(ErrorKind::invalid_argument, "covariance lag " + std::to_string(j) + " is out of range");
    }
    return j >= 0 ? lags[j] : Matrix(lags[-j].adjoint());
}

Matrix CovarianceSequence::block_toeplitz(int n) const {
    Matrix out(static_cast<Eigen::Index>(n) * dim, static_cast<Eigen::Index>(n) * dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out.block(i * dim, j * dim, dim, dim) = at(j - i);
    }
    return out;
}

bool CovarianceSequence::is_psd(int n, double tol) const {
    const Matrix t = block_toeplitz(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, t.norm());
}

// ---------------------------------------------------------------------------
// Operations

SpectralDensityGrid density_from_ma(const MaPolynomial& p, int grid_size) {
    if (grid_size < 2 * p.order() + 1) {
        throw Error(ErrorKind::aliasing, "grid size F=" + std::to_string(grid_size) +
                                             " is below 2L+1 for polynomial order L=" +
                                             std::to_string(p.order()));
    }
    const std::vector<Matrix> values = p.on_grid(grid_size);
    std::vector<Matrix> out(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) {
        Matrix v = values[r] * values[r].adjoint();
        // Symmetrize away rounding so the Hermitian invariant holds exactly.
        out[r] = 0.5 * (v + v.adjoint());
    }
    return SpectralDensityGrid::unchecked(p.rows(), std::move(out));
}

CovarianceSequence covariances_from_density(const SpectralDensityGrid& f, int max_lag) {
    if (max_lag < 0 || 2 * max_lag >= f.size()) {
        throw Error(ErrorKind::aliasing, "covariance lag " + std::to_string(max_lag) +
                                             " must be below half the grid size " + std::to_string(f.size()));
    }
    CovarianceSequence cov;
    cov.dim = f.dim();
    cov.lags = detail::grid_to_lags(f.values(), max_lag);
    cov.lags[0] = 0.5 * (cov.lags[0] + cov.lags[0].adjoint());
    return cov;
}

Factorization factorize(const SpectralDensityGrid& density, int order, const FactorizeOptions& options) {
    const int dim = density.dim();
    const int n = density.size();
    if (order < 0) throw Error(ErrorKind::invalid_argument, "factor order must be >= 0");
    if (n < 2 * order + 1) {
        throw Error(ErrorKind::aliasing, "grid size F=" + std::to_string(n) + " is below 2L+1 for L=" +
                                             std::to_string(order));
    }
    for (int r = 0; r < n; ++r) {
        const double m = min_eig(density[r]);
        if (!(m >= options.pd_eps)) {
            throw Error(ErrorKind::factorization_domain,
                        "density is not uniformly positive definite: min eigenvalue " + format_number(m) +
                            " at grid point " + std::to_string(r));
        }
    }

    const std::vector<Matrix>& target = density.values();
    Matrix mean = Matrix::Zero(dim, dim);
    for (const auto& v : target) mean += v;
    mean /= static_cast<double>(n);
    const Matrix start = Eigen::LLT<Matrix>(mean).matrixL();

    // Newton iteration psi <- psi [psi^{-1} S psi^{-*} + I]_+ on the grid
    // (Wilson). The causal part keeps positive lags, and the upper triangle
    // plus half the diagonal of lag 0.
    detail::MatrixFft fft(n);
    std::vector<Matrix> psi(n, start);
    std::vector<Matrix> work(n, Matrix(dim, dim));
    std::vector<Matrix> lags(n, Matrix(dim, dim));
    const Matrix eye = Matrix::Identity(dim, dim);
    Eigen::PartialPivLU<Matrix> lu(dim);
    Matrix left(dim, dim), left_adj(dim, dim), right(dim, dim);

    double residual = grid_residual(target, psi);
    double previous = std::numeric_limits<double>::infinity();
    int iter = 0;
    const double inner_tol = std::min(options.tol, 1e-14);
    while (iter < options.max_iter && residual > inner_tol) {
        if (residual >= previous && residual < options.tol) break;  // stalled at rounding level
        previous = residual;
        for (int r = 0; r < n; ++r) {
            if (dim == 1) {
                work[r](0, 0) = target[r](0, 0) / std::norm(psi[r](0, 0)) + 1.0;
                continue;
            }
            lu.compute(psi[r]);
            left.noalias() = lu.solve(target[r]);
            left_adj = left.adjoint();
            right.noalias() = lu.solve(left_adj);
            work[r] = right.adjoint();
            work[r] += eye;  // psi^{-1} S psi^{-*} + I
        }
        fft.inverse(work, lags);
        Matrix& zero_lag = lags[0];
        for (int i = 0; i < dim; ++i) {
            zero_lag(i, i) *= 0.5;
            for (int j = 0; j < i; ++j) zero_lag(i, j) = 0.0;
        }
        const int half = n / 2;
        for (int u = 1; u < n; ++u) {
            if (n % 2 == 0 && u == half) {
                lags[u] *= 0.5;
            } else if (u > half) {
                lags[u].setZero();
            }
        }
        fft.forward(lags, work);
        for (int r = 0; r < n; ++r) {
            right.noalias() = psi[r] * work[r];
            psi[r] = right;
        }
        residual = grid_residual(target, psi);
        ++iter;
    }

    fft.inverse(psi, lags);
    std::vector<Matrix> coeffs;
    coeffs.reserve(order + 1);
    for (int l = 0; l <= order; ++l) coeffs.push_back(detail::shift_sign(l) * lags[l]);
    normalize_leading(coeffs);

    MaPolynomial factor(std::move(coeffs));
    const double final_residual = factorization_residual(density, factor);
    if (!(final_residual <= options.tol)) {
        throw ConvergenceError("factorization residual " + format_number(final_residual) +
                                   " exceeds tolerance after " + std::to_string(iter) +
                                   " iterations (order " + std::to_string(order) + ")",
                               final_residual, iter);
    }
    return Factorization{std::move(factor), final_residual, iter};
}

double factorization_residual(const SpectralDensityGrid& density, const MaPolynomial& factor) {
    if (factor.rows() != density.dim()) {
        throw Error(ErrorKind::dimension_mismatch, "factor rows differ from density dimension");
    }
    return grid_residual(density.values(), factor.on_grid(density.size()));
}

MaPolynomial invert_factor(const MaPolynomial& d, int order) {
    if (d.rows() != d.cols()) {
        throw Error(ErrorKind::invalid_argument, "only square factors (M = K) can be inverted");
    }
    if (order < 0) throw Error(ErrorKind::invalid_argument, "inverse order must be >= 0");
    const Eigen::FullPivLU<Matrix> lu(d[0]);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
        throw Error(ErrorKind::singular_factor, "leading factor coefficient d(0) is singular");
    }
    const Matrix d0_inv = lu.inverse();
    std::vector<Matrix> b;
    b.reserve(order + 1);
    b.push_back(d0_inv);
    for (int n = 1; n <= order; ++n) {
        Matrix acc = Matrix::Zero(d.rows(), d.cols());
        for (int u = std::max(0, n - d.order()); u < n; ++u) acc.noalias() += b[u] * d[n - u];
        b.push_back(-acc * d0_inv);
    }
    return MaPolynomial(std::move(b));
}

double tail_norm(const MaPolynomial& b) { return b[b.order()].norm(); }

SpectralDensityGrid ResidualDensity::density() const {
    if (!feasible()) {
        throw Error(ErrorKind::infeasible_candidate,
                    "residual density is negative at " + std::to_string(negative_points.size()) +
                        " grid points (min eigenvalue " + format_number(min_eigenvalue) + ")");
    }
    std::vector<Matrix> v = values;
    return SpectralDensityGrid(dim, std::move(v));
}

ResidualDensity residual_density_subtract(const MaPolynomial& sum_factor, const SpectralDensityGrid& known,
                                          bool strict) {
    if (sum_factor.rows() != known.dim()) {
        throw Error(ErrorKind::grid_mismatch, "factor and density dimensions differ");
    }
    const std::vector<Matrix> p = sum_factor.on_grid(known.size());
    ResidualDensity out;
    out.dim = known.dim();
    out.values.resize(p.size());
    out.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < p.size(); ++r) {
        Matrix v = p[r] * p[r].adjoint() - known[r];
        v = 0.5 * (v + v.adjoint());
        const double m = min_eig(v);
        out.min_eigenvalue = std::min(out.min_eigenvalue, m);
        if (m < -kPsdTol) out.negative_points.push_back(static_cast<int>(r));
        out.values[r] = std::move(v);
    }
    if (strict && !out.feasible()) out.density();  // throws
    return out;
}

}  // namespace pcf
