#include "pcf/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "grid_fft.hpp"
#include "pcf/error.hpp"

namespace pcf {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double quad(const Vector& x, const Matrix& m) { return (x.transpose() * m * x.conjugate()).value().real(); }

VectorSequence sequence_on_grid(const VectorSequence& x, int grid_size) {
    std::vector<Matrix> cols;
    cols.reserve(x.size());
    for (const auto& v : x) cols.emplace_back(v);
    const std::vector<Matrix> values = detail::lags_to_grid(cols, grid_size);
    VectorSequence out;
    out.reserve(values.size());
    for (const auto& v : values) out.emplace_back(v.col(0));
    return out;
}

SpectralDensityGrid sum_density(const MaPolynomial& phi, const MaPolynomial& psi, int grid_size) {
    const std::vector<Matrix> pf = phi.on_grid(grid_size);
    const std::vector<Matrix> pg = psi.on_grid(grid_size);
    std::vector<Matrix> out(grid_size);
    for (int r = 0; r < grid_size; ++r) {
        Matrix v = pf[r] * pf[r].adjoint() + pg[r] * pg[r].adjoint();
        out[r] = 0.5 * (v + v.adjoint());
    }
    return SpectralDensityGrid::unchecked(phi.rows(), std::move(out));
}

// ---------------------------------------------------------------------------
// Real parameterization of square factors whose row norms are pinned to the
// class moments (row k of [c(0) .. c(L)] carries (1/2pi) int f_kk).

struct FreeFactor {
    int dim = 0;
    int order = 0;
    std::vector<double> moments;
};

class Parameterization {
public:
    explicit Parameterization(std::vector<FreeFactor> factors) : factors_(std::move(factors)) {
        std::size_t offset = 0;
        for (const auto& f : factors_) {
            offsets_.push_back(offset);
            offset += static_cast<std::size_t>(f.dim) * row_length(f);
        }
        size_ = offset;
    }

    std::size_t size() const { return size_; }

    std::vector<MaPolynomial> unpack(const Eigen::VectorXd& x) const {
        std::vector<MaPolynomial> out;
        out.reserve(factors_.size());
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const FreeFactor& f = factors_[i];
            std::vector<Matrix> coeffs(f.order + 1, Matrix::Zero(f.dim, f.dim));
            for (int k = 0; k < f.dim; ++k) {
                const std::size_t base = row_offset(i, k);
                for (int u = 0; u <= f.order; ++u) {
                    for (int m = 0; m < f.dim; ++m) {
                        const std::size_t at = base + 2 * (static_cast<std::size_t>(u) * f.dim + m);
                        coeffs[u](k, m) = Complex(x[at], x[at + 1]);
                    }
                }
            }
            out.emplace_back(std::move(coeffs));
        }
        return out;
    }

    Eigen::VectorXd pack(const std::vector<MaPolynomial>& polys) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const FreeFactor& f = factors_[i];
            for (int k = 0; k < f.dim; ++k) {
                const std::size_t base = row_offset(i, k);
                for (int u = 0; u <= std::min(f.order, polys[i].order()); ++u) {
                    for (int m = 0; m < f.dim; ++m) {
                        const std::size_t at = base + 2 * (static_cast<std::size_t>(u) * f.dim + m);
                        x[at] = polys[i][u](k, m).real();
                        x[at + 1] = polys[i][u](k, m).imag();
                    }
                }
            }
        }
        return x;
    }

    /// Rescales every row onto its moment sphere.
    void project(Eigen::VectorXd& x) const {
        for_each_row([&](std::size_t base, std::size_t len, double moment, int k) {
            auto row = x.segment(base, len);
            const double norm = row.norm();
            if (moment <= 0.0) {
                row.setZero();
            } else if (norm > 0.0) {
                row *= std::sqrt(moment) / norm;
            } else {
                row.setZero();
                row[2 * k] = std::sqrt(moment);  // c(0)(k, k)
            }
        });
    }

    /// Removes the radial component of each row and zeroes pinned rows.
    void tangent(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
        for_each_row([&](std::size_t base, std::size_t len, double moment, int) {
            auto gr = g.segment(base, len);
            if (moment <= 0.0) {
                gr.setZero();
                return;
            }
            const auto xr = x.segment(base, len);
            const double xx = xr.squaredNorm();
            if (xx > 0.0) gr -= (xr.dot(gr) / xx) * xr;
        });
    }

private:
    static std::size_t row_length(const FreeFactor& f) {
        return 2 * static_cast<std::size_t>(f.order + 1) * static_cast<std::size_t>(f.dim);
    }
    std::size_t row_offset(std::size_t i, int k) const {
        return offsets_[i] + static_cast<std::size_t>(k) * row_length(factors_[i]);
    }
    template <typename Fn>
    void for_each_row(Fn&& fn) const {
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const FreeFactor& f = factors_[i];
            for (int k = 0; k < f.dim; ++k) {
                fn(row_offset(i, k), row_length(f), f.moments[k], k);
            }
        }
    }

    std::vector<FreeFactor> factors_;
    std::vector<std::size_t> offsets_;
    std::size_t size_ = 0;
};

using Objective = std::function<double(const std::vector<MaPolynomial>&)>;

struct AscentResult {
    Eigen::VectorXd x;
    double value = -std::numeric_limits<double>::infinity();
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Projected gradient ascent with central-difference gradients and
// Armijo backtracking.
AscentResult ascend(const Parameterization& param, const Objective& objective, Eigen::VectorXd x,
                    const SolverOptions& opts) {
    auto eval = [&](const Eigen::VectorXd& v) {
        const double val = objective(param.unpack(v));
        return std::isfinite(val) ? val : kNan;
    };
    AscentResult res;
    param.project(x);
    double fx = eval(x);
    if (!std::isfinite(fx)) {
        res.x = x;
        return res;
    }
    const Eigen::Index n = x.size();
    Eigen::VectorXd grad(n);
    double step = 1.0;
    int flat_steps = 0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x;
            Eigen::VectorXd xm = x;
            xp[i] += opts.fd_step;
            xm[i] -= opts.fd_step;
            const double fp = eval(xp);
            const double fm = eval(xm);
            if (std::isfinite(fp) && std::isfinite(fm)) {
                grad[i] = (fp - fm) / (2.0 * opts.fd_step);
            } else if (std::isfinite(fp)) {
                grad[i] = (fp - fx) / opts.fd_step;
            } else if (std::isfinite(fm)) {
                grad[i] = (fx - fm) / opts.fd_step;
            } else {
                grad[i] = 0.0;
            }
        }
        param.tangent(x, grad);
        const double gnorm = grad.norm();
        res.gradient_norm = gnorm;
        if (gnorm <= opts.gradient_tol * std::max(1.0, std::abs(fx))) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        Eigen::VectorXd xn;
        double fn = kNan;
        while (step > 1e-14) {
            xn = x + step * grad;
            param.project(xn);
            fn = eval(xn);
            if (std::isfinite(fn) && fn >= fx + 1e-4 * step * gnorm * gnorm) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled: gradient not small, yet no step improves
        const double gain = fn - fx;
        x = std::move(xn);
        fx = fn;
        step = std::min(step * 2.0, 1e3);
        flat_steps = gain <= 1e-15 * std::max(1.0, std::abs(fx)) ? flat_steps + 1 : 0;
        if (flat_steps >= 3) {
            res.converged = true;
            ++it;
            break;
        }
    }
    res.x = std::move(x);
    res.value = fx;
    res.iterations = it;
    return res;
}

struct RestartOutcome {
    AscentResult best;
    int best_restart = 0;
    int total_iterations = 0;
};

// Restart 0 uses `white_start`; the others draw random factors. A later
// restart replaces the incumbent only when it is better by more than the
// tie tolerance, so equal-value maximizers resolve to the earliest start.
RestartOutcome multi_start(const Parameterization& param, const Objective& objective,
                           const Eigen::VectorXd& white_start,
                           const std::function<Eigen::VectorXd(std::mt19937_64&)>& random_start,
                           const SolverOptions& opts) {
    RestartOutcome out;
    const int restarts = std::max(1, opts.restarts);
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd x0;
        if (r == 0) {
            x0 = white_start;
        } else {
            std::mt19937_64 engine(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
            x0 = random_start(engine);
        }
        AscentResult res = ascend(param, objective, std::move(x0), opts);
        out.total_iterations += res.iterations;
        const double tie = 1e-9 * std::max(1.0, std::abs(out.best.value));
        if (r == 0 || (std::isfinite(res.value) && res.value > out.best.value + tie) ||
            !std::isfinite(out.best.value)) {
            out.best = std::move(res);
            out.best_restart = r;
        }
    }
    return out;
}

Matrix white_factor(std::span<const double> moments) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(moments.size()), static_cast<Eigen::Index>(moments.size()));
    for (std::size_t k = 0; k < moments.size(); ++k) m(k, k) = std::sqrt(std::max(0.0, moments[k]));
    return m;
}

MaPolynomial padded(const Matrix& lead, int order) {
    std::vector<Matrix> coeffs(order + 1, Matrix::Zero(lead.rows(), lead.cols()));
    coeffs[0] = lead;
    return MaPolynomial(std::move(coeffs));
}

double objective_mse(const MaPolynomial& phi, const MaPolynomial& psi, const FunctionalWeights& a, Route route,
                     int grid_size, const FactorizeOptions& fopts) {
    try {
        return optimal_mse(phi, psi, a, route, grid_size, fopts);
    } catch (const Error&) {
        return kNan;
    }
}

SaddleCandidate assemble(MinimaxProblem problem, Route route, const FunctionalWeights& a, const MaPolynomial& phi,
                         const MaPolynomial& psi, const SpectralDensityGrid* f_given,
                         const SpectralDensityGrid* g_given, int grid_size, const SolverOptions& opts,
                         const DensityClassD00& cls, const RestartOutcome& run) {
    SaddleCandidate c;
    c.problem = problem;
    c.route = route;
    c.a = a;
    c.phi0 = phi;
    c.psi0 = psi;
    c.f0 = f_given ? *f_given : density_from_ma(phi, grid_size);
    c.g0 = g_given ? *g_given : density_from_ma(psi, grid_size);

    const int order = std::max(phi.order(), psi.order());
    const Factorization fac = factorize(c.f0 + c.g0, order, opts.factorize);
    c.d0 = fac.factor;
    const int lb = opts.inverse_order > 0 ? opts.inverse_order : default_inverse_order(order, a.max_lag());
    c.b0 = invert_factor(c.d0, lb);

    const FilterFactors factors{c.d0, c.b0, phi, psi};
    c.h0 = route == Route::via_g ? spectral_characteristic_via_g(c.d0, c.b0, psi, a)
                                 : spectral_characteristic_via_f(c.b0, phi, a);
    c.h0.grid_values = characteristic_on_grid(Route::via_f, factors, a, grid_size);
    // via_g on the grid gives A - b^T S_g = h0; the error is its complement.
    const VectorSequence a_grid = sequence_on_grid(a.coeffs(), grid_size);
    c.error_grid = characteristic_on_grid(Route::via_g, factors, a, grid_size);
    for (int r = 0; r < grid_size; ++r) c.error_grid[r] = a_grid[r] - c.error_grid[r];
    c.s_f0 = signal_projection(c.b0, phi, a);
    c.s_g0 = noise_projection(c.b0, psi, a);
    c.delta0 = mse(route, factors, a).delta;

    const LagrangeResidual lr = lagrange_residual(c);
    c.alpha2 = lr.alpha2;
    c.beta2 = lr.beta2;

    CandidateDiagnostics& diag = c.diagnostics;
    diag.sum_factor_residual = fac.residual;
    diag.signal_factor_residual = factorization_residual(c.f0, phi);
    diag.noise_factor_residual = factorization_residual(c.g0, psi);
    diag.membership_error = cls.membership_error(c.f0, c.g0);
    diag.lagrange_g = lr.residual_g;
    diag.lagrange_f = lr.residual_f;
    diag.gradient_norm = run.best.gradient_norm;
    diag.iterations = run.total_iterations;
    diag.restarts = std::max(1, opts.restarts);
    diag.best_restart = run.best_restart;
    diag.converged = run.best.converged;

    const bool factors_ok = diag.sum_factor_residual <= 1e-8 && diag.signal_factor_residual <= 1e-8 &&
                            diag.noise_factor_residual <= 1e-8;
    bool stationary = false;
    switch (problem) {
        case MinimaxProblem::joint:
            stationary = diag.lagrange_g <= opts.stationarity_tol && diag.lagrange_f <= opts.stationarity_tol;
            break;
        case MinimaxProblem::known_signal:
            stationary = diag.lagrange_f <= opts.stationarity_tol;
            break;
        case MinimaxProblem::known_noise:
            stationary = diag.lagrange_g <= opts.stationarity_tol;
            break;
    }
    c.certified = diag.converged && factors_ok && diag.membership_error <= 1e-8 && stationary;
    return c;
}

// Least-squares multipliers w_k for sum_r |M_r - sum_k w_k u_k u_k^*|_F^2,
// u_k = d(lambda_r)^T e_k; returns the multipliers and the sup residual.
std::pair<std::vector<double>, double> fit_stationarity(const std::vector<Matrix>& d_grid,
                                                        const VectorSequence& s_grid,
                                                        std::optional<std::span<const double>> fixed) {
    const int dim = static_cast<int>(d_grid.front().rows());
    const std::size_t n = d_grid.size();
    std::vector<double> w(dim, 0.0);
    if (fixed) {
        std::copy(fixed->begin(), fixed->end(), w.begin());
    } else {
        Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        for (std::size_t r = 0; r < n; ++r) {
            const Matrix m = s_grid[r] * s_grid[r].adjoint();
            for (int k = 0; k < dim; ++k) {
                const Vector uk = d_grid[r].row(k).transpose();
                rhs[k] += uk.dot(m * uk).real();
                for (int l = 0; l < dim; ++l) {
                    const Vector ul = d_grid[r].row(l).transpose();
                    normal(k, l) += std::norm(uk.dot(ul));
                }
            }
        }
        const Eigen::VectorXd sol = normal.ldlt().solve(rhs);
        for (int k = 0; k < dim; ++k) w[k] = std::isfinite(sol[k]) ? std::max(0.0, sol[k]) : 0.0;
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        Matrix m = s_grid[r] * s_grid[r].adjoint();
        for (int k = 0; k < dim; ++k) {
            const Vector uk = d_grid[r].row(k).transpose();
            m -= w[k] * (uk * uk.adjoint());
        }
        worst = std::max(worst, m.norm());
    }
    return {w, worst};
}

LagrangeResidual lagrange_impl(const SaddleCandidate& c, std::optional<std::span<const double>> alpha2,
                               std::optional<std::span<const double>> beta2) {
    const int grid_size = c.f0.size();
    const std::vector<Matrix> d_grid = c.d0.on_grid(grid_size);
    const VectorSequence sg = sequence_on_grid(c.s_g0, grid_size);
    const VectorSequence sf = sequence_on_grid(c.s_f0, grid_size);
    LagrangeResidual out;
    std::tie(out.alpha2, out.residual_g) = fit_stationarity(d_grid, sg, alpha2);
    std::tie(out.beta2, out.residual_f) = fit_stationarity(d_grid, sf, beta2);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void DensityClassD00::validate() const {
    if (p.empty() || p.size() != q.size()) {
        throw Error(ErrorKind::infeasible_class, "class moments p and q must be non-empty and of equal length");
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!(p[k] >= 0.0) || !(q[k] >= 0.0)) {
            throw Error(ErrorKind::infeasible_class, "class moments must be nonnegative (harmonic " +
                                                         std::to_string(k + 1) + ")");
        }
    }
}

double DensityClassD00::membership_error(const SpectralDensityGrid& f, const SpectralDensityGrid& g) const {
    if (f.dim() != dim() || g.dim() != dim()) {
        throw Error(ErrorKind::dimension_mismatch, "density dimension differs from the class");
    }
    double worst = 0.0;
    for (int k = 0; k < dim(); ++k) {
        worst = std::max(worst, std::abs(f.moment(k) - p[k]));
        worst = std::max(worst, std::abs(g.moment(k) - q[k]));
    }
    return worst;
}

bool DensityClassD00::contains(const SpectralDensityGrid& f, const SpectralDensityGrid& g, double tol) const {
    return membership_error(f, g) <= tol && f.min_eigenvalue() >= -1e-10 && g.min_eigenvalue() >= -1e-10;
}

int default_inverse_order(int factor_order, int max_lag) {
    return std::max({4 * factor_order, factor_order + max_lag, 64});
}

double objective_given_h0(const SaddleCandidate& c, const SpectralDensityGrid& f, const SpectralDensityGrid& g) {
    const VectorSequence& h = c.h0.grid_values.value();
    if (f.size() != static_cast<int>(h.size()) || g.size() != f.size() || f.dim() != c.a.dim() ||
        g.dim() != c.a.dim()) {
        throw Error(ErrorKind::grid_mismatch, "densities are not on the candidate's grid");
    }
    double acc = 0.0;
    for (int r = 0; r < f.size(); ++r) acc += quad(c.error_grid[r], f[r]) + quad(h[r], g[r]);
    return acc / static_cast<double>(f.size());
}

LagrangeResidual lagrange_residual(const SaddleCandidate& candidate) {
    return lagrange_impl(candidate, std::nullopt, std::nullopt);
}

LagrangeResidual lagrange_residual(const SaddleCandidate& candidate, std::span<const double> alpha2,
                                   std::span<const double> beta2) {
    if (static_cast<int>(alpha2.size()) != candidate.a.dim() || static_cast<int>(beta2.size()) != candidate.a.dim()) {
        throw Error(ErrorKind::dimension_mismatch, "multiplier count differs from K");
    }
    return lagrange_impl(candidate, alpha2, beta2);
}

double optimal_mse(const MaPolynomial& phi, const MaPolynomial& psi, const FunctionalWeights& a, Route route,
                   int grid_size, const FactorizeOptions& options) {
    const int order = std::max(phi.order(), psi.order());
    const Factorization fac = factorize(sum_density(phi, psi, grid_size), order, options);
    const MaPolynomial b = invert_factor(fac.factor, order + a.max_lag());
    return mse(route, FilterFactors{fac.factor, b, phi, psi}, a).delta;
}

SaddleCandidate solve_least_favorable(const DensityClassD00& cls, const FunctionalWeights& a, Route route,
                                      const SolverOptions& opts) {
    cls.validate();
    if (cls.dim() != a.dim()) throw Error(ErrorKind::dimension_mismatch, "class and weights differ in K");
    for (int k = 0; k < cls.dim(); ++k) {
        if (!(cls.p[k] + cls.q[k] > 0.0)) {
            throw Error(ErrorKind::infeasible_class,
                        "p_k + q_k must be positive for every harmonic (k=" + std::to_string(k + 1) + ")");
        }
    }
    const int dim = cls.dim();
    const int order = std::max(0, opts.order);
    const int grid = opts.grid_size;
    const Parameterization param({FreeFactor{dim, order, cls.p}, FreeFactor{dim, order, cls.q}});

    const Objective objective = [&](const std::vector<MaPolynomial>& polys) {
        return objective_mse(polys[0], polys[1], a, route, grid, opts.factorize);
    };
    const Eigen::VectorXd white = param.pack({padded(white_factor(cls.p), order), padded(white_factor(cls.q), order)});
    const auto random_start = [&](std::mt19937_64& engine) {
        return param.pack({random_moment_factor(cls.p, order, engine), random_moment_factor(cls.q, order, engine)});
    };
    const RestartOutcome run = multi_start(param, objective, white, random_start, opts);
    if (!std::isfinite(run.best.value)) {
        throw Error(ErrorKind::infeasible_class, "no restart produced a factorizable density pair");
    }
    const std::vector<MaPolynomial> best = param.unpack(run.best.x);
    return assemble(MinimaxProblem::joint, route, a, best[0], best[1], nullptr, nullptr, grid, opts, cls, run);
}

namespace {

SaddleCandidate known_density_solve(bool signal_known, const SpectralDensityGrid& known, const MaPolynomial& factor,
                                    std::span<const double> moments, const FunctionalWeights& a,
                                    const SolverOptions& opts) {
    const int dim = known.dim();
    if (factor.rows() != dim || factor.cols() != dim) {
        throw Error(ErrorKind::dimension_mismatch, "known factor must be K x K");
    }
    if (static_cast<int>(moments.size()) != dim || a.dim() != dim) {
        throw Error(ErrorKind::dimension_mismatch, "moment count or weights differ from K");
    }
    if (factorization_residual(known, factor) > 1e-8) {
        throw Error(ErrorKind::factorization_domain, "supplied factor does not reproduce the known density");
    }
    const std::vector<double> unknown_moments(moments.begin(), moments.end());
    DensityClassD00 cls;
    cls.p = signal_known ? known.moments() : unknown_moments;
    cls.q = signal_known ? unknown_moments : known.moments();
    cls.validate();

    const int order = std::max(0, opts.order);
    const int grid = known.size();
    const Parameterization param({FreeFactor{dim, order, unknown_moments}});
    const Route route = signal_known ? Route::via_f : Route::via_g;

    const Objective objective = [&](const std::vector<MaPolynomial>& polys) {
        return signal_known ? objective_mse(factor, polys[0], a, route, grid, opts.factorize)
                            : objective_mse(polys[0], factor, a, route, grid, opts.factorize);
    };
    const Eigen::VectorXd white = param.pack({padded(white_factor(unknown_moments), order)});
    const auto random_start = [&](std::mt19937_64& engine) {
        return param.pack({random_moment_factor(unknown_moments, order, engine)});
    };
    const RestartOutcome run = multi_start(param, objective, white, random_start, opts);
    if (!std::isfinite(run.best.value)) {
        throw Error(ErrorKind::infeasible_class,
                    "known density plus any admissible density is not factorizable (check moments)");
    }
    const MaPolynomial optimized = param.unpack(run.best.x).front();
    if (signal_known) {
        return assemble(MinimaxProblem::known_signal, route, a, factor, optimized, &known, nullptr, grid, opts, cls,
                        run);
    }
    return assemble(MinimaxProblem::known_noise, route, a, optimized, factor, nullptr, &known, grid, opts, cls, run);
}

}  // namespace

SaddleCandidate least_favorable_given_f(const SpectralDensityGrid& f, const MaPolynomial& phi,
                                        std::span<const double> q, const FunctionalWeights& a,
                                        const SolverOptions& options) {
    return known_density_solve(true, f, phi, q, a, options);
}

SaddleCandidate least_favorable_given_g(const SpectralDensityGrid& g, const MaPolynomial& psi,
                                        std::span<const double> p, const FunctionalWeights& a,
                                        const SolverOptions& options) {
    return known_density_solve(false, g, psi, p, a, options);
}

MaPolynomial random_moment_factor(std::span<const double> moments, int order, std::mt19937_64& engine) {
    const int dim = static_cast<int>(moments.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Matrix> coeffs(order + 1, Matrix(dim, dim));
    for (auto& c : coeffs) {
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double re = normal(engine);
                const double im = normal(engine);
                c(i, j) = Complex(re, im);
            }
        }
    }
    for (int k = 0; k < dim; ++k) {
        double norm2 = 0.0;
        for (const auto& c : coeffs) norm2 += c.row(k).squaredNorm();
        const double scale = moments[k] > 0.0 ? std::sqrt(moments[k] / norm2) : 0.0;
        for (auto& c : coeffs) c.row(k) *= scale;
    }
    return MaPolynomial(std::move(coeffs));
}

FeasiblePair sample_feasible_pair(const DensityClassD00& cls, int grid_size, int max_order,
                                  std::mt19937_64& engine) {
    std::uniform_int_distribution<int> order_dist(0, max_order);
    FeasiblePair pair;
    const int order_f = order_dist(engine);
    const int order_g = order_dist(engine);
    pair.phi = random_moment_factor(cls.p, order_f, engine);
    pair.psi = random_moment_factor(cls.q, order_g, engine);
    pair.f = density_from_ma(pair.phi, grid_size);
    pair.g = density_from_ma(pair.psi, grid_size);
    return pair;
}

SaddleReport saddle_check(const SaddleCandidate& c, const DensityClassD00& cls, int n_probes, std::uint64_t seed) {
    if (n_probes < 0) throw Error(ErrorKind::invalid_argument, "probe count must be >= 0");
    cls.validate();
    SaddleReport report;
    report.n_probes = n_probes;
    report.saddle_value = objective_given_h0(c, c.f0, c.g0);
    report.consistency = std::abs(report.saddle_value - c.delta0);
    if (n_probes == 0) return report;

    const int grid = c.f0.size();
    const int dim = c.a.dim();
    const double tol = kSaddleTol;
    std::mt19937_64 engine(seed);

    // Left inequality: Delta(h0; f, g) <= Delta(h0; f0, g0).
    double worst_left = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_probes; ++i) {
        const FeasiblePair pair = sample_feasible_pair(cls, grid, std::min(kProbeMaxOrder, (grid - 1) / 2), engine);
        const double margin = objective_given_h0(c, pair.f, pair.g) - report.saddle_value;
        worst_left = std::max(worst_left, margin);
        if (margin > tol) ++report.left_violations;
    }

    // Right inequality: Delta(h0 + e; f0, g0) >= Delta(h0; f0, g0) for one-sided e.
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    std::uniform_int_distribution<int> order_dist(0, 8);
    const VectorSequence& h = c.h0.grid_values.value();
    double worst_right = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_probes; ++i) {
        VectorSequence e(order_dist(engine) + 1, Vector(dim));
        double norm2 = 0.0;
        for (auto& v : e) {
            for (int k = 0; k < dim; ++k) {
                const double re = normal(engine);
                const double im = normal(engine);
                v(k) = Complex(re, im);
            }
            norm2 += v.squaredNorm();
        }
        const double target = kProbePerturbation * (1.0 - radius(engine));  // in (0, 0.1]
        for (auto& v : e) v *= target / std::sqrt(norm2);
        const VectorSequence e_grid = sequence_on_grid(e, grid);
        double acc = 0.0;
        for (int r = 0; r < grid; ++r) {
            acc += quad(c.error_grid[r] - e_grid[r], c.f0[r]) + quad(h[r] + e_grid[r], c.g0[r]);
        }
        const double margin = acc / grid - report.saddle_value;
        worst_right = std::min(worst_right, margin);
        if (margin < -tol) ++report.right_violations;
    }
    report.worst_left_margin = worst_left;
    report.worst_right_margin = worst_right;
    report.passed = report.left_violations == 0 && report.right_violations == 0;
    return report;
}

}  // namespace pcf
