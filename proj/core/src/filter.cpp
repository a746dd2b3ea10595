#include "pcf/filter.hpp"

#include <algorithm>
#include <string>

#include "grid_fft.hpp"
#include "pcf/error.hpp"
#include "pcf/text_io.hpp"

namespace pcf {

namespace {

double squared_norm(const VectorSequence& x) {
    double s = 0.0;
    for (const auto& v : x) s += v.squaredNorm();
    return s;
}

void require_dims(const MaPolynomial& c, int dim, const char* what) {
    if (c.rows() != dim) {
        throw Error(ErrorKind::dimension_mismatch,
                    std::string(what) + " has " + std::to_string(c.rows()) + " rows, expected K=" +
                        std::to_string(dim));
    }
}

// Coefficients of b^T(lambda) s(lambda), j = 0..max_lag.
VectorSequence transpose_product(const MaPolynomial& b, const VectorSequence& s, int max_lag) {
    VectorSequence out(max_lag + 1, Vector::Zero(b.cols()));
    for (int j = 0; j <= max_lag; ++j) {
        const int u_lo = std::max(0, j - static_cast<int>(s.size()) + 1);
        const int u_hi = std::min(j, b.order());
        for (int u = u_lo; u <= u_hi; ++u) out[j].noalias() += b[u].transpose() * s[j - u];
    }
    return out;
}

// b * d = I as series, checked up to the order of b.
void require_inverse_pair(const MaPolynomial& d, const MaPolynomial& b) {
    const int dim = d.rows();
    for (int n = 0; n <= b.order(); ++n) {
        Matrix acc = Matrix::Zero(dim, dim);
        for (int u = std::max(0, n - d.order()); u <= n; ++u) acc.noalias() += b[u] * d[n - u];
        if (n == 0) acc -= Matrix::Identity(dim, dim);
        if (acc.norm() > 1e-8 * std::max(1.0, b[n].norm())) {
            throw Error(ErrorKind::numerical_inconsistency,
                        "b does not invert d at lag " + std::to_string(n));
        }
    }
}

std::vector<Matrix> as_columns(const VectorSequence& x) {
    std::vector<Matrix> out;
    out.reserve(x.size());
    for (const auto& v : x) out.emplace_back(v);
    return out;
}

VectorSequence sequence_on_grid(const VectorSequence& x, int grid_size) {
    const std::vector<Matrix> values = detail::lags_to_grid(as_columns(x), grid_size);
    VectorSequence out;
    out.reserve(values.size());
    for (const auto& v : values) out.emplace_back(v.col(0));
    return out;
}

}  // namespace

const char* to_string(Route route) noexcept { return route == Route::via_f ? "via_f" : "via_g"; }

Route route_from_string(const std::string& name) {
    if (name == "via_f") return Route::via_f;
    if (name == "via_g") return Route::via_g;
    throw Error(ErrorKind::invalid_argument, "unknown route '" + name + "' (expected via_f or via_g)");
}

Vector FilterCharacteristic::eval(double lambda) const {
    Vector out = Vector::Zero(dim());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        out += std::polar(1.0, -static_cast<double>(j) * lambda) * coeffs[j];
    }
    return out;
}

bool FilterCharacteristic::truncation_warning() const { return inverse_tail_norm > kTailWarning; }

VectorSequence apply_factor_transform(const MaPolynomial& c, const VectorSequence& a) {
    if (a.empty()) return {};
    require_dims(c, static_cast<int>(a.front().size()), "factor");
    const int order = c.order();
    const int last = static_cast<int>(a.size()) - 1;
    VectorSequence out(order + last + 1, Vector::Zero(c.cols()));
    for (int q = 0; q <= order + last; ++q) {
        for (int l = std::max(0, q - order); l <= std::min(q, last); ++l) {
            out[q].noalias() += c[q - l].transpose() * a[l];
        }
    }
    return out;
}

VectorSequence apply_factor_transform(const MaPolynomial& c, const FunctionalWeights& a) {
    return apply_factor_transform(c, a.coeffs());
}

VectorSequence apply_adjoint_transform(const MaPolynomial& c, const VectorSequence& x) {
    const int n = static_cast<int>(x.size());
    VectorSequence out(n, Vector::Zero(c.rows()));
    for (int j = 0; j < n; ++j) {
        for (int u = 0; u <= std::min(c.order(), n - 1 - j); ++u) {
            if (x[u + j].size() != c.cols()) {
                throw Error(ErrorKind::dimension_mismatch, "adjoint transform input has wrong length");
            }
            out[j].noalias() += c[u].conjugate() * x[u + j];
        }
    }
    return out;
}

VectorSequence noise_projection(const MaPolynomial& b, const MaPolynomial& psi, const FunctionalWeights& a) {
    require_dims(psi, a.dim(), "noise factor psi");
    const VectorSequence psi_a = apply_factor_transform(psi, a);
    return apply_adjoint_transform(b, apply_adjoint_transform(psi, psi_a));
}

VectorSequence signal_projection(const MaPolynomial& b, const MaPolynomial& phi, const FunctionalWeights& a) {
    require_dims(phi, a.dim(), "signal factor phi");
    const VectorSequence phi_a = apply_factor_transform(phi, a);
    return apply_adjoint_transform(b, apply_adjoint_transform(phi, phi_a));
}

FilterCharacteristic spectral_characteristic_via_g(const MaPolynomial& d, const MaPolynomial& b,
                                                   const MaPolynomial& psi, const FunctionalWeights& a) {
    require_dims(d, a.dim(), "factor d");
    require_inverse_pair(d, b);
    const VectorSequence s_g = noise_projection(b, psi, a);
    const int order = a.max_lag() + b.order();
    FilterCharacteristic h;
    h.coeffs = transpose_product(b, s_g, order);
    for (int j = 0; j <= a.max_lag(); ++j) h.coeffs[j] = a[j] - h.coeffs[j];
    for (int j = a.max_lag() + 1; j <= order; ++j) h.coeffs[j] = -h.coeffs[j];
    h.inverse_tail_norm = tail_norm(b);
    return h;
}

FilterCharacteristic spectral_characteristic_via_f(const MaPolynomial& b, const MaPolynomial& phi,
                                                   const FunctionalWeights& a) {
    const VectorSequence s_f = signal_projection(b, phi, a);
    FilterCharacteristic h;
    h.coeffs = transpose_product(b, s_f, a.max_lag() + b.order());
    h.inverse_tail_norm = tail_norm(b);
    return h;
}

VectorSequence characteristic_on_grid(Route route, const FilterFactors& factors, const FunctionalWeights& a,
                                      int grid_size) {
    const MaPolynomial& factor = route == Route::via_g ? factors.psi.value() : factors.phi.value();
    // S_f and S_g have finite support, so an inverse of order L + J makes them exact.
    const MaPolynomial b_exact =
        invert_factor(factors.d, std::max(factors.b.order(), factor.order() + a.max_lag()));
    const VectorSequence s = route == Route::via_g ? noise_projection(b_exact, factor, a)
                                                   : signal_projection(b_exact, factor, a);
    const VectorSequence s_grid = sequence_on_grid(s, grid_size);
    const std::vector<Matrix> d_grid = factors.d.on_grid(grid_size);
    VectorSequence out(grid_size);
    for (int r = 0; r < grid_size; ++r) {
        // b(lambda)^T s = d(lambda)^{-T} s
        out[r] = d_grid[r].transpose().partialPivLu().solve(s_grid[r]);
    }
    if (route == Route::via_g) {
        const VectorSequence a_grid = sequence_on_grid(a.coeffs(), grid_size);
        for (int r = 0; r < grid_size; ++r) out[r] = a_grid[r] - out[r];
    }
    return out;
}

MseReport mse(Route route, const FilterFactors& factors, const FunctionalWeights& a) {
    const std::optional<MaPolynomial>& factor = route == Route::via_g ? factors.psi : factors.phi;
    if (!factor) {
        throw Error(ErrorKind::invalid_argument,
                    std::string("route ") + to_string(route) + " needs the " +
                        (route == Route::via_g ? "noise factor psi" : "signal factor phi"));
    }
    require_dims(*factor, a.dim(), "factor");
    const VectorSequence ca = apply_factor_transform(*factor, a);
    const VectorSequence s = apply_adjoint_transform(factors.b, apply_adjoint_transform(*factor, ca));
    MseReport report;
    report.first_norm = squared_norm(ca);
    report.second_norm = squared_norm(s);
    report.delta = report.first_norm - report.second_norm;
    report.method = to_string(route);
    report.inverse_tail_norm = tail_norm(factors.b);
    if (report.delta < -1e-10 * std::max(1.0, report.first_norm)) {
        throw Error(ErrorKind::numerical_inconsistency,
                    "negative mean-square error " + format_number(report.delta) +
                        " (factorization identities do not hold)");
    }
    return report;
}

MseReport white_noise_mse(double sigma2, const MaPolynomial& b, const FunctionalWeights& a) {
    if (sigma2 < 0.0) throw Error(ErrorKind::invalid_argument, "white-noise variance must be >= 0");
    if (b.cols() != a.dim()) throw Error(ErrorKind::dimension_mismatch, "inverse factor and weights differ in K");
    const VectorSequence b_star_a = apply_adjoint_transform(b, a.coeffs());
    MseReport report;
    report.first_norm = sigma2 * a.squared_norm();
    report.second_norm = sigma2 * sigma2 * squared_norm(b_star_a);
    report.delta = report.first_norm - report.second_norm;
    report.method = "white_noise";
    report.inverse_tail_norm = tail_norm(b);
    return report;
}

double single_block_mse(int block, double sigma2, const MaPolynomial& b, const Vector& a_block) {
    if (block < 0) throw Error(ErrorKind::invalid_argument, "block index must be >= 0");
    if (b.order() < block) {
        throw Error(ErrorKind::invalid_argument, "inverse factor order " + std::to_string(b.order()) +
                                                     " is below block index " + std::to_string(block));
    }
    double retained = 0.0;
    for (int q = 0; q <= block; ++q) retained += (b[q].conjugate() * a_block).squaredNorm();
    return sigma2 * a_block.squaredNorm() - sigma2 * sigma2 * retained;
}

Complex estimate_functional(const FilterCharacteristic& h, const BlockedSequence& obs) {
    if (obs.size() < h.coeffs.size()) {
        throw Error(ErrorKind::horizon, "observations cover " + std::to_string(obs.size()) +
                                            " blocks, the characteristic needs " +
                                            std::to_string(h.coeffs.size()));
    }
    if (obs.dim() != h.dim()) throw Error(ErrorKind::dimension_mismatch, "observation and filter K differ");
    Complex acc = 0.0;
    for (std::size_t j = 0; j < h.coeffs.size(); ++j) acc += (h.coeffs[j].transpose() * obs.past(j)).value();
    return acc;
}

double mse_of_characteristic(const FilterCharacteristic& h, const MaPolynomial& d, const MaPolynomial& psi,
                             const FunctionalWeights& a) {
    if (h.dim() != a.dim()) throw Error(ErrorKind::dimension_mismatch, "filter and weights differ in K");
    const std::size_t len = std::max(h.coeffs.size(), a.size());
    VectorSequence err(len, Vector::Zero(a.dim()));
    for (std::size_t j = 0; j < a.size(); ++j) err[j] += a[j];
    for (std::size_t j = 0; j < h.coeffs.size(); ++j) err[j] -= h.coeffs[j];

    const VectorSequence psi_a = apply_factor_transform(psi, a);
    const VectorSequence psi_e = apply_factor_transform(psi, err);
    const VectorSequence d_e = apply_factor_transform(d, err);
    double cross = 0.0;
    for (std::size_t q = 0; q < std::min(psi_a.size(), psi_e.size()); ++q) {
        cross += psi_a[q].dot(psi_e[q]).real();
    }
    return squared_norm(psi_a) + squared_norm(d_e) - 2.0 * cross;
}

}  // namespace pcf
