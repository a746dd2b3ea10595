#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/spectral.hpp"
#include "pcf/types.hpp"

namespace pcf {

/// One-sided spectral characteristic h(e^{i lambda}) = sum_j h_j e^{-i j lambda}.
struct FilterCharacteristic {
    VectorSequence coeffs;
    /// Optional exact evaluation on a density grid.
    std::optional<VectorSequence> grid_values;
    /// Norm of the last inverse-factor coefficient used to build `coeffs`.
    double inverse_tail_norm = 0.0;

    int dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().size()); }
    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    Vector eval(double lambda) const;
    double tail_norm() const { return coeffs.empty() ? 0.0 : coeffs.back().norm(); }
    /// True when the inverse factor was truncated above the warning threshold.
    bool truncation_warning() const;
};

enum class Route { via_f, via_g };

const char* to_string(Route route) noexcept;
Route route_from_string(const std::string& name);

/// Factors feeding the filtering formulas. `d` factors f + g and `b` inverts
/// it; `phi` factors f (route via_f) and `psi` factors g (route via_g).
struct FilterFactors {
    MaPolynomial d;
    MaPolynomial b;
    std::optional<MaPolynomial> phi;
    std::optional<MaPolynomial> psi;
};

struct MseReport {
    double delta = 0.0;
    double first_norm = 0.0;   ///< |C a|^2
    double second_norm = 0.0;  ///< |B^* C^* C a|^2
    std::string method;        ///< "via_f", "via_g", "white_noise"
    double inverse_tail_norm = 0.0;
};

/// Truncation threshold for inverse-factor tails.
inline constexpr double kTailWarning = 1e-8;

/// (C a)_q = sum_{l<=q} c(q-l)^T a_l, q = 0..L+J.
VectorSequence apply_factor_transform(const MaPolynomial& c, const FunctionalWeights& a);
VectorSequence apply_factor_transform(const MaPolynomial& c, const VectorSequence& a);

/// (C^* x)_j = sum_u conj(c(u)) x_{u+j}, j = 0..len(x)-1.
VectorSequence apply_adjoint_transform(const MaPolynomial& c, const VectorSequence& x);

/// (S_g)_l = (B^* Psi^* Psi a)_l, the sequence entering h = A - b^T S_g.
VectorSequence noise_projection(const MaPolynomial& b, const MaPolynomial& psi, const FunctionalWeights& a);
/// (S_f)_l = (B^* Phi^* Phi a)_l, the sequence entering h = b^T S_f.
VectorSequence signal_projection(const MaPolynomial& b, const MaPolynomial& phi, const FunctionalWeights& a);

/// h = A - b^T S_g, coefficients j = 0..J + Lb.
FilterCharacteristic spectral_characteristic_via_g(const MaPolynomial& d, const MaPolynomial& b,
                                                   const MaPolynomial& psi, const FunctionalWeights& a);
/// h = b^T S_f, coefficients j = 0..J + Lb.
FilterCharacteristic spectral_characteristic_via_f(const MaPolynomial& b, const MaPolynomial& phi,
                                                   const FunctionalWeights& a);

/// Values of the optimal characteristic on a density grid, using the exact
/// pointwise inverse of d(lambda) instead of the truncated series.
VectorSequence characteristic_on_grid(Route route, const FilterFactors& factors, const FunctionalWeights& a,
                                      int grid_size);

MseReport mse(Route route, const FilterFactors& factors, const FunctionalWeights& a);

/// White-noise closed form sigma2 |a|^2 - sigma2^2 |B^* a|^2.
MseReport white_noise_mse(double sigma2, const MaPolynomial& b, const FunctionalWeights& a);

/// Error of estimating a_N^T zeta_{-N} alone under white noise of variance sigma2.
double single_block_mse(int block, double sigma2, const MaPolynomial& b, const Vector& a_block);

/// sum_{j>=0} h_j^T x_{-j}, with x_0 the most recent observed block.
Complex estimate_functional(const FilterCharacteristic& h, const BlockedSequence& obs);

/// Mean-square error of an arbitrary one-sided characteristic,
/// |Psi a|^2 + |D(a - h)|^2 - 2 Re <Psi(a - h), Psi a>.
double mse_of_characteristic(const FilterCharacteristic& h, const MaPolynomial& d, const MaPolynomial& psi,
                             const FunctionalWeights& a);

}  // namespace pcf
