#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/filter.hpp"
#include "pcf/spectral.hpp"

namespace pcf {

/// Admissible pairs (f, g) whose diagonal entries integrate to p_k and q_k:
/// (1/2pi) int f_kk = p_k, (1/2pi) int g_kk = q_k.
struct DensityClassD00 {
    std::vector<double> p;
    std::vector<double> q;

    int dim() const { return static_cast<int>(p.size()); }
    /// Throws infeasible_class on negative or mismatched moments.
    void validate() const;
    /// Largest deviation of a pair's diagonal moments from (p, q).
    double membership_error(const SpectralDensityGrid& f, const SpectralDensityGrid& g) const;
    bool contains(const SpectralDensityGrid& f, const SpectralDensityGrid& g, double tol = 1e-8) const;
};

enum class MinimaxProblem { joint, known_signal, known_noise };

struct CandidateDiagnostics {
    double sum_factor_residual = 0.0;
    double signal_factor_residual = 0.0;
    double noise_factor_residual = 0.0;
    double membership_error = 0.0;
    double lagrange_g = 0.0;  ///< noise-side stationarity residual
    double lagrange_f = 0.0;  ///< signal-side stationarity residual
    double gradient_norm = 0.0;
    int iterations = 0;
    int restarts = 0;
    int best_restart = 0;
    bool converged = false;
};

/// Least favorable pair together with everything derived from it.
struct SaddleCandidate {
    MinimaxProblem problem = MinimaxProblem::joint;
    Route route = Route::via_g;
    FunctionalWeights a;
    SpectralDensityGrid f0;
    SpectralDensityGrid g0;
    MaPolynomial d0;
    MaPolynomial phi0;
    MaPolynomial psi0;
    MaPolynomial b0;
    /// Minimax characteristic; grid_values hold h0 = b^T S_f on the density grid.
    FilterCharacteristic h0;
    /// b^T S_g = A - h0 on the density grid.
    VectorSequence error_grid;
    VectorSequence s_f0;
    VectorSequence s_g0;
    std::vector<double> alpha2;
    std::vector<double> beta2;
    double delta0 = 0.0;
    CandidateDiagnostics diagnostics;
    bool certified = false;
};

struct LagrangeResidual {
    double residual_g = 0.0;
    double residual_f = 0.0;
    std::vector<double> alpha2;
    std::vector<double> beta2;
};

struct SolverOptions {
    int order = 4;        ///< MA order of the optimized factors
    int grid_size = 256;  ///< density grid for the joint problem
    int restarts = 8;     ///< restart 0 starts from white densities
    int max_iter = 300;
    double stationarity_tol = 1e-6;
    double gradient_tol = 1e-9;
    double fd_step = 1e-5;
    int inverse_order = 0;  ///< 0 selects default_inverse_order()
    std::uint64_t seed = 1;
    FactorizeOptions factorize{1e-10, 200, 1e-12};
};

/// Inverse-factor order used when none is given: at least 4L, enough for the
/// finite projections S_f, S_g to be exact (L + J), and never below 64.
int default_inverse_order(int factor_order, int max_lag);

/// Delta(h(f0, g0); f, g): error of the candidate's characteristic under (f, g).
double objective_given_h0(const SaddleCandidate& candidate, const SpectralDensityGrid& f,
                          const SpectralDensityGrid& g);

/// Stationarity residuals with least-squares multipliers.
LagrangeResidual lagrange_residual(const SaddleCandidate& candidate);
/// Stationarity residuals for supplied multipliers.
LagrangeResidual lagrange_residual(const SaddleCandidate& candidate, std::span<const double> alpha2,
                                   std::span<const double> beta2);

/// Optimal error Delta(f, g) for f = phi phi^*, g = psi psi^* computed through
/// the factorization of f + g on a grid of `grid_size` points.
double optimal_mse(const MaPolynomial& phi, const MaPolynomial& psi, const FunctionalWeights& a, Route route,
                   int grid_size, const FactorizeOptions& options = {});

SaddleCandidate solve_least_favorable(const DensityClassD00& cls, const FunctionalWeights& a, Route route,
                                      const SolverOptions& options = {});

/// Known signal density: least favorable noise with moments q.
SaddleCandidate least_favorable_given_f(const SpectralDensityGrid& f, const MaPolynomial& phi,
                                        std::span<const double> q, const FunctionalWeights& a,
                                        const SolverOptions& options = {});

/// Known noise density: least favorable signal with moments p.
SaddleCandidate least_favorable_given_g(const SpectralDensityGrid& g, const MaPolynomial& psi,
                                        std::span<const double> p, const FunctionalWeights& a,
                                        const SolverOptions& options = {});

/// Random factor of order `order` with row norms matched to `moments`.
MaPolynomial random_moment_factor(std::span<const double> moments, int order, std::mt19937_64& engine);

struct FeasiblePair {
    MaPolynomial phi;
    MaPolynomial psi;
    SpectralDensityGrid f;
    SpectralDensityGrid g;
};

/// Random MA pair in the class, orders drawn uniformly from 0..max_order.
FeasiblePair sample_feasible_pair(const DensityClassD00& cls, int grid_size, int max_order,
                                  std::mt19937_64& engine);

struct SaddleReport {
    int n_probes = 0;
    int left_violations = 0;
    int right_violations = 0;
    /// max over probes of Delta(h0; f, g) - saddle_value
    std::optional<double> worst_left_margin;
    /// min over probes of Delta(h; f0, g0) - saddle_value
    std::optional<double> worst_right_margin;
    double saddle_value = 0.0;  ///< Delta(h0; f0, g0)
    double consistency = 0.0;   ///< |saddle_value - delta0|
    bool passed = true;
};

inline constexpr double kSaddleTol = 1e-8;
inline constexpr int kProbeMaxOrder = 4;
inline constexpr double kProbePerturbation = 0.1;

SaddleReport saddle_check(const SaddleCandidate& candidate, const DensityClassD00& cls, int n_probes,
                          std::uint64_t seed);

}  // namespace pcf
