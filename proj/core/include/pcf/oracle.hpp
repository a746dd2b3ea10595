#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/filter.hpp"
#include "pcf/spectral.hpp"

namespace pcf {

/// Moving-average model for signal zeta = phi * eps and noise theta = psi * eta
/// driven by independent circular complex standard normal innovations.
struct SimulationSpec {
    MaPolynomial phi;
    MaPolynomial psi;
    int horizon = 1;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimulatedPath {
    BlockedSequence signal;
    BlockedSequence noise;
};

struct Simulation {
    std::vector<BlockedSequence> signal;
    std::vector<BlockedSequence> noise;
};

/// Path `index` of the simulation; each path draws from its own stream seeded
/// by (seed, index), so results do not depend on evaluation order.
SimulatedPath simulate_path(const SimulationSpec& spec, std::size_t index);

Simulation simulate_ma(const SimulationSpec& spec);

struct MmseResult {
    double value = 0.0;
    bool regularized = false;
};

/// Minimum mean-square error of estimating sum_j a_j^T zeta_{-j} from the
/// `horizon` most recent observation blocks, via the normal equations.
MmseResult finite_horizon_mmse(const SpectralDensityGrid& f, const SpectralDensityGrid& g,
                               const FunctionalWeights& a, int horizon);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

MonteCarloEstimate empirical_mse(const FilterCharacteristic& h, const SimulationSpec& spec,
                                 const FunctionalWeights& a);

/// Width of the Monte Carlo acceptance band, in standard errors.
inline constexpr double kMonteCarloBand = 3.0;

}  // namespace pcf
