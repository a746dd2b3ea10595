#include "pcf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pcf/error.hpp"

namespace pcf {

namespace {

std::mt19937_64 path_engine(std::uint64_t seed, std::size_t index) {
    const auto idx = static_cast<std::uint64_t>(index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
    return std::mt19937_64(seq);
}

// Blocks t = -(horizon-1) .. 0 of c * innovations, oldest first.
BlockedSequence run_ma(const MaPolynomial& c, int horizon, std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const int order = c.order();
    const int total = horizon + order;
    std::vector<Vector> innovations(total, Vector(c.cols()));
    for (auto& e : innovations) {
        for (Eigen::Index m = 0; m < e.size(); ++m) {
            const double re = normal(engine);
            const double im = normal(engine);
            e(m) = Complex(re, im);
        }
    }
    std::vector<Vector> blocks(horizon, Vector::Zero(c.rows()));
    for (int t = 0; t < horizon; ++t) {
        // innovations[t + order] is aligned with block t.
        for (int u = 0; u <= order; ++u) blocks[t].noalias() += c[u] * innovations[t + order - u];
    }
    return BlockedSequence(c.rows(), std::move(blocks));
}

}  // namespace

void SimulationSpec::validate() const {
    if (n_paths < 1) throw Error(ErrorKind::invalid_argument, "n_paths must be >= 1");
    if (phi.rows() != psi.rows()) throw Error(ErrorKind::dimension_mismatch, "phi and psi differ in K");
    const int order = std::max(phi.order(), psi.order());
    if (horizon < 1 || horizon < order) {
        throw Error(ErrorKind::horizon, "horizon " + std::to_string(horizon) + " is shorter than MA order " +
                                            std::to_string(order));
    }
}

SimulatedPath simulate_path(const SimulationSpec& spec, std::size_t index) {
    spec.validate();
    auto engine = path_engine(spec.seed, index);
    BlockedSequence signal = run_ma(spec.phi, spec.horizon, engine);
    BlockedSequence noise = run_ma(spec.psi, spec.horizon, engine);
    return {std::move(signal), std::move(noise)};
}

Simulation simulate_ma(const SimulationSpec& spec) {
    spec.validate();
    Simulation sim;
    sim.signal.reserve(spec.n_paths);
    sim.noise.reserve(spec.n_paths);
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        SimulatedPath p = simulate_path(spec, i);
        sim.signal.push_back(std::move(p.signal));
        sim.noise.push_back(std::move(p.noise));
    }
    return sim;
}

MmseResult finite_horizon_mmse(const SpectralDensityGrid& f, const SpectralDensityGrid& g,
                               const FunctionalWeights& a, int horizon) {
    if (f.dim() != g.dim() || f.size() != g.size()) {
        throw Error(ErrorKind::grid_mismatch, "signal and noise densities are on different grids");
    }
    if (f.dim() != a.dim()) throw Error(ErrorKind::dimension_mismatch, "weights and densities differ in K");
    const int big_j = a.max_lag();
    if (horizon < std::max(1, big_j)) {
        throw Error(ErrorKind::horizon, "oracle horizon " + std::to_string(horizon) +
                                            " is below the functional lag " + std::to_string(big_j));
    }
    const int dim = f.dim();
    const CovarianceSequence r_signal = covariances_from_density(f, std::max(horizon - 1, big_j) + big_j);
    const CovarianceSequence r_noise = covariances_from_density(g, horizon - 1);

    const Eigen::Index n = static_cast<Eigen::Index>(horizon) * dim;
    Matrix sigma(n, n);
    for (int i = 0; i < horizon; ++i) {
        for (int j = 0; j < horizon; ++j) {
            sigma.block(i * dim, j * dim, dim, dim) = r_signal.at(j - i) + r_noise.at(j - i);
        }
    }
    // c_i = E[x_{-i} conj(y)], y = sum_l a_l^T zeta_{-l}
    Vector cross = Vector::Zero(n);
    for (int i = 0; i < horizon; ++i) {
        for (int l = 0; l <= big_j; ++l) cross.segment(i * dim, dim) += r_signal.at(l - i) * a[l].conjugate();
    }
    double var_y = 0.0;
    for (int j = 0; j <= big_j; ++j) {
        for (int l = 0; l <= big_j; ++l) var_y += (a[j].transpose() * r_signal.at(l - j) * a[l].conjugate()).value().real();
    }

    MmseResult result;
    Eigen::LLT<Matrix> llt(sigma);
    const double scale = sigma.diagonal().real().sum() / static_cast<double>(n);
    bool ill = llt.info() != Eigen::Success;
    if (!ill) {
        const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
        ill = diag.minCoeff() < 1e-7 * std::sqrt(std::max(scale, 1e-300));
    }
    if (ill) {
        sigma.diagonal().array() += 1e-10 * std::max(scale, 1e-300);
        llt.compute(sigma);
        result.regularized = true;
    }
    const Vector w = llt.solve(cross);
    result.value = var_y - cross.dot(w).real();
    return result;
}

MonteCarloEstimate empirical_mse(const FilterCharacteristic& h, const SimulationSpec& spec,
                                 const FunctionalWeights& a) {
    spec.validate();
    const std::size_t needed = std::max(h.coeffs.size(), a.size());
    if (static_cast<std::size_t>(spec.horizon) < needed) {
        throw Error(ErrorKind::horizon, "simulation horizon " + std::to_string(spec.horizon) +
                                            " does not cover " + std::to_string(needed) + " blocks");
    }
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        const SimulatedPath path = simulate_path(spec, i);
        Complex target = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) target += (a[j].transpose() * path.signal.past(j)).value();
        Complex estimate = 0.0;
        for (std::size_t j = 0; j < h.coeffs.size(); ++j) {
            estimate += (h.coeffs[j].transpose() * (path.signal.past(j) + path.noise.past(j))).value();
        }
        const double err = std::norm(target - estimate);
        const double delta = err - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (err - mean);
    }
    MonteCarloEstimate est;
    est.mean = mean;
    est.n_paths = spec.n_paths;
    const double variance = spec.n_paths > 1 ? m2 / static_cast<double>(spec.n_paths - 1) : 0.0;
    est.std_error = std::sqrt(variance / static_cast<double>(spec.n_paths));
    return est;
}

}  // namespace pcf
