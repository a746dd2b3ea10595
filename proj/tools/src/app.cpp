#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "pcf/oracle.hpp"
#include "pcf/text_io.hpp"

namespace pcf::cli {

namespace {

std::string out_path(const ProblemConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void prepare_out_dir(const ProblemConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.out_dir)) {
        throw Error(ErrorKind::io, "cannot create output directory '" + cfg.out_dir + "'");
    }
}

int finish(const ProblemConfig& cfg, const std::string& command, const KeyValueReport& report, bool json_like,
           std::ostream& out) {
    const std::string text = report.render(json_like);
    write_text_file(out_path(cfg, command + (json_like ? "_report.json" : "_report.txt")), text);
    out << text;
    return exit_ok;
}

// Rethrows with the config key in front so messages name the offending input.
template <typename Fn>
auto keyed(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("'" + key + "': " + e.what(), e.last_residual(), e.iterations());
    } catch (const Error& e) {
        throw Error(e.kind(), "'" + key + "': " + e.what());
    }
}

const DensitySource& required(const std::optional<DensitySource>& s, const ProblemConfig& cfg, const char* key) {
    if (!s) throw Error(ErrorKind::parse, cfg.source + ": '" + std::string(key) + "' is required for this command");
    return *s;
}

struct Model {
    ResolvedDensity signal;
    ResolvedDensity noise;
    int order = 0;  ///< order of the factor of f + g
};

Model load_model(const ProblemConfig& cfg) {
    Model m;
    m.signal = keyed("signal", [&] { return resolve(required(cfg.signal, cfg, "signal"), cfg.K, cfg.F, cfg.base_dir); });
    m.noise = keyed("noise", [&] { return resolve(required(cfg.noise, cfg, "noise"), cfg.K, cfg.F, cfg.base_dir); });
    m.order = cfg.L;
    if (m.signal.factor) m.order = std::max(m.order, m.signal.factor->order());
    if (m.noise.factor) m.order = std::max(m.order, m.noise.factor->order());
    if (cfg.F < 2 * m.order + 1) {
        throw Error(ErrorKind::parse, cfg.source + ": 'F' must be >= " + std::to_string(2 * m.order + 1) +
                                          " for factor order " + std::to_string(m.order));
    }
    return m;
}

/// Known factor, or the canonical factor of a tabulated density.
MaPolynomial factor_of(const ResolvedDensity& d, const char* key, const ProblemConfig& cfg) {
    if (d.factor) return *d.factor;
    if (d.grid.is_zero()) return MaPolynomial::zero(cfg.K, cfg.K);
    return keyed(key, [&] { return factorize(d.grid, cfg.L, cfg.factorize_options()).factor; });
}

int inverse_order(const ProblemConfig& cfg, int order, int max_lag) {
    return cfg.Lb > 0 ? cfg.Lb : default_inverse_order(order, max_lag);
}

double coefficient_gap(const FilterCharacteristic& x, const FilterCharacteristic& y) {
    double gap = 0.0;
    const std::size_t n = std::max(x.coeffs.size(), y.coeffs.size());
    for (std::size_t j = 0; j < n; ++j) {
        Vector d = Vector::Zero(x.dim());
        if (j < x.coeffs.size()) d += x.coeffs[j];
        if (j < y.coeffs.size()) d -= y.coeffs[j];
        gap = std::max(gap, d.cwiseAbs().maxCoeff());
    }
    return gap;
}

// ---------------------------------------------------------------------------

int cmd_factorize(const ProblemConfig& cfg, bool json_like, std::ostream& out) {
    SpectralDensityGrid density;
    int order = cfg.L;
    if (cfg.density) {
        const ResolvedDensity d = keyed("density", [&] { return resolve(*cfg.density, cfg.K, cfg.F, cfg.base_dir); });
        if (d.factor) order = std::max(order, d.factor->order());
        density = d.grid;
    } else {
        const Model m = load_model(cfg);
        order = m.order;
        density = m.signal.grid + m.noise.grid;
    }
    const Factorization fac = factorize(density, order, cfg.factorize_options());
    const int lb = inverse_order(cfg, order, cfg.J.value_or(0));
    const MaPolynomial b = invert_factor(fac.factor, lb);

    prepare_out_dir(cfg);
    write_text_file(out_path(cfg, "factor.txt"), format_ma(fac.factor));
    write_text_file(out_path(cfg, "inverse.txt"), format_ma(b));

    KeyValueReport r;
    r.add("command", "factorize");
    r.add("K", cfg.K);
    r.add("F", cfg.F);
    r.add("L", order);
    r.add("Lb", lb);
    r.add("residual", fac.residual);
    r.add("iterations", fac.iterations);
    r.add("min_eigenvalue", density.min_eigenvalue());
    r.add("inverse_tail_norm", tail_norm(b));
    r.add("factor_file", "factor.txt");
    r.add("inverse_file", "inverse.txt");
    return finish(cfg, "factorize", r, json_like, out);
}

int cmd_filter(const ProblemConfig& cfg, bool json_like, std::ostream& out) {
    const Model m = load_model(cfg);
    const FunctionalWeights a = load_weights(cfg);
    const Factorization fac = factorize(m.signal.grid + m.noise.grid, m.order, cfg.factorize_options());
    const int lb = inverse_order(cfg, m.order, a.max_lag());
    const MaPolynomial b = invert_factor(fac.factor, lb);

    FilterFactors factors{fac.factor, b, std::nullopt, std::nullopt};
    FilterCharacteristic h;
    if (cfg.route == Route::via_g) {
        factors.psi = factor_of(m.noise, "noise", cfg);
        h = spectral_characteristic_via_g(fac.factor, b, *factors.psi, a);
    } else {
        factors.phi = factor_of(m.signal, "signal", cfg);
        h = spectral_characteristic_via_f(b, *factors.phi, a);
    }
    const MseReport rep = mse(cfg.route, factors, a);

    prepare_out_dir(cfg);
    write_text_file(out_path(cfg, "h.txt"), format_weights(FunctionalWeights(h.coeffs)));
    write_text_file(out_path(cfg, "factor.txt"), format_ma(fac.factor));
    write_text_file(out_path(cfg, "inverse.txt"), format_ma(b));

    KeyValueReport r;
    r.add("command", "filter");
    r.add("route", to_string(cfg.route));
    r.add("K", cfg.K);
    r.add("F", cfg.F);
    r.add("L", m.order);
    r.add("Lb", lb);
    r.add("J", a.max_lag());
    r.add("Jh", static_cast<int>(h.coeffs.size()) - 1);
    r.add("delta", rep.delta);
    r.add("first_norm", rep.first_norm);
    r.add("second_norm", rep.second_norm);
    r.add("factor_residual", fac.residual);
    r.add("inverse_tail_norm", rep.inverse_tail_norm);
    r.add("truncation_warning", h.truncation_warning());
    r.add("h_file", "h.txt");
    return finish(cfg, "filter", r, json_like, out);
}

int cmd_minimax(const ProblemConfig& cfg, bool json_like, std::ostream& out) {
    const FunctionalWeights a = load_weights(cfg);
    SolverOptions opts;
    opts.order = cfg.order >= 0 ? cfg.order : cfg.L;
    opts.grid_size = cfg.F;
    opts.restarts = cfg.restarts;
    opts.max_iter = cfg.max_iter;
    opts.stationarity_tol = cfg.stationarity_tol;
    opts.inverse_order = cfg.Lb;
    opts.seed = cfg.seed;
    opts.factorize.tol = cfg.factor_tol;
    opts.factorize.max_iter = cfg.factor_max_iter;

    // A fixed signal (or noise) density selects the corresponding one-sided problem.
    SaddleCandidate c;
    DensityClassD00 cls;
    std::string problem = "joint";
    if (cfg.signal && !cfg.noise) {
        problem = "known_signal";
        if (!cfg.q) throw Error(ErrorKind::parse, cfg.source + ": known-signal minimax needs 'q'");
        const ResolvedDensity f = keyed("signal", [&] { return resolve(*cfg.signal, cfg.K, cfg.F, cfg.base_dir); });
        const MaPolynomial phi = factor_of(f, "signal", cfg);
        c = keyed("q", [&] { return least_favorable_given_f(f.grid, phi, *cfg.q, a, opts); });
        cls.p = f.grid.moments();
        cls.q = *cfg.q;
    } else if (cfg.noise && !cfg.signal) {
        problem = "known_noise";
        if (!cfg.p) throw Error(ErrorKind::parse, cfg.source + ": known-noise minimax needs 'p'");
        const ResolvedDensity g = keyed("noise", [&] { return resolve(*cfg.noise, cfg.K, cfg.F, cfg.base_dir); });
        const MaPolynomial psi = factor_of(g, "noise", cfg);
        c = keyed("p", [&] { return least_favorable_given_g(g.grid, psi, *cfg.p, a, opts); });
        cls.p = *cfg.p;
        cls.q = g.grid.moments();
    } else if (!cfg.signal && !cfg.noise) {
        cls = load_class(cfg);
        c = solve_least_favorable(cls, a, cfg.route, opts);
    } else {
        throw Error(ErrorKind::parse, cfg.source + ": minimax takes at most one of 'signal' and 'noise'");
    }
    const SaddleReport saddle = saddle_check(c, cls, cfg.probes, cfg.seed);

    prepare_out_dir(cfg);
    write_text_file(out_path(cfg, "f0.txt"), format_density(c.f0));
    write_text_file(out_path(cfg, "g0.txt"), format_density(c.g0));
    write_text_file(out_path(cfg, "d0.txt"), format_ma(c.d0));
    write_text_file(out_path(cfg, "phi0.txt"), format_ma(c.phi0));
    write_text_file(out_path(cfg, "psi0.txt"), format_ma(c.psi0));
    write_text_file(out_path(cfg, "b0.txt"), format_ma(c.b0));
    write_text_file(out_path(cfg, "h0.txt"), format_weights(FunctionalWeights(c.h0.coeffs)));

    const CandidateDiagnostics& d = c.diagnostics;
    KeyValueReport r;
    r.add("command", "minimax");
    r.add("problem", problem);
    r.add("route", to_string(c.route));
    r.add("K", cfg.K);
    r.add("F", cfg.F);
    r.add("order", opts.order);
    r.add("Lb", c.b0.order());
    r.add("delta0", c.delta0);
    r.add("certified", c.certified);
    r.add("converged", d.converged);
    r.add("sum_factor_residual", d.sum_factor_residual);
    r.add("signal_factor_residual", d.signal_factor_residual);
    r.add("noise_factor_residual", d.noise_factor_residual);
    r.add("membership_error", d.membership_error);
    r.add("lagrange_residual_g", d.lagrange_g);
    r.add("lagrange_residual_f", d.lagrange_f);
    r.add("stationarity_tol", cfg.stationarity_tol);
    r.add("gradient_norm", d.gradient_norm);
    r.add("iterations", d.iterations);
    r.add("restarts", d.restarts);
    r.add("best_restart", d.best_restart);
    for (int k = 0; k < cfg.K; ++k) r.add("alpha2_" + std::to_string(k + 1), c.alpha2[k]);
    for (int k = 0; k < cfg.K; ++k) r.add("beta2_" + std::to_string(k + 1), c.beta2[k]);
    r.add("saddle_probes", saddle.n_probes);
    r.add("saddle_left_violations", saddle.left_violations);
    r.add("saddle_right_violations", saddle.right_violations);
    r.add("saddle_worst_left_margin", saddle.worst_left_margin ? format_number(*saddle.worst_left_margin) : "none");
    r.add("saddle_worst_right_margin", saddle.worst_right_margin ? format_number(*saddle.worst_right_margin) : "none");
    r.add("saddle_value", saddle.saddle_value);
    r.add("saddle_passed", saddle.passed);
    return finish(cfg, "minimax", r, json_like, out);
}

int cmd_simulate(const ProblemConfig& cfg, bool json_like, std::ostream& out) {
    const Model m = load_model(cfg);
    SimulationSpec spec;
    spec.phi = factor_of(m.signal, "signal", cfg);
    spec.psi = factor_of(m.noise, "noise", cfg);
    spec.horizon = cfg.horizon;
    spec.n_paths = static_cast<std::size_t>(cfg.n_paths);
    spec.seed = cfg.seed;
    keyed("horizon", [&] { spec.validate(); return 0; });

    prepare_out_dir(cfg);
    std::vector<double> signal_var(cfg.K, 0.0);
    std::vector<double> noise_var(cfg.K, 0.0);
    for (std::size_t i = 0; i < spec.n_paths; ++i) {
        const SimulatedPath path = simulate_path(spec, i);
        for (std::size_t t = 0; t < path.signal.size(); ++t) {
            for (int k = 0; k < cfg.K; ++k) {
                signal_var[k] += std::norm(path.signal[t](k));
                noise_var[k] += std::norm(path.noise[t](k));
            }
        }
        if (static_cast<int>(i) < cfg.write_paths) {
            char name[64];
            std::snprintf(name, sizeof name, "signal_%05zu.txt", i);
            write_text_file(out_path(cfg, name), format_blocks(path.signal));
            std::snprintf(name, sizeof name, "noise_%05zu.txt", i);
            write_text_file(out_path(cfg, name), format_blocks(path.noise));
        }
    }
    const double count = static_cast<double>(spec.n_paths) * spec.horizon;
    KeyValueReport r;
    r.add("command", "simulate");
    r.add("K", cfg.K);
    r.add("horizon", cfg.horizon);
    r.add("n_paths", cfg.n_paths);
    r.add("seed", std::to_string(cfg.seed));
    r.add("paths_written", std::min(cfg.write_paths, cfg.n_paths));
    for (int k = 0; k < cfg.K; ++k) {
        double expect_signal = 0.0;
        double expect_noise = 0.0;
        for (const auto& c : spec.phi.coeffs()) expect_signal += c.row(k).squaredNorm();
        for (const auto& c : spec.psi.coeffs()) expect_noise += c.row(k).squaredNorm();
        const std::string idx = std::to_string(k + 1);
        r.add("signal_variance_" + idx, signal_var[k] / count);
        r.add("signal_variance_expected_" + idx, expect_signal);
        r.add("noise_variance_" + idx, noise_var[k] / count);
        r.add("noise_variance_expected_" + idx, expect_noise);
    }
    return finish(cfg, "simulate", r, json_like, out);
}

int cmd_verify(const ProblemConfig& cfg, bool json_like, std::ostream& out) {
    const Model m = load_model(cfg);
    const FunctionalWeights a = load_weights(cfg);
    const MaPolynomial phi = factor_of(m.signal, "signal", cfg);
    const MaPolynomial psi = factor_of(m.noise, "noise", cfg);
    const Factorization fac = factorize(m.signal.grid + m.noise.grid, m.order, cfg.factorize_options());
    const int lb = inverse_order(cfg, m.order, a.max_lag());
    const MaPolynomial b = invert_factor(fac.factor, lb);
    const FilterFactors factors{fac.factor, b, phi, psi};

    // 1. the two formula routes
    const MseReport via_f = mse(Route::via_f, factors, a);
    const MseReport via_g = mse(Route::via_g, factors, a);
    const FilterCharacteristic h_f = spectral_characteristic_via_f(b, phi, a);
    const FilterCharacteristic h_g = spectral_characteristic_via_g(fac.factor, b, psi, a);
    const double delta = cfg.route == Route::via_f ? via_f.delta : via_g.delta;
    const double route_gap = std::abs(via_f.delta - via_g.delta);
    const double h_gap = coefficient_gap(h_f, h_g);
    const bool routes_ok = route_gap <= cfg.route_tol && h_gap <= cfg.route_tol;

    // 2. normal equations on a finite history; densities with a known factor are
    // re-tabulated finely enough that every covariance lag is alias-free
    const int horizon = std::max(cfg.horizon, std::max(1, a.max_lag()));
    int oracle_grid = cfg.F;
    while (oracle_grid < 2 * (horizon + a.max_lag()) + 2) oracle_grid *= 2;
    auto tabulate = [&](const ResolvedDensity& d) {
        return d.factor ? density_from_ma(*d.factor, oracle_grid) : d.grid;
    };
    const SpectralDensityGrid f_oracle = tabulate(m.signal);
    const SpectralDensityGrid g_oracle = tabulate(m.noise);
    if (f_oracle.size() != g_oracle.size()) {
        throw Error(ErrorKind::aliasing, cfg.source + ": 'horizon' " + std::to_string(horizon) +
                                             " needs covariance lags beyond half of 'F' for a tabulated density");
    }
    const MmseResult oracle = finite_horizon_mmse(f_oracle, g_oracle, a, horizon);
    const MmseResult oracle_half =
        finite_horizon_mmse(f_oracle, g_oracle, a, std::max(std::max(1, a.max_lag()), horizon / 2));
    const double oracle_gap = std::abs(oracle.value - delta);
    const bool monotone = oracle.value <= oracle_half.value + 1e-12 * std::max(1.0, oracle_half.value);
    const bool oracle_ok = oracle_gap <= cfg.oracle_tol && monotone;

    // 3. Monte Carlo with the formula filter
    const FilterCharacteristic& h = cfg.route == Route::via_f ? h_f : h_g;
    SimulationSpec spec;
    spec.phi = phi;
    spec.psi = psi;
    spec.horizon = std::max(cfg.horizon, static_cast<int>(std::max(h.coeffs.size(), a.size())));
    spec.horizon = std::max(spec.horizon, std::max(phi.order(), psi.order()));
    spec.n_paths = static_cast<std::size_t>(cfg.n_paths);
    spec.seed = cfg.seed;
    const MonteCarloEstimate mc = empirical_mse(h, spec, a);
    const double mc_gap = std::abs(mc.mean - delta);
    const double band = kMonteCarloBand * mc.std_error;
    const bool mc_ok = mc_gap <= std::max(band, 1e-12 * std::max(1.0, delta));

    const bool passed = routes_ok && oracle_ok && mc_ok;
    KeyValueReport r;
    r.add("command", "verify");
    r.add("route", to_string(cfg.route));
    r.add("K", cfg.K);
    r.add("F", cfg.F);
    r.add("L", m.order);
    r.add("Lb", lb);
    r.add("J", a.max_lag());
    r.add("delta", delta);
    r.add("delta_via_f", via_f.delta);
    r.add("delta_via_g", via_g.delta);
    r.add("route_gap", route_gap);
    r.add("characteristic_gap", h_gap);
    r.add("route_tol", cfg.route_tol);
    r.add("routes_pass", routes_ok);
    r.add("oracle_horizon", horizon);
    r.add("oracle_grid", f_oracle.size());
    r.add("oracle_mmse", oracle.value);
    r.add("oracle_mmse_half_horizon", oracle_half.value);
    r.add("oracle_regularized", oracle.regularized);
    r.add("oracle_gap", oracle_gap);
    r.add("oracle_tol", cfg.oracle_tol);
    r.add("oracle_monotone", monotone);
    r.add("oracle_pass", oracle_ok);
    r.add("mc_paths", cfg.n_paths);
    r.add("mc_horizon", spec.horizon);
    r.add("mc_mean", mc.mean);
    r.add("mc_std_error", mc.std_error);
    r.add("mc_gap", mc_gap);
    r.add("mc_band", band);
    r.add("mc_pass", mc_ok);
    r.add("passed", passed);

    prepare_out_dir(cfg);
    finish(cfg, "verify", r, json_like, out);
    return passed ? exit_ok : exit_verification;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io:
        case ErrorKind::parse:
            return exit_io;
        case ErrorKind::verification:
            return exit_verification;
        default:
            return exit_domain;
    }
}

int run(const std::string& command, const ProblemConfig& cfg, bool json_like, std::ostream& out,
        std::ostream& err) {
    try {
        validate(cfg);
        if (command == "factorize") return cmd_factorize(cfg, json_like, out);
        if (command == "filter") return cmd_filter(cfg, json_like, out);
        if (command == "minimax") return cmd_minimax(cfg, json_like, out);
        if (command == "simulate") return cmd_simulate(cfg, json_like, out);
        if (command == "verify") return cmd_verify(cfg, json_like, out);
        err << "error: unknown command '" << command << "'\n";
        return exit_io;
    } catch (const ConvergenceError& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << " [last residual "
            << format_number(e.last_residual()) << ", " << e.iterations() << " iterations]\n";
        return exit_code_for(e.kind());
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal and minimax linear filtering of periodically correlated sequences"};
    app.name("pcfilter");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool json_like = false;
    std::optional<double> factor_tol, stationarity_tol, route_tol, oracle_tol;
    std::optional<int> factor_max_iter, restarts, max_iter, probes, n_paths;
    std::optional<std::uint64_t> seed;

    app.add_option("-c,--config", config_path, "problem file (key = value)")->required();
    app.add_option("-o,--out", out_dir, "output directory (overrides out_dir)");
    app.add_flag("--json-like", json_like, "print and write the report as JSON with the same keys");
    app.add_option("--factor-tol", factor_tol, "factorization residual tolerance (default 1e-10)");
    app.add_option("--factor-max-iter", factor_max_iter, "factorization iteration limit (default 200)");
    app.add_option("--stationarity-tol", stationarity_tol, "minimax Lagrange residual tolerance (default 1e-6)");
    app.add_option("--restarts", restarts, "minimax restarts (default 8)");
    app.add_option("--max-iter", max_iter, "minimax ascent iterations per restart (default 300)");
    app.add_option("--probes", probes, "saddle-point probes per side (default 1000)");
    app.add_option("--route-tol", route_tol, "verify: route agreement tolerance (default 1e-8)");
    app.add_option("--oracle-tol", oracle_tol, "verify: normal-equation agreement tolerance (default 1e-4)");
    app.add_option("--n-paths", n_paths, "Monte Carlo / simulation paths (default 10000)");
    app.add_option("--seed", seed, "random seed (default 1)");

    const char* commands[][2] = {
        {"factorize", "canonical factor of a density and its inverse"},
        {"filter", "optimal filter characteristic and mean-square error"},
        {"minimax", "least favorable densities and the minimax filter"},
        {"simulate", "simulate signal and noise moving-average paths"},
        {"verify", "cross-check formula, normal equations and Monte Carlo"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_io;
    }

    ProblemConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
    cfg.out_dir = out_dir.empty() ? cfg.path(cfg.out_dir) : out_dir;
    if (factor_tol) cfg.factor_tol = *factor_tol;
    if (factor_max_iter) cfg.factor_max_iter = *factor_max_iter;
    if (stationarity_tol) cfg.stationarity_tol = *stationarity_tol;
    if (restarts) cfg.restarts = *restarts;
    if (max_iter) cfg.max_iter = *max_iter;
    if (probes) cfg.probes = *probes;
    if (route_tol) cfg.route_tol = *route_tol;
    if (oracle_tol) cfg.oracle_tol = *oracle_tol;
    if (n_paths) cfg.n_paths = *n_paths;
    if (seed) cfg.seed = *seed;

    return run(app.get_subcommands().front()->get_name(), cfg, json_like, out, err);
}

}  // namespace pcf::cli
