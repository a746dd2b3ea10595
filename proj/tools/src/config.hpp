#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/filter.hpp"
#include "pcf/minimax.hpp"
#include "pcf/spectral.hpp"

namespace pcf::cli {

/// white(s2) | ma(c0, c1, ...) | file:<density file> | ma_file:<ma file>
struct DensitySource {
    enum class Kind { white, ma, file, ma_file };
    Kind kind = Kind::white;
    double sigma2 = 1.0;
    std::vector<double> coeffs;
    std::string path;
    std::string text;  ///< as written in the config
};

DensitySource parse_density_source(const std::string& text, const std::string& key);

/// A density on the problem grid plus a factor when one is known exactly.
struct ResolvedDensity {
    SpectralDensityGrid grid;
    std::optional<MaPolynomial> factor;
};

ResolvedDensity resolve(const DensitySource& source, int dim, int grid_size, const std::string& base_dir);

struct ProblemConfig {
    std::string source = "<config>";
    std::string base_dir = ".";  ///< relative paths resolve against the config file

    int K = 1;
    int F = 1024;
    int L = 4;
    int Lb = 0;  ///< 0: default_inverse_order(L, J)
    std::optional<int> J;

    std::optional<DensitySource> signal;
    std::optional<DensitySource> noise;
    std::optional<DensitySource> density;  ///< factorize input; defaults to signal + noise

    std::optional<std::vector<double>> weights;  ///< inline real weights, K = 1
    std::optional<std::string> weights_file;
    std::optional<std::string> weight_samples;
    double period_T = 1.0;
    int samples_per_period = 0;

    Route route = Route::via_g;
    std::uint64_t seed = 1;
    int horizon = 200;
    int n_paths = 10000;
    std::string out_dir = ".";

    std::optional<std::vector<double>> p;
    std::optional<std::vector<double>> q;
    std::optional<std::string> class_file;

    // Tolerances; the command-line flags override these.
    double factor_tol = 1e-10;
    int factor_max_iter = 200;
    int order = -1;  ///< minimax factor order; -1 means L
    int restarts = 8;
    int max_iter = 300;
    double stationarity_tol = 1e-6;
    double route_tol = 1e-8;
    double oracle_tol = 1e-4;
    int probes = 1000;
    int write_paths = 4;  ///< simulate: number of paths written as block files

    FactorizeOptions factorize_options() const;
    std::string path(const std::string& relative) const;
};

/// Parses a flat "key = value" file; '#' starts a comment. Unknown keys and
/// malformed values are parse errors naming the key and line.
ProblemConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir = ".");
ProblemConfig load_config(const std::string& path);

/// Checks ranges and cross-field consistency (errors name the parameter).
void validate(const ProblemConfig& cfg);

FunctionalWeights load_weights(const ProblemConfig& cfg);
DensityClassD00 load_class(const ProblemConfig& cfg);

}  // namespace pcf::cli
