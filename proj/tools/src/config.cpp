#include "config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "pcf/error.hpp"
#include "pcf/text_io.hpp"

namespace pcf::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& key, const std::string& what) {
    throw Error(ErrorKind::parse, where + ": '" + key + "': " + what);
}

double number(const std::string& token, const std::string& where, const std::string& key) {
    const std::string t = trim(token);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        bad(where, key, "expected a finite number, got '" + t + "'");
    }
    return v;
}

long long integer(const std::string& token, const std::string& where, const std::string& key) {
    const std::string t = trim(token);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        bad(where, key, "expected an integer, got '" + t + "'");
    }
    return v;
}

// "1, 2, 3" or "1 2 3"
std::vector<double> number_list(const std::string& text, const std::string& where, const std::string& key) {
    std::string s = text;
    for (char& c : s) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(s);
    std::vector<double> out;
    for (std::string tok; in >> tok;) out.push_back(number(tok, where, key));
    if (out.empty()) bad(where, key, "expected at least one number");
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "K",          "F",          "L",          "Lb",        "J",          "signal",     "noise",
        "density",    "weights",    "weights_file", "weight_samples", "period_T", "samples_per_period",
        "route",      "seed",       "horizon",    "n_paths",   "out_dir",    "p",          "q",
        "class_file", "factor_tol", "factor_max_iter", "order", "restarts",  "max_iter",   "stationarity_tol",
        "route_tol",  "oracle_tol", "probes",     "write_paths"};
    return keys;
}

struct Entry {
    std::string value;
    int line = 0;
};

std::map<std::string, Entry> read_pairs(const std::string& text, const std::string& source) {
    std::map<std::string, Entry> pairs;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw Error(ErrorKind::parse, where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::parse, where + ": empty key");
        if (pairs.count(key)) bad(where, key, "given twice");
        pairs[key] = Entry{value, number};
    }
    return pairs;
}

}  // namespace

DensitySource parse_density_source(const std::string& text, const std::string& key) {
    DensitySource s;
    s.text = trim(text);
    const std::string& t = s.text;
    auto inside = [&](const std::string& head) -> std::optional<std::string> {
        if (t.rfind(head + "(", 0) == 0 && t.back() == ')') return t.substr(head.size() + 1, t.size() - head.size() - 2);
        return std::nullopt;
    };
    if (auto arg = inside("white")) {
        s.kind = DensitySource::Kind::white;
        s.sigma2 = number(*arg, "density source", key);
        if (s.sigma2 < 0.0) bad("density source", key, "white-noise variance must be >= 0");
    } else if (auto args = inside("ma")) {
        s.kind = DensitySource::Kind::ma;
        s.coeffs = number_list(*args, "density source", key);
    } else if (t.rfind("file:", 0) == 0) {
        s.kind = DensitySource::Kind::file;
        s.path = trim(t.substr(5));
    } else if (t.rfind("ma_file:", 0) == 0) {
        s.kind = DensitySource::Kind::ma_file;
        s.path = trim(t.substr(8));
    } else {
        bad("density source", key, "expected white(s2), ma(c0, c1, ...), file:<path> or ma_file:<path>, got '" + t + "'");
    }
    if ((s.kind == DensitySource::Kind::file || s.kind == DensitySource::Kind::ma_file) && s.path.empty()) {
        bad("density source", key, "missing file path");
    }
    return s;
}

ResolvedDensity resolve(const DensitySource& source, int dim, int grid_size, const std::string& base_dir) {
    auto full = [&](const std::string& p) {
        return std::filesystem::path(p).is_absolute() ? p : (std::filesystem::path(base_dir) / p).string();
    };
    ResolvedDensity out;
    switch (source.kind) {
        case DensitySource::Kind::white: {
            out.factor = MaPolynomial::identity(dim, std::sqrt(source.sigma2));
            out.grid = SpectralDensityGrid::constant(source.sigma2 * Matrix::Identity(dim, dim), grid_size);
            break;
        }
        case DensitySource::Kind::ma: {
            std::vector<Matrix> coeffs;
            for (double c : source.coeffs) coeffs.push_back(c * Matrix::Identity(dim, dim));
            out.factor = MaPolynomial(std::move(coeffs));
            out.grid = density_from_ma(*out.factor, grid_size);
            break;
        }
        case DensitySource::Kind::file: {
            const std::string path = full(source.path);
            out.grid = parse_density(read_text_file(path), path);
            if (out.grid.dim() != dim || out.grid.size() != grid_size) {
                throw Error(ErrorKind::grid_mismatch, path + ": density is " + std::to_string(out.grid.dim()) +
                                                          "x" + std::to_string(out.grid.size()) +
                                                          ", config has K=" + std::to_string(dim) +
                                                          ", F=" + std::to_string(grid_size));
            }
            break;
        }
        case DensitySource::Kind::ma_file: {
            const std::string path = full(source.path);
            out.factor = parse_ma(read_text_file(path), path);
            if (out.factor->rows() != dim) {
                throw Error(ErrorKind::dimension_mismatch,
                            path + ": factor has " + std::to_string(out.factor->rows()) + " rows, K=" +
                                std::to_string(dim));
            }
            out.grid = density_from_ma(*out.factor, grid_size);
            break;
        }
    }
    return out;
}

FactorizeOptions ProblemConfig::factorize_options() const {
    FactorizeOptions o;
    o.tol = factor_tol;
    o.max_iter = factor_max_iter;
    return o;
}

std::string ProblemConfig::path(const std::string& relative) const {
    if (std::filesystem::path(relative).is_absolute()) return relative;
    return (std::filesystem::path(base_dir) / relative).string();
}

ProblemConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
    ProblemConfig cfg;
    cfg.source = source;
    cfg.base_dir = base_dir;
    for (const auto& [key, entry] : read_pairs(text, source)) {
        const std::string where = source + ":" + std::to_string(entry.line);
        const std::string& v = entry.value;
        if (!known_keys().count(key)) bad(where, key, "unknown key");
        auto as_int = [&] {
            const long long n = integer(v, where, key);
            if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) bad(where, key, "out of range");
            return static_cast<int>(n);
        };
        if (key == "K") cfg.K = as_int();
        else if (key == "F") cfg.F = as_int();
        else if (key == "L") cfg.L = as_int();
        else if (key == "Lb") cfg.Lb = as_int();
        else if (key == "J") cfg.J = as_int();
        else if (key == "signal") cfg.signal = parse_density_source(v, key);
        else if (key == "noise") cfg.noise = parse_density_source(v, key);
        else if (key == "density") cfg.density = parse_density_source(v, key);
        else if (key == "weights") cfg.weights = number_list(v, where, key);
        else if (key == "weights_file") cfg.weights_file = v;
        else if (key == "weight_samples") cfg.weight_samples = v;
        else if (key == "period_T") cfg.period_T = number(v, where, key);
        else if (key == "samples_per_period") cfg.samples_per_period = as_int();
        else if (key == "route") {
            try {
                cfg.route = route_from_string(v);
            } catch (const Error& e) {
                bad(where, key, e.what());
            }
        } else if (key == "seed") {
            const long long s = integer(v, where, key);
            if (s < 0) bad(where, key, "must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "horizon") cfg.horizon = as_int();
        else if (key == "n_paths") cfg.n_paths = as_int();
        else if (key == "out_dir") cfg.out_dir = v;
        else if (key == "p") cfg.p = number_list(v, where, key);
        else if (key == "q") cfg.q = number_list(v, where, key);
        else if (key == "class_file") cfg.class_file = v;
        else if (key == "factor_tol") cfg.factor_tol = number(v, where, key);
        else if (key == "factor_max_iter") cfg.factor_max_iter = as_int();
        else if (key == "order") cfg.order = as_int();
        else if (key == "restarts") cfg.restarts = as_int();
        else if (key == "max_iter") cfg.max_iter = as_int();
        else if (key == "stationarity_tol") cfg.stationarity_tol = number(v, where, key);
        else if (key == "route_tol") cfg.route_tol = number(v, where, key);
        else if (key == "oracle_tol") cfg.oracle_tol = number(v, where, key);
        else if (key == "probes") cfg.probes = as_int();
        else if (key == "write_paths") cfg.write_paths = as_int();
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    const std::string text = read_text_file(path);
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    return parse_config(text, path, parent.empty() ? "." : parent.string());
}

void validate(const ProblemConfig& cfg) {
    auto need = [&](bool ok, const std::string& key, const std::string& what) {
        if (!ok) throw Error(ErrorKind::parse, cfg.source + ": '" + key + "' " + what);
    };
    need(cfg.K >= 1, "K", "must be >= 1");
    need(cfg.F >= 1, "F", "must be >= 1");
    need(cfg.L >= 0, "L", "must be >= 0");
    need(cfg.F >= 2 * cfg.L + 1, "F", "must be >= 2L+1 (" + std::to_string(2 * cfg.L + 1) + ")");
    need(cfg.Lb >= 0, "Lb", "must be >= 0");
    need(!cfg.J || *cfg.J >= 0, "J", "must be >= 0");
    need(cfg.period_T > 0.0, "period_T", "must be > 0");
    need(cfg.samples_per_period >= 0, "samples_per_period", "must be >= 0");
    need(cfg.horizon >= 1, "horizon", "must be >= 1");
    need(cfg.n_paths >= 1, "n_paths", "must be >= 1");
    need(cfg.factor_tol > 0.0, "factor_tol", "must be > 0");
    need(cfg.factor_max_iter >= 1, "factor_max_iter", "must be >= 1");
    need(cfg.order >= -1, "order", "must be >= 0");
    need(cfg.restarts >= 1, "restarts", "must be >= 1");
    need(cfg.max_iter >= 1, "max_iter", "must be >= 1");
    need(cfg.stationarity_tol > 0.0, "stationarity_tol", "must be > 0");
    need(cfg.route_tol > 0.0, "route_tol", "must be > 0");
    need(cfg.oracle_tol > 0.0, "oracle_tol", "must be > 0");
    need(cfg.probes >= 0, "probes", "must be >= 0");
    need(cfg.write_paths >= 0, "write_paths", "must be >= 0");
    const int sources = static_cast<int>(cfg.weights.has_value()) + static_cast<int>(cfg.weights_file.has_value()) +
                        static_cast<int>(cfg.weight_samples.has_value());
    need(sources <= 1, "weights", "is given more than once (weights, weights_file, weight_samples)");
    need(!cfg.weights || cfg.K == 1, "weights", "inline weights need K = 1; use weights_file for K > 1");
    need(!cfg.weight_samples || cfg.samples_per_period >= 1, "samples_per_period",
         "is required with weight_samples");
    need(!(cfg.class_file && (cfg.p || cfg.q)), "class_file", "conflicts with inline p/q");
}

FunctionalWeights load_weights(const ProblemConfig& cfg) {
    FunctionalWeights a;
    if (cfg.weights) {
        std::vector<Complex> values(cfg.weights->begin(), cfg.weights->end());
        a = FunctionalWeights::scalar(values);
    } else if (cfg.weights_file) {
        const std::string path = cfg.path(*cfg.weights_file);
        a = parse_weights(read_text_file(path), path);
    } else if (cfg.weight_samples) {
        const std::string path = cfg.path(*cfg.weight_samples);
        a = parse_weight_samples(read_text_file(path), path, cfg.period_T, cfg.samples_per_period, cfg.K);
    } else {
        throw Error(ErrorKind::parse,
                    cfg.source + ": no weights given (set 'weights', 'weights_file' or 'weight_samples')");
    }
    if (a.dim() != cfg.K) {
        throw Error(ErrorKind::dimension_mismatch,
                    cfg.source + ": weights have K=" + std::to_string(a.dim()) + ", 'K' is " + std::to_string(cfg.K));
    }
    if (cfg.J && *cfg.J != a.max_lag()) {
        throw Error(ErrorKind::parse, cfg.source + ": 'J' is " + std::to_string(*cfg.J) +
                                                     " but the weights end at lag " + std::to_string(a.max_lag()));
    }
    return a;
}

DensityClassD00 load_class(const ProblemConfig& cfg) {
    DensityClassD00 cls;
    std::string where = cfg.source;
    if (cfg.class_file) {
        const std::string path = cfg.path(*cfg.class_file);
        where = path;
        const auto pairs = read_pairs(read_text_file(path), path);
        for (const auto& [key, entry] : pairs) {
            if (key != "K" && key != "p" && key != "q") bad(path + ":" + std::to_string(entry.line), key, "unknown key");
        }
        auto get = [&](const std::string& key) -> const Entry& {
            const auto it = pairs.find(key);
            if (it == pairs.end()) throw Error(ErrorKind::parse, path + ": missing '" + key + "'");
            return it->second;
        };
        const long long k = integer(get("K").value, path, "K");
        cls.p = number_list(get("p").value, path, "p");
        cls.q = number_list(get("q").value, path, "q");
        if (k != cfg.K) {
            throw Error(ErrorKind::dimension_mismatch, path + ": class K=" + std::to_string(k) + ", config K=" +
                                                           std::to_string(cfg.K));
        }
    } else {
        if (!cfg.p || !cfg.q) {
            throw Error(ErrorKind::parse, cfg.source + ": minimax needs 'p' and 'q' or 'class_file'");
        }
        cls.p = *cfg.p;
        cls.q = *cfg.q;
    }
    if (static_cast<int>(cls.p.size()) != cfg.K || static_cast<int>(cls.q.size()) != cfg.K) {
        throw Error(ErrorKind::dimension_mismatch, where + ": 'p' and 'q' need K=" + std::to_string(cfg.K) + " entries");
    }
    try {
        cls.validate();
    } catch (const Error& e) {
        throw Error(e.kind(), where + ": " + e.what());
    }
    return cls;
}

}  // namespace pcf::cli
