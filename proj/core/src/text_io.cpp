#include "pcf/text_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

#include "pcf/error.hpp"

namespace pcf {

namespace {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

// Non-empty lines with comments stripped.
std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream words(raw);
        Line line{number, {}};
        for (std::string w; words >> w;) line.tokens.push_back(std::move(w));
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    throw Error(ErrorKind::parse, source + ":" + std::to_string(line) + ": " + what);
}

double to_double(const std::string& token, const std::string& source, int line) {
    double value = 0.0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) fail(source, line, "expected a number, got '" + token + "'");
    return value;
}

int to_int(const std::string& token, const std::string& source, int line) {
    int value = 0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) fail(source, line, "expected an integer, got '" + token + "'");
    return value;
}

// Header "<tag> n1 n2 ...", then exactly `rows` data lines of `pairs` complex values.
struct Table {
    std::vector<int> sizes;
    std::vector<std::vector<Complex>> rows;
};

Table read_table(const std::string& text, const std::string& source, const std::string& tag, int n_sizes,
                 const std::function<std::pair<int, int>(const std::vector<int>&)>& shape) {
    const std::vector<Line> lines = tokenize(text);
    if (lines.empty()) fail(source, 0, "empty file, expected '" + tag + "' header");
    const Line& head = lines.front();
    if (head.tokens.front() != tag || static_cast<int>(head.tokens.size()) != n_sizes + 1) {
        fail(source, head.number, "expected header '" + tag + "' with " + std::to_string(n_sizes) + " sizes");
    }
    Table table;
    for (int i = 0; i < n_sizes; ++i) {
        const int v = to_int(head.tokens[i + 1], source, head.number);
        if (v < 0) fail(source, head.number, "negative size in header");
        table.sizes.push_back(v);
    }
    const auto [n_rows, n_pairs] = shape(table.sizes);
    if (static_cast<int>(lines.size()) - 1 != n_rows) {
        fail(source, head.number, "header announces " + std::to_string(n_rows) + " data lines, found " +
                                      std::to_string(lines.size() - 1));
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (static_cast<int>(l.tokens.size()) != 2 * n_pairs) {
            fail(source, l.number, "expected " + std::to_string(2 * n_pairs) + " numbers, found " +
                                       std::to_string(l.tokens.size()));
        }
        std::vector<Complex> row(n_pairs);
        for (int p = 0; p < n_pairs; ++p) {
            row[p] = Complex(to_double(l.tokens[2 * p], source, l.number),
                             to_double(l.tokens[2 * p + 1], source, l.number));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void put_complex(std::string& out, Complex z) {
    out += format_number(z.real());
    out += ' ';
    out += format_number(z.imag());
}

void put_vector_row(std::string& out, const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (k) out += ' ';
        put_complex(out, v(k));
    }
    out += '\n';
}

void put_matrix_row(std::string& out, const Matrix& m) {
    bool first = true;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!first) out += ' ';
            first = false;
            put_complex(out, m(i, j));
        }
    }
    out += '\n';
}

Vector as_vector(const std::vector<Complex>& row) {
    return Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size()));
}

Matrix as_matrix(const std::vector<Complex>& row, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(i) * cols + j];
    }
    return m;
}

bool is_json_scalar(const std::string& v) {
    if (v == "true" || v == "false") return true;
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    return ec == std::errc() && ptr == v.data() + v.size() && std::isfinite(d) && v.find_first_of("ni") == std::string::npos;
}

}  // namespace

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drop negative zero so artifacts do not depend on it
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_complex_column(const std::vector<Complex>& values) {
    std::string out = "complex " + std::to_string(values.size()) + "\n";
    for (const Complex& z : values) {
        put_complex(out, z);
        out += '\n';
    }
    return out;
}

std::vector<Complex> parse_complex_column(const std::string& text, const std::string& source) {
    Table t = read_table(text, source, "complex", 1, [](const std::vector<int>& s) { return std::pair{s[0], 1}; });
    std::vector<Complex> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) out.push_back(r[0]);
    return out;
}

std::string format_blocks(const BlockedSequence& seq) {
    std::string out = "blocks " + std::to_string(seq.dim()) + " " + std::to_string(seq.size()) + "\n";
    for (const auto& v : seq.blocks()) put_vector_row(out, v);
    return out;
}

BlockedSequence parse_blocks(const std::string& text, const std::string& source) {
    Table t = read_table(text, source, "blocks", 2, [](const std::vector<int>& s) { return std::pair{s[1], s[0]}; });
    if (t.sizes[0] < 1) fail(source, 1, "K must be >= 1");
    std::vector<Vector> blocks;
    for (const auto& r : t.rows) blocks.push_back(as_vector(r));
    return BlockedSequence(t.sizes[0], std::move(blocks));
}

std::string format_weights(const FunctionalWeights& a) {
    std::string out = "weights " + std::to_string(a.dim()) + " " + std::to_string(a.max_lag()) + "\n";
    for (const auto& v : a.coeffs()) put_vector_row(out, v);
    return out;
}

FunctionalWeights parse_weights(const std::string& text, const std::string& source) {
    Table t = read_table(text, source, "weights", 2,
                         [](const std::vector<int>& s) { return std::pair{s[1] + 1, s[0]}; });
    if (t.sizes[0] < 1) fail(source, 1, "K must be >= 1");
    std::vector<Vector> coeffs;
    for (const auto& r : t.rows) coeffs.push_back(as_vector(r));
    try {
        return FunctionalWeights(std::move(coeffs));
    } catch (const Error& e) {
        throw Error(ErrorKind::parse, source + ": " + e.what());
    }
}

FunctionalWeights parse_weight_samples(const std::string& text, const std::string& source, double period,
                                       int samples_per_period, int dim) {
    const std::vector<Complex> samples = parse_complex_column(text, source);
    try {
        return block_weights(samples, period, samples_per_period, dim);
    } catch (const Error& e) {
        throw Error(e.kind(), source + ": " + e.what());
    }
}

std::string format_density(const SpectralDensityGrid& f) {
    std::string out = "density " + std::to_string(f.dim()) + " " + std::to_string(f.size()) + "\n";
    for (const auto& m : f.values()) put_matrix_row(out, m);
    return out;
}

SpectralDensityGrid parse_density(const std::string& text, const std::string& source) {
    Table t = read_table(text, source, "density", 2,
                         [](const std::vector<int>& s) { return std::pair{s[1], s[0] * s[0]}; });
    const int dim = t.sizes[0];
    if (dim < 1) fail(source, 1, "K must be >= 1");
    std::vector<Matrix> values;
    for (const auto& r : t.rows) values.push_back(as_matrix(r, dim, dim));
    try {
        return SpectralDensityGrid(dim, std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorKind::parse, source + ": " + e.what());
    }
}

std::string format_ma(const MaPolynomial& p) {
    std::string out = "ma " + std::to_string(p.rows()) + " " + std::to_string(p.cols()) + " " +
                      std::to_string(p.order()) + "\n";
    for (const auto& c : p.coeffs()) put_matrix_row(out, c);
    return out;
}

MaPolynomial parse_ma(const std::string& text, const std::string& source) {
    Table t = read_table(text, source, "ma", 3,
                         [](const std::vector<int>& s) { return std::pair{s[2] + 1, s[0] * s[1]}; });
    if (t.sizes[0] < 1 || t.sizes[1] < 1) fail(source, 1, "K and M must be >= 1");
    std::vector<Matrix> coeffs;
    for (const auto& r : t.rows) coeffs.push_back(as_matrix(r, t.sizes[0], t.sizes[1]));
    return MaPolynomial(std::move(coeffs));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::io, "read failed for '" + path + "'");
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------

void KeyValueReport::add(const std::string& key, double value) { entries_.emplace_back(key, format_number(value)); }
void KeyValueReport::add(const std::string& key, int value) { entries_.emplace_back(key, std::to_string(value)); }
void KeyValueReport::add(const std::string& key, std::size_t value) {
    entries_.emplace_back(key, std::to_string(value));
}
void KeyValueReport::add(const std::string& key, bool value) { entries_.emplace_back(key, value ? "true" : "false"); }
void KeyValueReport::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

bool KeyValueReport::contains(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return true;
    }
    return false;
}

const std::string& KeyValueReport::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw Error(ErrorKind::invalid_argument, "report has no key '" + key + "'");
}

std::string KeyValueReport::render(bool json_like) const {
    std::string out;
    if (!json_like) {
        for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
        return out;
    }
    out = "{\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& [k, v] = entries_[i];
        out += "  " + nlohmann::json(k).dump() + ": " + (is_json_scalar(v) ? v : nlohmann::json(v).dump());
        out += i + 1 < entries_.size() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

KeyValueReport KeyValueReport::parse(const std::string& text, const std::string& source) {
    KeyValueReport report;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        // Raw numeric tokens are kept verbatim so both renderings parse to the same entries.
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse, source + ": " + e.what());
        }
        std::istringstream in(text);
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            const auto colon = line.find("\": ");
            if (colon == std::string::npos) continue;
            const auto open = line.find('"');
            nlohmann::json key = nlohmann::json::parse(line.substr(open, colon + 1 - open));
            std::string value = line.substr(colon + 3);
            if (!value.empty() && value.back() == ',') value.pop_back();
            if (!value.empty() && value.front() == '"') value = nlohmann::json::parse(value).get<std::string>();
            report.entries_.emplace_back(key.get<std::string>(), value);
        }
        if (report.entries_.size() != doc.size()) fail(source, number, "json-like report must hold one key per line");
        return report;
    }
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) fail(source, number, "expected 'key = value'");
        report.entries_.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return report;
}

}  // namespace pcf
