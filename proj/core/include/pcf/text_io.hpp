#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pcf/blocking.hpp"
#include "pcf/spectral.hpp"

// Plain-text artifact formats. Every file starts with a header line naming the
// format and its sizes; '#' starts a comment; complex numbers are "re im"
// pairs printed with 17 significant digits so values round-trip exactly.
//
//   complex N            then N lines: re im
//   blocks K N           then N lines of K pairs (oldest block first)
//   weights K J          then J+1 lines of K pairs (a_0 .. a_J)
//   density K F          then F lines of K*K pairs, row-major, lambda_r = -pi + 2 pi r / F
//   ma K M L             then L+1 lines of K*M pairs, row-major (c(0) .. c(L))

namespace pcf {

std::string format_number(double value);

std::string format_complex_column(const std::vector<Complex>& values);
std::vector<Complex> parse_complex_column(const std::string& text, const std::string& source);

std::string format_blocks(const BlockedSequence& seq);
BlockedSequence parse_blocks(const std::string& text, const std::string& source);

std::string format_weights(const FunctionalWeights& a);
FunctionalWeights parse_weights(const std::string& text, const std::string& source);

/// Weights given as a complex column of samples of a(t) on one or more periods.
FunctionalWeights parse_weight_samples(const std::string& text, const std::string& source, double period,
                                       int samples_per_period, int dim);

std::string format_density(const SpectralDensityGrid& f);
/// Validates Hermitian PSD values (parse error on failure, naming `source`).
SpectralDensityGrid parse_density(const std::string& text, const std::string& source);

std::string format_ma(const MaPolynomial& p);
MaPolynomial parse_ma(const std::string& text, const std::string& source);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Ordered key = value report. The json-like rendering carries the same keys.
class KeyValueReport {
public:
    void add(const std::string& key, double value);
    void add(const std::string& key, int value);
    void add(const std::string& key, std::size_t value);
    void add(const std::string& key, bool value);
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    /// Value of `key`; throws invalid_argument when absent.
    const std::string& get(const std::string& key) const;
    bool contains(const std::string& key) const;

    std::string render(bool json_like = false) const;
    /// Accepts either rendering.
    static KeyValueReport parse(const std::string& text, const std::string& source);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace pcf
