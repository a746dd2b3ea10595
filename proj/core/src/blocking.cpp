#include "pcf/blocking.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pcf/error.hpp"

namespace pcf {

namespace {

// Basis function e_k sampled at the midpoints of one period, divided by sqrt(T).
// The same table serves analysis (conjugated) and synthesis.
Matrix basis_table(double period, int n, int dim) {
    Matrix table(dim, n);
    const double inv_sqrt_t = 1.0 / std::sqrt(period);
    for (int k = 1; k <= dim; ++k) {
        const double m = harmonic_of(k);
        for (int s = 0; s < n; ++s) {
            const double u = (s + 0.5) / n;  // in units of T
            table(k - 1, s) = std::polar(inv_sqrt_t, 2.0 * std::numbers::pi * m * u);
        }
    }
    return table;
}

void check_grid(double period, int n, int dim) {
    if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "period must be positive");
    if (n < 1) throw Error(ErrorKind::invalid_argument, "samples_per_period must be >= 1");
    if (dim < 1) throw Error(ErrorKind::invalid_argument, "truncation dimension K must be >= 1");
    if (dim > n) {
        throw Error(ErrorKind::resolution,
                    "truncation K=" + std::to_string(dim) +
                        " exceeds samples per period N=" + std::to_string(n));
    }
}

std::vector<Vector> analyse(std::span<const Complex> samples, double period, int n, int dim) {
    if (samples.empty()) throw Error(ErrorKind::empty_input, "empty sample sequence");
    check_grid(period, n, dim);
    if (samples.size() % static_cast<std::size_t>(n) != 0) {
        throw Error(ErrorKind::invalid_argument,
                    "sample count " + std::to_string(samples.size()) +
                        " is not a multiple of N=" + std::to_string(n));
    }
    const Matrix analysis = basis_table(period, n, dim).conjugate() * (period / n);
    const std::size_t blocks = samples.size() / static_cast<std::size_t>(n);
    std::vector<Vector> out;
    out.reserve(blocks);
    for (std::size_t j = 0; j < blocks; ++j) {
        Eigen::Map<const Vector> block(samples.data() + j * n, n);
        out.emplace_back(analysis * block);
    }
    return out;
}

}  // namespace

std::size_t SampledPath::period_count() const {
    return samples_per_period > 0 ? values.size() / static_cast<std::size_t>(samples_per_period) : 0;
}

void SampledPath::validate() const {
    if (!(period > 0.0)) throw Error(ErrorKind::invalid_argument, "period must be positive");
    if (samples_per_period < 1) throw Error(ErrorKind::invalid_argument, "samples_per_period must be >= 1");
    if (values.size() % static_cast<std::size_t>(samples_per_period) != 0) {
        throw Error(ErrorKind::invalid_argument, "path length is not a multiple of samples_per_period");
    }
}

int harmonic_of(int k) {
    const int half = k / 2;
    return (k % 2 == 0) ? half : -half;
}

BlockedSequence::BlockedSequence(int dim, std::vector<Vector> blocks)
    : dim_(dim), blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
        if (b.size() != dim_) throw Error(ErrorKind::dimension_mismatch, "block length differs from K");
    }
}

FunctionalWeights::FunctionalWeights(std::vector<Vector> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::empty_input, "functional weights are empty");
    dim_ = static_cast<int>(coeffs_.front().size());
    if (dim_ < 1) throw Error(ErrorKind::invalid_argument, "functional weights have zero dimension");
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        if (coeffs_[j].size() != dim_) {
            throw Error(ErrorKind::dimension_mismatch, "weight vector " + std::to_string(j) + " has wrong length");
        }
        const double norm = coeffs_[j].norm();
        abs_sum_ += norm;
        weighted_square_sum_ += static_cast<double>(j + 1) * norm * norm;
    }
}

FunctionalWeights FunctionalWeights::scalar(std::span<const Complex> values, int dim) {
    std::vector<Vector> coeffs;
    coeffs.reserve(values.size());
    for (const Complex v : values) {
        Vector a = Vector::Zero(dim);
        a(0) = v;
        coeffs.push_back(std::move(a));
    }
    return FunctionalWeights(std::move(coeffs));
}

double FunctionalWeights::squared_norm() const {
    double s = 0.0;
    for (const auto& a : coeffs_) s += a.squaredNorm();
    return s;
}

BlockedSequence block_path(const SampledPath& path, int dim) {
    if (path.values.empty()) throw Error(ErrorKind::empty_input, "empty path");
    path.validate();
    return BlockedSequence(dim, analyse(path.values, path.period, path.samples_per_period, dim));
}

FunctionalWeights block_weights(std::span<const Complex> samples, double period,
                                int samples_per_period, int dim) {
    return FunctionalWeights(analyse(samples, period, samples_per_period, dim));
}

SampledPath unblock(const BlockedSequence& seq, double period, int samples_per_period) {
    if (seq.dim() < 1) throw Error(ErrorKind::invalid_argument, "blocked sequence has zero dimension");
    check_grid(period, samples_per_period, seq.dim());
    const Matrix synthesis = basis_table(period, samples_per_period, seq.dim()).transpose();
    SampledPath path;
    path.period = period;
    path.samples_per_period = samples_per_period;
    path.values.reserve(seq.size() * static_cast<std::size_t>(samples_per_period));
    for (const auto& block : seq.blocks()) {
        const Vector samples = synthesis * block;
        path.values.insert(path.values.end(), samples.data(), samples.data() + samples.size());
    }
    return path;
}

}  // namespace pcf
