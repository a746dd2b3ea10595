#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcf/types.hpp"

namespace pcf {

/// A uniformly sampled path of a periodically correlated process.
///
/// Sample `s` holds the path value at time `(s + 0.5) * period / samples_per_period
/// - origin_offset`, so every period is covered by `samples_per_period` midpoint
/// samples and the path length is a whole number of periods.
struct SampledPath {
    double period = 1.0;
    int samples_per_period = 1;
    std::vector<Complex> values;
    double origin_offset = 0.0;

    std::size_t period_count() const;
    /// Throws pcf::Error when the invariants above do not hold.
    void validate() const;
};

/// Integer harmonic m(k) = (-1)^k * floor(k / 2) of the k-th basis function
/// (k is 1-based): 0, +1, -1, +2, -2, ...
int harmonic_of(int k);

/// Sequence of K-vectors, one per period block, in chronological order.
class BlockedSequence {
public:
    BlockedSequence() = default;
    BlockedSequence(int dim, std::vector<Vector> blocks);

    int dim() const { return dim_; }
    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    const Vector& operator[](std::size_t j) const { return blocks_[j]; }
    const std::vector<Vector>& blocks() const { return blocks_; }

    /// Block `lag` periods before the most recent one (lag 0 is the last block).
    const Vector& past(std::size_t lag) const { return blocks_[blocks_.size() - 1 - lag]; }

private:
    int dim_ = 0;
    std::vector<Vector> blocks_;
};

/// Coefficients a_j (j = 0..J) of the functional sum_j a_j^T zeta_{-j}.
class FunctionalWeights {
public:
    FunctionalWeights() = default;
    explicit FunctionalWeights(std::vector<Vector> coeffs);

    /// Scalar weights placed on the zero harmonic of a `dim`-dimensional space.
    static FunctionalWeights scalar(std::span<const Complex> values, int dim = 1);

    int dim() const { return dim_; }
    int max_lag() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::size_t size() const { return coeffs_.size(); }
    const Vector& operator[](std::size_t j) const { return coeffs_[j]; }
    const std::vector<Vector>& coeffs() const { return coeffs_; }

    /// sum_j |a_j|
    double abs_sum() const { return abs_sum_; }
    /// sum_j (j + 1) |a_j|^2
    double weighted_square_sum() const { return weighted_square_sum_; }
    /// sum_j |a_j|^2
    double squared_norm() const;

private:
    int dim_ = 0;
    std::vector<Vector> coeffs_;
    double abs_sum_ = 0.0;
    double weighted_square_sum_ = 0.0;
};

BlockedSequence block_path(const SampledPath& path, int dim);

/// Blocks a weight function sampled on [0, J*T) with the same grid convention
/// as block_path.
FunctionalWeights block_weights(std::span<const Complex> samples, double period,
                                int samples_per_period, int dim);

/// Synthesizes path samples from block coefficients (inverse of block_path for
/// inputs band-limited to the kept harmonics).
SampledPath unblock(const BlockedSequence& seq, double period, int samples_per_period);

}  // namespace pcf
