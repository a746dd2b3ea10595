#pragma once

// Entry-wise FFTs between lag coefficients and the density grid
// lambda_r = -pi + 2*pi*r/F. Internal to pcf_core.

#include <vector>

#include <unsupported/Eigen/FFT>

#include "pcf/types.hpp"

namespace pcf::detail {

/// Raw DFT pair, X_r = sum_u x_u e^{-2 pi i u r / F}, applied to every matrix
/// entry. Sign conventions of the shifted grid are handled by the callers.
class MatrixFft {
public:
    explicit MatrixFft(int grid_size) : n_(grid_size), in_(grid_size), out_(grid_size) {}

    int size() const { return n_; }

    void forward(const std::vector<Matrix>& x, std::vector<Matrix>& y) { transform(x, y, false); }
    void inverse(const std::vector<Matrix>& x, std::vector<Matrix>& y) { transform(x, y, true); }

private:
    void transform(const std::vector<Matrix>& x, std::vector<Matrix>& y, bool inv) {
        const Eigen::Index rows = x.front().rows();
        const Eigen::Index cols = x.front().cols();
        if (static_cast<int>(y.size()) != n_) y.assign(n_, Matrix(rows, cols));
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                for (int r = 0; r < n_; ++r) in_[r] = x[r](i, j);
                if (inv) {
                    fft_.inv(out_, in_);
                } else {
                    fft_.fwd(out_, in_);
                }
                for (int r = 0; r < n_; ++r) y[r](i, j) = out_[r];
            }
        }
    }

    int n_;
    Eigen::FFT<double> fft_;
    std::vector<Complex> in_;
    std::vector<Complex> out_;
};

/// Signed lag represented by DFT index u on a grid of size F.
inline int lag_of_index(int u, int grid_size) { return (2 * u < grid_size) ? u : u - grid_size; }

/// e^{-i l lambda_r} = (-1)^l e^{-2 pi i l r / F}; this is the (-1)^l factor.
inline double shift_sign(int lag) { return (lag % 2 == 0) ? 1.0 : -1.0; }

/// Values on the shifted grid of the polynomial sum_u c(u) e^{-i u lambda}.
inline std::vector<Matrix> lags_to_grid(const std::vector<Matrix>& coeffs, int grid_size) {
    const Eigen::Index rows = coeffs.front().rows();
    const Eigen::Index cols = coeffs.front().cols();
    std::vector<Matrix> folded(grid_size, Matrix::Zero(rows, cols));
    for (std::size_t u = 0; u < coeffs.size(); ++u) {
        const int lag = static_cast<int>(u);
        folded[lag % grid_size] += shift_sign(lag) * coeffs[u];
    }
    std::vector<Matrix> grid;
    MatrixFft(grid_size).forward(folded, grid);
    return grid;
}

/// Coefficients c(0..max_lag) of the trigonometric interpolant of grid values,
/// i.e. c(l) = (1/F) sum_r e^{i l lambda_r} values[r].
inline std::vector<Matrix> grid_to_lags(const std::vector<Matrix>& values, int max_lag) {
    const int n = static_cast<int>(values.size());
    std::vector<Matrix> raw;
    MatrixFft(n).inverse(values, raw);
    std::vector<Matrix> out;
    out.reserve(max_lag + 1);
    for (int l = 0; l <= max_lag; ++l) out.push_back(shift_sign(l) * raw[l % n]);
    return out;
}

}  // namespace pcf::detail
