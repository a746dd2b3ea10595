#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace pcf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Finite sequence of equally sized complex vectors, indexed by time lag.
using VectorSequence = std::vector<Vector>;

}  // namespace pcf
