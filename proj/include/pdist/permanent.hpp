#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pdist {

// Exact permanent by Ryser's inclusion-exclusion with Gray-code subset
// updates, O(2^n * n). The summation order is fixed, so results are
// bit-reproducible. Accepts n up to 24; perm of the empty matrix is 1.
std::complex<double> permanent(const Eigen::MatrixXcd& m);

inline constexpr int kPermanentMaxDim = 24;

}  // namespace pdist
