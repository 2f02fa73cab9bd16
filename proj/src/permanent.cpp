#include "pdist/permanent.hpp"

#include <bit>
#include <vector>

#include "pdist/errors.hpp"

namespace pdist {

// Ryser's formula with Gray-code subset updates: O(2^n n) instead of the
// naive O(n! n). Column sums are updated incrementally as the subset walks
// the Gray sequence, so each step touches one column.
std::complex<double> permanent(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw ValidationError("permanent requires a square matrix");
    const int n = int(m.rows());
    if (n == 0) return {1.0, 0.0};
    if (n > kPermanentMaxDim) throw ValidationError("permanent dimension above supported limit");
    if (n == 1) return m(0, 0);

    std::vector<std::complex<double>> col_sum(n, {0.0, 0.0});
    std::complex<double> total{0.0, 0.0};
    const unsigned long long count = 1ULL << n;
    unsigned long long gray_prev = 0;
    double sign = 1.0;  // (-1)^(n - |S|) folded in at the end

    for (unsigned long long k = 1; k < count; ++k) {
        unsigned long long gray = k ^ (k >> 1);
        unsigned long long diff = gray ^ gray_prev;
        int bit = std::countr_zero(diff);
        if (gray & diff) {
            for (int r = 0; r < n; ++r) col_sum[r] += m(r, bit);
            sign = -sign;
        } else {
            for (int r = 0; r < n; ++r) col_sum[r] -= m(r, bit);
            sign = -sign;
        }
        std::complex<double> prod{1.0, 0.0};
        for (int r = 0; r < n; ++r) prod *= col_sum[r];
        total += sign * prod;
        gray_prev = gray;
    }
    // sign currently tracks (-1)^popcount(S); Ryser weight is (-1)^(n-|S|).
    double overall = (n % 2 == 0) ? 1.0 : -1.0;
    return overall * total;
}

}  // namespace pdist
