#include "pdist/random.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>

#include "pdist/errors.hpp"
#include "pdist/matrix.hpp"

namespace pdist {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over a golden-ratio stride.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform01() {
    // 53-bit draw mapped to (0, 1]; never returns 0, so log() stays finite.
    std::uint64_t bits = gen_() >> 11;
    return double(bits + 1) * 0x1p-53;
}

double Rng::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

long long Rng::poisson(double lambda) {
    if (!(lambda >= 0.0)) throw ValidationError("poisson rate must be non-negative");
    if (lambda == 0.0) return 0;
    if (lambda <= 64.0) {
        // Exact inversion by sequential search.
        double l = std::exp(-lambda);
        double p = 1.0;
        long long k = 0;
        do {
            ++k;
            p *= uniform01();
        } while (p > l);
        return k - 1;
    }
    double draw = std::round(lambda + std::sqrt(lambda) * gauss());
    return draw < 0.0 ? 0 : (long long)draw;
}

Eigen::MatrixXcd haar_unitary(int n, Rng& rng) {
    if (n < 1) throw ValidationError("haar_unitary requires n >= 1");
    Eigen::MatrixXcd g(n, n);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = cxd(rng.gauss(), rng.gauss()) * inv_sqrt2;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase-fix the columns so the result is Haar, not QR-sign dependent.
    for (int j = 0; j < n; ++j) {
        cxd d = r(j, j);
        double a = std::abs(d);
        cxd phase = (a > 0.0) ? d / a : cxd(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

}  // namespace pdist
