#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace pdist {

// splitmix64 finalizer; used to derive independent per-item seeds so that
// parallel loops stay reproducible regardless of thread count.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with hand-rolled Gaussian and Poisson sampling. The standard
// library distributions are implementation-defined, which would break
// golden-file tests across toolchains, so the transforms live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01();  // in (0, 1]
    double gauss();      // Box-Muller, cached spare

    // Exact inversion for lambda <= 64, normal approximation above
    // (relative error O(1/sqrt(lambda)), negligible for count data).
    long long poisson(double lambda);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the
// R-diagonal phase fix.
Eigen::MatrixXcd haar_unitary(int n, Rng& rng);

}  // namespace pdist
