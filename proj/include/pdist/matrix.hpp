#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace pdist {

using cxd = std::complex<double>;

enum class MatrixClass { General, Unitary, SubUnitary };

// Dense complex transfer matrix. Rows index input modes, columns index
// output modes, so chaining two elements gives first * second.
struct ComplexMatrix {
    Eigen::MatrixXcd mat;
    MatrixClass cls = MatrixClass::General;
};

// Per-mode amplitude transmissions in [0, 1].
struct DiagonalLoss {
    Eigen::VectorXd amp;
};

double unitarity_residual(const Eigen::MatrixXcd& m);
double largest_singular_value(const Eigen::MatrixXcd& m);

// Validates the claimed class (finite entries; unitary within 1e-10;
// sub-unitary within 1e-10 on the largest singular value).
ComplexMatrix label_matrix(Eigen::MatrixXcd m, MatrixClass cls);

DiagonalLoss diagonal_loss(Eigen::VectorXd amplitudes);

// DFT matrix, entry (j,k) = exp(2*pi*i*j*k/n)/sqrt(n), zero-based.
ComplexMatrix fourier_matrix(int n);

// Sylvester-Hadamard matrix scaled by 1/sqrt(n); n must be a power of two.
ComplexMatrix hadamard_matrix(int n);

// [[sqrt(R), sqrt(1-R)], [sqrt(1-R), -sqrt(R)]]; real gauge by convention.
ComplexMatrix beam_splitter(double reflectivity);

// D_in * u * d_out, labeled sub-unitary.
ComplexMatrix compose_lossy(const DiagonalLoss& d_in, const ComplexMatrix& u,
                            const DiagonalLoss& d_out);

struct FidelityResult {
    double real_part = 0;
    double imag_part = 0;
    double magnitude() const;
};

// (1/n) tr(a^dagger b). The real part is the conventional figure of merit;
// the imaginary residue is kept so callers can see how far from real the
// trace actually is. Gauge-sensitive by design.
FidelityResult trace_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int n);

// One matrix placed at a contiguous mode offset inside a wider circuit.
struct Placement {
    Eigen::MatrixXcd mat;
    int offset = 0;
};

// A stage is a set of non-overlapping placements acting in parallel
// (direct sum with identity elsewhere); stages chain by matrix product
// in application order.
using Stage = std::vector<Placement>;

ComplexMatrix direct_sum_and_chain(const std::vector<Stage>& stages, int n_modes);

// Unitary dilation [[T, B], [C, -T^dagger]] of a sub-unitary T; modes
// n..2n-1 are virtual loss modes.
Eigen::MatrixXcd unitary_dilation(const Eigen::MatrixXcd& t);

}  // namespace pdist
