#include "pdist/matrix.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

#include "pdist/errors.hpp"

namespace pdist {

namespace {

void check_finite(const Eigen::MatrixXcd& m) {
    if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
}

}  // namespace

double unitarity_residual(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXcd g = m.adjoint() * m;
    g -= Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    return g.cwiseAbs().maxCoeff();
}

double largest_singular_value(const Eigen::MatrixXcd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

ComplexMatrix label_matrix(Eigen::MatrixXcd m, MatrixClass cls) {
    check_finite(m);
    if (cls == MatrixClass::Unitary && unitarity_residual(m) > 1e-10)
        throw ValidationError("matrix labeled unitary fails the unitarity check");
    if (cls == MatrixClass::SubUnitary && m.size() > 0 && largest_singular_value(m) > 1 + 1e-10)
        throw ValidationError("matrix labeled sub-unitary has a singular value above 1");
    return {std::move(m), cls};
}

DiagonalLoss diagonal_loss(Eigen::VectorXd amplitudes) {
    for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
        double a = amplitudes(i);
        if (!(a >= 0.0 && a <= 1.0))
            throw ValidationError("loss amplitude outside [0, 1]");
    }
    return {std::move(amplitudes)};
}

ComplexMatrix fourier_matrix(int n) {
    if (n < 1) throw ValidationError("fourier_matrix requires n >= 1");
    Eigen::MatrixXcd m(n, n);
    const double s = 1.0 / std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double phi = 2.0 * std::numbers::pi * double((long long)j * k % n) / n;
            m(j, k) = s * cxd(std::cos(phi), std::sin(phi));
        }
    return label_matrix(std::move(m), MatrixClass::Unitary);
}

ComplexMatrix hadamard_matrix(int n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw ValidationError("hadamard_matrix requires n to be a power of 2");
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    for (int k = 1; k < n; k <<= 1) {
        Eigen::MatrixXd next(2 * k, 2 * k);
        next << h, h, h, -h;
        h = std::move(next);
    }
    h /= std::sqrt(double(n));
    return label_matrix(h.cast<cxd>(), MatrixClass::Unitary);
}

ComplexMatrix beam_splitter(double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0))
        throw ValidationError("beam splitter reflectivity outside [0, 1]");
    double c = std::sqrt(reflectivity), s = std::sqrt(1.0 - reflectivity);
    Eigen::MatrixXcd m(2, 2);
    m << c, s, s, -c;
    return label_matrix(std::move(m), MatrixClass::Unitary);
}

ComplexMatrix compose_lossy(const DiagonalLoss& d_in, const ComplexMatrix& u,
                            const DiagonalLoss& d_out) {
    if (d_in.amp.size() != u.mat.rows() || d_out.amp.size() != u.mat.cols())
        throw ValidationError("compose_lossy dimension mismatch");
    Eigen::MatrixXcd t =
        d_in.amp.asDiagonal().toDenseMatrix().cast<cxd>() * u.mat *
        d_out.amp.asDiagonal().toDenseMatrix().cast<cxd>();
    return label_matrix(std::move(t), MatrixClass::SubUnitary);
}

double FidelityResult::magnitude() const {
    return std::hypot(real_part, imag_part);
}

FidelityResult trace_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int n) {
    if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols())
        throw ValidationError("trace_fidelity requires equal square matrices");
    if (n < 1) throw ValidationError("trace_fidelity normalization must be positive");
    cxd tr = (a.adjoint() * b).trace() / double(n);
    return {tr.real(), tr.imag()};
}

ComplexMatrix direct_sum_and_chain(const std::vector<Stage>& stages, int n_modes) {
    if (n_modes < 1) throw ValidationError("direct_sum_and_chain needs at least one mode");
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(n_modes, n_modes);
    for (const Stage& stage : stages) {
        Eigen::MatrixXcd emb = Eigen::MatrixXcd::Identity(n_modes, n_modes);
        std::vector<bool> used(n_modes, false);
        for (const Placement& pl : stage) {
            if (pl.mat.rows() != pl.mat.cols())
                throw ValidationError("stage matrices must be square");
            int k = int(pl.mat.rows());
            if (pl.offset < 0 || pl.offset + k > n_modes)
                throw ValidationError("stage placement out of range");
            for (int i = 0; i < k; ++i) {
                if (used[pl.offset + i])
                    throw ValidationError("overlapping placements within one stage");
                used[pl.offset + i] = true;
            }
            emb.block(pl.offset, pl.offset, k, k) = pl.mat;
        }
        total = total * emb;  // rows = inputs: first stage leftmost
    }
    check_finite(total);
    return {std::move(total), MatrixClass::General};
}

Eigen::MatrixXcd unitary_dilation(const Eigen::MatrixXcd& t) {
    if (t.rows() != t.cols()) throw ValidationError("unitary_dilation requires a square matrix");
    const int n = int(t.rows());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = svd.singularValues();
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) {
        if (s(i) > 1.0 + 1e-10)
            throw ValidationError("unitary_dilation input is not sub-unitary");
        double v = std::min(s(i), 1.0);
        k(i) = std::sqrt(1.0 - v * v);
    }
    Eigen::MatrixXcd u = svd.matrixU(), v = svd.matrixV();
    Eigen::MatrixXcd w(2 * n, 2 * n);
    w.topLeftCorner(n, n) = t;
    w.topRightCorner(n, n) = u * k.asDiagonal() * u.adjoint();
    w.bottomLeftCorner(n, n) = v * k.asDiagonal() * v.adjoint();
    w.bottomRightCorner(n, n) = -t.adjoint();
    return w;
}

}  // namespace pdist
