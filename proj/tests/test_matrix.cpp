#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "pdist/errors.hpp"
#include "pdist/matrix.hpp"
#include "pdist/permanent.hpp"
#include "pdist/random.hpp"
#include "pdist/tomography.hpp"

using namespace pdist;

TEST_CASE("fourier matrix basics") {
    auto f1 = fourier_matrix(1);
    CHECK(f1.mat.rows() == 1);
    CHECK(f1.mat(0, 0) == cxd(1.0, 0.0));

    auto f2 = fourier_matrix(2);
    const double r = 1.0 / std::numbers::sqrt2;
    CHECK(std::abs(f2.mat(0, 0) - cxd(r, 0)) < 1e-14);
    CHECK(std::abs(f2.mat(1, 1) - cxd(-r, 0)) < 1e-14);
    CHECK(f2.cls == MatrixClass::Unitary);

    auto f3 = fourier_matrix(3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(std::abs(f3.mat(j, k)) - 1.0 / std::sqrt(3.0)) < 1e-14);

    CHECK_THROWS_AS(fourier_matrix(0), ValidationError);
}

TEST_CASE("fourier and hadamard are unitary up to n=16") {
    for (int n = 1; n <= 16; ++n) CHECK(unitarity_residual(fourier_matrix(n).mat) <= 1e-12);
    for (int n : {1, 2, 4, 8, 16}) CHECK(unitarity_residual(hadamard_matrix(n).mat) <= 1e-12);
}

TEST_CASE("hadamard construction") {
    auto h2 = hadamard_matrix(2);
    CHECK(std::abs(h2.mat(1, 1).real() + 1.0 / std::numbers::sqrt2) < 1e-14);
    auto h4 = hadamard_matrix(4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(std::abs(h4.mat(j, k)) - 0.5) < 1e-14);
            CHECK(h4.mat(j, k).imag() == 0.0);
        }
    // Sylvester sign pattern: entry = (-1)^{popcount(j&k)}
    CHECK(h4.mat(3, 3).real() > 0);
    CHECK(h4.mat(1, 3).real() < 0);
    CHECK_THROWS_AS(hadamard_matrix(3), ValidationError);
    CHECK_THROWS_AS(hadamard_matrix(0), ValidationError);
}

TEST_CASE("beam splitter convention and limits") {
    auto b = beam_splitter(0.5);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(std::abs(b.mat(j, k)) - 1.0 / std::numbers::sqrt2) < 1e-14);

    auto id = beam_splitter(1.0);
    CHECK(id.mat(0, 0).real() == doctest::Approx(1.0));
    CHECK(id.mat(1, 1).real() == doctest::Approx(-1.0));
    CHECK(std::abs(id.mat(0, 1)) < 1e-14);

    // reference splitter block from the bundled dataset
    auto ref = beam_splitter(0.497);
    auto printed = oracles::ref_abs_printed();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(std::abs(ref.mat(j, k)) - printed(j, k)) < 1e-3);

    CHECK_THROWS_AS(beam_splitter(-0.1), ValidationError);
    CHECK_THROWS_AS(beam_splitter(1.1), ValidationError);
}

TEST_CASE("permanent closed cases") {
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Identity(3, 3)) - cxd(1, 0)) < 1e-14);
    Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(3, 3);
    CHECK(std::abs(permanent(ones) - cxd(6, 0)) < 1e-12);

    Eigen::MatrixXcd w(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            w(j, k) = std::polar(1.0, 2 * std::numbers::pi * double(j * k) / 3.0);
    CHECK(std::abs(permanent(w) - cxd(-3, 0)) < 1e-12);

    Eigen::MatrixXcd empty(0, 0);
    CHECK(permanent(empty) == cxd(1, 0));
    CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Ones(2, 3)), ValidationError);
}

TEST_CASE("permanent matches naive factorial sum up to n=6") {
    Rng rng(17);
    for (int n = 1; n <= 6; ++n) {
        Eigen::MatrixXcd m(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) m(j, k) = cxd(rng.gauss(), rng.gauss());
        const auto fast = permanent(m);
        const auto slow = oracles::naive_permanent(m);
        CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, std::abs(slow)));
    }
}

TEST_CASE("permanent invariances") {
    Rng rng(23);
    Eigen::MatrixXcd m(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) m(j, k) = cxd(rng.gauss(), rng.gauss());
    const auto base = permanent(m);

    Eigen::PermutationMatrix<4> p, q;
    p.setIdentity();
    q.setIdentity();
    p.applyTranspositionOnTheRight(0, 2);
    q.applyTranspositionOnTheRight(1, 3);
    Eigen::MatrixXcd shuffled = p * m * q;
    CHECK(std::abs(permanent(shuffled) - base) < 1e-12 * std::abs(base));
    CHECK(std::abs(permanent(m.transpose().eval()) - base) < 1e-12 * std::abs(base));
}

TEST_CASE("matrix labeling validates the claimed class") {
    CHECK(label_matrix(fourier_matrix(4).mat, MatrixClass::Unitary).cls == MatrixClass::Unitary);
    Eigen::MatrixXcd sub = 0.5 * fourier_matrix(3).mat;
    CHECK(label_matrix(sub, MatrixClass::SubUnitary).cls == MatrixClass::SubUnitary);
    Eigen::MatrixXcd big = 2.0 * fourier_matrix(3).mat;
    CHECK_THROWS_AS(label_matrix(big, MatrixClass::SubUnitary), ValidationError);
    CHECK_THROWS_AS(label_matrix(sub, MatrixClass::Unitary), ValidationError);
    CHECK(label_matrix(big, MatrixClass::General).cls == MatrixClass::General);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Ones(2, 2);
    bad(0, 0) = cxd(std::nan(""), 0);
    CHECK_THROWS_AS(label_matrix(bad, MatrixClass::General), ValidationError);
}

TEST_CASE("compose_lossy") {
    auto u = fourier_matrix(3);
    DiagonalLoss unit{Eigen::Vector3d::Ones()};
    auto same = compose_lossy(unit, u, unit);
    CHECK((same.mat - u.mat).cwiseAbs().maxCoeff() < 1e-14);

    DiagonalLoss din{Eigen::Vector3d(0.5, 0.8, 0.0)};
    auto killed = compose_lossy(din, u, unit);
    CHECK(killed.mat.row(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(killed.cls == MatrixClass::SubUnitary);
    CHECK(largest_singular_value(killed.mat) <= 1.0 + 1e-10);

    DiagonalLoss wrong{Eigen::Vector2d::Ones()};
    CHECK_THROWS_AS(compose_lossy(wrong, u, unit), ValidationError);
    CHECK_THROWS_AS(diagonal_loss(Eigen::Vector3d(1.2, 0.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(diagonal_loss(Eigen::Vector3d(-0.1, 0.5, 0.5)), ValidationError);
}

TEST_CASE("compose_lossy reproduces the recorded transfer matrix") {
    auto cm = load_count_csv(std::string(PDIST_DATA_DIR) + "/s_recorded.csv");
    Eigen::MatrixXd t_rec = amplitudes_from_counts(cm);
    ComplexMatrix u{oracles::u_exp_abs_printed().cast<cxd>(), MatrixClass::General};
    auto comp = compose_lossy(DiagonalLoss{oracles::d_in_printed()}, u,
                              DiagonalLoss{oracles::d_out_printed()});
    CHECK((comp.mat.real() - t_rec).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("trace fidelity") {
    auto f3 = fourier_matrix(3).mat;
    auto self = trace_fidelity(f3, f3, 3);
    CHECK(self.real_part == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(self.imag_part) < 1e-12);

    // reconstructed distillation block against the ideal circuit; the trace
    // carries a small residual phase, so the printed value is its modulus
    Eigen::MatrixXcd ud_th = f3.conjugate();
    auto fd = trace_fidelity(ud_th, oracles::u_d_exp_printed(), 3);
    CHECK(fd.magnitude() == doctest::Approx(0.9982).epsilon(5e-4));
    CHECK(fd.real_part == doctest::Approx(0.9975).epsilon(5e-4));
    CHECK(std::abs(fd.imag_part) < 0.05);

    auto ffit = trace_fidelity(oracles::u_exp_abs_printed().cast<cxd>(),
                               oracles::u_model_abs_printed().cast<cxd>(), 4);
    CHECK(ffit.real_part == doctest::Approx(0.9996).epsilon(2e-4));

    CHECK_THROWS_AS(trace_fidelity(f3, fourier_matrix(4).mat, 3), ValidationError);
}

TEST_CASE("trace fidelity is gauge sensitive") {
    auto f3 = fourier_matrix(3).mat;
    Eigen::Vector3cd phases(std::polar(1.0, 0.7), std::polar(1.0, -1.1), std::polar(1.0, 2.2));
    Eigen::MatrixXcd rotated = f3 * phases.asDiagonal();
    auto f = trace_fidelity(f3, rotated, 3);
    CHECK(f.real_part < 0.999);
}

TEST_CASE("direct sum and chain") {
    auto f3 = fourier_matrix(3);
    auto alone = direct_sum_and_chain({Stage{{f3.mat, 0}}}, 3);
    CHECK((alone.mat - f3.mat).cwiseAbs().maxCoeff() < 1e-14);

    // two disjoint identities in one stage stay the identity
    Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
    auto ids = direct_sum_and_chain({Stage{{id2, 0}, {id2, 2}}}, 4);
    CHECK((ids.mat - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

    // parallel placement keeps the off-diagonal blocks empty
    auto pair = direct_sum_and_chain({Stage{{fourier_matrix(2).mat, 0}, {fourier_matrix(2).mat, 2}}}, 4);
    CHECK(std::abs(pair.mat(0, 2)) < 1e-14);
    CHECK(std::abs(pair.mat(3, 1)) < 1e-14);

    // distillation block on modes 0-2 chained into a splitter on modes 2-3:
    // nothing routes the last input back into the first two outputs
    auto chain = direct_sum_and_chain(
        {Stage{{f3.mat, 0}}, Stage{{beam_splitter(0.5).mat, 2}}}, 4);
    CHECK(unitarity_residual(chain.mat) < 1e-12);
    CHECK(std::abs(chain.mat(3, 0)) < 1e-14);
    CHECK(std::abs(chain.mat(3, 1)) < 1e-14);
    CHECK(std::abs(chain.mat(0, 3)) > 1e-3);

    Stage clash{{beam_splitter(0.5).mat, 0}, {beam_splitter(0.5).mat, 1}};
    CHECK_THROWS_AS(direct_sum_and_chain({clash}, 3), ValidationError);
    Stage outside{{beam_splitter(0.5).mat, 3}};
    CHECK_THROWS_AS(direct_sum_and_chain({outside}, 4), ValidationError);
}

TEST_CASE("unitary dilation") {
    Eigen::MatrixXcd t = 0.7 * fourier_matrix(3).mat;
    auto w = unitary_dilation(t);
    CHECK(w.rows() == 6);
    CHECK(unitarity_residual(w) <= 1e-12);
    CHECK((w.topLeftCorner(3, 3) - t).cwiseAbs().maxCoeff() < 1e-13);

    DiagonalLoss din{Eigen::Vector4d(0.3568, 0.3242, 0.3991, 0.3909)};
    DiagonalLoss dout{Eigen::Vector4d(0.3856, 0.4110, 0.4046, 0.3734)};
    ComplexMatrix u{oracles::u_exp_abs_printed().cast<cxd>(), MatrixClass::General};
    auto lossy = compose_lossy(din, u, dout);
    auto w2 = unitary_dilation(lossy.mat);
    CHECK(unitarity_residual(w2) <= 1e-12);

    Eigen::MatrixXcd over = 1.5 * fourier_matrix(2).mat;
    CHECK_THROWS_AS(unitary_dilation(over), ValidationError);
}

TEST_CASE("unitarity residual conventions") {
    CHECK(unitarity_residual(fourier_matrix(5).mat) < 1e-14);
    Eigen::MatrixXcd rect = Eigen::MatrixXcd::Ones(2, 3);
    CHECK(unitarity_residual(rect) == std::numeric_limits<double>::infinity());
}
