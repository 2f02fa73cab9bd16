#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pdist/distill.hpp"
#include "pdist/errors.hpp"
#include "pdist/events.hpp"
#include "pdist/matrix.hpp"
#include "pdist/random.hpp"
#include "pdist/sources.hpp"

using namespace pdist;

namespace {

PhotonSourceModel uniform_source(int n, double eps, NoiseModel model = NoiseModel::OBB) {
    PhotonSourceModel s;
    s.model = model;
    s.eps.assign(size_t(n), eps);
    return s;
}

}  // namespace

TEST_CASE("species expansion") {
    auto none = expand_species(uniform_source(2, 0.0));
    REQUIRE(none.size() == 1);
    CHECK(none[0].weight == 1.0);
    CHECK(std::all_of(none[0].species.begin(), none[0].species.end(),
                      [](int s) { return s == 0; }));

    PhotonSourceModel one;
    one.eps = {0.3};
    auto two = expand_species(one);
    REQUIRE(two.size() == 2);
    double w_good = 0, w_bad = 0;
    for (const auto& t : two) (t.species[0] == 0 ? w_good : w_bad) += t.weight;
    CHECK(w_good == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(w_bad == doctest::Approx(0.3).epsilon(1e-14));

    const double eps = 0.2;
    auto terms = expand_species(uniform_source(3, eps));
    double total = 0, one_bad = 0;
    for (const auto& t : terms) {
        total += t.weight;
        int bads = 0;
        for (int s : t.species) bads += s != 0;
        if (bads == 1) one_bad += t.weight;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(one_bad == doctest::Approx(3 * eps * (1 - eps) * (1 - eps)).epsilon(1e-13));
}

TEST_CASE("species labels distinguish the two noise models") {
    auto obb = expand_species(uniform_source(3, 0.5, NoiseModel::OBB));
    auto sbb = expand_species(uniform_source(3, 0.5, NoiseModel::SBB));
    int distinct_obb = 0, shared_sbb = 0;
    for (const auto& t : obb) {
        std::set<int> bad_labels;
        for (int s : t.species)
            if (s != 0) bad_labels.insert(s);
        int bads = 0;
        for (int s : t.species) bads += s != 0;
        if (bads >= 2 && int(bad_labels.size()) == bads) ++distinct_obb;
    }
    for (const auto& t : sbb) {
        std::set<int> bad_labels;
        for (int s : t.species)
            if (s != 0) bad_labels.insert(s);
        int bads = 0;
        for (int s : t.species) bads += s != 0;
        if (bads >= 2 && bad_labels.size() == 1) ++shared_sbb;
    }
    CHECK(distinct_obb == 4);  // three two-bad terms and one three-bad term
    CHECK(shared_sbb == 4);
}

TEST_CASE("event probabilities, small closed cases") {
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    SpeciesTerm lone{1.0, {0}};
    CHECK(event_probability(id, {0}, lone, {1, 0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(event_probability(id, {0}, lone, {0, 1}) == doctest::Approx(0.0));

    auto bs = beam_splitter(0.5).mat;
    SpeciesTerm good_pair{1.0, {0, 0}};
    CHECK(event_probability(bs, {0, 1}, good_pair, {1, 1}) == doctest::Approx(0.0));

    SpeciesTerm mixed{1.0, {0, 1}};
    CHECK(event_probability(bs, {0, 1}, mixed, {1, 1}) == doctest::Approx(0.5).epsilon(1e-14));

    // bunched outcomes restore the missing probability in the dip case
    CHECK(event_probability(bs, {0, 1}, good_pair, {2, 0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(event_probability(bs, {0, 1}, good_pair, {0, 2}) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(event_probability(bs, {0, 1}, mixed, {1, 0}), ValidationError);
}

TEST_CASE("outcome probabilities sum to one on unitary networks") {
    Rng rng(41);
    for (int trial = 0; trial < 3; ++trial) {
        auto u = haar_unitary(3, rng);
        for (const auto& species : {std::vector<int>{0, 0, 0}, std::vector<int>{0, 1, 0},
                                    std::vector<int>{1, 2, 0}, std::vector<int>{1, 1, 1}}) {
            SpeciesTerm term{1.0, species};
            double total = 0;
            for (const auto& outcome : enumerate_outcomes(3, 3))
                total += event_probability(u, {0, 1, 2}, term, outcome);
            CHECK(std::abs(total - 1.0) < 1e-10);
        }
    }
    // fully distinguishable pair on the balanced splitter
    double total = 0;
    for (const auto& outcome : enumerate_outcomes(2, 2))
        total += event_probability(beam_splitter(0.5).mat, {0, 1}, SpeciesTerm{1.0, {1, 2}},
                                   outcome);
    CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("heralded distillation reproduces the reference working points") {
    auto f3 = fourier_matrix(3).mat;

    auto obb = heralded_distillation(f3, uniform_source(3, 0.0759), default_herald(3));
    CHECK(std::abs(obb.eps_out - 0.0335238876327136) < 1e-12);
    CHECK(std::abs(obb.p_herald - 0.288299812009334) < 1e-12);
    CHECK(std::abs(obb.eps_out - 0.0335) < 5e-4);
    CHECK(obb.reduction == doctest::Approx(0.0759 / obb.eps_out).epsilon(1e-12));

    auto sbb = heralded_distillation(f3, uniform_source(3, 0.0793, NoiseModel::SBB),
                                     default_herald(3));
    CHECK(std::abs(sbb.eps_out - 0.0313425132817983) < 1e-12);
    CHECK(std::abs(sbb.eps_out - 0.0313) < 5e-4);

    auto clean = heralded_distillation(f3, uniform_source(3, 0.0), default_herald(3));
    CHECK(clean.eps_out == 0.0);
    CHECK(clean.p_herald == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("report bookkeeping is self-consistent") {
    auto rep = heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.11),
                                     default_herald(3));
    double p = 0, joint = 0, w = 0;
    for (const auto& s : rep.per_species) {
        p += s.weight * s.p_outcome;
        joint += s.weight * s.p_bad;
        w += s.weight;
    }
    CHECK(std::abs(w - 1.0) < 1e-12);
    CHECK(std::abs(p - rep.p_herald) < 1e-12);
    CHECK(std::abs(rep.eps_out * rep.p_herald - joint) < 1e-12);
    CHECK(rep.p_herald >= 0.0);
    CHECK(rep.p_herald <= 1.0);
    CHECK(rep.eps_out >= 0.0);
    CHECK(rep.eps_out <= 1.0);
}

TEST_CASE("herald placement on the DFT is symmetric under relabeling") {
    auto f3 = fourier_matrix(3).mat;
    auto src = uniform_source(3, 0.0759);
    auto base = heralded_distillation(f3, src, default_herald(3));
    HeraldSpec other;
    other.measured_modes = {1, 2};
    other.required_counts = {1, 1};
    other.output_mode = 0;
    auto moved = heralded_distillation(f3, src, other);
    CHECK(std::abs(base.eps_out - moved.eps_out) < 1e-12);
    CHECK(std::abs(base.p_herald - moved.p_herald) < 1e-12);
}

TEST_CASE("no-herald conditions throw") {
    // indistinguishable pair on the balanced splitter never produces a
    // coincidence, so the herald cannot fire
    CHECK_THROWS_AS(heralded_distillation(fourier_matrix(2).mat, uniform_source(2, 0.0),
                                          default_herald(2)),
                    NoHeraldError);
    // all bad photons share a species, so the dip survives at eps = 1
    CHECK_THROWS_AS(heralded_distillation(fourier_matrix(2).mat,
                                          uniform_source(2, 1.0, NoiseModel::SBB),
                                          default_herald(2)),
                    NoHeraldError);
    // a herald demanding more photons than injected violates the contract
    HeraldSpec h;
    h.measured_modes = {0, 1};
    h.required_counts = {2, 2};
    h.output_mode = 2;
    CHECK_THROWS_AS(heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.1), h),
                    ValidationError);
    // malformed heralds are validation failures, not no-herald conditions
    HeraldSpec bad;
    bad.measured_modes = {0, 0};
    bad.required_counts = {1, 1};
    bad.output_mode = 2;
    CHECK_THROWS_AS(heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.1), bad),
                    ValidationError);
}

TEST_CASE("two-photon splitter matches the hand-derived closed form") {
    for (auto [e1, e2] : {std::pair{0.13, 0.07}, std::pair{0.0759, 0.0759},
                          std::pair{0.3, 0.51}}) {
        PhotonSourceModel s;
        s.eps = {e1, e2};
        auto rep = heralded_distillation(fourier_matrix(2).mat, s, default_herald(2));
        auto [p, eo] = oracles::two_photon_coincidence(e1, e2, false);
        CHECK(std::abs(rep.p_herald - p) < 1e-13);
        CHECK(std::abs(rep.eps_out - eo) < 1e-13);

        s.model = NoiseModel::SBB;
        auto reps = heralded_distillation(fourier_matrix(2).mat, s, default_herald(2));
        auto [ps, eos] = oracles::two_photon_coincidence(e1, e2, true);
        CHECK(std::abs(reps.p_herald - ps) < 1e-13);
        CHECK(std::abs(reps.eps_out - eos) < 1e-13);
    }
}

TEST_CASE("fourier slope check") {
    CHECK(std::abs(fourier_slope_check(3, 1e-4) - 1.0) < 1e-3);
    CHECK(std::abs(fourier_slope_check(3, 1e-5) - 1.0) < 1e-4);
    // finite-error value at the reference working point
    CHECK(fourier_slope_check(3, 0.0759) == doctest::Approx(1.325).epsilon(1e-2));
    // the two-photon coincidence herald saturates instead of distilling:
    // the conditional error tends to 1/2, so the slope blows up as 1/eps
    auto [p2, eo2] = oracles::two_photon_coincidence(1e-4, 1e-4, false);
    (void)p2;
    CHECK(std::abs(fourier_slope_check(2, 1e-4) - eo2 * 2 / 1e-4) < 1e-9);
    CHECK(fourier_slope_check(2, 1e-4) > 100.0);
    CHECK_THROWS_AS(fourier_slope_check(3, 0.0), ValidationError);
}

TEST_CASE("hom visibility") {
    CHECK(hom_visibility(uniform_source(1, 0.0), uniform_source(1, 0.0), 0.5) ==
          doctest::Approx(1.0).epsilon(1e-13));

    const double e1 = 0.1, e2 = 0.2;
    PhotonSourceModel a = uniform_source(1, e1), b = uniform_source(1, e2);
    CHECK(hom_visibility(a, b, 0.5) == doctest::Approx((1 - e1) * (1 - e2)).epsilon(1e-12));

    PhotonSourceModel as = uniform_source(1, e1, NoiseModel::SBB);
    PhotonSourceModel bs = uniform_source(1, e2, NoiseModel::SBB);
    CHECK(hom_visibility(as, bs, 0.5) ==
          doctest::Approx((1 - e1) * (1 - e2) + e1 * e2).epsilon(1e-12));

    // the extracted visibility does not depend on the splitting ratio
    for (double r : {0.3, 0.43, 0.497, 0.62}) {
        CHECK(hom_visibility(a, b, r) == doctest::Approx((1 - e1) * (1 - e2)).epsilon(1e-11));
        CHECK(hom_visibility(as, bs, r) ==
              doctest::Approx((1 - e1) * (1 - e2) + e1 * e2).epsilon(1e-11));
    }

    const double e = 0.076;
    CHECK(hom_visibility(uniform_source(1, e), uniform_source(1, e), 0.5) ==
          doctest::Approx((1 - e) * (1 - e)).epsilon(1e-12));
    CHECK(hom_visibility(uniform_source(1, e, NoiseModel::SBB),
                         uniform_source(1, e, NoiseModel::SBB), 0.5) ==
          doctest::Approx((1 - e) * (1 - e) + e * e).epsilon(1e-12));
}

TEST_CASE("nonuniform loss pipeline") {
    auto u_b = beam_splitter(0.5).mat;

    // all-ones losses with the ideal circuit reduce to the lossless result
    DiagonalLoss ones{Eigen::Vector4d::Ones()};
    auto pipe = nonuniform_loss_pipeline(ones, fourier_matrix(3).mat, ones, u_b, 0.076,
                                         Exec::Serial);
    auto direct = heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.076),
                                        default_herald(3));
    CHECK(std::abs(pipe.eps_out - direct.eps_out) < 1e-12);

    // characterized chain reproduces the non-uniform-loss working point
    auto lossy = nonuniform_loss_pipeline(DiagonalLoss{oracles::d_in_printed()},
                                          oracles::u_d_exp_printed(),
                                          DiagonalLoss{oracles::d_out_printed()}, u_b, 0.076,
                                          Exec::Serial);
    CHECK(std::abs(lossy.eps_out - 0.0328327939929912) < 1e-10);
    CHECK(std::abs(lossy.eps_out - 0.032) < 1e-3);
    CHECK(lossy.v1 == doctest::Approx(1.0 - 2.0 * lossy.g).epsilon(1e-12));
    // less than five percent below the uniform-loss expectation
    CHECK(lossy.eps_out < direct.eps_out);
    CHECK((direct.eps_out - lossy.eps_out) / direct.eps_out < 0.05);

    auto clean = nonuniform_loss_pipeline(DiagonalLoss{oracles::d_in_printed()},
                                          oracles::u_d_exp_printed(),
                                          DiagonalLoss{oracles::d_out_printed()}, u_b, 0.0,
                                          Exec::Serial);
    CHECK(std::abs(clean.eps_out) < 1e-12);

    CHECK_THROWS_AS(nonuniform_loss_pipeline(DiagonalLoss{Eigen::Vector3d::Ones()},
                                             fourier_matrix(3).mat, ones, u_b, 0.076),
                    ValidationError);
    CHECK_THROWS_AS(nonuniform_loss_pipeline(ones, fourier_matrix(4).mat, ones, u_b, 0.076),
                    ValidationError);
}

TEST_CASE("parallel and serial paths agree") {
    auto rep_s = heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.0759),
                                       default_herald(3), Exec::Serial);
    auto rep_p = heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 0.0759),
                                       default_herald(3), Exec::Parallel);
    CHECK(rep_s.eps_out == rep_p.eps_out);
    CHECK(rep_s.p_herald == rep_p.p_herald);

    auto pipe_s = nonuniform_loss_pipeline(DiagonalLoss{oracles::d_in_printed()},
                                           oracles::u_d_exp_printed(),
                                           DiagonalLoss{oracles::d_out_printed()},
                                           beam_splitter(0.5).mat, 0.076, Exec::Serial);
    auto pipe_p = nonuniform_loss_pipeline(DiagonalLoss{oracles::d_in_printed()},
                                           oracles::u_d_exp_printed(),
                                           DiagonalLoss{oracles::d_out_printed()},
                                           beam_splitter(0.5).mat, 0.076, Exec::Parallel);
    CHECK(pipe_s.eps_out == pipe_p.eps_out);
    CHECK(pipe_s.p_pair == pipe_p.p_pair);
}

TEST_CASE("effective unitary error and its extrapolation") {
    auto f3 = fourier_matrix(3).mat;
    CHECK(effective_unitary_error(f3, 0.076) == doctest::Approx(0.0));
    // gauge freedom: diagonal phases do not change event probabilities
    Eigen::Vector3cd ph(std::polar(1.0, 0.4), std::polar(1.0, -0.9), std::polar(1.0, 2.0));
    Eigen::MatrixXcd rotated = ph.asDiagonal() * f3 * ph.reverse().asDiagonal();
    CHECK(std::abs(effective_unitary_error(rotated, 0.076)) < 1e-12);

    const double eu = effective_unitary_error(oracles::u_d_exp_printed(), 0.076);
    CHECK(std::abs(eu - 0.000658727338676453) < 1e-12);
    CHECK(std::abs(eu - 7e-4) < 2e-4);

    // error grows with the distance from the ideal circuit
    Rng rng(5);
    Eigen::MatrixXcd g = haar_unitary(3, rng);
    auto perturbed = [&](double d) {
        Eigen::MatrixXcd m = f3 + d * g;
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
        Eigen::MatrixXcd q = qr.householderQ();
        Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < 3; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
        return q;
    };
    const double small = effective_unitary_error(perturbed(0.02), 0.076);
    const double large = effective_unitary_error(perturbed(0.08), 0.076);
    CHECK(small > 0.0);
    CHECK(large > small);

    CHECK(extrapolate_unitary_error(eu, 3) == doctest::Approx(eu).epsilon(1e-12));
    CHECK(extrapolate_unitary_error(0.0, 40) == 0.0);
    const double e40 = extrapolate_unitary_error(7e-4, 40);
    CHECK(e40 == doctest::Approx(9.3e-3).epsilon(2e-2));
    CHECK(e40 >= 0.8e-2 * 0.99);
    CHECK(e40 <= 1.2e-2);
}

TEST_CASE("combine total error") {
    CHECK(combine_total_error(0.076, 0.030) == doctest::Approx(0.1037).epsilon(1e-3));
    CHECK(combine_total_error(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(combine_total_error(0.0, 0.4) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("optimality scan stays above the first-order bound") {
    auto scan = optimality_scan(3, 200, 1e-4, 7, Exec::Serial);
    CHECK(scan.min_ratio >= 0.99);
    CHECK(std::abs(scan.min_ratio - 1.01222195928057) < 1e-10);
    CHECK(scan.evaluated == 600);
    CHECK(scan.skipped == 0);

    // deterministic for a fixed seed, different for another
    auto again = optimality_scan(3, 200, 1e-4, 7, Exec::Serial);
    CHECK(again.min_ratio == scan.min_ratio);
    auto other = optimality_scan(3, 50, 1e-4, 8, Exec::Serial);
    CHECK(other.min_ratio != scan.min_ratio);
    CHECK(other.min_ratio >= 0.99);

    // the DFT itself sits on the bound
    auto fr = heralded_distillation(fourier_matrix(3).mat, uniform_source(3, 1e-4),
                                    default_herald(3));
    CHECK(fr.eps_out * 3 / 1e-4 == doctest::Approx(1.0).epsilon(5e-3));

    auto solo = optimality_scan(1, 20, 1e-4, 7, Exec::Serial);
    CHECK(solo.min_ratio == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(optimality_scan(6, 10, 1e-4, 7), ValidationError);
    CHECK_THROWS_AS(optimality_scan(3, 10, 5e-3, 7), ValidationError);
}

TEST_CASE("symmetric one-bad component heralds like the clean state") {
    auto chk3 = phi_plus_herald_check(3, fourier_matrix(3).mat, default_herald(3));
    CHECK(chk3.p0 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(chk3.p_plus == doctest::Approx(chk3.p0).epsilon(1e-10));
    CHECK(chk3.residual < 1e-12);

    auto chk2 = phi_plus_herald_check(2, fourier_matrix(2).mat, default_herald(2));
    CHECK(chk2.residual < 1e-12);
    CHECK(chk2.p0 < 1e-12);  // coincidence dip
    CHECK(chk2.p_mix == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("noise model disagreement is second order") {
    const double eps = 1e-3;
    auto f3 = fourier_matrix(3).mat;
    double eo = heralded_distillation(f3, uniform_source(3, eps), default_herald(3)).eps_out;
    double es = heralded_distillation(f3, uniform_source(3, eps, NoiseModel::SBB),
                                      default_herald(3))
                    .eps_out;
    CHECK(std::abs(eo - es) / (eps * eps) < 2.0);

    // at first order only the mean of per-photon errors matters
    PhotonSourceModel nonuniform;
    nonuniform.eps = {0.5e-3, 1.0e-3, 1.5e-3};
    double enu = heralded_distillation(f3, nonuniform, default_herald(3)).eps_out;
    double emean = heralded_distillation(f3, uniform_source(3, 1e-3), default_herald(3)).eps_out;
    CHECK(std::abs(enu - emean) / (1e-3 * 1e-3) < 1.0);
}
