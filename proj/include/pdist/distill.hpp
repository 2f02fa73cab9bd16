#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pdist/events.hpp"
#include "pdist/matrix.hpp"
#include "pdist/sources.hpp"

namespace pdist {

struct HeraldSpec {
    std::vector<int> measured_modes;
    std::vector<int> required_counts;  // one per measured mode
    int output_mode = 0;
};

// Single photon detected on each of outputs 0..n-2; output n-1 distilled.
HeraldSpec default_herald(int n);

struct SpeciesContribution {
    std::vector<int> species;
    double weight = 0;
    double p_outcome = 0;  // herald pattern probability within the term
    double p_bad = 0;      // joint with a bad photon on the distilled mode
};

struct DistillationReport {
    double p_herald = 0;
    double eps_out = 0;
    double reduction = 0;  // mean input error / eps_out
    std::vector<SpeciesContribution> per_species;
};

// Exact heralded distillation: p_herald and the conditional probability
// that the distilled photon is bad. Throws NoHeraldError when the herald
// probability falls below 1e-12.
DistillationReport heralded_distillation(const Eigen::MatrixXcd& u,
                                         const PhotonSourceModel& source,
                                         const HeraldSpec& herald,
                                         Exec exec = Exec::Parallel);

// eps_out * N / eps on the size-N DFT circuit; tends to 1 as eps -> 0.
double fourier_slope_check(int n, double eps);

// Hong-Ou-Mandel visibility of two single photons on beam_splitter(r),
// computed from coincidence probabilities (not from closed forms).
double hom_visibility(const PhotonSourceModel& a, const PhotonSourceModel& b, double r);

struct PipelineResult {
    double eps_out = 0;
    double g = 0;       // fourfold / heralded-pair ratio
    double v1 = 0;      // visibility before reference correction
    double p_pair = 0;  // heralded two-photon probability
};

// Lossy four-mode chain D_in * (u_d on modes 0-2) * (u_b on modes 2-3) *
// D_out driven by four photons with per-input error eps. The distilled
// photon meets the reference photon on u_b; the coincidence ratio inside
// the heralded pair subspace gives the output error.
PipelineResult nonuniform_loss_pipeline(const DiagonalLoss& d_in, const Eigen::MatrixXcd& u_d,
                                        const DiagonalLoss& d_out, const Eigen::MatrixXcd& u_b,
                                        double eps, Exec exec = Exec::Parallel);

// Excess output error of u_exp relative to the ideal 3-mode DFT at
// reference input error eps_ref (lossless).
double effective_unitary_error(const Eigen::MatrixXcd& u_exp, double eps_ref);

// 1 - (1 - eps_unitary)^(n/3).
double extrapolate_unitary_error(double eps_unitary, int n);

// eps_indist + (1 - eps_indist) * eps_multi.
double combine_total_error(double eps_indist, double eps_multi);

struct OptimalityScan {
    double min_ratio = 0;
    int evaluated = 0;
    int skipped = 0;  // herald patterns with probability < 1e-12
};

// Minimum of eps_out * n / eps over `trials` Haar-random n-mode unitaries
// and all single-output herald patterns.
OptimalityScan optimality_scan(int n, int trials, double eps, std::uint64_t seed,
                               Exec exec = Exec::Parallel);

struct PhiPlusCheck {
    double p_plus = 0;         // herald probability of the symmetric one-bad state
    double p0 = 0;             // all-good herald probability
    double p_mix = 0;          // uniform incoherent one-bad mixture
    double p_minus_total = 0;  // summed weight of the orthogonal DFT-basis states
    double residual = 0;       // |p_mix - p0/n - p_minus_total|
};

// Decomposes the exactly-one-bad uniform mixture in the DFT basis of the
// bad-position register; the symmetric component heralds like the
// all-good state.
PhiPlusCheck phi_plus_herald_check(int n, const Eigen::MatrixXcd& u, const HeraldSpec& herald);

}  // namespace pdist
