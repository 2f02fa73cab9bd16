#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "pdist/extraction.hpp"
#include "pdist/matrix.hpp"

namespace oracles {

// Permanent by direct summation over all n! permutations. Slow but
// unmistakably correct; keep n small.
pdist::cxd naive_permanent(const Eigen::MatrixXcd& m);

// Closed form for two photons meeting at a balanced splitter with a
// coincidence herald, worked out by hand from the four species terms.
// Returns {p_herald, eps_out}.
std::pair<double, double> two_photon_coincidence(double e1, double e2, bool shared_bad);

// Central finite differences of extract_errors with respect to the four
// correlator means, combined with the input standard errors. Independent
// check on the hand-derived Jacobians in propagate_uncertainty_delta.
pdist::BudgetSes fd_jacobian_ses(const pdist::CorrelatorSet& cs, double step = 1e-6);

// Gaussian parametric-bootstrap standard errors: resample the four
// correlator means from normal distributions and take sample SDs of the
// extracted quantities.
pdist::BudgetSes resample_ses(const pdist::CorrelatorSet& cs, int draws, std::uint64_t seed);

// Ratio of multi- to single-error herald terms summed term by term from
// the binomial expansion, for cross-checking the closed form.
double binomial_validity_ratio(double eps, int n);

// Printed reference matrices from the bundled characterization dataset.
Eigen::MatrixXd u_exp_abs_printed();       // 4x4 |T| after loss removal
Eigen::MatrixXd u_model_abs_printed();     // 4x4 concatenated-model fit
Eigen::MatrixXcd u_d_exp_printed();        // 3x3 reconstructed distillation block
Eigen::Matrix2d ref_abs_printed();         // 2x2 reference splitter block
Eigen::Vector4d d_in_printed();
Eigen::Vector4d d_out_printed();

}  // namespace oracles
