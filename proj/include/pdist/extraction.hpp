#pragma once

#include <string>
#include <vector>

#include "pdist/sources.hpp"

namespace pdist {

enum class Protocol { A, B, C, D };

struct PairCounts {  // protocols A, B
    double n3 = 0, n4 = 0, n34 = 0, nt = 0;
};

struct QuadCounts {  // protocols C, D
    double n12 = 0, n123 = 0, n124 = 0, n1234 = 0;
};

double correlator_from_counts(const PairCounts& c);  // n34 * nt / (n3 * n4)
double correlator_from_counts(const QuadCounts& c);  // n1234 * n12 / (n123 * n124)

struct SampleStats {
    double mean = 0, sd = 0, se = 0;
    int n = 0;
};

// sd uses the n-1 denominator; se = sd / sqrt(n).
SampleStats sample_stats(const std::vector<double>& samples);

struct CorrelatorSamples {
    std::vector<double> a, b, c, d;
};

// CSV columns `timestamp, protocol, value`; leading `#` comments and an
// optional header row are skipped.
CorrelatorSamples load_correlator_csv(const std::string& path);

struct Visibility {
    double v = 0;
    bool in_range = true;  // false when v leaves [0, 1]; value not clamped
};

// (R^2 + (1-R)^2 - g) / (2 R (1-R)).
Visibility raw_visibility(double g, double r);

struct CorrelatorSet {
    double g_a = 0, g_b = 0, g_c = 0, g_d = 0;
    double se_a = 0, se_b = 0, se_c = 0, se_d = 0;
    double r1 = 0.5, r2 = 0.5;
};

struct ValueWithError {
    double value = 0, se = 0, ci_lo = 0, ci_hi = 0;  // 95% CI, 1.96 sigma
};

struct ErrorBudget {
    ValueWithError v0, v1;
    ValueWithError eps_multi, eps_multi_out;
    ValueWithError eps_tot, eps_tot_out;
    ValueWithError eps_indist, eps_indist_out;
    NoiseModel model = NoiseModel::OBB;
    std::vector<std::string> warnings;
};

struct BudgetSes {
    double v0 = 0, v1 = 0;
    double eps_multi = 0, eps_multi_out = 0;
    double eps_tot = 0, eps_tot_out = 0;
    double eps_indist = 0, eps_indist_out = 0;
};

// Quoted propagation rules. These coincide with the exact first-order
// Jacobian for every quantity except eps_tot, whose quoted rule carries
// twice the first-order value; the quoted convention is kept as primary
// because it is what the reference tables tabulate.
BudgetSes propagate_uncertainty(const CorrelatorSet& cs);

// Exact first-order (delta-method) propagation, for cross-checks.
BudgetSes propagate_uncertainty_delta(const CorrelatorSet& cs);

// All derived errors under the OBB reading. Output-error denominators use
// sqrt(V0 + g_A) throughout (see README on the convention).
ErrorBudget extract_errors(const CorrelatorSet& cs);

struct SbbErrors {
    double eps = 0, eps_out = 0;
};

// Reinterprets an OBB budget under the shared-error-state model by
// matching single-photon purities: (1-e)^2 + e^2 = (1-e_obb)^2 for the
// input, (1-e)(1-e') + e e' = (1-e_obb)(1-e'_obb) for the output.
SbbErrors extract_errors_sbb(const ErrorBudget& obb);

struct ZetaSensitivity {
    double zeta_star = 0;  // sqrt(eps'_multi / eps_multi)
    double min_avg = 0;    // sqrt(eps_multi * eps'_multi)
    double estimate = 0;   // (eps_multi + eps'_multi) / 2
};

ZetaSensitivity zeta_sensitivity(double eps_multi, double eps_multi_out);

}  // namespace pdist
