#pragma once

#include <string>
#include <vector>

namespace pdist {

struct ResourceParams {
    double b = 6480;        // photons per six-ring resource state
    double p_th = 2.1e-3;   // Pauli threshold
    double p_l = 1e-10;     // target logical error
    int n_max = 64;         // N grid is 1..n_max
    bool integer_distance = false;  // ceil(d) instead of continuous d
};

struct SourceEntry {
    std::string label;
    int year = 0;
    char type = 'P';  // P probabilistic, D deterministic
    double eps = 0;
};

std::vector<SourceEntry> builtin_sources();
std::vector<SourceEntry> load_sources_csv(const std::string& path);

// First-order fusion Pauli error, eps/2.
double pauli_error(double eps);

// d = 2 ln(p_l) / ln(p_error / p_th), continuous. Throws
// AboveThresholdError at or above threshold.
double required_distance(double p_error, const ResourceParams& params);

// multiplier(N) * b * d(eps / (2N))^3, multiplier(1) = 1, 4N for N >= 2.
double logical_cost(double eps, int n, const ResourceParams& params);

struct OptimalScheme {
    int n_star = 0;
    double cost = 0;
    double ratio = 0;        // cost(n_star) / cost(1), when N = 1 is feasible
    bool ratio_defined = false;
};

// Argmin of logical_cost over the integer N grid; smallest N wins ties.
OptimalScheme optimal_scheme_size(double eps, const ResourceParams& params);

// exp(-ln(n) / ((4n)^(1/3) - 1)); p/p_th at which size-n distillation
// matches plain error correction under the continuous-d model.
double crossover_closed_form(int n);

struct RegimeBoundaries {
    double p_cross_over_pth = 0;  // smallest crossover over the N grid
    int n_at_cross = 0;
    std::vector<double> per_n_crossover;  // indexed by N, entries 2..n_max
    std::vector<double> per_n_threshold;  // N * p_th
};

// The crossover per N is found by bisection and cross-checked against the
// closed form.
RegimeBoundaries regime_boundaries(const ResourceParams& params);

// P(>1 error) / P(1 error) for N interfering photons.
double linear_validity_ratio(double eps, int n);

inline constexpr double kLinearValidityCut = 0.02;

struct LossBudget {
    double l_prime = 0;
    double reduction_pct = 0;
};

// l' = (G / (G+1)) l.
LossBudget loss_budget_adjust(double l, double gates_per_photon);

// (eps / eps_out)^gamma.
double gamma_cost(double eps, double eps_out, double gamma);

struct IsolineRow {
    int n = 0;
    double p_over_pth = 0;
    double cost_ratio = 0;  // normalized to source A at its optimal N
    bool valid_linear = false;
};

std::vector<IsolineRow> isoline_data(const ResourceParams& params,
                                     const std::vector<int>& n_set,
                                     int grid_points = 121);

}  // namespace pdist
