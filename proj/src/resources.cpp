#include "pdist/resources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pdist/errors.hpp"

namespace pdist {

namespace {

void validate_params(const ResourceParams& p) {
    if (!(p.p_th > 0.0 && p.p_th < 1.0)) throw ValidationError("p_th must lie in (0, 1)");
    if (!(p.p_l > 0.0 && p.p_l < p.p_th))
        throw ValidationError("target logical error must lie in (0, p_th)");
    if (!(p.b >= 1.0)) throw ValidationError("photons per resource state must be >= 1");
    if (p.n_max < 1) throw ValidationError("N grid must contain at least N = 1");
}

double cost_multiplier(int n) { return n == 1 ? 1.0 : 4.0 * double(n); }

}  // namespace

std::vector<SourceEntry> builtin_sources() {
    return {
        {"A", 2025, 'P', 2.5e-3},
        {"B", 2020, 'P', 6.5e-3},
        {"C", 2022, 'D', 3.6e-2},
    };
}

std::vector<SourceEntry> load_sources_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open source file: " + path);
    std::vector<SourceEntry> entries;
    std::string line;
    bool first_data = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::stringstream ss(line);
        std::string label, year, type, eps;
        if (!std::getline(ss, label, ',') || !std::getline(ss, year, ',') ||
            !std::getline(ss, type, ',') || !std::getline(ss, eps, ','))
            throw ValidationError("source rows need label, year, type, eps");
        auto strip = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t");
            std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        label = strip(label);
        if (first_data && label == "label") {
            first_data = false;
            continue;
        }
        first_data = false;
        SourceEntry entry;
        entry.label = label;
        try {
            entry.year = std::stoi(strip(year));
            entry.eps = std::stod(strip(eps));
        } catch (const std::exception&) {
            throw ValidationError("unparseable source row: " + line);
        }
        std::string t = strip(type);
        if (t != "P" && t != "D") throw ValidationError("source type must be P or D");
        entry.type = t[0];
        if (!(entry.eps > 0.0 && entry.eps < 1.0))
            throw ValidationError("source eps must lie in (0, 1)");
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw ValidationError("source file has no entries");
    return entries;
}

double pauli_error(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in [0, 1]");
    return eps / 2.0;
}

double required_distance(double p_error, const ResourceParams& params) {
    validate_params(params);
    if (!(p_error > 0.0)) throw ValidationError("Pauli error must be positive");
    if (p_error >= params.p_th)
        throw AboveThresholdError("Pauli error at or above the code threshold");
    double d = 2.0 * std::log(params.p_l) / std::log(p_error / params.p_th);
    return params.integer_distance ? std::ceil(d) : d;
}

double logical_cost(double eps, int n, const ResourceParams& params) {
    if (n < 1) throw ValidationError("distillation size must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
    double d = required_distance(eps / (2.0 * double(n)), params);
    return cost_multiplier(n) * params.b * d * d * d;
}

OptimalScheme optimal_scheme_size(double eps, const ResourceParams& params) {
    validate_params(params);
    OptimalScheme best;
    double best_cost = std::numeric_limits<double>::infinity();
    double cost_n1 = std::numeric_limits<double>::quiet_NaN();
    for (int n = 1; n <= params.n_max; ++n) {
        double cost;
        try {
            cost = logical_cost(eps, n, params);
        } catch (const AboveThresholdError&) {
            continue;
        }
        if (n == 1) cost_n1 = cost;
        if (cost < best_cost) {
            best_cost = cost;
            best.n_star = n;
            best.cost = cost;
        }
    }
    if (best.n_star == 0)
        throw AboveThresholdError("no distillation size brings the error below threshold");
    if (std::isfinite(cost_n1)) {
        best.ratio = best.cost / cost_n1;
        best.ratio_defined = true;
    }
    return best;
}

double crossover_closed_form(int n) {
    if (n < 2) throw ValidationError("crossover defined for N >= 2");
    double root = std::cbrt(4.0 * double(n));
    return std::exp(-std::log(double(n)) / (root - 1.0));
}

RegimeBoundaries regime_boundaries(const ResourceParams& params) {
    validate_params(params);
    if (params.n_max < 2) throw ValidationError("boundaries need the N grid to reach 2");

    RegimeBoundaries rb;
    rb.p_cross_over_pth = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= params.n_max; ++n) {
        // cost(N) = cost(1) in x = p/p_th, continuous-d model:
        // 4N (ln x / ln(x/N))^3 = 1. Decreasing in x, bracketed by (0, 1).
        auto excess = [n](double x) {
            double ratio = std::log(x) / std::log(x / double(n));
            return 4.0 * double(n) * ratio * ratio * ratio - 1.0;
        };
        double lo = 1e-12, hi = 1.0 - 1e-12;
        for (int iter = 0; iter < 200; ++iter) {
            double mid = 0.5 * (lo + hi);
            if (excess(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        double x_n = 0.5 * (lo + hi);
        double closed = crossover_closed_form(n);
        if (std::abs(x_n - closed) > 1e-9)
            throw SolverError("crossover root finder disagrees with the closed form",
                              std::abs(x_n - closed));
        rb.per_n_crossover.push_back(x_n);
        rb.per_n_threshold.push_back(double(n) * params.p_th);
        if (x_n < rb.p_cross_over_pth) {
            rb.p_cross_over_pth = x_n;
            rb.n_at_cross = n;
        }
    }
    return rb;
}

double linear_validity_ratio(double eps, int n) {
    if (n < 1) throw ValidationError("photon count must be >= 1");
    if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");
    if (eps == 0.0) return 0.0;
    // expm1/log1p keep the numerator alive at tiny eps, where the direct
    // form cancels to rounding noise
    double log1m = std::log1p(-eps);
    double single = double(n) * eps * std::exp(double(n - 1) * log1m);
    double multiple = -std::expm1(double(n) * log1m) - single;
    return std::max(0.0, multiple / single);
}

LossBudget loss_budget_adjust(double l, double gates_per_photon) {
    if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("loss fraction must lie in [0, 1]");
    if (!(gates_per_photon >= 1.0)) throw ValidationError("gates per photon must be >= 1");
    LossBudget budget;
    budget.l_prime = gates_per_photon / (gates_per_photon + 1.0) * l;
    budget.reduction_pct = 100.0 / (gates_per_photon + 1.0);
    return budget;
}

double gamma_cost(double eps, double eps_out, double gamma) {
    if (!(eps > 0.0 && eps_out > 0.0)) throw ValidationError("errors must be positive");
    if (eps_out > eps)
        throw ValidationError("distillation output error above input: no cost reduction");
    return std::pow(eps / eps_out, gamma);
}

std::vector<IsolineRow> isoline_data(const ResourceParams& params, const std::vector<int>& n_set,
                                     int grid_points) {
    validate_params(params);
    if (grid_points < 2) throw ValidationError("need at least two grid points");
    for (int n : n_set)
        if (n < 1 || n > params.n_max) throw ValidationError("isoline N outside the grid");

    // Normalization: the best-performing tabulated source at its own optimum.
    double eps_ref = builtin_sources().front().eps;
    double norm = optimal_scheme_size(eps_ref, params).cost;

    // Log grid in p/p_th from 1e-2 to 10; points at or above a scheme's
    // threshold (x >= N) carry NaN cost.
    const double x_lo = 1e-2, x_hi = 10.0;
    std::vector<IsolineRow> rows;
    rows.reserve(n_set.size() * std::size_t(grid_points));
    for (int n : n_set) {
        for (int gp = 0; gp < grid_points; ++gp) {
            double t = double(gp) / double(grid_points - 1);
            double x = x_lo * std::pow(x_hi / x_lo, t);
            IsolineRow row;
            row.n = n;
            row.p_over_pth = x;
            double eps = 2.0 * x * params.p_th;  // invert pauli_error
            try {
                row.cost_ratio = logical_cost(eps, n, params) / norm;
            } catch (const AboveThresholdError&) {
                row.cost_ratio = std::numeric_limits<double>::quiet_NaN();
            }
            row.valid_linear =
                n == 1 || linear_validity_ratio(eps, n) <= kLinearValidityCut;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace pdist
