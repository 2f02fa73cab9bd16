#include "pdist/events.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "pdist/errors.hpp"
#include "pdist/matrix.hpp"
#include "pdist/permanent.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pdist {

namespace {

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 33> t{};
        t[0] = 1.0;
        for (int i = 1; i < 33; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table.at(std::size_t(n));
}

// Photons of one species: the rows of t they enter through, plus the
// permutation weight of repeated input modes.
struct SpeciesGroup {
    std::vector<int> rows;
    double input_perm = 1.0;  // product of multiplicities! over repeated inputs
};

std::vector<SpeciesGroup> group_by_species(const std::vector<int>& inputs,
                                           const std::vector<int>& species) {
    std::vector<int> labels(species);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<SpeciesGroup> groups;
    groups.reserve(labels.size());
    for (int s : labels) {
        SpeciesGroup g;
        for (std::size_t p = 0; p < inputs.size(); ++p)
            if (species[p] == s) g.rows.push_back(inputs[p]);
        std::vector<int> sorted(g.rows);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            g.input_perm *= factorial(int(j - i));
            i = j;
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

Eigen::MatrixXcd select_submatrix(const Eigen::MatrixXcd& t, const std::vector<int>& rows,
                                  const Occupation& occ) {
    const int k = int(rows.size());
    Eigen::MatrixXcd sub(k, k);
    int c = 0;
    for (std::size_t m = 0; m < occ.size(); ++m)
        for (int rep = 0; rep < occ[m]; ++rep) {
            for (int r = 0; r < k; ++r) sub(r, c) = t(rows[std::size_t(r)], Eigen::Index(m));
            ++c;
        }
    return sub;
}

double group_probability(const Eigen::MatrixXcd& t, const SpeciesGroup& g,
                         const Occupation& occ) {
    double denom = g.input_perm;
    for (int o : occ) denom *= factorial(o);
    return std::norm(permanent(select_submatrix(t, g.rows, occ))) / denom;
}

// Walks every split of `rem` among groups[gi..] with per-group photon
// budgets. `forbidden_mode` (when >= 0) bars non-good groups from that
// output mode, which is how the bad-at-mode complement is computed.
double split_sum(const Eigen::MatrixXcd& t, const std::vector<SpeciesGroup>& groups,
                 const std::vector<int>& labels, std::size_t gi, Occupation& rem,
                 int forbidden_mode) {
    const SpeciesGroup& g = groups[gi];
    const int budget = int(g.rows.size());
    const bool restricted = forbidden_mode >= 0 && labels[gi] != 0;
    if (gi + 1 == groups.size()) {
        int total = std::accumulate(rem.begin(), rem.end(), 0);
        if (total != budget) return 0.0;
        if (restricted && rem[std::size_t(forbidden_mode)] > 0) return 0.0;
        return group_probability(t, g, rem);
    }
    // Enumerate this group's occupation recursively over modes.
    Occupation occ(rem.size(), 0);
    double total = 0.0;
    const int n_modes = int(rem.size());
    // iterative stack-free recursion via lambda
    auto rec = [&](auto&& self, int mode, int left) -> void {
        if (mode == n_modes) {
            if (left != 0) return;
            double p = group_probability(t, g, occ);
            if (p == 0.0) return;
            for (int m = 0; m < n_modes; ++m) rem[std::size_t(m)] -= occ[std::size_t(m)];
            total += p * split_sum(t, groups, labels, gi + 1, rem, forbidden_mode);
            for (int m = 0; m < n_modes; ++m) rem[std::size_t(m)] += occ[std::size_t(m)];
            return;
        }
        int cap = std::min(left, rem[std::size_t(mode)]);
        if (restricted && mode == forbidden_mode) cap = 0;
        for (int c = 0; c <= cap; ++c) {
            occ[std::size_t(mode)] = c;
            self(self, mode + 1, left - c);
        }
        occ[std::size_t(mode)] = 0;
    };
    rec(rec, 0, budget);
    return total;
}

void validate_event(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                    const SpeciesTerm& term, const Occupation& outcome) {
    if (inputs.empty()) throw ValidationError("no input photons");
    if (term.species.size() != inputs.size())
        throw ValidationError("species list length does not match photon count");
    if (Eigen::Index(outcome.size()) != t.cols())
        throw ValidationError("outcome length does not match mode count");
    for (int i : inputs)
        if (i < 0 || Eigen::Index(i) >= t.rows())
            throw ValidationError("input mode out of range");
    int total = 0;
    for (int o : outcome) {
        if (o < 0) throw ValidationError("negative occupation");
        total += o;
    }
    if (total != int(inputs.size()))
        throw ValidationError("occupation mismatch: photon number not conserved");
}

std::vector<int> group_labels(const std::vector<int>& species) {
    std::vector<int> labels(species);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

}  // namespace

std::vector<Occupation> enumerate_outcomes(int n_modes, int n_photons) {
    if (n_modes < 1 || n_photons < 0) throw ValidationError("enumerate_outcomes bad arguments");
    std::vector<Occupation> out;
    Occupation occ(std::size_t(n_modes), 0);
    auto rec = [&](auto&& self, int mode, int left) -> void {
        if (mode == n_modes - 1) {
            occ[std::size_t(mode)] = left;
            out.push_back(occ);
            return;
        }
        for (int c = left; c >= 0; --c) {
            occ[std::size_t(mode)] = c;
            self(self, mode + 1, left - c);
        }
        occ[std::size_t(mode)] = 0;
    };
    rec(rec, 0, n_photons);
    return out;
}

double event_probability(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                         const SpeciesTerm& term, const Occupation& outcome) {
    validate_event(t, inputs, term, outcome);
    auto groups = group_by_species(inputs, term.species);
    auto labels = group_labels(term.species);
    Occupation rem(outcome);
    return split_sum(t, groups, labels, 0, rem, -1);
}

double event_probability_bad_at(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                                const SpeciesTerm& term, const Occupation& outcome, int mode) {
    validate_event(t, inputs, term, outcome);
    if (mode < 0 || mode >= int(outcome.size()))
        throw ValidationError("bad-at mode out of range");
    auto groups = group_by_species(inputs, term.species);
    auto labels = group_labels(term.species);
    Occupation rem(outcome);
    double all = split_sum(t, groups, labels, 0, rem, -1);
    double none_at = split_sum(t, groups, labels, 0, rem, mode);
    double joint = all - none_at;
    return joint > 0.0 ? joint : 0.0;  // clip negative round-off
}

double coherent_one_bad_probability(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                                    const Eigen::VectorXcd& coeffs, const Occupation& outcome) {
    const int n = int(inputs.size());
    if (coeffs.size() != n) throw ValidationError("coefficient count does not match photons");
    SpeciesTerm all_good{1.0, std::vector<int>(std::size_t(n), 0)};
    validate_event(t, inputs, all_good, outcome);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (inputs[std::size_t(a)] == inputs[std::size_t(b)])
                throw ValidationError("coherent superposition requires distinct inputs");

    const int n_modes = int(outcome.size());
    double total = 0.0;
    Occupation rest(outcome);
    for (int m = 0; m < n_modes; ++m) {
        if (outcome[std::size_t(m)] < 1) continue;
        rest[std::size_t(m)] -= 1;
        cxd amp(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            std::vector<int> rows;
            rows.reserve(std::size_t(n) - 1);
            for (int p = 0; p < n; ++p)
                if (p != k) rows.push_back(inputs[std::size_t(p)]);
            amp += coeffs(k) * t(inputs[std::size_t(k)], m) *
                   permanent(select_submatrix(t, rows, rest));
        }
        double denom = 1.0;
        for (int o : rest) denom *= factorial(o);
        total += std::norm(amp) / denom;
        rest[std::size_t(m)] += 1;
    }
    return total;
}

std::map<Occupation, double> physical_marginals(const Eigen::MatrixXcd& t_full,
                                                const std::vector<int>& inputs,
                                                const std::vector<SpeciesTerm>& terms,
                                                int n_phys, Exec exec) {
    if (n_phys < 1 || Eigen::Index(n_phys) > t_full.cols())
        throw ValidationError("physical mode count out of range");
    const int n_total = int(t_full.cols());
    const int n_photons = int(inputs.size());
    auto outcomes = enumerate_outcomes(n_total, n_photons);
    std::vector<double> probs(outcomes.size(), 0.0);

    const long long count = (long long)outcomes.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::Parallel)
#endif
    for (long long i = 0; i < count; ++i) {
        double p = 0.0;
        for (const SpeciesTerm& term : terms)
            p += term.weight * event_probability(t_full, inputs, term, outcomes[std::size_t(i)]);
        probs[std::size_t(i)] = p;
    }
    (void)exec;

    // Fixed-order reduction keeps results bit-identical for any thread count.
    std::map<Occupation, double> marg;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        Occupation key(outcomes[i].begin(), outcomes[i].begin() + n_phys);
        marg[key] += probs[i];
    }
    return marg;
}

}  // namespace pdist
