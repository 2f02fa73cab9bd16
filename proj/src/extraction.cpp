#include "pdist/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdist/errors.hpp"

namespace pdist {

namespace {

ValueWithError with_ci(double value, double se) {
    return {value, se, value - 1.96 * se, value + 1.96 * se};
}

void validate_set(const CorrelatorSet& cs) {
    if (!(cs.r1 > 0.0 && cs.r1 < 1.0 && cs.r2 > 0.0 && cs.r2 < 1.0))
        throw ValidationError("reflectivities must lie in (0, 1)");
    for (double g : {cs.g_a, cs.g_b, cs.g_c, cs.g_d})
        if (!(g >= 0.0)) throw ValidationError("correlators must be non-negative");
    for (double se : {cs.se_a, cs.se_b, cs.se_c, cs.se_d})
        if (!(se >= 0.0)) throw ValidationError("standard errors must be non-negative");
}

struct Core {
    double v0, v1;      // visibilities
    double s;           // sqrt(V0 + g_A), shared denominator
    double u;           // V1 + g_A/2 + g_C/2, shared numerator
    double se_v0, se_v1;
};

Core core_values(const CorrelatorSet& cs) {
    validate_set(cs);
    Core c;
    c.v0 = raw_visibility(cs.g_b, cs.r1).v;
    c.v1 = raw_visibility(cs.g_d, cs.r2).v;
    double rad = c.v0 + cs.g_a;
    if (rad <= 0.0) throw ValidationError("V0 + g_A must be positive");
    c.s = std::sqrt(rad);
    c.u = c.v1 + cs.g_a / 2.0 + cs.g_c / 2.0;
    c.se_v0 = cs.se_b / (2.0 * cs.r1 * (1.0 - cs.r1));
    c.se_v1 = cs.se_d / (2.0 * cs.r2 * (1.0 - cs.r2));
    return c;
}

// Shared first-order terms. The quoted eps_tot rule is the one place the
// published propagation differs from the plain delta method (by a factor
// of 2); everything else is algebraically identical.
BudgetSes propagate(const CorrelatorSet& cs, bool quoted_eps_tot) {
    Core c = core_values(cs);
    const double s = c.s, u = c.u;
    const double ka = 1.0 - cs.g_a / 2.0;  // eps_indist denominator
    const double kc = 1.0 - cs.g_c / 2.0;  // eps'_indist denominator

    BudgetSes ses;
    ses.v0 = c.se_v0;
    ses.v1 = c.se_v1;
    ses.eps_multi = cs.se_a / 2.0;
    ses.eps_multi_out = cs.se_c / 2.0;

    if (quoted_eps_tot) {
        ses.eps_tot = std::sqrt((c.se_v0 * c.se_v0 + cs.se_a * cs.se_a) / (s * s));
    } else {
        ses.eps_tot = std::sqrt(c.se_v0 * c.se_v0 + cs.se_a * cs.se_a) / (2.0 * s);
    }

    {
        double d_b = c.se_v0 / (2.0 * s * ka);
        double d_a = cs.se_a * (1.0 / (2.0 * s * ka) + s / (2.0 * ka * ka));
        ses.eps_indist = std::sqrt(d_b * d_b + d_a * d_a);
    }
    {
        double d_d = c.se_v1 / s;
        double d_c = cs.se_c / (2.0 * s);
        double d_b = c.se_v0 * u / (2.0 * s * s * s);
        double d_a = cs.se_a * std::abs(1.0 / (2.0 * s) - u / (2.0 * s * s * s));
        ses.eps_tot_out = std::sqrt(d_d * d_d + d_c * d_c + d_b * d_b + d_a * d_a);
    }
    {
        double d_d = c.se_v1 / (kc * s);
        double d_c = cs.se_c * (1.0 / (2.0 * kc * s) + u / (2.0 * kc * kc * s));
        double d_b = c.se_v0 * u / (2.0 * s * s * s * kc);
        double d_a = cs.se_a * std::abs(1.0 / (2.0 * s * kc) - u / (2.0 * s * s * s * kc));
        ses.eps_indist_out = std::sqrt(d_d * d_d + d_c * d_c + d_b * d_b + d_a * d_a);
    }
    return ses;
}

}  // namespace

double correlator_from_counts(const PairCounts& c) {
    if (!(c.n3 > 0.0 && c.n4 > 0.0))
        throw ValidationError("singles counts must be positive");
    return c.n34 * c.nt / (c.n3 * c.n4);
}

double correlator_from_counts(const QuadCounts& c) {
    if (!(c.n123 > 0.0 && c.n124 > 0.0))
        throw ValidationError("threefold counts must be positive");
    return c.n1234 * c.n12 / (c.n123 * c.n124);
}

SampleStats sample_stats(const std::vector<double>& samples) {
    if (samples.size() < 2) throw ValidationError("need at least two samples");
    SampleStats st;
    st.n = int(samples.size());
    for (double v : samples) st.mean += v;
    st.mean /= double(st.n);
    double acc = 0.0;
    for (double v : samples) acc += (v - st.mean) * (v - st.mean);
    st.sd = std::sqrt(acc / double(st.n - 1));
    st.se = st.sd / std::sqrt(double(st.n));
    return st;
}

CorrelatorSamples load_correlator_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open correlator file: " + path);
    CorrelatorSamples cs;
    std::string line;
    bool first_data = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::stringstream ss(line);
        std::string timestamp, protocol, value;
        if (!std::getline(ss, timestamp, ',') || !std::getline(ss, protocol, ',') ||
            !std::getline(ss, value, ','))
            throw ValidationError("correlator rows need timestamp, protocol, value");
        auto strip = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t");
            std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        protocol = strip(protocol);
        value = strip(value);
        if (first_data && strip(timestamp) == "timestamp") {
            first_data = false;  // header row
            continue;
        }
        first_data = false;
        double v;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw ValidationError("unparseable correlator value: " + value);
        }
        if (protocol == "A")
            cs.a.push_back(v);
        else if (protocol == "B")
            cs.b.push_back(v);
        else if (protocol == "C")
            cs.c.push_back(v);
        else if (protocol == "D")
            cs.d.push_back(v);
        else
            throw ValidationError("unknown protocol label: " + protocol);
    }
    return cs;
}

Visibility raw_visibility(double g, double r) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("reflectivity must lie in (0, 1)");
    if (!(g >= 0.0)) throw ValidationError("correlator must be non-negative");
    Visibility vis;
    vis.v = (r * r + (1.0 - r) * (1.0 - r) - g) / (2.0 * r * (1.0 - r));
    vis.in_range = vis.v >= 0.0 && vis.v <= 1.0;
    return vis;
}

BudgetSes propagate_uncertainty(const CorrelatorSet& cs) { return propagate(cs, true); }

BudgetSes propagate_uncertainty_delta(const CorrelatorSet& cs) { return propagate(cs, false); }

ErrorBudget extract_errors(const CorrelatorSet& cs) {
    Core c = core_values(cs);
    BudgetSes ses = propagate_uncertainty(cs);

    ErrorBudget b;
    b.model = NoiseModel::OBB;
    b.v0 = with_ci(c.v0, ses.v0);
    b.v1 = with_ci(c.v1, ses.v1);
    b.eps_multi = with_ci(cs.g_a / 2.0, ses.eps_multi);
    b.eps_multi_out = with_ci(cs.g_c / 2.0, ses.eps_multi_out);
    b.eps_tot = with_ci(1.0 - c.s, ses.eps_tot);
    b.eps_indist = with_ci(1.0 - c.s / (1.0 - cs.g_a / 2.0), ses.eps_indist);
    b.eps_tot_out = with_ci(1.0 - c.u / c.s, ses.eps_tot_out);
    b.eps_indist_out = with_ci(1.0 - c.u / ((1.0 - cs.g_c / 2.0) * c.s), ses.eps_indist_out);

    if (!raw_visibility(cs.g_b, cs.r1).in_range)
        b.warnings.push_back("V0 outside [0, 1]; value propagated unclamped");
    if (!raw_visibility(cs.g_d, cs.r2).in_range)
        b.warnings.push_back("V1 outside [0, 1]; value propagated unclamped");
    b.warnings.push_back(
        "output-error denominators use sqrt(V0 + g_A); the alternative "
        "sqrt(V0 + g_A/2) reading is not used");
    return b;
}

SbbErrors extract_errors_sbb(const ErrorBudget& obb) {
    double e = obb.eps_indist.value;
    double eo = obb.eps_indist_out.value;
    double purity = (1.0 - e) * (1.0 - e);
    double disc = 2.0 * purity - 1.0;
    if (disc < 0.0)
        throw ValidationError("single-photon purity below 1/2: no real shared-state solution");
    SbbErrors sbb;
    sbb.eps = (1.0 - std::sqrt(disc)) / 2.0;
    double k = (1.0 - e) * (1.0 - eo);
    double denom = 1.0 - 2.0 * sbb.eps;
    if (denom == 0.0) throw ValidationError("shared-state model degenerate at eps = 1/2");
    sbb.eps_out = (1.0 - sbb.eps - k) / denom;
    return sbb;
}

ZetaSensitivity zeta_sensitivity(double eps_multi, double eps_multi_out) {
    if (!(eps_multi > 0.0 && eps_multi_out > 0.0))
        throw ValidationError("zeta sensitivity needs positive multiphoton errors");
    ZetaSensitivity zs;
    zs.zeta_star = std::sqrt(eps_multi_out / eps_multi);
    zs.min_avg = std::sqrt(eps_multi * eps_multi_out);
    zs.estimate = (eps_multi + eps_multi_out) / 2.0;
    return zs;
}

}  // namespace pdist
