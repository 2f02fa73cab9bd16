#include "pdist/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "pdist/errors.hpp"
#include "pdist/random.hpp"

namespace pdist {

namespace {

constexpr double kHeraldFloor = 1e-12;

void validate_herald(const HeraldSpec& herald, int n_modes, int n_photons) {
    if (herald.output_mode < 0 || herald.output_mode >= n_modes)
        throw ValidationError("herald output mode out of range");
    if (herald.measured_modes.size() != herald.required_counts.size())
        throw ValidationError("herald mode and count lists differ in length");
    std::vector<bool> seen(std::size_t(n_modes), false);
    seen[std::size_t(herald.output_mode)] = true;
    int required = 0;
    for (std::size_t i = 0; i < herald.measured_modes.size(); ++i) {
        int m = herald.measured_modes[i];
        if (m < 0 || m >= n_modes) throw ValidationError("herald measured mode out of range");
        if (seen[std::size_t(m)])
            throw ValidationError("herald modes must be distinct and exclude the output mode");
        seen[std::size_t(m)] = true;
        int c = herald.required_counts[i];
        if (c < 0) throw ValidationError("herald counts must be non-negative");
        required += c;
    }
    if (required + 1 > n_photons)
        throw ValidationError("herald requires more photons than are injected");
}

// Outcomes consistent with the herald: required counts on measured modes,
// exactly one photon on the output mode, anything elsewhere.
std::vector<Occupation> herald_outcomes(const HeraldSpec& herald, int n_modes, int n_photons) {
    std::vector<Occupation> all = enumerate_outcomes(n_modes, n_photons);
    std::vector<Occupation> match;
    for (Occupation& o : all) {
        if (o[std::size_t(herald.output_mode)] != 1) continue;
        bool ok = true;
        for (std::size_t i = 0; i < herald.measured_modes.size(); ++i)
            if (o[std::size_t(herald.measured_modes[i])] != herald.required_counts[i]) {
                ok = false;
                break;
            }
        if (ok) match.push_back(std::move(o));
    }
    return match;
}

PhotonSourceModel uniform_obb(int n, double eps) {
    PhotonSourceModel s;
    s.model = NoiseModel::OBB;
    s.eps.assign(std::size_t(n), eps);
    return s;
}

}  // namespace

HeraldSpec default_herald(int n) {
    if (n < 1) throw ValidationError("default_herald requires n >= 1");
    HeraldSpec h;
    for (int m = 0; m + 1 < n; ++m) {
        h.measured_modes.push_back(m);
        h.required_counts.push_back(1);
    }
    h.output_mode = n - 1;
    return h;
}

DistillationReport heralded_distillation(const Eigen::MatrixXcd& u,
                                         const PhotonSourceModel& source,
                                         const HeraldSpec& herald, Exec exec) {
    if (u.rows() != u.cols()) throw ValidationError("network matrix must be square");
    const int n_modes = int(u.rows());
    const int n_photons = int(source.eps.size());
    if (n_photons < 1 || n_photons > n_modes)
        throw ValidationError("photon count must be between 1 and the mode count");
    validate_herald(herald, n_modes, n_photons);

    std::vector<int> inputs(static_cast<std::size_t>(n_photons));
    std::iota(inputs.begin(), inputs.end(), 0);
    auto terms = expand_species(source);
    auto outcomes = herald_outcomes(herald, n_modes, n_photons);

    const long long n_terms = (long long)terms.size();
    std::vector<double> p_out(terms.size(), 0.0), p_bad(terms.size(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
    for (long long ti = 0; ti < n_terms; ++ti) {
        const SpeciesTerm& term = terms[std::size_t(ti)];
        double po = 0.0, pb = 0.0;
        bool has_bad = std::any_of(term.species.begin(), term.species.end(),
                                   [](int s) { return s != 0; });
        for (const Occupation& o : outcomes) {
            po += event_probability(u, inputs, term, o);
            if (has_bad)
                pb += event_probability_bad_at(u, inputs, term, o, herald.output_mode);
        }
        p_out[std::size_t(ti)] = po;
        p_bad[std::size_t(ti)] = pb;
    }
    (void)exec;

    DistillationReport rep;
    double joint_bad = 0.0;
    rep.per_species.reserve(terms.size());
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
        rep.p_herald += terms[ti].weight * p_out[ti];
        joint_bad += terms[ti].weight * p_bad[ti];
        rep.per_species.push_back({terms[ti].species, terms[ti].weight, p_out[ti], p_bad[ti]});
    }
    if (rep.p_herald < kHeraldFloor)
        throw NoHeraldError("herald probability below 1e-12");
    rep.eps_out = joint_bad / rep.p_herald;
    double mean_eps =
        std::accumulate(source.eps.begin(), source.eps.end(), 0.0) / double(n_photons);
    rep.reduction = rep.eps_out > 0.0 ? mean_eps / rep.eps_out : 0.0;
    return rep;
}

double fourier_slope_check(int n, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
    auto rep = heralded_distillation(fourier_matrix(n).mat, uniform_obb(n, eps),
                                     default_herald(n));
    return rep.eps_out * double(n) / eps;
}

double hom_visibility(const PhotonSourceModel& a, const PhotonSourceModel& b, double r) {
    if (a.eps.size() != 1 || b.eps.size() != 1)
        throw ValidationError("hom_visibility takes two single-photon sources");
    if (a.model != b.model) throw ValidationError("mixed noise models in hom_visibility");
    double denom = 2.0 * r * (1.0 - r);
    if (denom <= 0.0) throw ValidationError("visibility undefined at r = 0 or 1");

    PhotonSourceModel pair;
    pair.model = a.model;
    pair.eps = {a.eps[0], b.eps[0]};
    Eigen::MatrixXcd bs = beam_splitter(r).mat;
    std::vector<int> inputs{0, 1};
    Occupation coincidence{1, 1};
    double p11 = 0.0;
    for (const SpeciesTerm& term : expand_species(pair))
        p11 += term.weight * event_probability(bs, inputs, term, coincidence);
    return (r * r + (1.0 - r) * (1.0 - r) - p11) / denom;
}

PipelineResult nonuniform_loss_pipeline(const DiagonalLoss& d_in, const Eigen::MatrixXcd& u_d,
                                        const DiagonalLoss& d_out, const Eigen::MatrixXcd& u_b,
                                        double eps, Exec exec) {
    if (d_in.amp.size() != 4 || d_out.amp.size() != 4)
        throw ValidationError("pipeline expects 4-mode loss diagonals");
    if (u_d.rows() != 3 || u_d.cols() != 3)
        throw ValidationError("pipeline expects a 3-mode distillation block");
    if (u_b.rows() != 2 || u_b.cols() != 2)
        throw ValidationError("pipeline expects a 2-mode reference splitter");
    if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");

    Eigen::MatrixXcd e1 = Eigen::MatrixXcd::Identity(4, 4);
    e1.topLeftCorner(3, 3) = u_d;
    Eigen::MatrixXcd e2 = Eigen::MatrixXcd::Identity(4, 4);
    e2.bottomRightCorner(2, 2) = u_b;
    Eigen::MatrixXcd t = d_in.amp.cast<cxd>().asDiagonal() * e1 * e2 *
                         d_out.amp.cast<cxd>().asDiagonal();
    // Conditional ratios inside the pair subspace are invariant under a
    // global scale, so near-unitary inputs with rounding noise are brought
    // back into the sub-unitary class rather than rejected.
    double sv = largest_singular_value(t);
    if (sv > 1.0) t /= sv;

    Eigen::MatrixXcd w = unitary_dilation(t);
    auto terms = expand_species(uniform_obb(4, eps));
    auto marg = physical_marginals(w, {0, 1, 2, 3}, terms, 4, exec);
    auto lookup = [&marg](std::initializer_list<int> occ) {
        auto it = marg.find(Occupation(occ));
        return it == marg.end() ? 0.0 : it->second;
    };
    double p_both = lookup({1, 1, 1, 1});
    double pair = p_both + lookup({1, 1, 2, 0}) + lookup({1, 1, 0, 2});
    if (pair < kHeraldFloor)
        throw NoHeraldError("heralded pair probability below 1e-12");

    PipelineResult res;
    res.p_pair = pair;
    res.g = p_both / pair;
    res.v1 = 1.0 - 2.0 * res.g;
    res.eps_out = 1.0 - res.v1 / (1.0 - eps);
    return res;
}

double effective_unitary_error(const Eigen::MatrixXcd& u_exp, double eps_ref) {
    if (u_exp.rows() != 3 || u_exp.cols() != 3)
        throw ValidationError("effective_unitary_error expects a 3-mode matrix");
    if (!(eps_ref > 0.0 && eps_ref < 1.0)) throw ValidationError("eps_ref must lie in (0, 1)");
    auto source = uniform_obb(3, eps_ref);
    auto herald = default_herald(3);
    double e_exp = heralded_distillation(u_exp, source, herald).eps_out;
    double e_ideal = heralded_distillation(fourier_matrix(3).mat, source, herald).eps_out;
    return e_exp - e_ideal;
}

double extrapolate_unitary_error(double eps_unitary, int n) {
    if (!(eps_unitary >= 0.0 && eps_unitary < 1.0))
        throw ValidationError("eps_unitary must lie in [0, 1)");
    if (n < 1) throw ValidationError("photon count must be positive");
    return 1.0 - std::pow(1.0 - eps_unitary, double(n) / 3.0);
}

double combine_total_error(double eps_indist, double eps_multi) {
    if (!(eps_indist >= 0.0 && eps_indist <= 1.0 && eps_multi >= 0.0 && eps_multi <= 1.0))
        throw ValidationError("error rates must lie in [0, 1]");
    return eps_indist + (1.0 - eps_indist) * eps_multi;
}

OptimalityScan optimality_scan(int n, int trials, double eps, std::uint64_t seed, Exec exec) {
    if (n < 1 || n > 5) throw ValidationError("scan supports 1 to 5 modes");
    if (trials < 1) throw ValidationError("at least one trial required");
    if (!(eps > 0.0 && eps <= 1e-3))
        throw ValidationError("scan eps must lie in (0, 1e-3] for the first-order reading");

    auto source = uniform_obb(n, eps);
    OptimalityScan scan;
    scan.min_ratio = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(mix_seed(seed, std::uint64_t(trial)));
        Eigen::MatrixXcd u = haar_unitary(n, rng);
        for (int out = 0; out < n; ++out) {
            HeraldSpec herald;
            herald.output_mode = out;
            for (int m = 0; m < n; ++m)
                if (m != out) {
                    herald.measured_modes.push_back(m);
                    herald.required_counts.push_back(1);
                }
            try {
                auto rep = heralded_distillation(u, source, herald, exec);
                scan.min_ratio = std::min(scan.min_ratio, rep.eps_out * double(n) / eps);
                ++scan.evaluated;
            } catch (const NoHeraldError&) {
                ++scan.skipped;
            }
        }
    }
    return scan;
}

PhiPlusCheck phi_plus_herald_check(int n, const Eigen::MatrixXcd& u, const HeraldSpec& herald) {
    if (n < 2 || n > 5) throw ValidationError("check supports 2 to 5 photons");
    if (u.rows() != n || u.cols() != n) throw ValidationError("matrix size must match n");
    validate_herald(herald, n, n);

    std::vector<int> inputs(static_cast<std::size_t>(n));
    std::iota(inputs.begin(), inputs.end(), 0);
    auto outcomes = herald_outcomes(herald, n, n);

    PhiPlusCheck check;
    SpeciesTerm all_good{1.0, std::vector<int>(std::size_t(n), 0)};
    for (const Occupation& o : outcomes) check.p0 += event_probability(u, inputs, all_good, o);

    for (int k = 0; k < n; ++k) {
        SpeciesTerm one_bad{1.0, std::vector<int>(std::size_t(n), 0)};
        one_bad.species[std::size_t(k)] = 1;
        for (const Occupation& o : outcomes)
            check.p_mix += event_probability(u, inputs, one_bad, o) / double(n);
    }

    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd coeffs(n);
        for (int k = 0; k < n; ++k) {
            double phi = 2.0 * std::numbers::pi * double(j * k % n) / double(n);
            coeffs(k) = cxd(std::cos(phi), std::sin(phi)) / std::sqrt(double(n));
        }
        double p = 0.0;
        for (const Occupation& o : outcomes)
            p += coherent_one_bad_probability(u, inputs, coeffs, o);
        if (j == 0)
            check.p_plus = p;
        else
            check.p_minus_total += p / double(n);
    }
    check.residual = std::abs(check.p_mix - (check.p0 / double(n) + check.p_minus_total));
    return check;
}

}  // namespace pdist
