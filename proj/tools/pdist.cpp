#include <CLI11.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdist/distill.hpp"
#include "pdist/errors.hpp"
#include "pdist/extraction.hpp"
#include "pdist/matrix.hpp"
#include "pdist/random.hpp"
#include "pdist/report.hpp"
#include "pdist/resources.hpp"
#include "pdist/sources.hpp"
#include "pdist/tomography.hpp"

using namespace pdist;

namespace {

// ---------------------------------------------------------------- loaders

std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

std::vector<double> split_numbers(const std::string& line, const std::string& path) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ValidationError("unparseable number in " + path + ": " + cell);
        }
    }
    return vals;
}

Eigen::VectorXd load_loss_csv(const std::string& path) {
    auto lines = data_lines(path);
    if (lines.size() != 1)
        throw ValidationError("loss file must hold one row of amplitudes: " + path);
    auto vals = split_numbers(lines[0], path);
    Eigen::VectorXd v(Eigen::Index(vals.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = vals[std::size_t(i)];
    return v;
}

// re/im pairs per entry, one row per line
Eigen::MatrixXcd load_complex_csv(const std::string& path) {
    auto lines = data_lines(path);
    if (lines.empty()) throw ValidationError("matrix file has no data rows: " + path);
    std::vector<std::vector<double>> rows;
    for (const auto& line : lines) rows.push_back(split_numbers(line, path));
    std::size_t w = rows[0].size();
    if (w == 0 || w % 2 != 0)
        throw ValidationError("matrix rows need re/im pairs: " + path);
    Eigen::MatrixXcd m(Eigen::Index(rows.size()), Eigen::Index(w / 2));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != w) throw ValidationError("ragged matrix rows: " + path);
        for (std::size_t j = 0; j < w / 2; ++j)
            m(Eigen::Index(i), Eigen::Index(j)) = cxd(rows[i][2 * j], rows[i][2 * j + 1]);
    }
    return m;
}

// ----------------------------------------------------------------- output

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void flatten_json(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_json(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out << prefix << "," << csv_cell(j) << "\n";
    }
}

std::string report_csv(const RunReport& report) {
    json results = report.results;
    round_numbers(results);
    std::ostringstream out;
    if (results.contains("isolines")) {
        out << "N,p_over_pth,cost_ratio,valid_linear\n";
        for (const auto& row : results["isolines"])
            out << row["n"].dump() << "," << row["p_over_pth"].dump() << ","
                << row["cost_ratio"].dump() << "," << (row["valid_linear"].get<bool>() ? 1 : 0)
                << "\n";
        return out.str();
    }
    out << "key,value\n";
    flatten_json(results, "", out);
    return out.str();
}

void emit(const RunReport& report, const std::string& output, const std::string& format) {
    std::string payload = format == "csv" ? report_csv(report) : dump_report(report);
    if (output.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream out(output);
        if (!out) throw ValidationError("cannot write output file: " + output);
        out << payload;
        if (!payload.empty() && payload.back() != '\n') out << "\n";
    }
}

json value_json(const ValueWithError& v) {
    return json{{"value", v.value}, {"se", v.se}, {"ci_lo", v.ci_lo}, {"ci_hi", v.ci_hi}};
}

json stats_json(const SampleStats& s) {
    return json{{"mean", s.mean}, {"sd", s.sd}, {"se", s.se}, {"n", s.n}};
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
    int n = 3;
    std::string unitary = "fourier";
    std::string model = "obb";
    std::vector<double> eps;
    std::vector<int> herald_modes;
    std::vector<int> herald_counts;
    int herald_output = -1;
    std::string loss_in, loss_out, u_d;
    double r_ref = 0.5;
    bool scan = false;
    int trials = 200;
};

Eigen::MatrixXcd resolve_unitary(const SimulateArgs& args, RunReport& report) {
    if (args.unitary == "fourier") return fourier_matrix(args.n).mat;
    if (args.unitary == "hadamard") return hadamard_matrix(args.n).mat;
    Eigen::MatrixXcd u = load_complex_csv(args.unitary);
    report.inputs[args.unitary] = file_digest(args.unitary);
    if (u.rows() != u.cols() || u.rows() != args.n)
        throw ValidationError("unitary file does not match --n");
    double resid = unitarity_residual(u);
    if (resid > 1e-8)
        report.warnings.push_back("matrix file deviates from unitary (residual " +
                                  std::to_string(resid) + ")");
    return u;
}

PhotonSourceModel resolve_source(const SimulateArgs& args) {
    PhotonSourceModel source;
    source.model = args.model == "sbb" ? NoiseModel::SBB : NoiseModel::OBB;
    if (args.eps.empty())
        throw ValidationError("--eps is required");
    if (args.eps.size() == 1)
        source.eps.assign(std::size_t(args.n), args.eps[0]);
    else if (args.eps.size() == std::size_t(args.n))
        source.eps = args.eps;
    else
        throw ValidationError("--eps needs one value or exactly N values");
    return source;
}

HeraldSpec resolve_herald(const SimulateArgs& args) {
    if (args.herald_modes.empty() && args.herald_counts.empty() && args.herald_output < 0)
        return default_herald(args.n);
    if (args.herald_modes.size() != args.herald_counts.size())
        throw ValidationError("--herald-modes and --herald-counts need matching lengths");
    HeraldSpec herald;
    herald.measured_modes = args.herald_modes;
    herald.required_counts = args.herald_counts;
    herald.output_mode = args.herald_output >= 0 ? args.herald_output : args.n - 1;
    return herald;
}

int run_simulate(const SimulateArgs& args, std::uint64_t seed, const std::string& output,
                 const std::string& format) {
    RunReport report;
    report.command = "simulate";
    report.parameters = json{{"n", args.n},       {"unitary", args.unitary},
                             {"model", args.model}, {"eps", args.eps},
                             {"seed", seed},      {"format", format}};

    if (args.scan) {
        double eps = args.eps.size() == 1 ? args.eps[0] : 1e-4;
        if (args.eps.size() > 1)
            throw ValidationError("--scan-optimality takes a single --eps value");
        report.parameters["trials"] = args.trials;
        report.parameters["eps"] = json::array({eps});
        auto scan = optimality_scan(args.n, args.trials, eps, seed);
        report.results = json{{"min_ratio", scan.min_ratio},
                              {"evaluated", scan.evaluated},
                              {"skipped", scan.skipped}};
        emit(report, output, format);
        return 0;
    }

    bool pipeline = !args.loss_in.empty() || !args.loss_out.empty() || !args.u_d.empty();
    if (pipeline) {
        if (args.loss_in.empty() || args.loss_out.empty() || args.u_d.empty())
            throw ValidationError("pipeline mode needs --loss-in, --loss-out and --u-d together");
        if (args.eps.size() != 1)
            throw ValidationError("pipeline mode takes a single --eps value");
        report.parameters["loss_in"] = args.loss_in;
        report.parameters["loss_out"] = args.loss_out;
        report.parameters["u_d"] = args.u_d;
        report.parameters["r_ref"] = args.r_ref;
        report.inputs[args.loss_in] = file_digest(args.loss_in);
        report.inputs[args.loss_out] = file_digest(args.loss_out);
        report.inputs[args.u_d] = file_digest(args.u_d);
        auto d_in = diagonal_loss(load_loss_csv(args.loss_in));
        auto d_out = diagonal_loss(load_loss_csv(args.loss_out));
        auto u_d = load_complex_csv(args.u_d);
        auto u_b = beam_splitter(args.r_ref).mat;
        auto pipe = nonuniform_loss_pipeline(d_in, u_d, d_out, u_b, args.eps[0]);
        report.results = json{{"eps_out", pipe.eps_out},
                              {"g", pipe.g},
                              {"v1", pipe.v1},
                              {"p_pair", pipe.p_pair}};
        emit(report, output, format);
        return 0;
    }

    Eigen::MatrixXcd u = resolve_unitary(args, report);
    auto source = resolve_source(args);
    auto herald = resolve_herald(args);
    report.parameters["herald_modes"] = herald.measured_modes;
    report.parameters["herald_counts"] = herald.required_counts;
    report.parameters["herald_output"] = herald.output_mode;

    auto rep = heralded_distillation(u, source, herald);
    json species = json::array();
    for (const auto& term : rep.per_species)
        species.push_back(json{{"species", term.species},
                               {"weight", term.weight},
                               {"p_outcome", term.p_outcome},
                               {"p_bad", term.p_bad}});
    report.results = json{{"p_herald", rep.p_herald},
                          {"eps_out", rep.eps_out},
                          {"reduction", rep.reduction},
                          {"per_species", species}};
    emit(report, output, format);
    return 0;
}

// ---------------------------------------------------------- characterize

struct CharacterizeArgs {
    std::string counts;
    std::string reference;
    bool fit = true;
    bool phases = true;
    std::string eta_csv;
};

int run_characterize(const CharacterizeArgs& args, std::uint64_t seed, const std::string& output,
                     const std::string& format) {
    RunReport report;
    report.command = "characterize";
    report.parameters = json{{"counts", args.counts},
                             {"fit_model", args.fit},
                             {"phases", args.phases},
                             {"seed", seed},
                             {"format", format}};
    report.inputs[args.counts] = file_digest(args.counts);

    CountMatrix counts = load_count_csv(args.counts);
    std::optional<CountMatrix> reference;
    if (!args.reference.empty()) {
        report.parameters["reference"] = args.reference;
        report.inputs[args.reference] = file_digest(args.reference);
        reference = load_count_csv(args.reference);
    }

    auto cr = run_characterization(counts, reference ? &*reference : nullptr, args.fit,
                                   args.phases);

    json results;
    results["t_abs"] = matrix_json(cr.t_abs);
    results["d_in"] = vector_json(cr.decomposition.d_in.amp);
    results["d_out"] = vector_json(cr.decomposition.d_out.amp);
    results["u_abs"] = matrix_json(cr.decomposition.u_abs);
    results["iterations"] = cr.decomposition.iterations;
    results["residual"] = cr.decomposition.residual;
    results["eta"] = json{{"mean", cr.eta.mean}, {"sd", cr.eta.sd}, {"matrix", matrix_json(cr.eta.eta)}};
    if (cr.fit)
        results["fit"] = json{{"r2", cr.fit->r2},
                              {"f_fit", cr.fit->f_fit},
                              {"degenerate", cr.fit->degenerate},
                              {"u_d_abs", matrix_json(cr.fit->u_d_abs)},
                              {"model_abs", matrix_json(cr.fit->model_abs)}};
    if (cr.phases) {
        results["phases"] = json{{"u", matrix_json(cr.phases->u)},
                                 {"unitarity", cr.phases->unitarity}};
        results["f_d"] = cr.f_d;
        results["f_d_real"] = cr.f_d_real;
    }
    if (cr.r1) results["r1"] = *cr.r1;
    report.results = std::move(results);
    report.warnings = cr.warnings;

    if (!args.eta_csv.empty()) {
        std::ofstream out(args.eta_csv);
        if (!out) throw ValidationError("cannot write eta file: " + args.eta_csv);
        out << "# transmission map, dB, rows = input mode, cols = output mode\n";
        for (Eigen::Index i = 0; i < cr.eta.eta.rows(); ++i) {
            for (Eigen::Index j = 0; j < cr.eta.eta.cols(); ++j)
                out << (j ? "," : "") << json(jnum(10.0 * std::log10(cr.eta.eta(i, j)))).dump();
            out << "\n";
        }
        report.parameters["eta_csv"] = args.eta_csv;
    }

    emit(report, output, format);
    return 0;
}

// --------------------------------------------------------------- extract

struct ExtractArgs {
    std::string samples;
    double r1 = 0.497;
    double r2 = 0.517;
    std::string model = "obb";
    int mc_draws = 0;
};

int run_extract(const ExtractArgs& args, std::uint64_t seed, const std::string& output,
                const std::string& format) {
    RunReport report;
    report.command = "extract";
    report.parameters = json{{"samples", args.samples}, {"r1", args.r1}, {"r2", args.r2},
                             {"model", args.model},     {"mc_draws", args.mc_draws},
                             {"seed", seed},            {"format", format}};
    report.inputs[args.samples] = file_digest(args.samples);

    auto samples = load_correlator_csv(args.samples);
    auto sa = sample_stats(samples.a);
    auto sb = sample_stats(samples.b);
    auto sc = sample_stats(samples.c);
    auto sd = sample_stats(samples.d);

    CorrelatorSet cs;
    cs.g_a = sa.mean;
    cs.g_b = sb.mean;
    cs.g_c = sc.mean;
    cs.g_d = sd.mean;
    cs.se_a = sa.se;
    cs.se_b = sb.se;
    cs.se_c = sc.se;
    cs.se_d = sd.se;
    cs.r1 = args.r1;
    cs.r2 = args.r2;

    auto budget = extract_errors(cs);

    json results;
    results["stats"] = json{{"A", stats_json(sa)},
                            {"B", stats_json(sb)},
                            {"C", stats_json(sc)},
                            {"D", stats_json(sd)}};
    results["budget"] = json{{"model", "obb"},
                             {"v0", value_json(budget.v0)},
                             {"v1", value_json(budget.v1)},
                             {"eps_multi", value_json(budget.eps_multi)},
                             {"eps_multi_out", value_json(budget.eps_multi_out)},
                             {"eps_tot", value_json(budget.eps_tot)},
                             {"eps_tot_out", value_json(budget.eps_tot_out)},
                             {"eps_indist", value_json(budget.eps_indist)},
                             {"eps_indist_out", value_json(budget.eps_indist_out)}};
    if (args.model == "sbb" || args.model == "both") {
        auto sbb = extract_errors_sbb(budget);
        results["sbb"] = json{{"eps_indist", sbb.eps}, {"eps_indist_out", sbb.eps_out}};
    }
    auto zeta = zeta_sensitivity(budget.eps_multi.value, budget.eps_multi_out.value);
    results["zeta"] = json{{"zeta_star", zeta.zeta_star},
                           {"min_avg", zeta.min_avg},
                           {"estimate", zeta.estimate}};

    if (args.mc_draws > 0) {
        // Gaussian resampling of the four correlator means as an empirical
        // cross-check of the analytic propagation
        if (args.mc_draws < 2) throw ValidationError("--mc-draws needs at least 2 draws");
        std::vector<std::array<double, 8>> draws;
        draws.reserve(std::size_t(args.mc_draws));
        for (int d = 0; d < args.mc_draws; ++d) {
            Rng rng(mix_seed(seed, std::uint64_t(d)));
            CorrelatorSet pert = cs;
            pert.g_a = cs.g_a + cs.se_a * rng.gauss();
            pert.g_b = cs.g_b + cs.se_b * rng.gauss();
            pert.g_c = cs.g_c + cs.se_c * rng.gauss();
            pert.g_d = cs.g_d + cs.se_d * rng.gauss();
            auto eb = extract_errors(pert);
            draws.push_back({eb.v0.value, eb.v1.value, eb.eps_multi.value,
                             eb.eps_multi_out.value, eb.eps_tot.value, eb.eps_tot_out.value,
                             eb.eps_indist.value, eb.eps_indist_out.value});
        }
        std::array<double, 8> mean{}, sd{};
        for (const auto& d : draws)
            for (int k = 0; k < 8; ++k) mean[std::size_t(k)] += d[std::size_t(k)];
        for (auto& m : mean) m /= double(args.mc_draws);
        for (const auto& d : draws)
            for (int k = 0; k < 8; ++k) {
                double dev = d[std::size_t(k)] - mean[std::size_t(k)];
                sd[std::size_t(k)] += dev * dev;
            }
        for (auto& s : sd) s = std::sqrt(s / double(args.mc_draws - 1));
        const char* names[8] = {"v0",      "v1",          "eps_multi",  "eps_multi_out",
                                "eps_tot", "eps_tot_out", "eps_indist", "eps_indist_out"};
        json mc_se;
        for (int k = 0; k < 8; ++k) mc_se[names[std::size_t(k)]] = sd[std::size_t(k)];
        results["mc"] = json{{"draws", args.mc_draws}, {"seed", seed}, {"se", mc_se}};
    }

    report.results = std::move(results);
    report.warnings = budget.warnings;
    emit(report, output, format);
    return 0;
}

// ------------------------------------------------------------- resources

struct ResourcesArgs {
    double eps = -1.0;
    std::string source;
    std::string sources_csv;
    int n_grid = 64;
    bool integer_distance = false;
    bool isolines = false;
    std::vector<int> isoline_n = {1, 2, 3, 12};
    int grid_points = 121;
    bool boundaries = false;
};

int run_resources(const ResourcesArgs& args, std::uint64_t seed, const std::string& output,
                  const std::string& format) {
    RunReport report;
    report.command = "resources";
    report.parameters = json{{"n_grid", args.n_grid},
                             {"integer_distance", args.integer_distance},
                             {"seed", seed},
                             {"format", format}};

    ResourceParams params;
    params.n_max = args.n_grid;
    params.integer_distance = args.integer_distance;

    double eps = args.eps;
    if (!args.source.empty()) {
        auto table = builtin_sources();
        if (!args.sources_csv.empty()) {
            report.inputs[args.sources_csv] = file_digest(args.sources_csv);
            report.parameters["sources_csv"] = args.sources_csv;
            table = load_sources_csv(args.sources_csv);
        }
        bool found = false;
        for (const auto& entry : table)
            if (entry.label == args.source) {
                eps = entry.eps;
                found = true;
                break;
            }
        if (!found) throw ValidationError("unknown source label: " + args.source);
        report.parameters["source"] = args.source;
    }

    json results;
    if (eps >= 0.0) {
        report.parameters["eps"] = eps;
        auto best = optimal_scheme_size(eps, params);
        results["eps"] = eps;
        results["p_error"] = pauli_error(eps);
        results["n_star"] = best.n_star;
        results["cost"] = best.cost;
        results["ratio"] = best.ratio_defined ? json(best.ratio) : json(nullptr);
        results["ratio_defined"] = best.ratio_defined;
        results["distance_at_optimum"] =
            required_distance(pauli_error(eps) / double(best.n_star), params);
        results["valid_linear"] =
            best.n_star == 1 || linear_validity_ratio(eps, best.n_star) <= kLinearValidityCut;
    } else if (!args.boundaries && !args.isolines) {
        throw ValidationError("pass --eps, --source, --boundaries or --isolines");
    }

    if (args.boundaries) {
        auto rb = regime_boundaries(params);
        json per_n = json::array();
        for (std::size_t i = 0; i < rb.per_n_crossover.size(); ++i)
            per_n.push_back(json{{"n", int(i) + 2},
                                 {"crossover_over_pth", rb.per_n_crossover[i]},
                                 {"threshold", rb.per_n_threshold[i]}});
        results["boundaries"] = json{{"p_cross_over_pth", rb.p_cross_over_pth},
                                     {"n_at_cross", rb.n_at_cross},
                                     {"per_n", per_n}};
    }

    if (args.isolines) {
        report.parameters["isoline_n"] = args.isoline_n;
        report.parameters["grid_points"] = args.grid_points;
        json rows = json::array();
        for (const auto& row : isoline_data(params, args.isoline_n, args.grid_points))
            rows.push_back(json{{"n", row.n},
                                {"p_over_pth", row.p_over_pth},
                                {"cost_ratio", row.cost_ratio},
                                {"valid_linear", row.valid_linear}});
        results["isolines"] = std::move(rows);
    }

    report.results = std::move(results);
    emit(report, output, format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon distillation simulator and analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string output;
    std::uint64_t seed = 12345;
    std::string format = "json";
    app.add_option("--output", output, "write the report here instead of stdout");
    app.add_option("--seed", seed, "random seed for stochastic subtasks");
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "heralded distillation of noisy photons");
    simulate->add_option("--n", sim.n, "number of photons and modes")->check(CLI::Range(1, 16));
    simulate->add_option("--unitary", sim.unitary,
                         "fourier, hadamard, or a complex-matrix CSV path");
    simulate->add_option("--model", sim.model, "noise model")
        ->check(CLI::IsMember({"obb", "sbb"}));
    simulate->add_option("--eps", sim.eps, "input error, one value or one per photon");
    simulate->add_option("--herald-modes", sim.herald_modes, "measured output modes");
    simulate->add_option("--herald-counts", sim.herald_counts, "required counts per mode");
    simulate->add_option("--herald-output", sim.herald_output, "distilled output mode");
    simulate->add_option("--loss-in", sim.loss_in, "input loss amplitudes CSV (pipeline mode)");
    simulate->add_option("--loss-out", sim.loss_out, "output loss amplitudes CSV (pipeline mode)");
    simulate->add_option("--u-d", sim.u_d, "characterized 3-mode block CSV (pipeline mode)");
    simulate->add_option("--r-ref", sim.r_ref, "reference splitter reflectivity (pipeline mode)");
    simulate->add_flag("--scan-optimality", sim.scan, "Haar scan of eps_out * n / eps");
    simulate->add_option("--trials", sim.trials, "scan trials")->check(CLI::PositiveNumber);

    CharacterizeArgs chr;
    auto* characterize =
        app.add_subcommand("characterize", "interferometer tomography from count grids");
    characterize->add_option("counts", chr.counts, "count grid CSV with # s_norm header")
        ->required();
    characterize->add_option("--reference", chr.reference, "2x2 reference splitter count CSV");
    characterize->add_flag("--fit-model,!--no-fit-model", chr.fit,
                           "fit the concatenated splitter model");
    characterize->add_flag("--phases,!--no-phases", chr.phases, "reconstruct complex phases");
    characterize->add_option("--eta-csv", chr.eta_csv, "write the transmission map here, in dB");

    ExtractArgs ext;
    auto* extract = app.add_subcommand("extract", "error budget from correlator samples");
    extract->add_option("samples", ext.samples, "correlator CSV (timestamp, protocol, value)")
        ->required();
    extract->add_option("--r1", ext.r1, "reference splitter reflectivity");
    extract->add_option("--r2", ext.r2, "distillation splitter reflectivity");
    extract->add_option("--model", ext.model, "interpretative model")
        ->check(CLI::IsMember({"obb", "sbb", "both"}));
    extract->add_option("--mc-draws", ext.mc_draws,
                        "Gaussian resampling draws for an SE cross-check");

    ResourcesArgs res;
    auto* resources = app.add_subcommand("resources", "hybrid QEC + distillation cost model");
    resources->add_option("--eps", res.eps, "source indistinguishability error");
    resources->add_option("--source", res.source, "tabulated source label");
    resources->add_option("--sources", res.sources_csv, "custom source table CSV");
    resources->add_option("--n-grid", res.n_grid, "largest distillation size considered")
        ->check(CLI::PositiveNumber);
    resources->add_flag("--integer-distance", res.integer_distance,
                        "round the code distance up to an integer");
    resources->add_flag("--isolines", res.isolines, "emit the cost isoline table");
    resources->add_option("--isoline-n", res.isoline_n, "isoline distillation sizes");
    resources->add_option("--grid-points", res.grid_points, "isoline grid resolution");
    resources->add_flag("--boundaries", res.boundaries, "emit regime boundaries");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(sim, seed, output, format);
        if (characterize->parsed()) return run_characterize(chr, seed, output, format);
        if (extract->parsed()) return run_extract(ext, seed, output, format);
        if (resources->parsed()) return run_resources(res, seed, output, format);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NoHeraldError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const AboveThresholdError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
