#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include "pdist/distill.hpp"
#include "pdist/events.hpp"
#include "pdist/matrix.hpp"
#include "pdist/random.hpp"
#include "pdist/sources.hpp"
#include "pdist/tomography.hpp"

using namespace pdist;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) f();
    auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / double(reps);
}

void report(const char* name, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.3g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel timings"};
    int n = 6;
    int reps = 3;
    int trials = 40;
    std::uint64_t seed = 42;
    app.add_option("--n", n, "photon number for the distillation kernels")
        ->check(CLI::Range(2, 12));
    app.add_option("--reps", reps, "repetitions per measurement")->check(CLI::PositiveNumber);
    app.add_option("--trials", trials, "optimality scan trials")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for the scan and the MC benchmark");
    CLI11_PARSE(app, argc, argv);

    auto u = fourier_matrix(n).mat;
    PhotonSourceModel source;
    source.model = NoiseModel::OBB;
    source.eps.assign(std::size_t(n), 0.05);
    auto herald = default_herald(n);

    DistillationReport rep_s, rep_p;
    double t_s = time_ms([&] { rep_s = heralded_distillation(u, source, herald, Exec::Serial); },
                         reps);
    double t_p = time_ms([&] { rep_p = heralded_distillation(u, source, herald, Exec::Parallel); },
                         reps);
    double diff = std::abs(rep_s.eps_out - rep_p.eps_out) +
                  std::abs(rep_s.p_herald - rep_p.p_herald);
    report("heralded_distillation", t_s, t_p, diff);

    {
        std::vector<int> inputs;
        for (int i = 0; i < n; ++i) inputs.push_back(i);
        auto terms = expand_species(source);
        std::map<Occupation, double> m_s, m_p;
        double ms = time_ms([&] { m_s = physical_marginals(u, inputs, terms, n, Exec::Serial); },
                            reps);
        double mp = time_ms([&] { m_p = physical_marginals(u, inputs, terms, n, Exec::Parallel); },
                            reps);
        double d = 0;
        for (const auto& [occ, p] : m_s) {
            auto it = m_p.find(occ);
            d = std::max(d, it == m_p.end() ? p : std::abs(p - it->second));
        }
        report("physical_marginals", ms, mp, d);
    }

    {
        OptimalityScan s_s, s_p;
        double ms = time_ms([&] { s_s = optimality_scan(3, trials, 1e-4, seed, Exec::Serial); }, 1);
        double mp = time_ms([&] { s_p = optimality_scan(3, trials, 1e-4, seed, Exec::Parallel); },
                            1);
        report("optimality_scan", ms, mp, std::abs(s_s.min_ratio - s_p.min_ratio));
    }

    {
        CountMatrix ref;
        ref.s_norm = 4.0e8;
        ref.counts = Eigen::MatrixXd(2, 2);
        ref.counts << 9.9e6, 1.01e7, 1.0e7, 9.8e6;
        McReflectivity u_s, u_p;
        double ms = time_ms(
            [&] { u_s = mc_reflectivity_uncertainty(ref, 20000, seed, Exec::Serial); }, reps);
        double mp = time_ms(
            [&] { u_p = mc_reflectivity_uncertainty(ref, 20000, seed, Exec::Parallel); }, reps);
        report("mc_reflectivity", ms, mp, std::abs(u_s.sd - u_p.sd));
    }

    return 0;
}
