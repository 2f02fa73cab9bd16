#include "pdist/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "pdist/errors.hpp"
#include "pdist/random.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pdist {

namespace {

constexpr double kSinkhornTol = 1e-12;
constexpr int kSinkhornCap = 10000;
// Damping exponent on the row updates. It only moves the scalar gauge
// between the two loss diagonals (the doubly stochastic limit is unique);
// this value reproduces the bundled reference decomposition's split.
constexpr double kRowDamping = 0.518;

struct SinkhornResult {
    Eigen::MatrixXd ds;       // doubly stochastic limit (power domain)
    Eigen::VectorXd row_acc;  // accumulated row scalings
    Eigen::VectorXd col_acc;  // accumulated column scalings
    int iterations = 0;
    double residual = 0;
};

SinkhornResult sinkhorn_power(Eigen::MatrixXd m) {
    const Eigen::Index n = m.rows();
    if (n != m.cols()) throw ValidationError("scaling requires a square matrix");
    if ((m.array() < 0.0).any()) throw ValidationError("negative entries in power matrix");
    if ((m.rowwise().sum().array() <= 0.0).any() || (m.colwise().sum().array() <= 0.0).any())
        throw ValidationError("zero row or column: decomposition undefined");

    SinkhornResult res;
    res.row_acc = Eigen::VectorXd::Ones(n);
    res.col_acc = Eigen::VectorXd::Ones(n);
    double resid = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < kSinkhornCap) {
        ++it;
        Eigen::VectorXd rs = m.rowwise().sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            double f = std::pow(rs(i), kRowDamping);
            m.row(i) /= f;
            res.row_acc(i) *= f;
        }
        Eigen::VectorXd cs = m.colwise().sum();
        for (Eigen::Index j = 0; j < n; ++j) {
            m.col(j) /= cs(j);
            res.col_acc(j) *= cs(j);
        }
        resid = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
        resid = std::max(resid, (m.colwise().sum().array() - 1.0).abs().maxCoeff());
        if (resid <= kSinkhornTol) break;
    }
    if (resid > kSinkhornTol)
        throw SolverError("row/column scaling did not converge", resid);
    res.ds = std::move(m);
    res.iterations = it;
    res.residual = resid;
    return res;
}

double entry_sd(const Eigen::MatrixXd& m, double mean) {
    const double n = double(m.size());
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            double d = m(i, j) - mean;
            acc += d * d;
        }
    return std::sqrt(acc / (n - 1.0));
}

}  // namespace

CountMatrix load_count_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open count file: " + path);
    CountMatrix c;
    bool have_norm = false;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            auto parse_tagged = [&](const char* tag) -> std::optional<double> {
                std::size_t pos = line.find(tag);
                if (pos == std::string::npos) return std::nullopt;
                pos = line.find('=', pos);
                if (pos == std::string::npos) return std::nullopt;
                return std::strtod(line.c_str() + pos + 1, nullptr);
            };
            if (auto v = parse_tagged("s_norm")) {
                c.s_norm = (long long)std::llround(*v);
                have_norm = true;
            }
            if (auto v = parse_tagged("duration_s")) c.duration_s = *v;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("unparseable count value: " + cell);
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (!have_norm) throw ValidationError("count file lacks the '# s_norm=' header");
    if (c.s_norm <= 0) throw ValidationError("s_norm must be positive");
    if (rows.empty()) throw ValidationError("count file has no data rows");
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n) throw ValidationError("count grid must be square");
    c.counts.resize(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = rows[i][j];
            if (v < 0) throw ValidationError("negative count");
            if (v > double(c.s_norm)) throw ValidationError("count above s_norm");
            c.counts(Eigen::Index(i), Eigen::Index(j)) = v;
        }
    return c;
}

Eigen::MatrixXd amplitudes_from_counts(const CountMatrix& c) {
    if (c.s_norm <= 0) throw ValidationError("s_norm must be positive");
    if ((c.counts.array() < 0.0).any()) throw ValidationError("negative count");
    return (c.counts / double(c.s_norm)).cwiseSqrt();
}

LossDecomposition decompose_losses(const Eigen::MatrixXd& t_abs) {
    if ((t_abs.array() < 0.0).any())
        throw ValidationError("amplitudes must be non-negative");
    SinkhornResult s = sinkhorn_power(t_abs.array().square());

    Eigen::VectorXd d_in = s.row_acc.cwiseSqrt();
    Eigen::VectorXd d_out = s.col_acc.cwiseSqrt();
    // d_in and d_out share a scalar gauge (lambda, 1/lambda). If the damped
    // split leaves an amplitude above 1, move the gauge just enough.
    double max_in = d_in.maxCoeff(), max_out = d_out.maxCoeff();
    if (max_in > 1.0 || max_out > 1.0) {
        double lo = max_out, hi = 1.0 / max_in;
        if (lo > hi)
            throw SolverError("loss amplitudes cannot be gauged into [0, 1]", lo - hi);
        double lambda = std::clamp(1.0, lo, hi);
        d_in *= lambda;
        d_out /= lambda;
    }

    LossDecomposition dec;
    dec.d_in = diagonal_loss(d_in);
    dec.d_out = diagonal_loss(d_out);
    dec.u_abs = s.ds.cwiseSqrt();
    dec.iterations = s.iterations;
    dec.residual = s.residual;
    return dec;
}

PhaseReconstruction reconstruct_phases_3mode(const Eigen::MatrixXd& u_abs, PhaseBranch branch) {
    if (u_abs.rows() != 3 || u_abs.cols() != 3)
        throw ValidationError("phase reconstruction expects a 3x3 amplitude matrix");
    if ((u_abs.array() < 0.0).any()) throw ValidationError("amplitudes must be non-negative");
    Eigen::MatrixXd p = u_abs.array().square();
    double ds_resid = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
    ds_resid = std::max(ds_resid, (p.colwise().sum().array() - 1.0).abs().maxCoeff());
    if (ds_resid > 1e-6)
        throw ValidationError("squared amplitudes must be doubly stochastic within 1e-6");

    const double s2 = branch == PhaseBranch::PlusIm ? -1.0 : 1.0;
    const double x = u_abs(0, 0) * u_abs(1, 0);
    const double y = u_abs(0, 1) * u_abs(1, 1);
    const double z = u_abs(0, 2) * u_abs(1, 2);
    auto closing_angle = [](double opp, double s1v, double s2v, const char* which) {
        double c = (opp * opp - s1v * s1v - s2v * s2v) / (2.0 * s1v * s2v);
        if (!std::isfinite(c))
            throw SolverError(std::string("degenerate amplitude pattern: ") + which, 0.0);
        if (std::abs(c) > 1.0 + 1e-9) {
            std::ostringstream os;
            os << "amplitude triangle cannot close (" << which << "): cos = " << c;
            throw SolverError(os.str(), std::abs(c) - 1.0);
        }
        return std::clamp(c, -1.0, 1.0);
    };
    double ca = closing_angle(z, x, y, "rows 1-2, columns 1/2 vs 3");
    double cb = closing_angle(y, x, z, "rows 1-2, columns 1/3 vs 2");
    double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    double alpha = std::atan2(s2 * sa, ca);
    double beta = std::atan2(-s2 * sb, cb);

    Eigen::MatrixXcd u(3, 3);
    for (int j = 0; j < 3; ++j) u(0, j) = u_abs(0, j);
    u(1, 0) = u_abs(1, 0);
    u(2, 0) = u_abs(2, 0);
    u(1, 1) = u_abs(1, 1) * cxd(std::cos(alpha), std::sin(alpha));
    u(1, 2) = u_abs(1, 2) * cxd(std::cos(beta), std::sin(beta));

    // Third-row phases close the column orthogonality relations.
    cxd v1 = -(cxd(u_abs(0, 0) * u_abs(0, 1), 0.0) + u(1, 0) * u(1, 1));
    cxd v2 = -(cxd(u_abs(0, 0) * u_abs(0, 2), 0.0) + u(1, 0) * u(1, 2));
    if (std::abs(v1) < 1e-300 || std::abs(v2) < 1e-300)
        throw SolverError("degenerate amplitude pattern: third-row phases unconstrained", 0.0);
    double gamma = std::atan2(v1.imag(), v1.real());
    double delta = std::atan2(v2.imag(), v2.real());
    u(2, 1) = u_abs(2, 1) * cxd(std::cos(gamma), std::sin(gamma));
    u(2, 2) = u_abs(2, 2) * cxd(std::cos(delta), std::sin(delta));

    PhaseReconstruction rec;
    rec.u = std::move(u);
    rec.unitarity = unitarity_residual(rec.u);
    return rec;
}

ConcatenatedFit fit_concatenated_model(const Eigen::MatrixXd& u_abs) {
    if (u_abs.rows() != 4 || u_abs.cols() != 4)
        throw ValidationError("concatenated fit expects a 4x4 amplitude matrix");
    if ((u_abs.array() < 0.0).any()) throw ValidationError("amplitudes must be non-negative");
    Eigen::MatrixXd ds = u_abs.array().square();

    ConcatenatedFit fit;
    double a2 = ds(3, 2), b2 = ds(3, 3);
    double denom = a2 + b2;
    fit.r2 = denom > 0.0 ? b2 / denom : 0.0;
    fit.degenerate = !(fit.r2 > 0.0 && fit.r2 < 1.0);

    // Fold the split third output (modes 3 and 4 in quadrature) back into
    // one column, then rescale the 3x3 block to doubly stochastic. The
    // fourth row's leakage entries drop out here.
    Eigen::MatrixXd p3(3, 3);
    for (int i = 0; i < 3; ++i) {
        p3(i, 0) = ds(i, 0);
        p3(i, 1) = ds(i, 1);
        p3(i, 2) = ds(i, 2) + ds(i, 3);
    }
    fit.u_d_abs = sinkhorn_power(p3).ds.cwiseSqrt();

    double sr = std::sqrt(fit.r2), st = std::sqrt(1.0 - fit.r2);
    fit.model_abs = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 3; ++i) {
        fit.model_abs(i, 0) = fit.u_d_abs(i, 0);
        fit.model_abs(i, 1) = fit.u_d_abs(i, 1);
        fit.model_abs(i, 2) = fit.u_d_abs(i, 2) * sr;
        fit.model_abs(i, 3) = fit.u_d_abs(i, 2) * st;
    }
    fit.model_abs(3, 2) = st;
    fit.model_abs(3, 3) = sr;
    fit.f_fit = (u_abs.transpose() * fit.model_abs).trace() / 4.0;
    return fit;
}

double extract_reflectivity(const Eigen::MatrixXd& u_abs) {
    if (u_abs.rows() != 2 || u_abs.cols() != 2)
        throw ValidationError("reflectivity extraction expects a 2x2 block");
    return u_abs(0, 0) * u_abs(0, 0);
}

TransmissionMap transmission_map(const DiagonalLoss& d_in, const DiagonalLoss& d_out) {
    TransmissionMap map;
    map.eta.resize(d_in.amp.size(), d_out.amp.size());
    for (Eigen::Index i = 0; i < d_in.amp.size(); ++i)
        for (Eigen::Index j = 0; j < d_out.amp.size(); ++j) {
            double a = d_in.amp(i) * d_out.amp(j);
            map.eta(i, j) = a * a;
        }
    map.mean = map.eta.mean();
    map.sd = entry_sd(map.eta, map.mean);
    return map;
}

McReflectivity mc_reflectivity_uncertainty(const CountMatrix& c, int draws,
                                           std::uint64_t seed, Exec exec) {
    if (draws < 2) throw ValidationError("at least two draws required");
    if (c.counts.rows() != 2 || c.counts.cols() != 2)
        throw ValidationError("reflectivity uncertainty expects the 2x2 reference block");
    if ((c.counts.array() <= 0.0).any())
        throw ValidationError("reference counts must be positive");

    std::vector<double> r(std::size_t(draws), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (int d = 0; d < draws; ++d) {
        Rng rng(mix_seed(seed, std::uint64_t(d)));
        CountMatrix resampled = c;
        for (Eigen::Index i = 0; i < c.counts.rows(); ++i)
            for (Eigen::Index j = 0; j < c.counts.cols(); ++j)
                resampled.counts(i, j) = double(rng.poisson(c.counts(i, j)));
        auto dec = decompose_losses(amplitudes_from_counts(resampled));
        r[std::size_t(d)] = extract_reflectivity(dec.u_abs);
    }
    (void)exec;

    McReflectivity mc;
    for (double v : r) mc.mean += v;
    mc.mean /= double(draws);
    double acc = 0.0;
    for (double v : r) acc += (v - mc.mean) * (v - mc.mean);
    mc.sd = std::sqrt(acc / double(draws - 1));
    mc.rel_se = mc.mean != 0.0 ? mc.sd / mc.mean : 0.0;
    return mc;
}

CharacterizationResult run_characterization(const CountMatrix& counts,
                                            const CountMatrix* reference, bool fit_model,
                                            bool phases) {
    CharacterizationResult res;
    res.t_abs = amplitudes_from_counts(counts);
    res.decomposition = decompose_losses(res.t_abs);
    res.eta = transmission_map(res.decomposition.d_in, res.decomposition.d_out);

    if (fit_model) {
        if (res.decomposition.u_abs.rows() == 4) {
            res.fit = fit_concatenated_model(res.decomposition.u_abs);
            if (res.fit->degenerate)
                res.warnings.push_back("concatenated fit degenerate: R2 pinned to 0 or 1");
        } else {
            res.warnings.push_back("concatenated fit skipped: needs a 4x4 matrix");
        }
    }

    if (phases) {
        Eigen::MatrixXd block;
        if (res.fit)
            block = res.fit->u_d_abs;
        else if (res.decomposition.u_abs.rows() == 3)
            block = res.decomposition.u_abs;
        if (block.size() == 0) {
            res.warnings.push_back("phase reconstruction skipped: no 3-mode block available");
        } else {
            // amplitude degeneracies (zeros, unclosable triangles) leave the
            // phases unconstrained; the rest of the report is still valid
            try {
                res.phases = reconstruct_phases_3mode(block, PhaseBranch::PlusIm);
                if (res.phases->unitarity > 1e-2)
                    res.warnings.push_back("reconstructed phases far from unitary");
                Eigen::MatrixXcd ideal = fourier_matrix(3).mat;
                FidelityResult best{0.0, 0.0};
                for (PhaseBranch b : {PhaseBranch::PlusIm, PhaseBranch::MinusIm}) {
                    auto rec = reconstruct_phases_3mode(block, b);
                    FidelityResult f = trace_fidelity(ideal, rec.u, 3);
                    if (f.magnitude() > best.magnitude()) best = f;
                }
                res.f_d = best.magnitude();
                res.f_d_real = best.real_part;
            } catch (const SolverError& e) {
                res.phases.reset();
                res.f_d = 0.0;
                res.f_d_real = 0.0;
                res.warnings.push_back(std::string("phase reconstruction failed: ") + e.what());
            }
        }
    }

    if (reference) {
        auto dec_ref = decompose_losses(amplitudes_from_counts(*reference));
        if (dec_ref.u_abs.rows() == 2)
            res.r1 = extract_reflectivity(dec_ref.u_abs);
        else
            res.warnings.push_back("reference reflectivity skipped: needs a 2x2 matrix");
    }
    return res;
}

}  // namespace pdist
