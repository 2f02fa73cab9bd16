#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdist/events.hpp"
#include "pdist/matrix.hpp"

namespace pdist {

struct CountMatrix {
    Eigen::MatrixXd counts;  // rows = injected input, cols = detected output
    long long s_norm = 0;    // source excitations per input setting
    double duration_s = 0;
};

// CSV with `# s_norm=<integer>` in the leading comments, then an integer
// grid, one row per input mode.
CountMatrix load_count_csv(const std::string& path);

// |T_ij| = sqrt(S_ij / s_norm).
Eigen::MatrixXd amplitudes_from_counts(const CountMatrix& c);

struct LossDecomposition {
    DiagonalLoss d_in, d_out;
    Eigen::MatrixXd u_abs;  // |U|, with |U|^2 doubly stochastic
    int iterations = 0;
    double residual = 0;
};

// T = D_in |U| D_out by iterative proportional scaling of |T|^2 until
// |U|^2 is doubly stochastic within 1e-12 (at most 1e4 sweeps). The
// scalar gauge freedom between D_in and D_out is fixed by damping the row
// updates (exponent 0.518); this matches the split of the bundled
// reference decomposition and leaves the doubly stochastic limit and all
// gauge-invariant outputs untouched. Throws SolverError on
// non-convergence, with the residual attached.
LossDecomposition decompose_losses(const Eigen::MatrixXd& t_abs);

enum class PhaseBranch { PlusIm, MinusIm };  // sign of Im at entry (2,3), 1-based

struct PhaseReconstruction {
    Eigen::MatrixXcd u;
    double unitarity = 0;  // max |U^dagger U - I|
};

// Fixes the nine phases of a 3-mode unitary from its amplitudes: first
// row and column real nonnegative, the rest from row/column orthogonality
// triangles. The two branches are complex conjugates; PlusIm reproduces
// the bundled reference matrix. Throws SolverError when an amplitude
// triangle cannot close (the violating triple is named).
PhaseReconstruction reconstruct_phases_3mode(const Eigen::MatrixXd& u_abs,
                                             PhaseBranch branch = PhaseBranch::PlusIm);

struct ConcatenatedFit {
    double r2 = 0;               // beam-splitter reflectivity on modes 3,4
    Eigen::MatrixXd u_d_abs;     // renormalized 3x3 distillation block
    Eigen::MatrixXd model_abs;   // 4x4 model amplitudes
    double f_fit = 0;            // (1/4) tr(|U|^T |model|)
    bool degenerate = false;     // R2 pinned to 0 or 1
};

// Fits |U| ~ (3-mode block on 1-3) followed by a variable beam splitter
// on modes 3,4; R2 from least squares on the fourth row, the 3x3 block
// from quadrature-summing columns 3,4 and rescaling to doubly stochastic.
ConcatenatedFit fit_concatenated_model(const Eigen::MatrixXd& u_abs);

// R = |u_11|^2 of a doubly stochastic 2x2 amplitude block.
double extract_reflectivity(const Eigen::MatrixXd& u_abs);

struct TransmissionMap {
    Eigen::MatrixXd eta;  // eta_ij = (d_in_i * d_out_j)^2
    double mean = 0;
    double sd = 0;
};

TransmissionMap transmission_map(const DiagonalLoss& d_in, const DiagonalLoss& d_out);

struct McReflectivity {
    double mean = 0;
    double sd = 0;
    double rel_se = 0;
};

// Poisson-resamples the counts and reruns the decomposition chain.
McReflectivity mc_reflectivity_uncertainty(const CountMatrix& c, int draws,
                                           std::uint64_t seed, Exec exec = Exec::Parallel);

struct CharacterizationResult {
    Eigen::MatrixXd t_abs;
    LossDecomposition decomposition;
    TransmissionMap eta;
    std::optional<ConcatenatedFit> fit;
    std::optional<PhaseReconstruction> phases;  // PlusIm branch
    double f_d = 0;        // max over conjugate branches of |tr(F3^dagger U)|/3
    double f_d_real = 0;   // real part for the reported branch
    std::optional<double> r1;  // from the reference count matrix
    std::vector<std::string> warnings;
};

CharacterizationResult run_characterization(const CountMatrix& counts,
                                            const CountMatrix* reference,
                                            bool fit_model, bool phases);

}  // namespace pdist
