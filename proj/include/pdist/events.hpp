#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "pdist/sources.hpp"

namespace pdist {

using Occupation = std::vector<int>;

// All occupation vectors of n_modes modes holding n_photons photons,
// in lexicographic order of the underlying mode multiset.
std::vector<Occupation> enumerate_outcomes(int n_modes, int n_photons);

// Probability of detecting `outcome` when photon p enters mode inputs[p]
// carrying term.species[p]. Photons of one species add amplitudes
// (permanent of the selected submatrix), distinct species add
// probabilities over all ways of splitting the outcome between them.
double event_probability(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                         const SpeciesTerm& term, const Occupation& outcome);

// Joint probability of `outcome` with at least one bad photon in `mode`.
double event_probability_bad_at(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                                const SpeciesTerm& term, const Occupation& outcome, int mode);

// Probability of `outcome` for the coherent state sum_k coeffs[k] |bad at
// input k, good photons at every other input>. The bad photon is
// orthogonal to the goods but the position register interferes.
double coherent_one_bad_probability(const Eigen::MatrixXcd& t, const std::vector<int>& inputs,
                                    const Eigen::VectorXcd& coeffs, const Occupation& outcome);

enum class Exec { Serial, Parallel };

// Distribution over the first n_phys modes of `t_full`, marginalized over
// the remaining (loss) modes, for a mixture of species terms.
std::map<Occupation, double> physical_marginals(const Eigen::MatrixXcd& t_full,
                                                const std::vector<int>& inputs,
                                                const std::vector<SpeciesTerm>& terms,
                                                int n_phys, Exec exec = Exec::Parallel);

}  // namespace pdist
