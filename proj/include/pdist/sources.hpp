#pragma once

#include <optional>
#include <vector>

namespace pdist {

// OBB: every error photon is distinguishable from all others.
// SBB: all error photons share one common error state.
enum class NoiseModel { OBB, SBB };

struct PhotonSourceModel {
    NoiseModel model = NoiseModel::OBB;
    std::vector<double> eps;  // per injected photon, in [0, 1]
    std::optional<double> eps_multi;
};

// One branch of the source density-matrix expansion: photon i carries
// species[i], where 0 is the good state and nonzero labels are mutually
// orthogonal error states.
struct SpeciesTerm {
    double weight = 0;
    std::vector<int> species;
};

inline constexpr int kMaxPhotons = 16;

// Exact 2^N expansion. OBB gives each bad photon a unique label (i+1),
// SBB a shared label 1. Zero-weight branches are dropped.
std::vector<SpeciesTerm> expand_species(const PhotonSourceModel& source);

}  // namespace pdist
