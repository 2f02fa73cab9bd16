#include "pdist/sources.hpp"

#include "pdist/errors.hpp"

namespace pdist {

std::vector<SpeciesTerm> expand_species(const PhotonSourceModel& source) {
    const int n = int(source.eps.size());
    if (n < 1) throw ValidationError("source model has no photons");
    if (n > kMaxPhotons) throw ValidationError("source model exceeds the photon limit");
    for (double e : source.eps)
        if (!(e >= 0.0 && e <= 1.0))
            throw ValidationError("photon error rate outside [0, 1]");

    std::vector<SpeciesTerm> terms;
    terms.reserve(std::size_t(1) << n);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double w = 1.0;
        std::vector<int> species(n, 0);
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                w *= source.eps[i];
                species[i] = source.model == NoiseModel::OBB ? i + 1 : 1;
            } else {
                w *= 1.0 - source.eps[i];
            }
        }
        if (w > 0.0) terms.push_back({w, std::move(species)});
    }
    return terms;
}

}  // namespace pdist
