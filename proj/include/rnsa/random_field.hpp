#pragma once

#include <cstdint>
#include <random>

#include "rnsa/field.hpp"

namespace rnsa {

// Stream derivation: one master seed fans out to independent component seeds
// via a SplitMix64 mix of master + (stream+1)*golden. Stream indices are fixed
// constants documented where they are used, so any component can be
// regenerated in isolation.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic Gaussian draws: mt19937_64 bit stream (specified by the
// standard) plus an explicit Box-Muller transform, avoiding the
// implementation-defined std::normal_distribution.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}
    double next();

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SpectrumProfile {
    double k_min = 1.0;        // in |nch|
    double k_max = 2.5;
    double amplitude = 1.0;    // resulting H^0 norm
};

// Random divergence-free, Hermitian, zero-mean field: independent complex
// Gaussian 3-vectors per conjugate pair inside [k_min, k_max], projected onto
// the plane normal to nch, rescaled to flat energy per eigenvalue shell, then
// normalized so the H^0 norm equals amplitude. Draw count per mode is fixed,
// so the field is a pure function of (seed, profile, lattice).
SpectralField random_divfree_field(LatticePtr lat, std::uint64_t seed,
                                   const SpectrumProfile& profile);

} // namespace rnsa
