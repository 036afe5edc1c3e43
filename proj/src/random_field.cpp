#include "rnsa/random_field.hpp"

#include <cmath>
#include <vector>

#include "rnsa/errors.hpp"

namespace rnsa {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double GaussianSource::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // (x >> 11) + 0.5 scaled by 2^-53 keeps u strictly inside (0,1)
    const double u1 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

SpectralField random_divfree_field(LatticePtr lat, std::uint64_t seed,
                                   const SpectrumProfile& profile) {
    if (!(profile.k_min >= 0.0) || !(profile.k_max >= profile.k_min))
        throw Error("spectrum profile requires 0 <= k_min <= k_max");
    const auto& shells = lat->shells();
    double lattice_kmax = 0.0;
    for (const Shell& sh : shells) lattice_kmax = std::max(lattice_kmax, sh.lambda);
    lattice_kmax = std::sqrt(lattice_kmax);
    if (profile.k_max > lattice_kmax + 1e-12)
        throw Error("spectrum profile cutoff exceeds the lattice's retained band");

    const double lo2 = profile.k_min * profile.k_min;
    const double hi2 = profile.k_max * profile.k_max;

    std::vector<int> shell_of_idx(lat->points(), -1);
    for (std::size_t si = 0; si < shells.size(); ++si)
        for (std::size_t idx : shells[si].mode_idx) shell_of_idx[idx] = static_cast<int>(si);
    std::vector<const Mode*> mode_of_idx(lat->points(), nullptr);
    for (const Mode& m : lat->modes()) mode_of_idx[m.idx] = &m;

    SpectralField u(lat);
    GaussianSource gauss(seed);
    std::vector<double> shell_energy(shells.size(), 0.0);
    std::vector<std::uint8_t> shell_in_band(shells.size(), 0);

    // pairs are visited in canonical order through the mode list
    for (const auto& [ip, im] : lat->conj_pairs()) {
        // fixed draw count per pair regardless of band membership
        double draws[6];
        for (double& d : draws) d = gauss.next();
        const int si = shell_of_idx[ip];
        if (si < 0) continue;
        const double s = shells[si].lambda;
        if (s < lo2 - 1e-12 || s > hi2 + 1e-12) continue;
        shell_in_band[si] = 1;
        cplx g[3] = {cplx(draws[0], draws[1]), cplx(draws[2], draws[3]),
                     cplx(draws[4], draws[5])};
        // tangential part relative to nch
        const Mode& m = *mode_of_idx[ip];
        const cplx d = (m.nch[0] * g[0] + m.nch[1] * g[1] + m.nch[2] * g[2]) / s;
        g[0] -= m.nch[0] * d;
        g[1] -= m.nch[1] * d;
        g[2] -= m.nch[2] * d;
        for (int c = 0; c < 3; ++c) {
            u.c[c][ip] = g[c];
            u.c[c][im] = std::conj(g[c]);
        }
        shell_energy[si] += 2.0 * (std::norm(g[0]) + std::norm(g[1]) + std::norm(g[2]));
    }

    std::size_t populated = 0;
    for (std::size_t si = 0; si < shells.size(); ++si)
        if (shell_in_band[si]) ++populated;
    if (populated == 0) throw Error("spectrum profile selects no lattice shells");

    // flat energy per shell, then global normalization to the target amplitude
    const double per_shell = 1.0 / static_cast<double>(populated);
    for (std::size_t si = 0; si < shells.size(); ++si) {
        if (!shell_in_band[si] || shell_energy[si] == 0.0) continue;
        const double f = std::sqrt(per_shell / shell_energy[si]);
        for (std::size_t idx : shells[si].mode_idx)
            for (int c = 0; c < 3; ++c) u.c[c][idx] *= f;
    }
    const double n0 = sobolev_norm(u, 0.0);
    if (n0 > 0.0) scale(u, profile.amplitude / n0);
    return u;
}

} // namespace rnsa
