#include "rnsa/bounds.hpp"

#include <cmath>

#include "rnsa/errors.hpp"

namespace rnsa {

namespace {

void validate(const BoundsInput& b) {
    if (!(b.nu > 0.0) || !(b.rho_h > 0.0) || !(b.rho_v >= 0.0) || !(b.lambda1 > 0.0))
        throw Error("bounds input requires positive nu, rho_h, lambda1 and nonnegative rho_v");
    if (!(b.c1 > 0.0) || !(b.c2 > 0.0) || !(b.c3 > 0.0) || !(b.c_tilde > 0.0) || !(b.c > 0.0))
        throw Error("bounds constants must be positive");
}

} // namespace

double derived_c4(const BoundsInput& b) {
    return 0.5 * (1.0 - std::exp(-b.c3 * b.c3 / b.c2));
}

double derived_c5(const BoundsInput& b) {
    const double c1_4 = b.c1 * b.c1 * b.c1 * b.c1;
    return (27.0 / 16.0) * c1_4 * b.c3 * b.c3 * b.c2 * b.c2;
}

Kvals compute_k(const BoundsInput& b) {
    validate(b);
    const double c1_4 = b.c1 * b.c1 * b.c1 * b.c1;
    const double rv2 = b.rho_v * b.rho_v;
    const double rv4 = rv2 * rv2;
    const double rv6 = rv4 * rv2;
    const double nu3 = b.nu * b.nu * b.nu;
    const double c3_4 = b.c3 * b.c3 * b.c3 * b.c3;
    Kvals k;
    k.k1 = c1_4 * rv4;
    k.k2 = b.c2 * b.rho_v;
    k.k3 = std::sqrt(27.0 * c3_4 * rv6 / (2.0 * nu3) + 2.0 * b.rho_h / (b.nu * b.lambda1));
    return k;
}

double squeeze_time(const BoundsInput& b) {
    const Kvals k = compute_k(b);
    if (!(k.k2 > 0.0) || !(k.k3 > 0.0))
        throw Error("squeeze time undefined: K2 or K3 vanished (rho_v = 0?)");
    return (b.c3 * b.c3 / b.c2) * std::pow(b.nu, 1.5) / (k.k2 * k.k3);
}

double lambda_after_rank(const Lattice& lat, long n0) {
    if (n0 < 0) throw Error("rank must be nonnegative");
    for (const Shell& sh : lat.shells())
        if (sh.cum_dof >= n0 + 1) return sh.lambda;
    throw Error("rank search exhausts the lattice's enumerable spectrum");
}

double delta_star(const BoundsInput& b, long n0) {
    validate(b);
    if (!b.lattice) throw Error("delta_star needs a lattice for the eigenvalue lookup");
    const Kvals k = compute_k(b);
    if (!(k.k3 > 0.0) || !(b.rho_v > 0.0))
        throw Error("delta_star undefined for vanishing K3 or rho_v");
    const double lam = lambda_after_rank(*b.lattice, n0);
    const double c4 = derived_c4(b);
    const double c5 = derived_c5(b);
    const double nu52 = std::pow(b.nu, 2.5);
    const double nu32 = std::pow(b.nu, 1.5);
    const double rv3 = b.rho_v * b.rho_v * b.rho_v;
    return std::exp(-(c4 / b.c2) * lam * nu52 / (k.k3 * b.rho_v) + c5 * rv3 / (nu32 * k.k3));
}

MinN0 min_n0(const BoundsInput& b) {
    validate(b);
    if (!b.lattice) throw Error("min_n0 needs a lattice for the shell search");
    MinN0 out{};
    const double nu3 = b.nu * b.nu * b.nu;
    const double arg1 = std::pow(b.rho_h * b.rho_v, 1.5) / (std::pow(b.lambda1, 0.75) * nu3);
    const double arg2 = std::pow(b.rho_v, 6.0) / (std::pow(b.lambda1, 1.5) * nu3 * nu3);
    out.explicit_bound = std::pow(b.c_tilde, 1.5) * std::max(arg1, arg2);

    out.search = -1;
    const auto& shells = b.lattice->shells();
    // delta_star is constant between shell boundaries, so only those ranks matter
    long prev_rank = 0;
    for (std::size_t si = 0; si <= shells.size(); ++si) {
        const long rank = si == 0 ? 0 : shells[si - 1].cum_dof;
        if (si > 0 && rank == prev_rank) continue;
        prev_rank = rank;
        double ds;
        try {
            ds = delta_star(b, rank);
        } catch (const Error&) {
            break;   // ran past the last shell's lambda lookup
        }
        if (ds < 0.125) {
            out.search = rank;
            return out;
        }
    }
    throw Error("delta_star search exhausts the lattice spectrum without reaching 1/8");
}

DimensionBound dimension_bound(long n0, double l, double delta, double theta) {
    if (!(delta > 0.0) || !(delta < 0.25)) throw Error("delta must lie in (0, 1/4)");
    if (!(theta >= 4.0 * delta) || !(theta < 1.0))
        throw Error("theta must lie in [4 delta, 1)");
    if (n0 < 0 || !(l >= 0.0)) throw Error("dimension bound needs n0 >= 0 and L >= 0");
    const double ratio = std::log(2.0 * l / delta + 1.0) / std::log(1.0 / theta);
    DimensionBound d;
    d.discrete = static_cast<double>(n0) * std::max(1.0, ratio);
    d.continuous = d.discrete + 1.0;
    return d;
}

Rate attraction_rate(const BoundsInput& b, double t_star) {
    if (!(t_star > 0.0)) throw Error("attraction rate needs t_star > 0");
    Rate r;
    r.rate_exponent = std::log(8.0) / t_star;
    r.rate_c = b.c * lipschitz_bound(b);
    return r;
}

double lipschitz_bound(const BoundsInput& b) {
    const Kvals k = compute_k(b);
    if (!(k.k3 > 0.0)) throw Error("Lipschitz bound undefined for vanishing K3");
    const double rv3 = b.rho_v * b.rho_v * b.rho_v;
    return std::exp(derived_c5(b) * rv3 / (std::pow(b.nu, 1.5) * k.k3));
}

AttractorEstimate attractor_estimate(const BoundsInput& b) {
    AttractorEstimate e{};
    const Kvals k = compute_k(b);
    e.k1 = k.k1;
    e.k2 = k.k2;
    e.k3 = k.k3;
    e.t_star = squeeze_time(b);
    const MinN0 mn = min_n0(b);
    e.n0_explicit = mn.explicit_bound;
    e.n0_min = mn.search;
    e.delta_star = delta_star(b, mn.search);
    e.lambda_n0_plus_1 = lambda_after_rank(*b.lattice, mn.search);
    e.l_star = lipschitz_bound(b);
    e.c4 = derived_c4(b);
    e.c5 = derived_c5(b);
    e.db_bound = dimension_bound(mn.search, e.l_star, e.delta_star, b.theta).discrete;
    const Rate r = attraction_rate(b, e.t_star);
    e.rate_c = r.rate_c;
    e.rate_exponent = r.rate_exponent;
    return e;
}

} // namespace rnsa
