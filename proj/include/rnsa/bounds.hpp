#pragma once

#include "rnsa/lattice.hpp"

namespace rnsa {

// Inputs to the closed-form attractor estimates. The absolute constants the
// analysis leaves unspecified (c, c1..c3, c_tilde) are explicit inputs
// defaulting to 1; c4 and c5 are always derived from c1..c3.
struct BoundsInput {
    double nu = 1.0;
    double rho_h = 1.0;       // absorbing radius in H^0
    double rho_v = 1.0;       // absorbing radius in H^1
    double lambda1 = 1.0;
    double c1 = 1.0, c2 = 1.0, c3 = 1.0;
    double c_tilde = 1.0;
    double c = 1.0;           // prefactor of the attraction-rate bound
    double theta = 0.5;
    LatticePtr lattice;       // eigenvalue lookup for lambda_{N0+1}
};

struct Kvals {
    double k1, k2, k3;
};

struct MinN0 {
    double explicit_bound;    // value of the closed-form condition
    long search;              // smallest rank with delta_star < 1/8 by shell walk
};

struct DimensionBound {
    double discrete;
    double continuous;        // discrete + 1
};

struct AttractorEstimate {
    double k1, k2, k3;
    double t_star;
    double delta_star;        // at the searched N0_min
    double n0_explicit;
    long n0_min;
    double l_star;
    double db_bound;          // discrete fractal-dimension bound at n0_min
    double rate_c;
    double rate_exponent;
    double c4, c5;
    double lambda_n0_plus_1;
};

double derived_c4(const BoundsInput& b);
double derived_c5(const BoundsInput& b);

Kvals compute_k(const BoundsInput& b);
double squeeze_time(const BoundsInput& b);

// lambda_{n0+1} looked up on the lattice; throws when n0+1 exceeds the
// enumerable spectrum
double lambda_after_rank(const Lattice& lat, long n0);
double delta_star(const BoundsInput& b, long n0);

MinN0 min_n0(const BoundsInput& b);

DimensionBound dimension_bound(long n0, double l, double delta, double theta);

struct Rate {
    double rate_c;
    double rate_exponent;
};
Rate attraction_rate(const BoundsInput& b, double t_star);

double lipschitz_bound(const BoundsInput& b);   // exp(c5 rho_v^3 / (nu^{3/2} K3))

AttractorEstimate attractor_estimate(const BoundsInput& b);

} // namespace rnsa
