#pragma once

#include <cstdint>

#include "rnsa/fft.hpp"

namespace rnsa {

struct AlphaParam {
    double alpha = 0.0;        // filter length, alpha = 0 recovers the unfiltered system
};

struct CoriolisParam {
    double f = 0.0;            // rotation rate about the x3 axis
};

// Stokes operator: multiplication by |nch|^2 on each retained mode.
void stokes_apply(SpectralField& u);
SpectralField stokes_applied(const SpectralField& u);

// Inverse Helmholtz filter: multiplication by 1/(1 + alpha^2 |nch|^2).
void helmholtz_inverse(SpectralField& u, AlphaParam ap);
SpectralField helmholtz_inverted(const SpectralField& u, AlphaParam ap);

// f * P_n J P_n applied to the filtered field, J = rotation generator about x3.
SpectralField coriolis_apply(const SpectralField& u, CoriolisParam cp, AlphaParam ap,
                             bool filter_argument = true);

// B_alpha(u,v) = P_L[(R_alpha u . grad) v + v_j grad (R_alpha u)_j], evaluated
// pseudospectrally in the rotational form P_L[(curl v) x (R_alpha u)] on the
// 2/3-dealiased mode set. Output is projected and Hermitian-symmetrized.
SpectralField bilinear(FftWorkspace& ws, const SpectralField& u, const SpectralField& v,
                       AlphaParam ap);

// Direct convolution over retained triads of the literal advection + gradient
// form. Quadratic in the retained mode count; refuses lattices whose retained
// set exceeds the guard (defaults sized for 12^3 grids).
SpectralField bilinear_oracle(const SpectralField& u, const SpectralField& v,
                              AlphaParam ap, std::size_t mode_guard = 1000);

struct EigenvalueShell {
    double lambda;
    long dof;                  // divergence-free scalar dof, 2 per wave vector
    long cum_dof;
};

// Distinct |nch|^2 values over nonzero retained modes, ascending, with
// multiplicities; at most max_count entries (0 = all).
std::vector<EigenvalueShell> stokes_eigenvalues(const Lattice& lat, std::size_t max_count = 0);

struct ProjectionSplit {
    SpectralField low;         // whole shells up to the effective rank
    SpectralField high;
    long requested_rank;
    long effective_rank;       // rank rounded up to a shell boundary
    double lambda_next;        // eigenvalue of the first shell beyond the cut, 0 if none
};

// Rank-N0 spectral projection by whole eigenvalue shells. low + high == u
// bitwise; the split never divides a shell.
ProjectionSplit spectral_projection(const SpectralField& u, long n0);

struct BilinearConstants {
    double c_emp = 0.0;        // sup ||B(V,W)||_s / (||V||_s ||W||_{s+1})
    double d_emp = 0.0;        // sup |<B(V,W), A^s W>| / (||V||_s ||W||_s^2)
    double d_emp_variant = 0.0;// same pairing over ||V||_s ||W||_s ||W||_{s+1}
    int samples = 0;
    int skipped = 0;           // degenerate denominators
};

// Empirical bilinear-estimate constants at index s from seeded random field
// pairs with flat energy up to half the dealias cutoff.
BilinearConstants estimate_bilinear_constants(FftWorkspace& ws, double s, AlphaParam ap,
                                              int samples, std::uint64_t seed);

} // namespace rnsa
