#pragma once

#include <array>
#include <complex>
#include <vector>

#include "rnsa/lattice.hpp"

namespace rnsa {

using cplx = std::complex<double>;

// Divergence-free velocity in Fourier space: three component arrays over the
// full grid, nonzero only on the retained mode set, Hermitian-symmetric,
// mean mode pinned to zero.
struct SpectralField {
    LatticePtr lat;
    std::array<std::vector<cplx>, 3> c;

    SpectralField() = default;
    explicit SpectralField(LatticePtr l) : lat(std::move(l)) {
        for (auto& v : c) v.assign(lat->points(), cplx(0.0, 0.0));
    }
    void set_zero() {
        for (auto& v : c) std::fill(v.begin(), v.end(), cplx(0.0, 0.0));
    }
};

struct PhysicalField {
    LatticePtr lat;
    std::array<std::vector<double>, 3> g;

    PhysicalField() = default;
    explicit PhysicalField(LatticePtr l) : lat(std::move(l)) {
        for (auto& v : g) v.assign(lat->points(), 0.0);
    }
};

// in-place linear algebra over full storage
void axpy(SpectralField& y, double alpha, const SpectralField& x);   // y += alpha*x
void scale(SpectralField& u, double alpha);
SpectralField added(const SpectralField& a, const SpectralField& b);
SpectralField subtracted(const SpectralField& a, const SpectralField& b);
SpectralField scaled(const SpectralField& u, double alpha);

// per-mode removal of the component parallel to nch, with a residual snap that
// makes a second application bitwise a no-op; zeroes the mean mode
void leray_project(SpectralField& u);

// averages conjugate mode pairs so u(-n) == conj(u(n)) holds bitwise
void hermitian_symmetrize(SpectralField& u);
bool is_hermitian(const SpectralField& u);

// zeroes every coefficient outside the retained set
void apply_dealias_mask(SpectralField& u);

// sqrt of sum over modes of |nch|^(2s) |u_n|^2, compensated summation in
// canonical mode order; s = 0 weight at the mean mode is 0 by convention
double sobolev_norm(const SpectralField& u, double s);
double inner_product(const SpectralField& u, const SpectralField& v, double s);

// max_n |nch . u_n| / ||u||_0, 0 for the zero field
double divergence_residual(const SpectralField& u);

struct KahanSum {
    double s = 0.0, carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = s + y;
        carry = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

} // namespace rnsa
