#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "rnsa/errors.hpp"
#include "rnsa/fft.hpp"
#include "rnsa/random_field.hpp"

using namespace rnsa;

namespace {

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.c[c].size(); ++i)
            m = std::max(m, std::abs(a.c[c][i] - b.c[c][i]));
    return m;
}

// set u(n) = val, u(-n) = conj(val) on one component
void set_pair(SpectralField& u, int comp, std::array<int, 3> n, cplx val) {
    const Lattice& lat = *u.lat;
    const std::size_t ip = lat.index_of(lat.slot_of(n[0], 0), lat.slot_of(n[1], 1),
                                        lat.slot_of(n[2], 2));
    const std::size_t im = lat.index_of(lat.slot_of(-n[0], 0), lat.slot_of(-n[1], 1),
                                        lat.slot_of(-n[2], 2));
    u.c[comp][ip] = val;
    u.c[comp][im] = std::conj(val);
}

} // namespace

TEST_CASE("lattice enumeration on the unit 8^3 box") {
    LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
    CHECK(lat->points() == 512);
    CHECK(lat->kmax[0] == 2);   // min(floor(2/3*4), 3)
    CHECK(lat->modes().size() == 125);
    CHECK(lat->lambda1() == 1.0);

    // shell multiplicities by hand: lambda -> wave-vector count
    const std::map<double, long> expect = {{1, 6},  {2, 12}, {3, 8},  {4, 6}, {5, 24},
                                           {6, 24}, {8, 12}, {9, 24}, {12, 8}};
    const auto& shells = lat->shells();
    REQUIRE(shells.size() == expect.size());
    long cum = 0;
    double prev = 0.0;
    for (const auto& sh : shells) {
        auto it = expect.find(sh.lambda);
        REQUIRE(it != expect.end());
        CHECK(sh.dof == 2 * it->second);
        CHECK(sh.lambda > prev);
        prev = sh.lambda;
        cum += sh.dof;
        CHECK(sh.cum_dof == cum);
    }
    CHECK(lat->total_dof() == 2 * 124);

    // canonical order is lexicographic in (n1, n2, n3)
    const auto& modes = lat->modes();
    for (std::size_t i = 1; i < modes.size(); ++i)
        CHECK(modes[i - 1].n < modes[i].n);
}

TEST_CASE("anisotropic box rescales wave vectors") {
    LatticePtr lat = make_lattice({1, 2, 1}, {8, 8, 8});
    CHECK(lat->lambda1() == 0.25);
    bool found = false;
    for (const Mode& m : lat->modes())
        if (m.n == std::array<int, 3>{0, 1, 0}) {
            found = true;
            CHECK(m.nch[0] == 0.0);
            CHECK(m.nch[1] == 0.5);
            CHECK(m.nch[2] == 0.0);
            CHECK(m.s == 0.25);
        }
    CHECK(found);
}

TEST_CASE("lattice validation") {
    CHECK_THROWS_AS(make_lattice({1, 1, 1}, {7, 8, 8}), LatticeError);
    CHECK_THROWS_AS(make_lattice({1, 1, 1}, {2, 8, 8}), LatticeError);
    CHECK_THROWS_AS(make_lattice({1, 0.0, 1}, {8, 8, 8}), LatticeError);
    CHECK_THROWS_AS(make_lattice({1, 1, 1}, {8, 8, 8}, 0.8), LatticeError);
    CHECK_THROWS_AS(make_lattice({2, 1, 1}, {8, 8, 8}), LatticeError);
    CHECK_NOTHROW(make_lattice({2, 1, 1}, {8, 8, 8}, 2.0 / 3.0, true));
}

TEST_CASE("sobolev norms on hand-built fields") {
    LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
    SpectralField u(lat);
    set_pair(u, 1, {1, 0, 0}, cplx(1.0, 0.0));
    CHECK(sobolev_norm(u, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(sobolev_norm(u, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    SpectralField w(lat);
    set_pair(w, 2, {2, 0, 0}, cplx(1.0, 0.0));
    CHECK(sobolev_norm(w, 1.0) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
    CHECK(sobolev_norm(w, 2.0) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-15));

    // mean mode carries no weight at any s
    SpectralField z(lat);
    z.c[0][lat->zero_mode_idx()] = cplx(5.0, 0.0);
    CHECK(sobolev_norm(z, 0.0) == 0.0);
    CHECK(sobolev_norm(z, 2.0) == 0.0);
}

TEST_CASE("inner product against a direct-sum oracle") {
    LatticePtr lat = make_lattice({1, 2, 1}, {8, 8, 8});
    SpectralField u = random_divfree_field(lat, 101, {0.3, 1.8, 1.0});
    SpectralField v = random_divfree_field(lat, 102, {0.3, 1.8, 0.7});
    for (double s : {0.0, 1.0, 2.6}) {
        // reverse-order plain sum, independent of the library's reduction
        double acc = 0.0;
        const auto& modes = lat->modes();
        for (std::size_t k = modes.size(); k-- > 0;) {
            const Mode& m = modes[k];
            if (m.s == 0.0) continue;
            double dot = 0.0;
            for (int c = 0; c < 3; ++c)
                dot += (u.c[c][m.idx] * std::conj(v.c[c][m.idx])).real();
            acc += std::pow(m.s, s) * dot;
        }
        CHECK(inner_product(u, v, s) == doctest::Approx(acc).epsilon(1e-12));
        const double n = sobolev_norm(u, s);
        CHECK(inner_product(u, u, s) == doctest::Approx(n * n).epsilon(1e-12));
    }
}

TEST_CASE("transform round trip and Parseval") {
    LatticePtr lat = make_lattice({1, 1, 1}, {16, 16, 16});
    FftWorkspace ws(lat);
    SpectralField u = random_divfree_field(lat, 7, {1.0, 4.0, 1.0});
    PhysicalField g = to_physical(ws, u);
    SpectralField back = to_spectral(ws, g);
    apply_dealias_mask(back);
    CHECK(max_coeff_diff(back, u) <= 1e-13 * sobolev_norm(u, 0.0));

    KahanSum acc;
    for (int c = 0; c < 3; ++c)
        for (double x : g.g[c]) acc.add(x * x);
    const double phys = acc.value() / static_cast<double>(lat->points());
    const double spec = sobolev_norm(u, 0.0);
    CHECK(phys == doctest::Approx(spec * spec).epsilon(1e-12));
}

TEST_CASE("leray projection is bitwise idempotent") {
    LatticePtr lat = make_lattice({1, 2, 1}, {8, 8, 8});
    SpectralField u = random_divfree_field(lat, 31, {0.3, 1.8, 1.0});

    SUBCASE("random solenoidal field plus gradient noise") {
        for (const Mode& m : lat->modes()) {
            if (m.s == 0.0) continue;
            const cplx phi(0.4 * std::sin(0.1 * static_cast<double>(m.idx)), 0.2);
            for (int c = 0; c < 3; ++c) u.c[c][m.idx] += phi * m.nch[c];
        }
        hermitian_symmetrize(u);
    }
    SUBCASE("adversarial near-gradient field") {
        u.set_zero();
        for (const Mode& m : lat->modes()) {
            if (m.s == 0.0) continue;
            for (int c = 0; c < 3; ++c)
                u.c[c][m.idx] = cplx(m.nch[c], -0.5 * m.nch[c]) +
                                cplx(1e-13 * (c == 1), 0.0);
        }
        hermitian_symmetrize(u);
    }

    SpectralField p1 = u;
    leray_project(p1);
    SpectralField p2 = p1;
    leray_project(p2);
    CHECK(max_coeff_diff(p1, p2) == 0.0);
    CHECK(divergence_residual(p1) <= 1e-13);
}

TEST_CASE("pure gradients project to exactly zero") {
    LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
    SpectralField u(lat);
    for (const Mode& m : lat->modes()) {
        if (m.s == 0.0) continue;
        const cplx phi(1.0 / (1.0 + m.s), 0.25 * m.s);
        for (int c = 0; c < 3; ++c) u.c[c][m.idx] = phi * m.nch[c];
    }
    hermitian_symmetrize(u);
    leray_project(u);
    for (int c = 0; c < 3; ++c)
        for (const cplx& z : u.c[c]) CHECK(z == cplx(0.0, 0.0));
}

TEST_CASE("projection leaves a solenoidal field essentially unchanged") {
    LatticePtr lat = make_lattice({1, 1, 1}, {16, 16, 16});
    SpectralField u = random_divfree_field(lat, 77, {1.0, 4.0, 2.0});
    SpectralField p = u;
    leray_project(p);
    CHECK(max_coeff_diff(p, u) <= 1e-14 * sobolev_norm(u, 0.0));
}

TEST_CASE("hermitian symmetry handling") {
    LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
    SpectralField u(lat);
    // deliberately asymmetric
    const std::size_t ip = lat->index_of(lat->slot_of(1, 0), 0, 0);
    u.c[0][ip] = cplx(1.0, 2.0);
    CHECK_FALSE(is_hermitian(u));
    hermitian_symmetrize(u);
    CHECK(is_hermitian(u));
    SpectralField v = u;
    hermitian_symmetrize(v);
    CHECK(max_coeff_diff(u, v) == 0.0);

    // a symmetric field synthesizes to a real grid function; the imaginary
    // parts discarded by the transform are zero
    FftWorkspace ws(lat);
    SpectralField r = random_divfree_field(lat, 5, {1.0, 2.5, 1.0});
    PhysicalField g = to_physical(ws, r);
    SpectralField round = to_spectral(ws, g);
    apply_dealias_mask(round);
    CHECK(max_coeff_diff(round, r) <= 1e-13);
}

TEST_CASE("random fields are reproducible, solenoidal, and normalized") {
    LatticePtr lat = make_lattice({1, 1, 1}, {16, 16, 16});
    const SpectrumProfile prof{1.0, 2.5, 1.0};
    SpectralField a = random_divfree_field(lat, 1234, prof);
    SpectralField b = random_divfree_field(lat, 1234, prof);
    CHECK(max_coeff_diff(a, b) == 0.0);

    SpectralField c = random_divfree_field(lat, 1235, prof);
    CHECK(max_coeff_diff(a, c) > 0.0);

    CHECK(sobolev_norm(a, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(divergence_residual(a) <= 1e-13);
    CHECK(is_hermitian(a));
    for (int comp = 0; comp < 3; ++comp)
        CHECK(a.c[comp][lat->zero_mode_idx()] == cplx(0.0, 0.0));

    // band limits respected
    for (const Mode& m : lat->modes()) {
        if (m.s == 0.0) continue;
        const double k = std::sqrt(m.s);
        if (k < prof.k_min - 1e-12 || k > prof.k_max + 1e-12)
            for (int comp = 0; comp < 3; ++comp) CHECK(a.c[comp][m.idx] == cplx(0.0, 0.0));
    }

    CHECK_THROWS_AS(random_divfree_field(lat, 1, SpectrumProfile{50.0, 60.0, 1.0}), Error);
}

TEST_CASE("seed derivation separates streams") {
    const std::uint64_t m = 42;
    CHECK(derive_seed(m, 0) != derive_seed(m, 1));
    CHECK(derive_seed(m, 0) != derive_seed(m + 1, 0));
    CHECK(derive_seed(m, 7) == derive_seed(m, 7));
}

TEST_CASE("gaussian source is deterministic with sane moments") {
    GaussianSource g1(9), g2(9);
    double mean = 0.0, var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g1.next();
        CHECK(x == g2.next());
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("compensated summation beats naive accumulation") {
    KahanSum k;
    double naive = 0.0;
    k.add(1e16);
    naive += 1e16;
    for (int i = 0; i < 10000; ++i) {
        k.add(1.0);
        naive += 1.0;
    }
    k.add(-1e16);
    naive += -1e16;
    CHECK(k.value() == 10000.0);
    CHECK(naive != 10000.0);
}

TEST_CASE("dealias mask zeroes outside the retained set") {
    LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
    SpectralField u(lat);
    for (int c = 0; c < 3; ++c)
        std::fill(u.c[c].begin(), u.c[c].end(), cplx(1.0, -1.0));
    apply_dealias_mask(u);
    const auto& mask = lat->retained_mask();
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i])
                CHECK(u.c[c][i] == cplx(1.0, -1.0));
            else
                CHECK(u.c[c][i] == cplx(0.0, 0.0));
        }
}
