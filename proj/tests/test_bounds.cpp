#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rnsa/bounds.hpp"
#include "rnsa/errors.hpp"

using namespace rnsa;

namespace {

// reference point: every knob at its default (radii, constants, nu all one)
BoundsInput ref_input() { return BoundsInput{}; }

} // namespace

TEST_CASE("closed-form constants at the reference point") {
    // values cross-checked once against a 50-digit decimal evaluation of the
    // same formulas and frozen here
    BoundsInput b = ref_input();
    Kvals k = compute_k(b);
    CHECK(k.k1 == 1.0);                      // c1^4 rho_v^4
    CHECK(k.k2 == 1.0);                      // c2 rho_v
    CHECK(std::abs(k.k3 - 3.9370039370059056) <= 1e-12 * k.k3);
    // sqrt(27 / 2 + 2) = sqrt(15.5)
    CHECK(k.k3 == doctest::Approx(std::sqrt(15.5)).epsilon(1e-14));

    const double ts = squeeze_time(b);
    CHECK(std::abs(ts - 0.25400025400038101) <= 1e-12 * ts);

    CHECK(std::abs(derived_c4(b) - 0.31606027941427883) <= 1e-12);
    CHECK(derived_c5(b) == 1.6875);          // 27/16
}

TEST_CASE("squeezing factor against frozen digits") {
    BoundsInput b = ref_input();
    // delta_star depends on the rank only through lambda_{N0+1}: rank 1476 on
    // the 16-cubed lattice sits just below the lambda = 32 shell, rank 0 below
    // lambda = 1
    b.lattice = make_lattice({1, 1, 1}, {16, 16, 16});
    REQUIRE(lambda_after_rank(*b.lattice, 1476) == 32.0);
    const double d32 = delta_star(b, 1476);
    const double d1 = delta_star(b, 0);
    CHECK(std::abs(d32 - 0.11761777683303878) <= 1e-12);
    CHECK(std::abs(d1 - 1.4167224038310187) <= 1e-12 * d1);
}

TEST_CASE("lipschitz factor and attraction rate against frozen digits") {
    BoundsInput b = ref_input();
    const double l = lipschitz_bound(b);
    CHECK(std::abs(l - 1.5351459049790988) <= 1e-12 * l);

    Rate r = attraction_rate(b, squeeze_time(b));
    CHECK(std::abs(r.rate_exponent - 8.1867695363671444) <= 1e-12 * r.rate_exponent);
    CHECK(r.rate_c == b.c * l);
}

TEST_CASE("box-counting dimension bound") {
    DimensionBound d = dimension_bound(1, 1.0, 0.125, 0.5);
    // log2(2 * 1 / 0.125 + 1) = log2(17)
    CHECK(std::abs(d.discrete - 4.0874628412503391) <= 1e-12 * d.discrete);
    CHECK(d.continuous == doctest::Approx(d.discrete + 1.0).epsilon(1e-15));
    // the max with one engages for tiny L / delta
    DimensionBound one = dimension_bound(3, 1e-6, 0.12, 0.5);
    CHECK(one.discrete == 3.0);
}

TEST_CASE("full estimate on the 16-cubed lattice against frozen digits") {
    BoundsInput b = ref_input();
    b.lattice = make_lattice({1, 1, 1}, {16, 16, 16});
    AttractorEstimate est = attractor_estimate(b);
    CHECK(est.k1 == 1.0);
    CHECK(est.k2 == 1.0);
    CHECK(std::abs(est.k3 - 3.9370039370059056) <= 1e-12 * est.k3);
    CHECK(std::abs(est.t_star - 0.25400025400038101) <= 1e-12 * est.t_star);
    CHECK(est.n0_min == 1476);
    CHECK(est.lambda_n0_plus_1 == 32.0);
    CHECK(est.delta_star < 0.125);
    CHECK(std::abs(est.delta_star - 0.11761777683303878) <= 1e-12);
    CHECK(std::abs(est.db_bound - 7026.398637924963) <= 1e-9 * est.db_bound);
    CHECK(std::abs(est.l_star - 1.5351459049790988) <= 1e-12 * est.l_star);
    CHECK(std::abs(est.rate_exponent - 8.1867695363671444) <= 1e-12 * est.rate_exponent);
    // at the all-ones reference both branches of the explicit condition are 1
    CHECK(est.n0_explicit == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("monotone responses to the physical inputs") {
    BoundsInput lo = ref_input();
    BoundsInput hi = ref_input();
    hi.rho_v = 2.0 * lo.rho_v;
    hi.rho_h = 2.0 * lo.rho_h;

    Kvals klo = compute_k(lo), khi = compute_k(hi);
    CHECK(khi.k1 == 16.0 * klo.k1);          // quartic homogeneity
    CHECK(khi.k2 == 2.0 * klo.k2);
    CHECK(khi.k3 > klo.k3);

    CHECK(squeeze_time(hi) < squeeze_time(lo));

    lo.lattice = make_lattice({1, 1, 1}, {16, 16, 16});
    hi.lattice = lo.lattice;
    CHECK(delta_star(hi, 1476) > delta_star(lo, 1476));
    CHECK(delta_star(lo, 1476) < delta_star(lo, 0));
    CHECK(lipschitz_bound(hi) > lipschitz_bound(lo));

    // higher viscosity squeezes harder
    BoundsInput thick = ref_input();
    thick.nu = 2.0;
    thick.lattice = lo.lattice;
    CHECK(delta_star(thick, 1476) < delta_star(lo, 1476));

    // with the H^0 radius kept negligible the sixth-power branch of the
    // explicit rank condition is the active one, so doubling rho_v scales it
    // by exactly 2^6; nu = 4 keeps the shell search inside the spectrum
    BoundsInput elo = ref_input();
    elo.nu = 4.0;
    elo.rho_h = 0.01;
    elo.lattice = lo.lattice;
    BoundsInput ehi = elo;
    ehi.rho_v = 2.0;
    MinN0 mlo = min_n0(elo), mhi = min_n0(ehi);
    CHECK(mhi.explicit_bound == doctest::Approx(64.0 * mlo.explicit_bound).epsilon(1e-12));
    CHECK(mhi.search >= mlo.search);
}

TEST_CASE("input validation") {
    BoundsInput b = ref_input();
    SUBCASE("zero radius") {
        b.rho_v = 0.0;
        CHECK_THROWS_AS(squeeze_time(b), Error);
    }
    SUBCASE("inadmissible contraction ratio") {
        CHECK_THROWS_AS(dimension_bound(1, 1.0, 0.125, 1.0), Error);
        CHECK_THROWS_AS(dimension_bound(1, 1.0, 0.125, 0.0), Error);
    }
    SUBCASE("rank beyond the enumerable spectrum") {
        LatticePtr lat = make_lattice({1, 1, 1}, {8, 8, 8});
        CHECK_THROWS_AS(lambda_after_rank(*lat, lat->total_dof()), Error);
        CHECK(lambda_after_rank(*lat, 0) == 1.0);
        CHECK(lambda_after_rank(*lat, 12) == 2.0);
        CHECK(lambda_after_rank(*lat, 5) == 1.0);   // mid-shell stays in shell one
    }
    SUBCASE("searched minimum requires a lattice") {
        CHECK_THROWS_AS(min_n0(b), Error);
    }
}
