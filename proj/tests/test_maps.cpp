#include <doctest.h>

#include <cmath>

#include "repp_lab/maps.hpp"
#include "repp_lab/rng.hpp"

using namespace repp_lab;
using namespace repp_lab::maps;

namespace {

MapSpec full_quadratic() { return MapSpec(QuadraticMisParams{2.0}); }

MapSpec doubling() { return MapSpec(doubling_params()); }

DoublyIntermittentParams di_defaults() {
    DoublyIntermittentParams p;
    p.l1 = p.l2 = 0.25;
    p.k1 = p.k2 = 1.0;
    p.a1 = p.a2 = 1.2;
    p.b1 = p.b2 = 1.0;
    p.iota = 0.3;
    return p;
}

}  // namespace

TEST_CASE("quadratic map evaluation") {
    auto map = full_quadratic();
    CHECK(map.eval(0.0) == doctest::Approx(1.0));
    CHECK(map.eval(1.0) == doctest::Approx(-1.0));
    CHECK(map.eval(-1.0) == doctest::Approx(-1.0));
    CHECK(map.deriv(0.5) == doctest::Approx(-2.0));
    CHECK(map.deriv(-1.0) == doctest::Approx(4.0));

    CHECK_THROWS_AS(map.eval(std::nan("")), NonFiniteInput);
    CHECK_THROWS_AS(map.eval(1.5), OutOfDomain);
    // within tolerance of the boundary: clamped, not rejected
    CHECK(map.eval(1.0 + 5e-13) == doctest::Approx(-1.0));
}

TEST_CASE("quadratic parameter validation") {
    CHECK_THROWS_AS(MapSpec(QuadraticMisParams{2.5}), InvalidMap);
    CHECK_THROWS_AS(MapSpec(QuadraticMisParams{0.0}), InvalidMap);
}

TEST_CASE("doubly intermittent evaluation in the closed-form regions") {
    // make the left neutral region wide enough to contain -0.5
    DoublyIntermittentParams p = di_defaults();
    p.l1 = 1.0;
    p.k1 = 0.5;  // keeps beta = max(k1*l1, k2*l2) below 1
    p.a1 = 0.7;  // keeps the right neutral region clear of the centre
    p.b1 = 1.0;
    p.a2 = 1.2;
    p.iota = 0.45;  // left region ends at -1 + 1.2*0.45 = -0.46
    MapSpec map{p};
    CHECK(map.eval(-0.5) == doctest::Approx(-0.25));  // -0.5 + 1*(0.5)^2
    CHECK(map.deriv(-1.0) == doctest::Approx(1.0));   // neutral fixed point
    CHECK(map.eval(-1.0) == doctest::Approx(-1.0));
    CHECK(map.eval(1.0) == doctest::Approx(1.0));
    CHECK(map.eval(0.0) == doctest::Approx(-1.0));    // 0 belongs to the right branch
    // just left of zero the left branch applies and lands near +1
    CHECK(map.eval(-1e-9) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(map.deriv(0.0), AtBranchBoundary);
}

TEST_CASE("doubly intermittent branches are monotone") {
    MapSpec map{di_defaults()};
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        bool left = (rng.u64() & 1) != 0;
        double lo = left ? -1.0 : 0.0;
        double hi = left ? 0.0 : 1.0;
        double x = rng.uniform(lo, hi);
        double y = rng.uniform(lo, hi);
        if (x > y) std::swap(x, y);
        if (y - x < 1e-12) continue;
        CHECK(map.eval(x) < map.eval(y));
    }
}

TEST_CASE("forward invariance under random evaluation") {
    auto quad = full_quadratic();
    MapSpec di{di_defaults()};
    auto pl = doubling();
    Rng rng(11);
    for (int i = 0; i < 1000000; ++i) {
        double x = rng.uniform(-1.0, 1.0);
        double y = quad.eval(x);
        CHECK(y >= -1.0 - 1e-12);
        CHECK(y <= 1.0 + 1e-12);
        double z = di.eval(x);
        CHECK(z >= -1.0 - 1e-12);
        CHECK(z <= 1.0 + 1e-12);
        double u = 0.5 * (x + 1.0);
        double w = pl.eval(u);
        CHECK(w >= 0.0);
        CHECK(w < 1.0 + 1e-12);
    }
}

TEST_CASE("orbit streaming") {
    auto map = full_quadratic();
    auto pts = orbit(map, 0.0, 3);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == 0.0);
    CHECK(pts[1] == doctest::Approx(1.0));
    CHECK(pts[2] == doctest::Approx(-1.0));
    CHECK(pts[3] == doctest::Approx(-1.0));

    auto single = orbit(map, 0.25, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 0.25);

    auto dbl = doubling();
    auto seq = orbit(dbl, 0.3, 2);
    CHECK(seq[1] == doctest::Approx(0.6));
    CHECK(seq[2] == doctest::Approx(0.2));

    OrbitStream stream(map, 0.0);
    CHECK(stream.current() == 0.0);
    CHECK(stream.advance() == doctest::Approx(1.0));
    CHECK(stream.advance() == doctest::Approx(-1.0));
}

TEST_CASE("derivative along orbit") {
    auto map = full_quadratic();
    CHECK(deriv_along_orbit(map, 0.5, 1) == doctest::Approx(-2.0));
    CHECK(deriv_along_orbit(map, -1.0, 2) == doctest::Approx(16.0));
    auto dbl = doubling();
    CHECK(deriv_along_orbit(dbl, 0.3, 5) == doctest::Approx(32.0));

    // chain rule: (T^{m+n})'(x) = (T^m)'(x) * (T^n)'(T^m x)
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform(-0.99, 0.99);
        int m = 1 + static_cast<int>(rng.below(5));
        int n = 1 + static_cast<int>(rng.below(5));
        double lhs = deriv_along_orbit(map, x, m + n);
        double rhs = deriv_along_orbit(map, x, m) *
                     deriv_along_orbit(map, iterate_point(map, x, m), n);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }

    MapSpec di{di_defaults()};
    CHECK_THROWS_AS(deriv_along_orbit(di, 0.0, 1), AtBranchBoundary);
}

TEST_CASE("find_periodic on the full quadratic map") {
    auto map = full_quadratic();
    double z1 = find_periodic(map, 1, {0.0, 1.0});
    CHECK(z1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(map.eval(z1) - z1) <= 1e-13);

    double z2 = find_periodic(map, 1, {-1.0, -0.9});
    CHECK(z2 == doctest::Approx(-1.0));
    CHECK(std::abs(map.eval(z2) - z2) <= 1e-13);

    auto dbl = doubling();
    double z3 = find_periodic(dbl, 2, {0.3, 0.4});
    CHECK(z3 == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
    CHECK(std::abs(iterate_point(dbl, z3, 2) - z3) <= 1e-13);

    CHECK_THROWS_AS(find_periodic(map, 1, {0.6, 0.8}), NoSignChange);
    // bracket around the fixed point 0.5 has no prime period-2 root
    CHECK_THROWS_AS(find_periodic(map, 2, {0.4, 0.6}), NotPrimePeriod);
}

TEST_CASE("doubly intermittent validation") {
    auto rep = validate_doubly_intermittent(di_defaults(), 8);
    CHECK(rep.beta == doctest::Approx(0.25));
    CHECK(rep.pass);
    CHECK(rep.lambda_hat > 1.0);

    // return-ladder endpoints march strictly toward 0 from the left
    for (std::size_t i = 1; i < rep.delta_small_minus.size(); ++i) {
        CHECK(rep.delta_small_minus[i].lo > rep.delta_small_minus[i - 1].lo);
        CHECK(rep.delta_small_minus[i].hi > rep.delta_small_minus[i - 1].hi);
        CHECK(rep.delta_small_minus[i].hi < 0.0);
    }

    DoublyIntermittentParams bad = di_defaults();
    bad.l1 = 2.0;
    bad.k1 = 1.0;
    CHECK_THROWS_AS(validate_doubly_intermittent(bad, 4), BetaTooLarge);
}

TEST_CASE("piecewise linear validation and evaluation") {
    auto map = doubling();
    CHECK(map.eval(0.3) == doctest::Approx(0.6));
    CHECK(map.eval(0.75) == doctest::Approx(0.5));
    CHECK(map.deriv(0.3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(map.deriv(0.5), AtBranchBoundary);

    PiecewiseLinearParams bad{{0.0, 0.5, 1.0}, {2.0, 0.9}};
    CHECK_THROWS_AS(MapSpec{bad}, InvalidMap);
    PiecewiseLinearParams notfull{{0.0, 0.5, 1.0}, {1.5, 2.0}};
    CHECK_THROWS_AS(MapSpec{notfull}, InvalidMap);

    // three-branch map with unequal slopes
    PiecewiseLinearParams three{{0.0, 0.25, 0.75, 1.0}, {4.0, 2.0, 4.0}};
    MapSpec m3{three};
    CHECK(m3.eval(0.125) == doctest::Approx(0.5));
    CHECK(m3.eval(0.5) == doctest::Approx(0.5));
}

TEST_CASE("critical orbit membership for the quadratic family") {
    auto map = full_quadratic();
    CHECK(on_critical_orbit(map, 1.0));
    CHECK(on_critical_orbit(map, -1.0));
    CHECK_FALSE(on_critical_orbit(map, 0.5));
    CHECK_FALSE(on_critical_orbit(map, 0.3));
}
