#include <doctest.h>

#include <cmath>

#include "repp_lab/oracle.hpp"
#include "repp_lab/orbit_cursor.hpp"
#include "repp_lab/rng.hpp"

using namespace repp_lab;
using namespace repp_lab::oracle;
using maps::MapSpec;

namespace {
MapSpec doubling() { return MapSpec(maps::doubling_params()); }
}

TEST_CASE("symbolic system basics") {
    auto map = doubling();
    SymbolicSystem sys(map, 10);
    CHECK(sys.state_count() == 1024);
    CHECK(sys.state_mass(17) == doctest::Approx(std::pow(2.0, -10.0)));
    CHECK(sys.cylinder_lo(512) == doctest::Approx(0.5));
    CHECK(sys.set_mass(sys.interval(0.0, 1.0)) == doctest::Approx(1.0));
    CHECK(sys.set_mass(sys.interval(0.25, 0.75)) == doctest::Approx(0.5));

    CHECK_THROWS_AS(sys.interval(0.3, 0.5), TargetNotCylinderAligned);
    CHECK_THROWS_AS(SymbolicSystem(MapSpec(maps::QuadraticMisParams{2.0}), 4), InvalidFamily);

    // three-branch map with unequal slopes: stationary masses multiply out
    maps::PiecewiseLinearParams three{{0.0, 0.25, 0.75, 1.0}, {4.0, 2.0, 4.0}};
    SymbolicSystem s3(MapSpec(three), 4);
    CHECK(s3.state_count() == 81);
    CHECK(s3.set_mass(s3.interval(0.0, 1.0)) == doctest::Approx(1.0));
    CHECK(s3.set_mass(s3.interval(0.25, 0.75)) == doctest::Approx(0.5));
}

TEST_CASE("exact hitting distribution of the doubling map") {
    auto map = doubling();
    SymbolicSystem sys(map, 12);
    auto half = sys.interval(0.0, 0.5);
    auto pmf = exact_hitting_distribution(sys, half, 30);
    for (std::uint64_t t = 1; t <= 30; ++t)
        CHECK(pmf[t - 1] == doctest::Approx(std::pow(0.5, double(t))).epsilon(1e-10));

    // whole space: the first step always lands inside
    auto whole = sys.interval(0.0, 1.0);
    auto pmf2 = exact_hitting_distribution(sys, whole, 3);
    CHECK(pmf2[0] == doctest::Approx(1.0));
    CHECK(pmf2[1] == doctest::Approx(0.0));

    // conservation for a smaller target
    auto cyl = sys.interval(0.75, 0.8125);
    auto pmf3 = exact_hitting_distribution(sys, cyl, 400);
    double total = 0;
    for (double p : pmf3) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("shadow identity: hand strip and random pairs") {
    auto map = doubling();
    SymbolicSystem sys(map, 20);

    auto A = sys.interval(0.0, 0.5);
    auto E = sys.interval(0.5, 0.75);
    auto res = exact_shadow_measure(sys, A, E);
    CHECK(std::abs(res.lhs - 0.25) <= 1e-10);
    CHECK(std::abs(res.rhs - 0.25) <= 1e-10);
    CHECK(std::abs(res.lhs - res.rhs) <= 1e-10);

    // E inside A collapses to the lag-0 term
    auto Ein = sys.interval(0.125, 0.25);
    auto res2 = exact_shadow_measure(sys, A, Ein);
    CHECK(std::abs(res2.lhs - sys.set_mass(Ein)) <= 1e-10);

    // null E
    auto res3 = exact_shadow_measure(sys, A, CylSet{});
    CHECK(res3.lhs == 0.0);
    CHECK(res3.rhs == 0.0);

    // randomized dyadic pairs at mixed depths
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        unsigned qa = 1 + static_cast<unsigned>(rng.below(5));
        unsigned qe = 1 + static_cast<unsigned>(rng.below(9));
        std::uint64_t ia = rng.below(1u << qa);
        std::uint64_t ie = rng.below(1u << qe);
        auto a_set = sys.interval(double(ia) / double(1u << qa),
                                  double(ia + 1) / double(1u << qa));
        auto e_set = sys.interval(double(ie) / double(1u << qe),
                                  double(ie + 1) / double(1u << qe));
        auto r = exact_shadow_measure(sys, a_set, e_set);
        CHECK(std::abs(r.lhs - r.rhs) <= 1e-10);
    }
}

TEST_CASE("exact extremal index of constant-slope orbits") {
    auto map = doubling();
    CHECK(exact_theta_linear(map, 0.0, 1) == doctest::Approx(0.5));
    CHECK(exact_theta_linear(map, 1.0 / 3.0, 2) == doctest::Approx(0.75));
    CHECK_THROWS_AS(exact_theta_linear(map, 0.3, 1), NotPeriodic);
}

TEST_CASE("monte carlo hits reproduce the exact hitting law") {
    auto map = doubling();
    SymbolicSystem sys(map, 8);
    double lo = 0.75, hi = 0.78125;  // one depth-5 cylinder
    auto target = sys.interval(lo, hi);
    const std::uint64_t t_max = 12;
    auto pmf = exact_hitting_distribution(sys, target, t_max);

    const int n_starts = 30000;
    std::vector<std::uint64_t> counts(t_max + 1, 0);
    const auto& pl = map.piecewise_linear();
    for (int s = 0; s < n_starts; ++s) {
        maps::SymbolicCursor cur(pl, derive_seed(404, static_cast<std::uint64_t>(s)));
        for (std::uint64_t t = 1; t <= t_max; ++t) {
            cur.step();
            double x = cur.x();
            if (x >= lo && x < hi) {
                ++counts[t];
                break;
            }
        }
    }
    double envelope = 4.0 / std::sqrt(double(n_starts));
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        double mc = double(counts[t]) / double(n_starts);
        CHECK(std::abs(mc - pmf[t - 1]) <= envelope);
    }
}
