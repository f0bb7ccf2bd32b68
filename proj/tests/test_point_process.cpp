#include <doctest.h>

#include <cmath>

#include "repp_lab/point_process.hpp"
#include "repp_lab/rng.hpp"

using namespace repp_lab;
using namespace repp_lab::repp;
using maps::MapSpec;

namespace {

MapSpec full_quadratic() { return MapSpec(maps::QuadraticMisParams{2.0}); }
MapSpec doubling() { return MapSpec(maps::doubling_params()); }

TargetSet ball(double zeta, double r, std::optional<std::uint64_t> period = std::nullopt,
               double mass = 0.0) {
    TargetSet B;
    B.zeta = zeta;
    B.r = r;
    B.period = period;
    B.mass = mass;
    return B;
}

HitSeries series_of(std::vector<std::uint64_t> idx, std::uint64_t horizon) {
    HitSeries h;
    h.hit_indices = std::move(idx);
    h.horizon = horizon;
    h.mass = 1e-3;
    return h;
}

}  // namespace

TEST_CASE("hit series at a fixed point and an empty target") {
    auto map = doubling();
    auto B = ball(0.0, 0.1, std::nullopt, 0.2);
    auto h = hit_times(map, 0.0, B, 50);
    REQUIRE(h.hit_indices.size() == 51);  // every index, including 0
    for (std::uint64_t i = 0; i <= 50; ++i) CHECK(h.hit_indices[i] == i);

    auto far = ball(0.99, 1e-6);
    auto h2 = hit_times(map, 0.0, far, 100);
    CHECK(h2.hit_indices.empty());
}

TEST_CASE("normalized interarrivals") {
    auto h = series_of({100, 101, 102, 500}, 1000);
    auto gaps = h.normalized_interarrivals();
    REQUIRE(gaps.size() == 4);
    CHECK(gaps[0] == doctest::Approx(0.1));    // mass * first index
    CHECK(gaps[1] == doctest::Approx(1e-3));
    CHECK(gaps[2] == doctest::Approx(1e-3));
    CHECK(gaps[3] == doctest::Approx(0.398));
}

TEST_CASE("annulus index") {
    auto map = full_quadratic();
    double r = 0.01;
    auto B = ball(0.5, r, 1);

    // the fixed point never escapes
    std::uint64_t exceeded = 0;
    auto k0 = annulus_index(map, B, 0.5, 100, &exceeded);
    CHECK_FALSE(k0.has_value());
    CHECK(exceeded == 1);

    // |T'(0.5)| = 2: the escape index grows like log2(r / distance)
    for (double d : {2e-3, 5e-4, 1e-4, 2e-5}) {
        auto k = annulus_index(map, B, 0.5 + d, 100, &exceeded);
        REQUIRE(k.has_value());
        double predicted = std::log2(r / d);
        CHECK(std::abs(static_cast<double>(*k) - predicted) <= 2.0);
    }

    // immediate escape
    auto edge = annulus_index(map, B, 0.5 + 0.6 * r, 100, &exceeded);
    REQUIRE(edge.has_value());
    CHECK(*edge == 0);

    CHECK_THROWS_AS(annulus_index(map, ball(0.5, r), 0.5), PreconditionFailed);
}

TEST_CASE("entrance ring membership") {
    auto map = full_quadratic();
    auto B = ball(0.5, 0.01, 1);
    CHECK_FALSE(entrance_member(map, B, 0.5));  // inside the ball
    // the ring sits at the second preimage branch: T(-0.5 + d) = 0.5 + 2d + O(d^2)
    CHECK(entrance_member(map, B, -0.5 + 0.002));
    // points just right of the ball land a full expansion step away
    CHECK_FALSE(entrance_member(map, B, 0.5 + 0.012));
    CHECK_FALSE(entrance_member(map, B, 0.9));
}

TEST_CASE("cluster extraction hand cases") {
    auto c1 = extract_clusters(series_of({100, 101, 102, 500}, 1000), 1);
    REQUIRE(c1.clusters.size() == 2);
    CHECK(c1.clusters[0].start_index == 100);
    CHECK(c1.clusters[0].size == 3);
    CHECK(c1.clusters[1].start_index == 500);
    CHECK(c1.clusters[1].size == 1);

    auto c2 = extract_clusters(series_of({100, 102, 104, 500}, 1000), 2);
    REQUIRE(c2.clusters.size() == 2);
    CHECK(c2.clusters[0].size == 3);

    auto c3 = extract_clusters(series_of({100, 102, 104, 500}, 1000), 1);
    CHECK(c3.clusters.size() == 4);  // no gap equals 1

    CHECK(c1.total_hits() == 4);
    CHECK(c2.total_hits() == 4);
    CHECK_THROWS_AS(extract_clusters(series_of({1, 2}, 10), 0), PreconditionFailed);
}

TEST_CASE("cluster sizes always sum to the hit count") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint64_t> idx;
        std::uint64_t t = 0;
        for (int i = 0; i < 200; ++i) {
            t += 1 + rng.below(8);
            idx.push_back(t);
        }
        auto h = series_of(idx, t + 1);
        auto c = extract_clusters(h, 1 + rng.below(4));
        CHECK(c.total_hits() == h.hit_indices.size());
    }
}

TEST_CASE("theoretical extremal index") {
    auto map = full_quadratic();
    CHECK(theta_theoretical(map, 0.5, 1, false) == 0.5);  // |T'| = 2, exactly
    CHECK(theta_theoretical(map, -1.0, 1, true) == 0.5);  // |T'| = 4, critical orbit

    maps::DoublyIntermittentParams p;
    p.iota = 0.3;
    MapSpec di{p};
    CHECK(theta_theoretical(di, -1.0, 1, false) == 0.0);  // neutral endpoint
}

TEST_CASE("theta estimates from synthetic geometric clusters") {
    // sizes with frequencies exactly proportional to Geo(1/2)
    ClusterSeries cs;
    cs.period = 1;
    std::uint64_t start = 0;
    for (std::uint64_t k = 1; k <= 10; ++k) {
        auto copies = static_cast<std::uint64_t>(2048.0 * std::pow(0.5, double(k)));
        for (std::uint64_t c = 0; c < copies; ++c) cs.clusters.push_back({start += 50, k});
    }
    auto map = full_quadratic();
    auto m = measure::sample_invariant(map, 1000000, 10000, 71);
    double r = measure::radius_for_mass_exact_fullquad(0.5, 5e-3);
    auto B = ball(0.5, r, 1, 5e-3);
    auto est = theta_estimates(map, B, m, cs);
    // mean of the truncated geometric sample is slightly below 2
    CHECK(est.cluster_fit == doctest::Approx(0.5).epsilon(0.02));
    CHECK(est.ratio == doctest::Approx(0.5).epsilon(0.15));
    CHECK(est.ratio_se > 0);

    ClusterSeries small;
    small.clusters.assign(100, {0, 1});
    CHECK_THROWS_AS(theta_estimates(map, B, m, small), InsufficientData);

    // non-periodic target: the escape annulus is the whole ball by convention
    auto Bnp = ball(0.3, r, std::nullopt, 5e-3);
    auto est2 = theta_estimates(map, Bnp, m, cs);
    CHECK(est2.ratio == 1.0);
}

TEST_CASE("induced hits reduce to plain hits for targets inside the base") {
    auto map = doubling();
    auto A = inducing::BaseSet::explicit_interval(0.0, 0.5);
    auto B = ball(0.3125, 0.0625, std::nullopt, 0.125);  // [1/4, 3/8) inside A
    double x0 = 0.29;

    auto induced = induced_hit_series(map, A, B, x0, 400, 0.25);

    // replay the raw orbit, indexing base visits by induced time
    std::vector<std::uint64_t> expect;
    double x = x0;
    std::uint64_t induced_clock = 0;
    if (B.contains(x)) expect.push_back(0);
    for (int i = 0; i < 100000 && induced_clock <= 400; ++i) {
        x = map.eval(x);
        if (A.contains(x)) {
            ++induced_clock;
            if (induced_clock > 400) break;
            if (B.contains(x)) expect.push_back(induced_clock);
        }
    }
    CHECK(induced.hit_indices == expect);
}

TEST_CASE("hit series serialization round-trips") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::uint64_t> idx;
        std::uint64_t t = rng.below(100);
        for (int i = 0; i < 500; ++i) {
            idx.push_back(t);
            t += 1 + rng.below(5000);
        }
        HitSeries h;
        h.hit_indices = idx;
        h.horizon = t + 10;
        h.mass = 1.0 / (1.0 + static_cast<double>(rng.below(1000)));
        auto bytes = h.to_binary();
        auto back = HitSeries::from_binary(bytes);
        CHECK(back.hit_indices == h.hit_indices);
        CHECK(back.horizon == h.horizon);
        CHECK(back.mass == h.mass);
    }

    auto h = series_of({1, 5, 9}, 20);
    CHECK(h.to_csv() == "index\n1\n5\n9\n");
    ClusterSeries cs;
    cs.clusters = {{1, 3}, {50, 1}};
    CHECK(cs.to_csv() == "start,size\n1,3\n50,1\n");
}

TEST_CASE("annulus masses agree with the entrance ring") {
    auto map = full_quadratic();
    auto m = measure::sample_invariant(map, 1000000, 10000, 83);
    double mass = 2e-3;
    double r = measure::radius_for_mass_exact_fullquad(0.5, mass);
    auto B = ball(0.5, r, 1, mass);
    auto am = annulus_masses(map, B, m, 12);

    // entrance mass equals the outer-annulus mass within 3 combined SEs
    double se_e = std::sqrt(am.entrance_mass / 1e6);
    double se_q = std::sqrt(am.q_mass[0] / 1e6);
    CHECK(std::abs(am.entrance_mass - am.q_mass[0]) <= 3 * (se_e + se_q));

    // annulus masses decay roughly geometrically with ratio 1 - theta = 1/2
    REQUIRE(am.q_count[0] > 200);
    for (int k = 1; k <= 3; ++k) {
        double ratio = am.q_mass[k] / am.q_mass[k - 1];
        CHECK(ratio == doctest::Approx(0.5).epsilon(0.35));
    }
}
