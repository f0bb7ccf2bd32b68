#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "repp_lab/rng.hpp"
#include "repp_lab/stats.hpp"

using namespace repp_lab;
using namespace repp_lab::stats;

TEST_CASE("one-sample KS hand value") {
    // hand evaluation of max(i/n - F, F - (i-1)/n) over {0.1, 0.5, 0.9}
    std::vector<double> s = {0.1, 0.5, 0.9};
    std::vector<double> padded = s;
    // precondition requires n >= 20; check the raw statistic via a helper set
    // built by replicating the same empirical CDF structure is not equivalent,
    // so verify against the tiny-sample formula with the guard relaxed through
    // a 21-point set that keeps the same extremes
    CHECK_THROWS_AS(ks_distance(s, RefDist::uniform01()), TooFewSamples);
}

TEST_CASE("one-sample KS statistic values") {
    // exact quantile grid: distance only from discretization, < 1/(2n) + slack
    std::vector<double> grid;
    const int n = 2000;
    for (int i = 1; i <= n; ++i) grid.push_back((i - 0.5) / n);
    auto rep = ks_distance(grid, RefDist::uniform01());
    CHECK(rep.statistic <= 0.5 / n + 1e-12);
    CHECK(rep.pass);

    // exponential quantiles
    std::vector<double> eq;
    for (int i = 1; i <= n; ++i) eq.push_back(-std::log(1.0 - (i - 0.5) / n));
    auto rep2 = ks_distance(eq, RefDist::exponential(1.0));
    CHECK(rep2.statistic <= 0.5 / n + 1e-12);

    // iid draws from the reference stay under the 99% asymptotic quantile
    Rng rng(4);
    std::vector<double> draws;
    for (int i = 0; i < 4000; ++i) draws.push_back(-std::log(1.0 - rng.unit()));
    auto rep3 = ks_distance(draws, RefDist::exponential(1.0));
    CHECK(rep3.statistic <= 1.63 / std::sqrt(4000.0));

    // degenerate distribution far from Exp(1)
    std::vector<double> constant(100, 0.7);
    auto rep4 = ks_distance(constant, RefDist::exponential(1.0));
    CHECK(rep4.statistic >= 0.5);

    // permutation invariance
    std::vector<double> shuffled = draws;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(ks_distance(shuffled, RefDist::exponential(1.0)).statistic ==
          doctest::Approx(rep3.statistic));
}

TEST_CASE("KS hand value via the raw formula") {
    // the documented example {0.1, 0.5, 0.9} vs Uniform01 gives 7/30; repeat
    // each point 7 times to clear the sample-size guard without changing the
    // empirical CDF
    std::vector<double> s;
    for (int rep = 0; rep < 7; ++rep) {
        s.push_back(0.1);
        s.push_back(0.5);
        s.push_back(0.9);
    }
    auto rep = ks_distance(s, RefDist::uniform01());
    CHECK(rep.statistic == doctest::Approx(7.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("geometric total variation") {
    // frequencies exactly proportional to Geo(1/2), truncated at kmax = 10
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t k = 1; k <= 10; ++k) {
        auto copies = static_cast<std::uint64_t>(1024.0 * std::pow(0.5, double(k)));
        for (std::uint64_t c = 0; c < copies; ++c) sizes.push_back(k);
    }
    sizes.push_back(11);  // the lumped remainder 2^-10
    auto rep = geometric_tv(sizes, 0.5, 10);
    CHECK(rep.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.pass);

    // all-singleton clusters against theta = 1/2: TV = 1/2
    std::vector<std::uint64_t> ones(1000, 1);
    auto rep2 = geometric_tv(ones, 0.5, 10);
    CHECK(rep2.statistic == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(rep2.pass);

    CHECK_THROWS_AS(geometric_tv(std::vector<std::uint64_t>(10, 1), 0.5, 10), TooFewSamples);
}

TEST_CASE("poisson dispersion") {
    std::vector<std::uint64_t> flat(100, 2);
    auto rep = poisson_dispersion(flat);
    CHECK(rep.statistic == doctest::Approx(0.0));
    CHECK_FALSE(rep.pass);

    // true Poisson(4) draws via thinning of exponential gaps
    Rng rng(9);
    std::vector<std::uint64_t> counts;
    for (int i = 0; i < 10000; ++i) {
        double t = 0;
        std::uint64_t c = 0;
        while ((t += -std::log(1.0 - rng.unit()) / 4.0) < 1.0) ++c;
        counts.push_back(c);
    }
    auto rep2 = poisson_dispersion(counts);
    CHECK(std::abs(rep2.statistic - 1.0) <= 0.05);
    CHECK(rep2.pass);

    // compound Poisson with Geo(theta) multiplicities: brute-force moment
    // oracle for the dispersion of the un-collapsed count process
    double theta = 0.5;
    std::vector<std::uint64_t> ccounts;
    double window = 8.0;  // normalized window length; cluster rate theta
    for (int i = 0; i < 20000; ++i) {
        double t = 0;
        std::uint64_t c = 0;
        while ((t += -std::log(1.0 - rng.unit()) / theta) < window) {
            // geometric cluster size
            std::uint64_t k = 1;
            while (rng.unit() > theta) ++k;
            c += k;
        }
        ccounts.push_back(c);
    }
    auto rep3 = poisson_dispersion(ccounts);
    double oracle = (2.0 - theta) / theta;  // E[K^2]/E[K] for Geo(theta)
    CHECK(std::abs(rep3.statistic - oracle) <= 0.15);
    CHECK(rep3.statistic > 1.0);

    CHECK_THROWS_AS(poisson_dispersion(std::vector<std::uint64_t>(100, 0)), ZeroMean);
    CHECK_THROWS_AS(poisson_dispersion(std::vector<std::uint64_t>(10, 1)), TooFewSamples);
}

TEST_CASE("zero mass fraction") {
    CHECK(zero_mass_fraction({0.5, 0.7, 2.0}, 0.1) == doctest::Approx(0.0));
    CHECK(zero_mass_fraction({0.01, 0.5, 0.02, 3.0}, 0.1) == doctest::Approx(0.5));
    CHECK(zero_mass_fraction({}, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("two-sample KS") {
    std::vector<double> a, b;
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        a.push_back(rng.unit());
        b.push_back(rng.unit() + 5.0);
    }
    CHECK(two_sample_ks(a, a).statistic == doctest::Approx(0.0));
    CHECK(two_sample_ks(a, b).statistic == doctest::Approx(1.0));
    // symmetry
    CHECK(two_sample_ks(a, b).statistic == doctest::Approx(two_sample_ks(b, a).statistic));
    CHECK_THROWS_AS(two_sample_ks(std::vector<double>(10, 0.0), a), TooFewSamples);
}

TEST_CASE("wilson interval and line fit") {
    auto iv = wilson(50, 100);
    CHECK(iv.lo < 0.5);
    CHECK(iv.hi > 0.5);
    CHECK(iv.hi - iv.lo < 0.25);

    std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
    auto fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(0.0));
    CHECK(fit.r2 == doctest::Approx(1.0));

    std::vector<double> anti = {4, 3, 2, 1};
    CHECK(correlation(x, anti) == doctest::Approx(-1.0));
    CHECK(std::abs(correlation(x, {1.0, 1.0, 1.0, 1.0})) == doctest::Approx(0.0));
}
