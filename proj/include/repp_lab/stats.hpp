#ifndef REPP_LAB_STATS_HPP
#define REPP_LAB_STATS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "repp_lab/errors.hpp"

namespace repp_lab::stats {

struct TestReport {
    std::string description;
    double statistic = 0;
    std::size_t n = 0;
    double threshold = 0;
    bool pass = false;
};

struct RefDist {
    enum class Kind { Exponential, Uniform01 };
    Kind kind;
    double rate = 1.0;

    static RefDist exponential(double rate = 1.0) { return {Kind::Exponential, rate}; }
    static RefDist uniform01() { return {Kind::Uniform01, 1.0}; }
    double cdf(double x) const;
    std::string name() const;
};

// One-sample Kolmogorov-Smirnov distance against a reference CDF.
TestReport ks_distance(std::vector<double> samples, const RefDist& ref,
                       double threshold = 0.05);

// Total-variation distance between empirical cluster sizes and the geometric
// law theta (1-theta)^(k-1), k >= 1; sizes above kmax are lumped together.
TestReport geometric_tv(const std::vector<std::uint64_t>& sizes, double theta,
                        std::uint64_t kmax, double threshold = 0.05);

// Sample variance / sample mean of per-window counts; ~1 for a Poisson
// stream. pass = |statistic - 1| <= threshold.
TestReport poisson_dispersion(const std::vector<std::uint64_t>& counts,
                              double threshold = 0.15);

// Fraction of normalized return times below epsilon (the defect mass at 0
// contributed by intra-cluster returns).
double zero_mass_fraction(const std::vector<double>& return_samples, double epsilon);

// Two-sample Kolmogorov-Smirnov distance.
TestReport two_sample_ks(std::vector<double> a, std::vector<double> b,
                         double threshold = 0.05);

// Wilson score interval for a binomial proportion at ~95% coverage.
struct WilsonInterval {
    double lo = 0, hi = 0;
};
WilsonInterval wilson(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

// Least-squares line fit, with R^2; used for tail-slope estimates.
struct LineFit {
    double slope = 0, intercept = 0, r2 = 0;
    std::size_t points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation of two equal-length series.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace repp_lab::stats

#endif
