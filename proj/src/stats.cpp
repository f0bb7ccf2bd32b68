#include "repp_lab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace repp_lab::stats {

double RefDist::cdf(double x) const {
    switch (kind) {
        case Kind::Exponential:
            return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x);
        case Kind::Uniform01:
            return x <= 0 ? 0.0 : (x >= 1 ? 1.0 : x);
    }
    return 0.0;
}

std::string RefDist::name() const {
    switch (kind) {
        case Kind::Exponential:
            return "Exp(" + std::to_string(rate) + ")";
        case Kind::Uniform01:
            return "Uniform01";
    }
    return "?";
}

TestReport ks_distance(std::vector<double> samples, const RefDist& ref, double threshold) {
    if (samples.size() < 20) throw TooFewSamples("KS needs at least 20 samples");
    for (double s : samples) {
        if (!std::isfinite(s)) throw PreconditionFailed("KS sample is not finite");
        if (ref.kind == RefDist::Kind::Exponential && s < 0)
            throw PreconditionFailed("negative sample against an exponential reference");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = ref.cdf(samples[i]);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    TestReport rep;
    rep.description = "KS distance to " + ref.name();
    rep.statistic = d;
    rep.n = samples.size();
    rep.threshold = threshold;
    rep.pass = d <= threshold;
    return rep;
}

TestReport geometric_tv(const std::vector<std::uint64_t>& sizes, double theta,
                        std::uint64_t kmax, double threshold) {
    if (sizes.size() < 500) throw TooFewSamples("TV test needs at least 500 cluster sizes");
    if (!(theta > 0 && theta < 1)) throw PreconditionFailed("theta must lie in (0, 1)");
    std::vector<double> emp(kmax + 1, 0.0);  // slot kmax lumps k > kmax
    const double w = 1.0 / static_cast<double>(sizes.size());
    for (std::uint64_t k : sizes) {
        if (k == 0) throw PreconditionFailed("cluster sizes must be >= 1");
        if (k > kmax)
            emp[kmax] += w;
        else
            emp[k - 1] += w;
    }
    double tv = 0.0;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        double geo = theta * std::pow(1.0 - theta, static_cast<double>(k - 1));
        tv += std::abs(emp[k - 1] - geo);
    }
    tv += std::abs(emp[kmax] - std::pow(1.0 - theta, static_cast<double>(kmax)));
    tv *= 0.5;
    TestReport rep;
    rep.description = "TV distance to Geometric(" + std::to_string(theta) + ")";
    rep.statistic = tv;
    rep.n = sizes.size();
    rep.threshold = threshold;
    rep.pass = tv <= threshold;
    return rep;
}

TestReport poisson_dispersion(const std::vector<std::uint64_t>& counts, double threshold) {
    if (counts.size() < 50) throw TooFewSamples("dispersion needs at least 50 windows");
    double mean = 0;
    for (auto c : counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(counts.size());
    if (mean == 0) throw ZeroMean("window counts are all zero");
    double var = 0;
    for (auto c : counts) {
        double d = static_cast<double>(c) - mean;
        var += d * d;
    }
    var /= static_cast<double>(counts.size() - 1);
    TestReport rep;
    rep.description = "window-count dispersion (variance/mean)";
    rep.statistic = var / mean;
    rep.n = counts.size();
    rep.threshold = threshold;
    rep.pass = std::abs(rep.statistic - 1.0) <= threshold;
    return rep;
}

double zero_mass_fraction(const std::vector<double>& return_samples, double epsilon) {
    if (return_samples.empty()) return 0.0;
    std::size_t below = 0;
    for (double s : return_samples)
        if (s < epsilon) ++below;
    return static_cast<double>(below) / static_cast<double>(return_samples.size());
}

TestReport two_sample_ks(std::vector<double> a, std::vector<double> b, double threshold) {
    if (a.size() < 100 || b.size() < 100)
        throw TooFewSamples("two-sample KS needs at least 100 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double va = a[i];
        double vb = b[j];
        if (va <= vb)
            while (i < a.size() && a[i] == va) ++i;
        if (vb <= va)
            while (j < b.size() && b[j] == vb) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    TestReport rep;
    rep.description = "two-sample KS distance";
    rep.statistic = d;
    rep.n = a.size() + b.size();
    rep.threshold = threshold;
    rep.pass = d <= threshold;
    return rep;
}

WilsonInterval wilson(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit fit;
    fit.points = x.size();
    if (x.size() != y.size() || x.size() < 2)
        throw PreconditionFailed("line fit needs >= 2 matching points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw PreconditionFailed("degenerate abscissa in line fit");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw PreconditionFailed("correlation needs matching series");
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace repp_lab::stats
