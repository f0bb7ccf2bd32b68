#include "repp_lab/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "repp_lab/errors.hpp"
#include "repp_lab/orbit_cursor.hpp"
#include "repp_lab/task_pool.hpp"

static_assert(std::endian::native == std::endian::little,
              "sample persistence assumes a little-endian host");

namespace repp_lab::measure {

using maps::MapSpec;

namespace {

void sample_into(const MapSpec& map, std::uint64_t n, std::uint64_t burn_in,
                 std::uint64_t seed, std::vector<double>& out, std::uint64_t& restarts) {
    out.reserve(out.size() + n);
    maps::with_cursor(map, seed, [&](auto& cursor) {
        cursor.burn(burn_in);
        for (std::uint64_t i = 0; i < n; ++i) {
            cursor.step();
            out.push_back(cursor.x());
        }
        restarts += cursor.restarts();
    });
}

}  // namespace

EmpiricalMeasure sample_invariant(const MapSpec& map, std::uint64_t n, std::uint64_t burn_in,
                                  std::uint64_t seed) {
    if (n < 10000) throw PreconditionFailed("need at least 1e4 samples");
    if (burn_in < 1000) throw PreconditionFailed("need burn-in of at least 1e3");
    EmpiricalMeasure m;
    m.n_samples = n;
    m.burn_in = burn_in;
    m.seed = seed;
    m.map_id = map.id();
    sample_into(map, n, burn_in, seed, m.samples, m.restarts);
    std::sort(m.samples.begin(), m.samples.end());
    return m;
}

EmpiricalMeasure sample_invariant_parallel(const MapSpec& map, std::uint64_t n,
                                           std::uint64_t burn_in, std::uint64_t seed,
                                           std::size_t tasks, unsigned threads) {
    if (n < 10000) throw PreconditionFailed("need at least 1e4 samples");
    if (burn_in < 1000) throw PreconditionFailed("need burn-in of at least 1e3");
    if (tasks == 0) tasks = 1;
    std::vector<std::vector<double>> parts(tasks);
    std::vector<std::uint64_t> restarts(tasks, 0);
    std::uint64_t per = n / tasks;
    std::uint64_t extra = n % tasks;
    run_tasks(tasks, threads, [&](std::size_t t) {
        std::uint64_t count = per + (t < extra ? 1 : 0);
        sample_into(map, count, burn_in, derive_seed(seed, t), parts[t], restarts[t]);
    });
    EmpiricalMeasure m;
    m.n_samples = n;
    m.burn_in = burn_in;
    m.seed = seed;
    m.map_id = map.id();
    for (std::size_t t = 0; t < tasks; ++t) {
        m.samples.insert(m.samples.end(), parts[t].begin(), parts[t].end());
        m.restarts += restarts[t];
    }
    std::sort(m.samples.begin(), m.samples.end());
    return m;
}

double ball_mass(const EmpiricalMeasure& m, double zeta, double r) {
    if (!(r > 0)) throw PreconditionFailed("ball radius must be positive");
    auto lo = std::upper_bound(m.samples.begin(), m.samples.end(), zeta - r);
    auto hi = std::lower_bound(m.samples.begin(), m.samples.end(), zeta + r);
    return static_cast<double>(hi - lo) / static_cast<double>(m.samples.size());
}

double exact_mass_fullquad(double zeta, double r) {
    double hi = std::min(zeta + r, 1.0);
    double lo = std::max(zeta - r, -1.0);
    if (hi <= lo) return 0.0;
    constexpr double pi = 3.14159265358979323846;
    return (std::asin(hi) - std::asin(lo)) / pi;
}

double radius_for_mass(const EmpiricalMeasure& m, double zeta, double target) {
    if (!(target > 0 && target < 1)) throw TargetUnreachable("target mass must lie in (0, 1)");
    const std::size_t n = m.samples.size();
    std::size_t k = static_cast<std::size_t>(std::llround(target * static_cast<double>(n)));
    if (k < 1 || k >= n) throw TargetUnreachable("target mass not resolvable by the sample");
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(m.samples[i] - zeta);
    std::nth_element(dist.begin(), dist.begin() + k, dist.end());
    double upper = dist[k];
    double lower = *std::max_element(dist.begin(), dist.begin() + k);
    // open ball of this radius contains exactly the k nearest samples
    return 0.5 * (lower + upper);
}

double radius_for_mass_exact_fullquad(double zeta, double target) {
    if (!(target > 0 && target < 1)) throw TargetUnreachable("target mass must lie in (0, 1)");
    double lo = 0.0, hi = 2.0;
    if (exact_mass_fullquad(zeta, hi) < target)
        throw TargetUnreachable("target exceeds the available mass");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double mass = exact_mass_fullquad(zeta, mid);
        if (std::abs(mass - target) <= 1e-12) return mid;
        (mass < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

HistogramDensity::HistogramDensity(const EmpiricalMeasure& m, std::size_t bins, double lo,
                                   double hi)
    : lo_(lo), hi_(hi), width_((hi - lo) / static_cast<double>(bins)), bin_mass_(bins, 0.0) {
    if (bins == 0 || !(hi > lo)) throw PreconditionFailed("bad histogram support");
    double w = 1.0 / static_cast<double>(m.samples.size());
    for (double x : m.samples) {
        auto b = static_cast<long>((x - lo_) / width_);
        if (b < 0) b = 0;
        if (b >= static_cast<long>(bin_mass_.size())) b = static_cast<long>(bin_mass_.size()) - 1;
        bin_mass_[static_cast<std::size_t>(b)] += w;
    }
}

double HistogramDensity::mass(double zeta, double r) const {
    double a = std::max(zeta - r, lo_);
    double b = std::min(zeta + r, hi_);
    if (b <= a) return 0.0;
    double total = 0.0;
    auto first = static_cast<std::size_t>((a - lo_) / width_);
    auto last = static_cast<std::size_t>((b - lo_) / width_);
    if (last >= bin_mass_.size()) last = bin_mass_.size() - 1;
    for (std::size_t i = first; i <= last; ++i) {
        double blo = lo_ + width_ * static_cast<double>(i);
        double bhi = blo + width_;
        double overlap = std::min(b, bhi) - std::max(a, blo);
        if (overlap > 0) total += bin_mass_[i] * overlap / width_;
    }
    return total;
}

double MassModel::mass(double zeta, double r) const {
    return emp_ ? ball_mass(*emp_, zeta, r) : exact_mass_fullquad(zeta, r);
}

double MassModel::radius_for_mass(double zeta, double target) const {
    return emp_ ? measure::radius_for_mass(*emp_, zeta, target)
                : radius_for_mass_exact_fullquad(zeta, target);
}

const EmpiricalMeasure& MassModel::measure() const {
    if (!emp_) throw PreconditionFailed("exact mass model carries no sample");
    return *emp_;
}

void save_samples(const std::string& path, const EmpiricalMeasure& m) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoFailure("cannot open " + path + " for writing");
    std::uint64_t count = m.samples.size();
    bool ok = std::fwrite(&count, sizeof(count), 1, f) == 1;
    ok = ok && std::fwrite(m.samples.data(), sizeof(double), count, f) == count;
    ok = std::fclose(f) == 0 && ok;
    if (!ok) throw IoFailure("short write to " + path);
}

EmpiricalMeasure load_samples(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoFailure("cannot open " + path);
    std::uint64_t count = 0;
    if (std::fread(&count, sizeof(count), 1, f) != 1) {
        std::fclose(f);
        throw IoFailure("truncated header in " + path);
    }
    EmpiricalMeasure m;
    m.samples.resize(count);
    if (std::fread(m.samples.data(), sizeof(double), count, f) != count) {
        std::fclose(f);
        throw IoFailure("truncated samples in " + path);
    }
    std::fclose(f);
    m.n_samples = count;
    if (!std::is_sorted(m.samples.begin(), m.samples.end()))
        std::sort(m.samples.begin(), m.samples.end());
    return m;
}

}  // namespace repp_lab::measure
