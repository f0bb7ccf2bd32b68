#include "repp_lab/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace repp_lab::repp {

using maps::MapSpec;
using measure::EmpiricalMeasure;

std::vector<double> HitSeries::normalized_interarrivals() const {
    std::vector<double> out;
    out.reserve(hit_indices.size());
    std::uint64_t prev = 0;
    bool first = true;
    for (std::uint64_t idx : hit_indices) {
        out.push_back(mass * static_cast<double>(first ? idx : idx - prev));
        prev = idx;
        first = false;
    }
    return out;
}

std::string HitSeries::to_csv() const {
    std::string out = "index\n";
    char line[32];
    for (std::uint64_t idx : hit_indices) {
        std::snprintf(line, sizeof(line), "%llu\n", static_cast<unsigned long long>(idx));
        out += line;
    }
    return out;
}

namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t get_varint(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
        if (pos >= in.size()) throw IoFailure("truncated varint");
        std::uint8_t b = in[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
        if (shift > 63) throw IoFailure("varint overflow");
    }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw IoFailure("truncated u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[pos++]) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> HitSeries::to_binary() const {
    std::vector<std::uint8_t> out = {'R', 'L', 'H', '1'};
    put_u64(out, horizon);
    std::uint64_t mass_bits;
    std::memcpy(&mass_bits, &mass, 8);
    put_u64(out, mass_bits);
    put_u64(out, hit_indices.size());
    std::uint64_t prev = 0;
    for (std::uint64_t idx : hit_indices) {
        put_varint(out, idx - prev);  // run-length gaps
        prev = idx;
    }
    return out;
}

HitSeries HitSeries::from_binary(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "RLH1", 4) != 0)
        throw IoFailure("bad hit-series header");
    pos = 4;
    HitSeries h;
    h.horizon = get_u64(bytes, pos);
    std::uint64_t mass_bits = get_u64(bytes, pos);
    std::memcpy(&h.mass, &mass_bits, 8);
    std::uint64_t count = get_u64(bytes, pos);
    h.hit_indices.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        prev += get_varint(bytes, pos);
        h.hit_indices.push_back(prev);
    }
    return h;
}

std::vector<std::uint64_t> ClusterSeries::sizes() const {
    std::vector<std::uint64_t> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back(c.size);
    return out;
}

std::uint64_t ClusterSeries::total_hits() const {
    std::uint64_t total = 0;
    for (const auto& c : clusters) total += c.size;
    return total;
}

std::string ClusterSeries::to_csv() const {
    std::string out = "start,size\n";
    char line[48];
    for (const auto& c : clusters) {
        std::snprintf(line, sizeof(line), "%llu,%llu\n",
                      static_cast<unsigned long long>(c.start_index),
                      static_cast<unsigned long long>(c.size));
        out += line;
    }
    return out;
}

HitSeries hit_times(const MapSpec& map, double x0, const TargetSet& B, std::uint64_t horizon) {
    if (horizon < 1) throw PreconditionFailed("horizon must be >= 1");
    HitSeries h;
    h.horizon = horizon;
    h.mass = B.mass;
    map.with_concrete([&](const auto& m) {
        double x = x0;
        if (B.contains(x)) h.hit_indices.push_back(0);
        for (std::uint64_t i = 1; i <= horizon; ++i) {
            x = m.eval_unchecked(x);
            if (B.contains(x)) h.hit_indices.push_back(i);
        }
    });
    return h;
}

std::optional<std::uint64_t> annulus_index(const MapSpec& map, const TargetSet& B, double x,
                                           std::uint64_t max_depth, std::uint64_t* exceeded) {
    if (!B.period) throw PreconditionFailed("annulus index needs a periodic target");
    if (!B.contains(x)) throw PreconditionFailed("annulus index needs a point inside the ball");
    std::uint64_t p = *B.period;
    return map.with_concrete([&](const auto& m) -> std::optional<std::uint64_t> {
        double y = x;
        for (std::uint64_t k = 0; k <= max_depth; ++k) {
            for (std::uint64_t j = 0; j < p; ++j) y = m.eval_unchecked(y);
            if (!B.contains(y)) return k;
        }
        if (exceeded) ++*exceeded;
        return std::nullopt;
    });
}

bool entrance_member(const MapSpec& map, const TargetSet& B, double x) {
    if (!B.period) throw PreconditionFailed("entrance ring needs a periodic target");
    if (B.contains(x)) return false;
    return B.contains(maps::iterate_point(map, x, *B.period));
}

ClusterSeries extract_clusters(const HitSeries& h, std::uint64_t p) {
    if (p < 1) throw PreconditionFailed("cluster period must be >= 1");
    ClusterSeries out;
    out.period = p;
    for (std::size_t i = 0; i < h.hit_indices.size(); ++i) {
        if (out.clusters.empty() ||
            h.hit_indices[i] - h.hit_indices[i - 1] != p) {
            out.clusters.push_back({h.hit_indices[i], 1});
        } else {
            ++out.clusters.back().size;
        }
    }
    return out;
}

double theta_theoretical(const MapSpec& map, double zeta, std::uint64_t p,
                         bool on_critical_orbit) {
    if (p < 1) throw PreconditionFailed("period must be >= 1");
    double d = std::abs(maps::deriv_along_orbit(map, zeta, p));
    if (std::abs(d - 1.0) <= 1e-9) return 0.0;  // neutral periodic point
    if (d < 1.0) throw PreconditionFailed("periodic orbit is not expanding");
    return on_critical_orbit ? 1.0 - 1.0 / std::sqrt(d) : 1.0 - 1.0 / d;
}

ThetaEstimate theta_estimates(const MapSpec& map, const TargetSet& B,
                              const EmpiricalMeasure& m, const ClusterSeries& clusters) {
    ThetaEstimate est;
    est.n_clusters = clusters.clusters.size();
    if (est.n_clusters < 500)
        throw InsufficientData("need at least 500 clusters for the geometric fit");
    double mean = 0;
    for (const auto& c : clusters.clusters) mean += static_cast<double>(c.size);
    mean /= static_cast<double>(est.n_clusters);
    double var = 0;
    for (const auto& c : clusters.clusters) {
        double d = static_cast<double>(c.size) - mean;
        var += d * d;
    }
    var /= static_cast<double>(est.n_clusters - 1);
    est.cluster_fit = 1.0 / mean;
    est.cluster_fit_se = std::sqrt(var / static_cast<double>(est.n_clusters)) / (mean * mean);

    if (!B.period) {
        est.ratio = 1.0;  // no escape annulus: Q(B) = B
        est.ratio_se = 0.0;
        est.n_ratio = 0;
        return est;
    }
    auto lo = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta - B.r);
    auto hi = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta + B.r);
    std::uint64_t in_ball = 0, escaped = 0;
    std::uint64_t p = *B.period;
    map.with_concrete([&](const auto& cm) {
        for (auto it = lo; it != hi; ++it) {
            if (!B.contains(*it)) continue;
            ++in_ball;
            double y = *it;
            for (std::uint64_t j = 0; j < p; ++j) y = cm.eval_unchecked(y);
            if (!B.contains(y)) ++escaped;
        }
    });
    if (in_ball < 1000)
        throw InsufficientData("need at least 1e3 measure samples in the ball");
    est.n_ratio = in_ball;
    est.ratio = static_cast<double>(escaped) / static_cast<double>(in_ball);
    est.ratio_se = std::sqrt(est.ratio * (1 - est.ratio) / static_cast<double>(in_ball));
    return est;
}

HitSeries induced_hit_series(const MapSpec& map, const inducing::BaseSet& A,
                             const TargetSet& B, double x0, std::uint64_t induced_horizon,
                             double mass_base_shadow, std::uint64_t cap) {
    if (!A.contains(x0))
        throw PreconditionFailed("induced series must start inside the base");
    HitSeries h;
    h.horizon = induced_horizon;
    h.mass = mass_base_shadow;
    map.with_concrete([&](const auto& m) {
        double x = x0;
        for (std::uint64_t i = 0; i <= induced_horizon; ++i) {
            // shadow membership and the next base return in one excursion
            bool member = B.contains(x);
            double y = x;
            std::uint64_t k = 1;
            for (; k <= cap; ++k) {
                y = m.eval_unchecked(y);
                if (A.contains(y)) break;
                if (!member && B.contains(y)) member = true;
            }
            if (k > cap) throw ReturnCapExceeded(cap);
            if (member) h.hit_indices.push_back(i);
            x = y;
        }
    });
    return h;
}

AnnulusMasses annulus_masses(const MapSpec& map, const TargetSet& B,
                             const EmpiricalMeasure& m, std::uint64_t depth) {
    if (!B.period) throw PreconditionFailed("annulus masses need a periodic target");
    AnnulusMasses out;
    out.n_samples = m.samples.size();
    out.q_count.assign(depth, 0);
    std::uint64_t p = *B.period;
    map.with_concrete([&](const auto& cm) {
        auto lo = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta - B.r);
        auto hi = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta + B.r);
        for (auto it = lo; it != hi; ++it) {
            if (!B.contains(*it)) continue;
            ++out.ball_count;
            double y = *it;
            bool placed = false;
            for (std::uint64_t k = 0; k < depth; ++k) {
                for (std::uint64_t j = 0; j < p; ++j) y = cm.eval_unchecked(y);
                if (!B.contains(y)) {
                    ++out.q_count[k];
                    placed = true;
                    break;
                }
            }
            if (!placed) ++out.core_count;
        }
        // entrance ring: global scan, membership is one p-fold image test
        for (double x : m.samples) {
            if (B.contains(x)) continue;
            double y = x;
            for (std::uint64_t j = 0; j < p; ++j) y = cm.eval_unchecked(y);
            if (B.contains(y)) ++out.entrance_count;
        }
    });
    double n = static_cast<double>(out.n_samples);
    out.q_mass.resize(depth);
    for (std::uint64_t k = 0; k < depth; ++k)
        out.q_mass[k] = static_cast<double>(out.q_count[k]) / n;
    out.entrance_mass = static_cast<double>(out.entrance_count) / n;
    out.ball_mass = static_cast<double>(out.ball_count) / n;
    return out;
}

}  // namespace repp_lab::repp
