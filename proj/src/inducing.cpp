#include "repp_lab/inducing.hpp"

#include <algorithm>
#include <cmath>

#include "repp_lab/orbit_cursor.hpp"
#include "repp_lab/point_process.hpp"
#include "repp_lab/task_pool.hpp"

namespace repp_lab::inducing {

using maps::MapSpec;
using measure::EmpiricalMeasure;

BaseSet BaseSet::explicit_interval(double lo, double hi) {
    if (!(hi > lo)) throw PreconditionFailed("base set needs positive length");
    return BaseSet{Kind::ExplicitInterval, lo, hi, std::nullopt};
}

BaseSet base_delta0(const MapSpec& map, Side side) {
    const auto& di = map.doubly_intermittent();  // throws InvalidFamily otherwise
    if (side == Side::Minus) {
        double lo = di.invert_left(0.0);
        return BaseSet{BaseSet::Kind::DeltaZeroMinus, lo, 0.0, std::nullopt};
    }
    double hi = di.invert_right(0.0);
    return BaseSet{BaseSet::Kind::DeltaZeroPlus, 0.0, hi, std::nullopt};
}

BaseSet base_misiurewicz(const MapSpec& map, std::uint64_t max_period, double max_xi) {
    (void)map.quadratic();  // family check
    if (!(max_xi > 0)) throw PreconditionFailed("max_xi must be positive");
    double best_xi = 0;
    std::uint64_t best_period = 0;
    bool found = false;
    for (std::uint64_t p = 1; p <= max_period; ++p) {
        // isolate sign changes of T^p(x) - x on a fine grid of (0, max_xi)
        const std::size_t grid = 512 * static_cast<std::size_t>(p);
        double prev_x = 1e-6 * max_xi;
        double prev_g = maps::iterate_point(map, prev_x, p) - prev_x;
        for (std::size_t i = 1; i <= grid; ++i) {
            double x = max_xi * static_cast<double>(i) / static_cast<double>(grid);
            double g = maps::iterate_point(map, x, p) - x;
            if ((g < 0) != (prev_g < 0) || g == 0) {
                try {
                    double xi = maps::find_periodic(map, p, {prev_x, x});
                    if (xi > 0 && xi < max_xi && (!found || xi < best_xi)) {
                        best_xi = xi;
                        best_period = p;
                        found = true;
                    }
                } catch (const NotPrimePeriod&) {
                } catch (const NoSignChange&) {
                }
            }
            prev_x = x;
            prev_g = g;
        }
    }
    if (!found) throw NoPeriodicPointFound("no periodic boundary point below max_xi");
    return BaseSet{BaseSet::Kind::MisiurewiczSymmetric, -best_xi, best_xi, best_period};
}

namespace {

// walk x forward until entering A; returns the step count and leaves x at the
// entry point, or returns 0 if the cap was hit
template <class M>
std::uint64_t walk_to_base(const M& map, const BaseSet& A, double& x, std::uint64_t cap) {
    double y = x;
    for (std::uint64_t k = 1; k <= cap; ++k) {
        y = map.eval_unchecked(y);
        if (A.contains(y)) {
            x = y;
            return k;
        }
    }
    return 0;
}

}  // namespace

ReturnRecord first_return(const MapSpec& map, const BaseSet& A, double x, std::uint64_t cap) {
    if (!A.contains(x)) throw PreconditionFailed("first_return start must lie in the base");
    if (cap < 1) throw PreconditionFailed("cap must be >= 1");
    return map.with_concrete([&](const auto& m) {
        double y = x;
        std::uint64_t r = walk_to_base(m, A, y, cap);
        if (r == 0) throw ReturnCapExceeded(cap);
        return ReturnRecord{x, r, y};
    });
}

// ---------------------------------------------------------------------------
// Tails
// ---------------------------------------------------------------------------

namespace {

struct TailAccumulator {
    std::vector<std::uint64_t> bucket;  // bucket[i]: returns with t_{i-1} < r <= t_i
    std::uint64_t overflow = 0;         // r beyond the last grid point
    std::uint64_t censored = 0;
    std::uint64_t n = 0;
    double sum = 0;

    explicit TailAccumulator(std::size_t grid_size) : bucket(grid_size, 0) {}

    void add(const std::vector<std::uint64_t>& grid, std::uint64_t r) {
        ++n;
        sum += static_cast<double>(r);
        auto it = std::lower_bound(grid.begin(), grid.end(), r);
        if (it == grid.end())
            ++overflow;
        else
            ++bucket[static_cast<std::size_t>(it - grid.begin())];
    }

    void add_censored() {
        ++n;
        ++censored;
    }

    void merge(const TailAccumulator& other) {
        for (std::size_t i = 0; i < bucket.size(); ++i) bucket[i] += other.bucket[i];
        overflow += other.overflow;
        censored += other.censored;
        n += other.n;
        sum += other.sum;
    }
};

TailCurve finalize_tail(const std::vector<std::uint64_t>& grid, const TailAccumulator& acc,
                        FitRange fit) {
    TailCurve curve;
    curve.t_grid = grid;
    curve.n_returns = acc.n;
    curve.censored = acc.censored;
    curve.censor_fraction =
        acc.n == 0 ? 0.0 : static_cast<double>(acc.censored) / static_cast<double>(acc.n);
    curve.mean_return = acc.n == acc.censored
                            ? 0.0
                            : acc.sum / static_cast<double>(acc.n - acc.censored);
    curve.fit_lo = fit.lo;
    curve.fit_hi = fit.hi;

    // suffix sums: exceedances of each grid point; censored excursions exceed
    // every finite t on the grid
    std::uint64_t beyond = acc.overflow + acc.censored;
    std::vector<std::uint64_t> exceed(grid.size(), 0);
    for (std::size_t i = grid.size(); i-- > 0;) {
        beyond += i + 1 < grid.size() ? acc.bucket[i + 1] : 0;
        // bucket[i] holds r <= t_i, so exceedances of t_i skip it
        exceed[i] = beyond;
    }
    curve.tail.resize(grid.size());
    curve.ci_lo.resize(grid.size());
    curve.ci_hi.resize(grid.size());
    std::vector<double> fx_log, fy_log, fx_lin;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        curve.tail[i] =
            acc.n == 0 ? 0.0 : static_cast<double>(exceed[i]) / static_cast<double>(acc.n);
        auto iv = stats::wilson(exceed[i], acc.n);
        curve.ci_lo[i] = iv.lo;
        curve.ci_hi[i] = iv.hi;
        double t = static_cast<double>(grid[i]);
        if (t >= fit.lo && t <= fit.hi && curve.tail[i] > 0) {
            fx_log.push_back(std::log(t));
            fx_lin.push_back(t);
            fy_log.push_back(std::log(curve.tail[i]));
        }
    }
    if (fx_log.size() >= 3) {
        curve.loglog = stats::fit_line(fx_log, fy_log);
        curve.loglin = stats::fit_line(fx_lin, fy_log);
    }
    return curve;
}

}  // namespace

std::string TailCurve::to_csv() const {
    std::string out = "t,tail,ci_lo,ci_hi\n";
    char line[128];
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        std::snprintf(line, sizeof(line), "%llu,%.12g,%.12g,%.12g\n",
                      static_cast<unsigned long long>(t_grid[i]), tail[i], ci_lo[i], ci_hi[i]);
        out += line;
    }
    return out;
}

TailCurve return_tail(const MapSpec& map, const BaseSet& A, const EmpiricalMeasure& m,
                      const std::vector<std::uint64_t>& t_grid, FitRange fit,
                      std::uint64_t cap) {
    if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw PreconditionFailed("tail grid must be sorted and non-empty");
    auto lo = std::lower_bound(m.samples.begin(), m.samples.end(), A.lo);
    auto hi = std::lower_bound(m.samples.begin(), m.samples.end(), A.hi);
    if (hi - lo < 10000)
        throw InsufficientBaseSamples("need at least 1e4 measure samples in the base");
    TailAccumulator acc(t_grid.size());
    map.with_concrete([&](const auto& cm) {
        for (auto it = lo; it != hi; ++it) {
            double y = *it;
            std::uint64_t r = walk_to_base(cm, A, y, cap);
            if (r == 0)
                acc.add_censored();
            else
                acc.add(t_grid, r);
        }
    });
    return finalize_tail(t_grid, acc, fit);
}

TailCurve return_tail_orbit(const MapSpec& map, const BaseSet& A, std::uint64_t n_returns,
                            std::uint64_t seed, unsigned threads,
                            const std::vector<std::uint64_t>& t_grid, FitRange fit,
                            std::uint64_t cap, std::uint64_t burn_in, std::size_t tasks) {
    if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()))
        throw PreconditionFailed("tail grid must be sorted and non-empty");
    if (tasks == 0) tasks = 1;
    std::vector<TailAccumulator> parts(tasks, TailAccumulator(t_grid.size()));
    std::uint64_t per = n_returns / tasks;
    std::uint64_t extra = n_returns % tasks;
    run_tasks(tasks, threads, [&](std::size_t t) {
        std::uint64_t want = per + (t < extra ? 1 : 0);
        TailAccumulator& acc = parts[t];
        maps::with_cursor(map, derive_seed(seed, t), [&](auto& cursor) {
            cursor.burn(burn_in);
            std::uint64_t prior_restarts = cursor.restarts();
            // advance to the first visit; gaps between later visits sample the
            // conditional return law
            while (!A.contains(cursor.x())) cursor.step();
            std::uint64_t gap = 0;
            while (acc.n < want) {
                cursor.step();
                ++gap;
                if (cursor.restarts() != prior_restarts) {
                    // reseeded mid-gap: drop the straddling gap
                    prior_restarts = cursor.restarts();
                    while (!A.contains(cursor.x())) cursor.step();
                    gap = 0;
                    continue;
                }
                if (A.contains(cursor.x())) {
                    acc.add(t_grid, gap);
                    gap = 0;
                } else if (gap >= cap) {
                    acc.add_censored();
                    while (!A.contains(cursor.x())) cursor.step();
                    gap = 0;
                }
            }
        });
    });
    TailAccumulator total(t_grid.size());
    for (const auto& p : parts) total.merge(p);
    return finalize_tail(t_grid, total, fit);
}

// ---------------------------------------------------------------------------
// Shadow sets
// ---------------------------------------------------------------------------

namespace {

// one shadow walk: x in A; record the minimal k in [0, r_A) with T^k(x) in B
template <class M>
bool shadow_walk(const M& map, const BaseSet& A, const repp::TargetSet& B, double x,
                 std::uint64_t cap, std::uint64_t& lag, std::uint64_t& return_time) {
    std::uint64_t found_lag = 0;
    bool found = B.contains(x);
    double y = x;
    for (std::uint64_t k = 1; k <= cap; ++k) {
        y = map.eval_unchecked(y);
        if (A.contains(y)) {
            return_time = k;
            lag = found_lag;
            return found;
        }
        if (!found && B.contains(y)) {
            found = true;
            found_lag = k;
        }
    }
    throw ReturnCapExceeded(cap);
}

}  // namespace

ShadowQuery shadow_query(const MapSpec& map, const BaseSet& A, const repp::TargetSet& B,
                         double x, std::uint64_t cap) {
    if (!A.contains(x)) throw PreconditionFailed("shadow query start must lie in the base");
    return map.with_concrete([&](const auto& cm) {
        std::uint64_t lag = 0, rt = 0;
        bool member = shadow_walk(cm, A, B, x, cap, lag, rt);
        ShadowQuery q;
        q.return_time = rt;
        if (member) q.lag = lag;
        return q;
    });
}

ShadowIdentity shadow_identity_check(const MapSpec& map, const BaseSet& A,
                                     const repp::TargetSet& B, const EmpiricalMeasure& m,
                                     std::uint64_t cap) {
    ShadowIdentity out;
    out.n_samples = m.samples.size();
    auto a_lo = std::lower_bound(m.samples.begin(), m.samples.end(), A.lo);
    auto a_hi = std::lower_bound(m.samples.begin(), m.samples.end(), A.hi);
    std::uint64_t shadow_count = 0;
    map.with_concrete([&](const auto& cm) {
        for (auto it = a_lo; it != a_hi; ++it) {
            ++out.n_in_A;
            std::uint64_t lag = 0, rt = 0;
            try {
                if (shadow_walk(cm, A, B, *it, cap, lag, rt)) ++shadow_count;
            } catch (const ReturnCapExceeded&) {
                ++out.censored;
            }
        }
        // right-hand side: samples in B that reach A no later than B
        auto b_lo = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta - B.r);
        auto b_hi = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta + B.r);
        std::uint64_t rhs_count = 0;
        for (auto it = b_lo; it != b_hi; ++it) {
            if (!B.contains(*it)) continue;
            ++out.n_in_B;
            double y = *it;
            bool decided = false;
            for (std::uint64_t k = 1; k <= cap; ++k) {
                y = cm.eval_unchecked(y);
                if (A.contains(y)) {  // ties (A and B together) count: r_A <= r_B
                    ++rhs_count;
                    decided = true;
                    break;
                }
                if (B.contains(y)) {
                    decided = true;
                    break;
                }
            }
            if (!decided) ++out.censored;
        }
        double n = static_cast<double>(out.n_samples);
        out.mass_shadow = static_cast<double>(shadow_count) / n;
        out.mass_rhs = static_cast<double>(rhs_count) / n;
        out.se_shadow = std::sqrt(out.mass_shadow * (1 - out.mass_shadow) / n);
        out.se_rhs = std::sqrt(out.mass_rhs * (1 - out.mass_rhs) / n);
    });
    return out;
}

double shadow_mass(const MapSpec& map, const BaseSet& A, const repp::TargetSet& B,
                   const EmpiricalMeasure& m, std::uint64_t cap) {
    return shadow_identity_check(map, A, B, m, cap).mass_shadow;
}

HypDiagnostics hyp_diagnostics(const MapSpec& map, const BaseSet& A, const repp::TargetSet& B,
                               const EmpiricalMeasure& m, double eps, std::uint64_t cap) {
    HypDiagnostics out;
    auto a_lo = std::lower_bound(m.samples.begin(), m.samples.end(), A.lo);
    auto a_hi = std::lower_bound(m.samples.begin(), m.samples.end(), A.hi);
    map.with_concrete([&](const auto& cm) {
        // first pass: shadow members and their lags
        std::vector<std::uint64_t> lags;
        for (auto it = a_lo; it != a_hi; ++it) {
            std::uint64_t lag = 0, rt = 0;
            try {
                if (shadow_walk(cm, A, B, *it, cap, lag, rt)) lags.push_back(lag);
            } catch (const ReturnCapExceeded&) {
                ++out.censored;
            }
        }
        out.n_shadow = lags.size();
        double mass_shadow =
            static_cast<double>(lags.size()) / static_cast<double>(m.samples.size());
        std::uint64_t big = 0;
        for (auto lag : lags)
            if (mass_shadow * static_cast<double>(lag) >= eps) ++big;
        out.h1 = lags.empty() ? 0.0
                              : static_cast<double>(big) / static_cast<double>(lags.size());

        // second pass: mass in B returning to B strictly before hitting A
        auto b_lo = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta - B.r);
        auto b_hi = std::lower_bound(m.samples.begin(), m.samples.end(), B.zeta + B.r);
        std::uint64_t early = 0;
        for (auto it = b_lo; it != b_hi; ++it) {
            if (!B.contains(*it)) continue;
            ++out.n_in_B;
            double y = *it;
            for (std::uint64_t k = 1; k <= cap; ++k) {
                y = cm.eval_unchecked(y);
                if (A.contains(y)) break;
                if (B.contains(y)) {
                    ++early;
                    break;
                }
                if (k == cap) ++out.censored;
            }
        }
        out.h2 = out.n_in_B == 0
                     ? 0.0
                     : static_cast<double>(early) / static_cast<double>(out.n_in_B);
    });
    return out;
}

}  // namespace repp_lab::inducing
