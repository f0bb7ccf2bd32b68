#include "repp_lab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "repp_lab/task_pool.hpp"

namespace repp_lab::oracle {

using maps::MapSpec;
using maps::PiecewiseLinearMap;

CylSet CylSet::of_ranges(std::vector<std::pair<std::uint64_t, std::uint64_t>> r) {
    std::erase_if(r, [](const auto& p) { return p.second <= p.first; });
    std::sort(r.begin(), r.end());
    CylSet out;
    for (const auto& p : r) {
        if (!out.ranges.empty() && p.first <= out.ranges.back().second)
            out.ranges.back().second = std::max(out.ranges.back().second, p.second);
        else
            out.ranges.push_back(p);
    }
    return out;
}

std::uint64_t CylSet::id_count() const {
    std::uint64_t n = 0;
    for (const auto& r : ranges) n += r.second - r.first;
    return n;
}

SymbolicSystem::SymbolicSystem(const MapSpec& map, unsigned depth)
    : map_(map), depth_(depth) {
    const auto& pl = map_.piecewise_linear();
    if (!pl.full_branch() || !pl.orientation_preserving())
        throw InvalidMap("the symbolic oracle needs full increasing branches");
    if (depth_ == 0) throw PreconditionFailed("depth must be >= 1");
    const std::size_t m = pl.branch_count();
    double s = 1.0;
    std::uint64_t states = 1;
    for (unsigned k = 0; k < depth_; ++k) {
        states *= m;
        if (states > (1ull << 24)) throw PreconditionFailed("state space above 2^24 cylinders");
    }
    state_count_ = states;
    for (std::size_t i = 0; i < m; ++i) {
        probs_.push_back(pl.branch_hi(i) - pl.branch_lo(i));
        s -= probs_.back();
    }
    if (std::abs(s) > 1e-12) throw InvalidMap("branch lengths must partition [0,1]");

    // stationary mass per word, filled level by level in place
    stat_.assign(state_count_, 0.0);
    stat_[0] = 1.0;
    std::uint64_t level = 1;
    for (unsigned k = 0; k < depth_; ++k) {
        // expand words of length k (ids 0..level-1) to length k+1
        for (std::uint64_t j = level; j-- > 0;) {
            double base = stat_[j];
            for (std::size_t t = m; t-- > 0;)
                stat_[j * m + t] = base * probs_[t];
        }
        level *= m;
    }
    cum_.assign(state_count_ + 1, 0.0);
    for (std::uint64_t i = 0; i < state_count_; ++i) cum_[i + 1] = cum_[i] + stat_[i];
}

double SymbolicSystem::set_mass(const CylSet& s) const {
    double total = 0;
    for (const auto& r : s.ranges) total += cum_[r.second] - cum_[r.first];
    return total;
}

double SymbolicSystem::cylinder_lo(std::uint64_t id) const {
    const auto& pl = map_.piecewise_linear();
    const std::uint64_t m = pl.branch_count();
    // digits most-significant first
    double y = 0.0;
    for (unsigned j = 0; j < depth_; ++j) {
        std::uint64_t digit = id % m;
        id /= m;
        y = pl.branch_lo(digit) + y / pl.slope(digit);
    }
    return y;
}

namespace {

std::uint64_t boundary_id(const SymbolicSystem& sys, double x, double tol) {
    if (x >= 1.0 - tol) return sys.state_count();
    // cylinder_lo is monotone increasing in id
    std::uint64_t lo = 0, hi = sys.state_count();
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (sys.cylinder_lo(mid) <= x)
            lo = mid;
        else
            hi = mid;
    }
    std::uint64_t id = (std::abs(sys.cylinder_lo(lo) - x) <= tol) ? lo : hi;
    if (id == sys.state_count() || std::abs(sys.cylinder_lo(id) - x) > tol)
        throw TargetNotCylinderAligned("interval endpoint off the cylinder grid");
    return id;
}

}  // namespace

CylSet SymbolicSystem::interval(double a, double b, double tol) const {
    if (!(b > a)) throw PreconditionFailed("empty interval");
    if (a < -tol || b > 1.0 + tol) throw PreconditionFailed("interval outside [0,1]");
    std::uint64_t lo = a <= tol ? 0 : boundary_id(*this, a, tol);
    std::uint64_t hi = b >= 1.0 - tol ? state_count_ : boundary_id(*this, b, tol);
    return CylSet::of_ranges({{lo, hi}});
}

unsigned SymbolicSystem::effective_depth(const std::vector<const CylSet*>& sets) const {
    const std::uint64_t m = map_.piecewise_linear().branch_count();
    unsigned coarsest = 0;  // need at least depth 1
    for (const auto* s : sets) {
        for (const auto& r : s->ranges) {
            for (std::uint64_t endpoint : {r.first, r.second}) {
                if (endpoint == 0 || endpoint == state_count_) continue;
                unsigned drop = 0;  // how many trailing digits are zero
                std::uint64_t e = endpoint;
                while (drop < depth_ && e % m == 0) {
                    e /= m;
                    ++drop;
                }
                coarsest = std::max(coarsest, depth_ - drop);
            }
        }
    }
    return std::max(1u, coarsest);
}

namespace {

// one taboo step of the mass vector: pull form, parallel-safe over targets
void advance(const SymbolicSystem& sys, const std::vector<double>& v, std::vector<double>& out,
             unsigned threads) {
    const std::uint64_t m = sys.alphabet();
    const std::uint64_t S = sys.state_count();
    const std::uint64_t shift = S / m;  // m^(d-1)
    auto block = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t j = lo; j < hi; ++j) {
            double acc = 0;
            std::uint64_t prefix = j / m;
            for (std::uint64_t i = 0; i < m; ++i) acc += v[prefix + i * shift];
            out[j] = acc * sys.branch_prob(j % m);
        }
    };
    if (threads <= 1 || S < (1u << 16)) {
        block(0, S);
    } else {
        std::uint64_t nblocks = threads;
        run_tasks(nblocks, threads, [&](std::size_t b) {
            std::uint64_t lo = S * b / nblocks;
            std::uint64_t hi = S * (b + 1) / nblocks;
            block(lo, hi);
        });
    }
}

double sum_over(const std::vector<double>& v, const CylSet& s) {
    double total = 0;
    for (const auto& r : s.ranges)
        for (std::uint64_t i = r.first; i < r.second; ++i) total += v[i];
    return total;
}

void zero_over(std::vector<double>& v, const CylSet& s) {
    for (const auto& r : s.ranges)
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(r.first),
                  v.begin() + static_cast<std::ptrdiff_t>(r.second), 0.0);
}

double total_mass(const std::vector<double>& v) {
    double total = 0;
    for (double x : v) total += x;
    return total;
}

CylSet intersect(const CylSet& a, const CylSet& b) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (const auto& ra : a.ranges)
        for (const auto& rb : b.ranges) {
            std::uint64_t lo = std::max(ra.first, rb.first);
            std::uint64_t hi = std::min(ra.second, rb.second);
            if (hi > lo) out.emplace_back(lo, hi);
        }
    return CylSet::of_ranges(std::move(out));
}

CylSet rescale(const CylSet& s, std::uint64_t factor) {
    CylSet out;
    for (const auto& r : s.ranges) out.ranges.emplace_back(r.first / factor, r.second / factor);
    return out;
}

}  // namespace

std::vector<double> exact_hitting_distribution(const SymbolicSystem& sys, const CylSet& target,
                                               std::uint64_t t_max, const CylSet* start,
                                               unsigned threads) {
    if (target.empty()) throw PreconditionFailed("empty target");
    std::vector<double> v(sys.state_count());
    if (start) {
        std::fill(v.begin(), v.end(), 0.0);
        for (const auto& r : start->ranges)
            for (std::uint64_t i = r.first; i < r.second; ++i) v[i] = sys.state_mass(i);
        double norm = total_mass(v);
        if (norm <= 0) throw PreconditionFailed("empty start set");
        for (auto& x : v) x /= norm;
    } else {
        for (std::uint64_t i = 0; i < sys.state_count(); ++i) v[i] = sys.state_mass(i);
    }
    std::vector<double> next(sys.state_count());
    std::vector<double> pmf;
    pmf.reserve(t_max);
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        advance(sys, v, next, threads);
        pmf.push_back(sum_over(next, target));
        zero_over(next, target);
        v.swap(next);
    }
    return pmf;
}

ShadowMeasureResult exact_shadow_measure(const SymbolicSystem& sys, const CylSet& A,
                                         const CylSet& E, std::uint64_t kmax,
                                         unsigned threads) {
    if (A.empty()) throw PreconditionFailed("empty base set");
    // aggregate exactly to the coarsest depth resolving both sets
    unsigned eff = sys.effective_depth({&A, &E});
    if (eff < sys.depth()) {
        std::uint64_t factor = sys.state_count();
        SymbolicSystem coarse(sys.map(), eff);
        factor /= coarse.state_count();
        return exact_shadow_measure(coarse, rescale(A, factor), rescale(E, factor), kmax,
                                    threads);
    }

    constexpr double kStopBound = 1e-12;
    constexpr double kRequiredBound = 1e-10;
    ShadowMeasureResult res;

    // shadow side: walkers start on A and are retired at their first A-return
    // (not in the shadow) or first E-visit (in the shadow, counted once); the
    // lag terms of the union are disjoint only after this first-visit split
    std::vector<double> v(sys.state_count(), 0.0);
    for (const auto& r : A.ranges)
        for (std::uint64_t i = r.first; i < r.second; ++i) v[i] = sys.state_mass(i);
    std::vector<double> next(sys.state_count());
    res.lhs = sys.set_mass(intersect(A, E));  // lag 0
    zero_over(v, E);
    double surviving = total_mass(v);
    std::uint64_t k = 0;
    while (surviving > kStopBound && k < kmax) {
        ++k;
        advance(sys, v, next, threads);
        zero_over(next, A);  // returned without seeing E
        res.lhs += sum_over(next, E);
        zero_over(next, E);  // counted; each walker contributes once
        surviving = total_mass(next);
        v.swap(next);
    }
    res.lhs_steps = k;
    res.lhs_tail_bound = surviving;
    if (res.lhs_tail_bound > kRequiredBound)
        throw DepthInsufficient("shadow truncation bound above 1e-10; raise kmax");

    // return-comparison side: mass of E entering A before revisiting E
    std::fill(v.begin(), v.end(), 0.0);
    for (const auto& r : E.ranges)
        for (std::uint64_t i = r.first; i < r.second; ++i) v[i] = sys.state_mass(i);
    surviving = total_mass(v);
    res.rhs = 0;
    k = 0;
    while (surviving > kStopBound && k < kmax) {
        ++k;
        advance(sys, v, next, threads);
        res.rhs += sum_over(next, A);
        zero_over(next, A);
        zero_over(next, E);
        surviving = total_mass(next);
        v.swap(next);
    }
    res.rhs_steps = k;
    res.rhs_tail_bound = surviving;
    if (res.rhs_tail_bound > kRequiredBound)
        throw DepthInsufficient("return-comparison truncation bound above 1e-10; raise kmax");
    return res;
}

double exact_theta_linear(const MapSpec& pl_map, double zeta, std::uint64_t p) {
    const auto& pl = pl_map.piecewise_linear();
    if (p < 1) throw PreconditionFailed("period must be >= 1");
    double prod = 1.0;
    double y = zeta;
    for (std::uint64_t i = 0; i < p; ++i) {
        prod *= std::abs(pl.slope(static_cast<std::size_t>(pl.branch_of(y))));
        y = pl.eval_unchecked(y);
    }
    if (std::abs(y - zeta) > 1e-10) throw NotPeriodic("point does not close up after p steps");
    return 1.0 - 1.0 / prod;
}

}  // namespace repp_lab::oracle
