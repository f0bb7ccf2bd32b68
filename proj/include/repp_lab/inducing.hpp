#ifndef REPP_LAB_INDUCING_HPP
#define REPP_LAB_INDUCING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repp_lab/maps.hpp"
#include "repp_lab/measure.hpp"
#include "repp_lab/stats.hpp"

namespace repp_lab::repp {
struct TargetSet;  // point_process.hpp
}

namespace repp_lab::inducing {

// Inducing base: a positive-length interval with half-open membership
// [lo, hi). For symmetric quadratic bases the boundary is a periodic point
// whose period is recorded.
struct BaseSet {
    enum class Kind { MisiurewiczSymmetric, DeltaZeroMinus, DeltaZeroPlus, ExplicitInterval };

    Kind kind = Kind::ExplicitInterval;
    double lo = 0;
    double hi = 0;
    std::optional<std::uint64_t> boundary_period;

    bool contains(double x) const { return x >= lo && x < hi; }
    double length() const { return hi - lo; }

    static BaseSet explicit_interval(double lo, double hi);
};

enum class Side { Minus, Plus };

// Delta-zero base of a doubly intermittent map: the outermost rung of the
// coarse partition on the requested side, endpoints solved to 1e-13.
BaseSet base_delta0(const maps::MapSpec& map, Side side);

// Symmetric base (-xi, xi) for the quadratic family, where xi is the
// closest-to-zero periodic point of period <= max_period found in
// (0, max_xi). Ties favour the smaller period.
BaseSet base_misiurewicz(const maps::MapSpec& map, std::uint64_t max_period, double max_xi);

constexpr std::uint64_t kDefaultReturnCap = 10000000;

struct ReturnRecord {
    double x = 0;        // starting point in A
    std::uint64_t r = 0; // first-return time
    double image = 0;    // T^r(x)
};

// First return to A from x in A; throws ReturnCapExceeded past `cap` steps.
ReturnRecord first_return(const maps::MapSpec& map, const BaseSet& A, double x,
                          std::uint64_t cap = kDefaultReturnCap);

// ---------------------------------------------------------------------------
// Return-time tails
// ---------------------------------------------------------------------------

struct TailCurve {
    std::vector<std::uint64_t> t_grid;
    std::vector<double> tail;   // conditional exceedance probability at each t
    std::vector<double> ci_lo;  // Wilson 95%
    std::vector<double> ci_hi;
    std::uint64_t n_returns = 0;
    std::uint64_t censored = 0;  // excursions cut off at the cap
    double censor_fraction = 0;
    double mean_return = 0;
    // fits over grid points inside [fit_lo, fit_hi] with nonzero tail
    double fit_lo = 0, fit_hi = 0;
    stats::LineFit loglog;  // log tail vs log t (polynomial decay rate)
    stats::LineFit loglin;  // log tail vs t (exponential decay rate)

    std::string to_csv() const;  // columns: t,tail,ci_lo,ci_hi
};

struct FitRange {
    double lo = 0, hi = 0;
};

// Empirical tail of the first-return time over the measure's samples in A
// (needs at least 1e4 of them).
TailCurve return_tail(const maps::MapSpec& map, const BaseSet& A,
                      const measure::EmpiricalMeasure& m,
                      const std::vector<std::uint64_t>& t_grid, FitRange fit,
                      std::uint64_t cap = kDefaultReturnCap);

// Same estimator fed by consecutive A-visit gaps along fresh random orbits;
// sharded over a fixed task grid so the counts are independent of the thread
// count. Use this when the tail needs more returns than any cached sample
// holds.
TailCurve return_tail_orbit(const maps::MapSpec& map, const BaseSet& A,
                            std::uint64_t n_returns, std::uint64_t seed, unsigned threads,
                            const std::vector<std::uint64_t>& t_grid, FitRange fit,
                            std::uint64_t cap = kDefaultReturnCap,
                            std::uint64_t burn_in = 10000, std::size_t tasks = 256);

// ---------------------------------------------------------------------------
// Shadow sets
// ---------------------------------------------------------------------------

// Membership of x (in A) in the shadow of B: the minimal lag k >= 0 with
// T^k(x) in B strictly before the first return to A. lag absent means x
// reaches A again without visiting B.
struct ShadowQuery {
    std::optional<std::uint64_t> lag;
    std::uint64_t return_time = 0;
};

ShadowQuery shadow_query(const maps::MapSpec& map, const BaseSet& A,
                         const repp::TargetSet& B, double x,
                         std::uint64_t cap = kDefaultReturnCap);

struct ShadowIdentity {
    double mass_shadow = 0;  // mu(B') estimated over samples in A
    double mass_rhs = 0;     // mu(B and {r_A <= r_B}) estimated over samples in B
    double se_shadow = 0;
    double se_rhs = 0;
    std::uint64_t n_samples = 0;
    std::uint64_t n_in_A = 0;
    std::uint64_t n_in_B = 0;
    std::uint64_t censored = 0;
};

// mu(B'): fraction of all samples that lie in A and shadow B.
double shadow_mass(const maps::MapSpec& map, const BaseSet& A, const repp::TargetSet& B,
                   const measure::EmpiricalMeasure& m,
                   std::uint64_t cap = kDefaultReturnCap);

// Both sides of the disjoint-union identity mu(B') = mu(B and {r_A <= r_B}).
ShadowIdentity shadow_identity_check(const maps::MapSpec& map, const BaseSet& A,
                                     const repp::TargetSet& B,
                                     const measure::EmpiricalMeasure& m,
                                     std::uint64_t cap = kDefaultReturnCap);

// Diagnostics for the two hypotheses gating the induced/original equivalence:
// h1 - under the shadow-conditioned law, the scaled lag to reach B stays
//      below eps except on a vanishing fraction;
// h2 - mass in B returning to B strictly before hitting A.
struct HypDiagnostics {
    double h1 = 0;
    double h2 = 0;
    std::uint64_t n_shadow = 0;
    std::uint64_t n_in_B = 0;
    std::uint64_t censored = 0;
};

HypDiagnostics hyp_diagnostics(const maps::MapSpec& map, const BaseSet& A,
                               const repp::TargetSet& B, const measure::EmpiricalMeasure& m,
                               double eps = 0.01, std::uint64_t cap = kDefaultReturnCap);

}  // namespace repp_lab::inducing

#endif
