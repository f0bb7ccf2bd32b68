#ifndef REPP_LAB_ORACLE_HPP
#define REPP_LAB_ORACLE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "repp_lab/maps.hpp"

namespace repp_lab::oracle {

// Union of depth-d cylinders, stored as sorted disjoint id ranges [lo, hi).
// Ids order cylinders spatially (orientation-preserving full-branch maps).
struct CylSet {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;

    static CylSet of_ranges(std::vector<std::pair<std::uint64_t, std::uint64_t>> r);
    bool empty() const { return ranges.empty(); }
    std::uint64_t id_count() const;
};

// Finite-state model of a full-branch, orientation-preserving, constant-slope
// Markov map: states are depth-d cylinder words, the (row-stochastic)
// transition structure is the shift-and-append rule with branch weights equal
// to the branch domain lengths, and Lebesgue is stationary.
class SymbolicSystem {
  public:
    SymbolicSystem(const maps::MapSpec& map, unsigned depth);

    unsigned depth() const { return depth_; }
    std::uint64_t state_count() const { return state_count_; }
    std::size_t alphabet() const { return probs_.size(); }
    double branch_prob(std::size_t i) const { return probs_[i]; }

    double state_mass(std::uint64_t id) const { return stat_[id]; }
    double set_mass(const CylSet& s) const;

    // left endpoint of cylinder `id` (monotone in id), by stable backward
    // nesting of the branch inverses
    double cylinder_lo(std::uint64_t id) const;

    // cylinder set of [a, b); endpoints must align with cylinder boundaries
    // to within `tol`
    CylSet interval(double a, double b, double tol = 1e-9) const;

    // coarsest depth at which every range endpoint of the given sets is still
    // cylinder-aligned; computations on those sets aggregate to it exactly
    unsigned effective_depth(const std::vector<const CylSet*>& sets) const;

    const maps::MapSpec& map() const { return map_; }

  private:
    maps::MapSpec map_;
    unsigned depth_;
    std::uint64_t state_count_;
    std::vector<double> probs_;      // branch domain lengths
    std::vector<double> stat_;       // stationary mass per state
    std::vector<double> cum_;        // prefix sums of stat_
};

// P(first hit of `target` happens at time t), t = 1 .. t_max, starting from
// the stationary law (or from `start`, normalized). Exact up to float
// round-off; computed by taboo evolution of the mass vector.
std::vector<double> exact_hitting_distribution(const SymbolicSystem& sys, const CylSet& target,
                                               std::uint64_t t_max,
                                               const CylSet* start = nullptr,
                                               unsigned threads = 1);

struct ShadowMeasureResult {
    double lhs = 0;             // mass of the shadow set, summed over lags
    double rhs = 0;             // mass of {in E, returning to A no later than E}
    double lhs_tail_bound = 0;  // exact remainder bound from the return-time identity
    double rhs_tail_bound = 0;  // surviving mass when the walk stopped
    std::uint64_t lhs_steps = 0;
    std::uint64_t rhs_steps = 0;
};

// Both sides of the disjoint-union identity for the shadow of E in A,
// truncated at `kmax` lags with certified tail bounds. Throws
// DepthInsufficient when a bound cannot be pushed below 1e-10.
ShadowMeasureResult exact_shadow_measure(const SymbolicSystem& sys, const CylSet& A,
                                         const CylSet& E, std::uint64_t kmax = 1u << 20,
                                         unsigned threads = 1);

// Extremal index of a periodic point of a constant-slope map:
// 1 - (product of |slopes| along the orbit)^(-1).
double exact_theta_linear(const maps::MapSpec& pl_map, double zeta, std::uint64_t p);

}  // namespace repp_lab::oracle

#endif
