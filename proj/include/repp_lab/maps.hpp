#ifndef REPP_LAB_MAPS_HPP
#define REPP_LAB_MAPS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "repp_lab/errors.hpp"

namespace repp_lab::maps {

constexpr double kDomainTol = 1e-12;        // slack allowed outside the invariant interval
constexpr double kBoundaryTol = 1e-12;      // derivative queries this close to a junction fail
constexpr double kPeriodicTol = 1e-13;      // |T^p(zeta) - zeta| for accepted periodic points
constexpr double kPrimePeriodTol = 1e-8;    // proximity that disqualifies a shorter period

// x^e with chained square roots when e is a small quarter-integer multiple;
// the intermittent-family exponents (0.25, 1.25, ...) sit on the slow
// std::pow path otherwise.
class QuarterPow {
  public:
    QuarterPow() : exponent_(1.0), quarters_(4) {}
    explicit QuarterPow(double e) : exponent_(e) {
        double q = std::round(4.0 * e);
        quarters_ = (std::abs(4.0 * e - q) < 1e-12 && q >= 0 && q <= 12.0)
                        ? static_cast<int>(q)
                        : -1;
    }
    double exponent() const { return exponent_; }
    double operator()(double u) const {
        if (quarters_ < 0) return std::pow(u, exponent_);
        double r = std::sqrt(std::sqrt(u));
        double acc = 1.0;
        double base = r;
        int q = quarters_;
        while (q > 0) {
            if (q & 1) acc *= base;
            base *= base;
            q >>= 1;
        }
        return acc;
    }

  private:
    double exponent_;
    int quarters_;
};

// ---------------------------------------------------------------------------
// Quadratic family x -> 1 - a x^2 on [-1, 1]
// ---------------------------------------------------------------------------

struct QuadraticMisParams {
    double a = 2.0;
};

class QuadraticMisMap {
  public:
    explicit QuadraticMisMap(QuadraticMisParams p);

    double eval_unchecked(double x) const { return 1.0 - a_ * x * x; }
    double deriv_unchecked(double x) const { return -2.0 * a_ * x; }

    double domain_lo() const { return -1.0; }
    double domain_hi() const { return 1.0; }
    double a() const { return a_; }

    // No non-differentiable points; every derivative query is fine.
    bool near_branch_boundary(double) const { return false; }

  private:
    double a_;
};

// ---------------------------------------------------------------------------
// Doubly intermittent family on [-1, 1]: neutral fixed points at both
// endpoints, full increasing branches on [-1, 0] and [0, 1], with a monotone
// C^1 cubic glued between the closed-form regions.
// ---------------------------------------------------------------------------

struct DoublyIntermittentParams {
    double l1 = 0.25, l2 = 0.25;   // neutral-escape exponents at -1 / +1
    double k1 = 1.0, k2 = 1.0;     // junction exponents at 0- / 0+
    double a1 = 1.2, a2 = 1.2;
    double b1 = 1.0, b2 = 1.0;
    double iota = 0.1;             // half-width of the central regions

    double beta() const { return std::max(k1 * l1, k2 * l2); }
};

class DoublyIntermittentMap {
  public:
    explicit DoublyIntermittentMap(DoublyIntermittentParams p);

    double eval_unchecked(double x) const;
    double deriv_unchecked(double x) const;

    double domain_lo() const { return -1.0; }
    double domain_hi() const { return 1.0; }

    const DoublyIntermittentParams& params() const { return params_; }
    double beta() const { return params_.beta(); }

    // Region layout: [-1, left_end_], cubic, (-iota, 0], [0, iota), cubic,
    // [right_start_, 1]. The only non-differentiable point is 0 (the two
    // branches meet there with a jump in value).
    double left_neutral_region_end() const { return left_end_; }
    double right_neutral_region_start() const { return right_start_; }
    bool near_branch_boundary(double x) const { return std::abs(x) < kBoundaryTol; }

    // Monotone inverse of the left/right branch, solved by bisection with a
    // Newton polish. y must lie in the branch image.
    double invert_left(double y) const;
    double invert_right(double y) const;

  private:
    struct Cubic {
        // Hermite form on [u, v]
        double u = 0, v = 0, fu = 0, fv = 0, du = 0, dv = 0;
        double eval(double x) const;
        double deriv(double x) const;
        bool monotone_increasing() const;
    };

    double left_branch(double x) const;
    double right_branch(double x) const;
    double left_branch_deriv(double x) const;
    double right_branch_deriv(double x) const;

    DoublyIntermittentParams params_;
    QuarterPow pow_l1p1_, pow_l2p1_;  // u^{1+l1}, u^{1+l2}
    QuarterPow pow_l1_, pow_l2_;      // u^{l1}, u^{l2}
    QuarterPow pow_k1_, pow_k2_;      // u^{k1}, u^{k2}
    QuarterPow pow_k1m1_, pow_k2m1_;  // u^{k1-1}, u^{k2-1}
    double left_end_;                 // -1 + a2 * iota^{k2}
    double right_start_;              // 1 - a1 * iota^{k1}
    Cubic glue_left_, glue_right_;
};

// ---------------------------------------------------------------------------
// Piecewise linear Markov maps on [0, 1]
// ---------------------------------------------------------------------------

struct PiecewiseLinearParams {
    std::vector<double> breakpoints;  // sorted, first = 0, last = 1
    std::vector<double> slopes;       // one per branch, |slope| > 1
};

class PiecewiseLinearMap {
  public:
    explicit PiecewiseLinearMap(PiecewiseLinearParams p);

    double eval_unchecked(double x) const;
    double deriv_unchecked(double x) const;

    double domain_lo() const { return 0.0; }
    double domain_hi() const { return 1.0; }

    std::size_t branch_count() const { return params_.slopes.size(); }
    int branch_of(double x) const;
    double branch_lo(std::size_t i) const { return params_.breakpoints[i]; }
    double branch_hi(std::size_t i) const { return params_.breakpoints[i + 1]; }
    double slope(std::size_t i) const { return params_.slopes[i]; }
    // image of branch i is [image_lo, image_lo + |slope| * width)
    double image_lo(std::size_t i) const { return image_lo_[i]; }

    bool full_branch() const { return full_branch_; }
    bool orientation_preserving() const { return all_positive_; }

    bool near_branch_boundary(double x) const;

    const PiecewiseLinearParams& params() const { return params_; }

  private:
    PiecewiseLinearParams params_;
    std::vector<double> image_lo_;
    bool full_branch_;
    bool all_positive_;
};

// Doubling map 2x mod 1.
PiecewiseLinearParams doubling_params();

// ---------------------------------------------------------------------------
// MapSpec: one fully parameterized family member
// ---------------------------------------------------------------------------

enum class MapFamily { QuadraticMis, DoublyIntermittent, PiecewiseLinearMarkov };

class MapSpec {
  public:
    explicit MapSpec(QuadraticMisParams p) : map_(QuadraticMisMap(p)) {}
    explicit MapSpec(DoublyIntermittentParams p) : map_(DoublyIntermittentMap(p)) {}
    explicit MapSpec(PiecewiseLinearParams p) : map_(PiecewiseLinearMap(std::move(p))) {}

    MapFamily family() const {
        return static_cast<MapFamily>(map_.index());
    }

    double domain_lo() const;
    double domain_hi() const;

    // T(x). Throws NonFiniteInput / OutOfDomain; values within kDomainTol of
    // the boundary are clamped onto it first.
    double eval(double x) const;

    // T'(x) of the active branch. Throws AtBranchBoundary near junctions.
    double deriv(double x) const;

    // stable textual identity, used for cache keys and manifests
    std::string id() const;

    const QuadraticMisMap& quadratic() const;
    const DoublyIntermittentMap& doubly_intermittent() const;
    const PiecewiseLinearMap& piecewise_linear() const;

    template <class Visitor>
    decltype(auto) with_concrete(Visitor&& v) const {
        return std::visit(std::forward<Visitor>(v), map_);
    }

  private:
    double check_input(double x) const;
    std::variant<QuadraticMisMap, DoublyIntermittentMap, PiecewiseLinearMap> map_;
};

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

// Lazy orbit x0, T x0, T^2 x0, ...; constant memory however long it runs.
class OrbitStream {
  public:
    OrbitStream(const MapSpec& map, double x0) : map_(&map), x_(x0) {
        if (!std::isfinite(x0)) throw NonFiniteInput("orbit start is not finite");
    }
    double current() const { return x_; }
    double advance() { return x_ = map_->eval(x_); }

  private:
    const MapSpec* map_;
    double x_;
};

// x0 .. T^n x0 collected into a vector (n + 1 points).
std::vector<double> orbit(const MapSpec& map, double x0, std::uint64_t n);

// (T^n)'(x) as the chain product along the orbit. AtBranchBoundary carries the
// index of the offending orbit point.
double deriv_along_orbit(const MapSpec& map, double x, std::uint64_t n);

// T^p(x)
double iterate_point(const MapSpec& map, double x, std::uint64_t p);

struct Interval {
    double lo = 0, hi = 0;
};

// Periodic point of prime period exactly p inside the bracket; bisection on
// T^p(x) - x followed by a Newton polish.
double find_periodic(const MapSpec& map, std::uint64_t p, Interval bracket);

// ---------------------------------------------------------------------------
// Doubly intermittent structure validation
// ---------------------------------------------------------------------------

struct DIValidationReport {
    double beta = 0;
    double lambda_hat = 0;                       // min sampled (T^n)' over the return ladders
    std::vector<Interval> delta_minus;           // coarse partition of [-1, 0]
    std::vector<Interval> delta_plus;            // coarse partition of [0, 1]
    std::vector<Interval> delta_small_minus;     // return ladder inside delta_minus[0]
    std::vector<Interval> delta_small_plus;
    bool pass = false;
};

DIValidationReport validate_doubly_intermittent(const DoublyIntermittentParams& params,
                                                std::size_t depth);

// True when zeta lies on the forward orbit of the critical point (quadratic
// family only); used to pick the extremal-index formula branch.
bool on_critical_orbit(const MapSpec& map, double zeta, double tol = 1e-9);

}  // namespace repp_lab::maps

#endif
