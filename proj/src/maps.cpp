#include "repp_lab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace repp_lab::maps {

namespace {

// root of f on [lo, hi] by bisection (f monotone or at least sign-changing),
// then Newton polish with df when supplied
template <class F, class DF>
double solve_root(F&& f, DF&& df, double lo, double hi, int newton_steps = 8) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0)) throw RootNotBracketed("root not bracketed");
    for (int i = 0; i < 200 && hi - lo > 1e-17 * (1.0 + std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < newton_steps; ++i) {
        double d = df(x);
        if (d == 0 || !std::isfinite(d)) break;
        double step = f(x) / d;
        double next = x - step;
        if (next < lo || next > hi) break;
        x = next;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
    }
    return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadraticMisMap
// ---------------------------------------------------------------------------

QuadraticMisMap::QuadraticMisMap(QuadraticMisParams p) : a_(p.a) {
    if (!(p.a > 0.0 && p.a <= 2.0))
        throw InvalidMap("quadratic parameter a must lie in (0, 2]");
}

// ---------------------------------------------------------------------------
// DoublyIntermittentMap
// ---------------------------------------------------------------------------

double DoublyIntermittentMap::Cubic::eval(double x) const {
    double h = v - u;
    double t = (x - u) / h;
    double t2 = t * t;
    double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * fu + (t3 - 2 * t2 + t) * h * du +
           (-2 * t3 + 3 * t2) * fv + (t3 - t2) * h * dv;
}

double DoublyIntermittentMap::Cubic::deriv(double x) const {
    double h = v - u;
    double t = (x - u) / h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) * fu + (3 * t2 - 4 * t + 1) * h * du +
            (-6 * t2 + 6 * t) * fv + (3 * t2 - 2 * t) * h * dv) /
           h;
}

bool DoublyIntermittentMap::Cubic::monotone_increasing() const {
    // derivative of the Hermite cubic is a quadratic in t; check its minimum
    // over [0, 1] directly
    double h = v - u;
    auto dt = [&](double t) {
        double t2 = t * t;
        return (6 * t2 - 6 * t) * fu + (3 * t2 - 4 * t + 1) * h * du +
               (-6 * t2 + 6 * t) * fv + (3 * t2 - 2 * t) * h * dv;
    };
    if (dt(0) < 0 || dt(1) < 0) return false;
    // vertex of the quadratic a2 t^2 + a1 t + a0
    double a2 = 6 * fu + 3 * h * du - 6 * fv + 3 * h * dv;
    double a1 = -6 * fu - 4 * h * du + 6 * fv - 2 * h * dv;
    if (a2 != 0) {
        double t_star = -a1 / (2 * a2);
        if (t_star > 0 && t_star < 1 && dt(t_star) < 0) return false;
    }
    return true;
}

DoublyIntermittentMap::DoublyIntermittentMap(DoublyIntermittentParams p) : params_(p) {
    if (!(p.l1 >= 0 && p.l2 >= 0))
        throw InvalidMap("neutral exponents l1, l2 must be >= 0");
    if (!(p.k1 > 0 && p.k2 > 0 && p.a1 > 0 && p.a2 > 0 && p.b1 > 0 && p.b2 > 0))
        throw InvalidMap("k1, k2, a1, a2, b1, b2 must be positive");
    if (!(p.iota > 0 && p.iota < 1))
        throw InvalidMap("iota must lie in (0, 1)");
    if (!(p.beta() < 1.0))
        throw BetaTooLarge("beta = max(k1*l1, k2*l2) must be < 1");
    if (p.k1 == 1.0 && !(p.a1 > 1.0))
        throw InvalidMap("k1 = 1 requires a1 > 1");
    if (p.k2 == 1.0 && !(p.a2 > 1.0))
        throw InvalidMap("k2 = 1 requires a2 > 1");

    pow_l1p1_ = QuarterPow(1.0 + p.l1);
    pow_l2p1_ = QuarterPow(1.0 + p.l2);
    pow_l1_ = QuarterPow(p.l1);
    pow_l2_ = QuarterPow(p.l2);
    pow_k1_ = QuarterPow(p.k1);
    pow_k2_ = QuarterPow(p.k2);
    pow_k1m1_ = QuarterPow(p.k1 - 1.0);
    pow_k2m1_ = QuarterPow(p.k2 - 1.0);

    left_end_ = -1.0 + p.a2 * std::pow(p.iota, p.k2);
    right_start_ = 1.0 - p.a1 * std::pow(p.iota, p.k1);
    if (!(left_end_ < -p.iota))
        throw InvalidMap("left neutral region overlaps the central region; shrink iota or a2");
    if (!(right_start_ > p.iota))
        throw InvalidMap("right neutral region overlaps the central region; shrink iota or a1");

    auto f1 = [&](double x) { return x + p.b1 * pow_l1p1_(1.0 + x); };
    auto f1d = [&](double x) { return 1.0 + p.b1 * (1.0 + p.l1) * pow_l1_(1.0 + x); };
    auto f2 = [&](double x) { return 1.0 - p.a1 * pow_k1_(-x); };
    auto f2d = [&](double x) { return p.a1 * p.k1 * pow_k1m1_(-x); };
    auto f3 = [&](double x) { return -1.0 + p.a2 * pow_k2_(x); };
    auto f3d = [&](double x) { return p.a2 * p.k2 * pow_k2m1_(x); };
    auto f4 = [&](double x) { return x - p.b2 * pow_l2p1_(1.0 - x); };
    auto f4d = [&](double x) { return 1.0 + p.b2 * (1.0 + p.l2) * pow_l2_(1.0 - x); };

    glue_left_ = Cubic{left_end_, -p.iota, f1(left_end_), f2(-p.iota), f1d(left_end_),
                       f2d(-p.iota)};
    glue_right_ = Cubic{p.iota, right_start_, f3(p.iota), f4(right_start_), f3d(p.iota),
                        f4d(right_start_)};
    if (!(glue_left_.fu < glue_left_.fv) || !glue_left_.monotone_increasing())
        throw InvalidMap("left branch cannot be glued monotonically; adjust b1/a1/iota");
    if (!(glue_right_.fu < glue_right_.fv) || !glue_right_.monotone_increasing())
        throw InvalidMap("right branch cannot be glued monotonically; adjust b2/a2/iota");
}

double DoublyIntermittentMap::left_branch(double x) const {
    const auto& p = params_;
    if (x <= left_end_) return x + p.b1 * pow_l1p1_(1.0 + x);
    if (x > -p.iota) return 1.0 - p.a1 * pow_k1_(-x);
    return glue_left_.eval(x);
}

double DoublyIntermittentMap::right_branch(double x) const {
    const auto& p = params_;
    if (x < p.iota) return -1.0 + p.a2 * pow_k2_(x);
    if (x >= right_start_) return x - p.b2 * pow_l2p1_(1.0 - x);
    return glue_right_.eval(x);
}

double DoublyIntermittentMap::left_branch_deriv(double x) const {
    const auto& p = params_;
    if (x <= left_end_) return 1.0 + p.b1 * (1.0 + p.l1) * pow_l1_(1.0 + x);
    if (x > -p.iota) return p.a1 * p.k1 * pow_k1m1_(-x);
    return glue_left_.deriv(x);
}

double DoublyIntermittentMap::right_branch_deriv(double x) const {
    const auto& p = params_;
    if (x < p.iota) return p.a2 * p.k2 * pow_k2m1_(x);
    if (x >= right_start_) return 1.0 + p.b2 * (1.0 + p.l2) * pow_l2_(1.0 - x);
    return glue_right_.deriv(x);
}

double DoublyIntermittentMap::eval_unchecked(double x) const {
    // x = 0 belongs to the right branch (half-open convention)
    return x < 0.0 ? left_branch(x) : right_branch(x);
}

double DoublyIntermittentMap::deriv_unchecked(double x) const {
    return x < 0.0 ? left_branch_deriv(x) : right_branch_deriv(x);
}

double DoublyIntermittentMap::invert_left(double y) const {
    auto f = [&](double x) { return left_branch(x) - y; };
    auto df = [&](double x) { return left_branch_deriv(x); };
    return solve_root(f, df, -1.0, 0.0);
}

double DoublyIntermittentMap::invert_right(double y) const {
    auto f = [&](double x) { return right_branch(x) - y; };
    auto df = [&](double x) { return right_branch_deriv(x); };
    return solve_root(f, df, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// PiecewiseLinearMap
// ---------------------------------------------------------------------------

PiecewiseLinearMap::PiecewiseLinearMap(PiecewiseLinearParams p) : params_(std::move(p)) {
    const auto& bp = params_.breakpoints;
    const auto& sl = params_.slopes;
    if (bp.size() < 2 || sl.size() + 1 != bp.size())
        throw InvalidMap("need n+1 breakpoints for n branches");
    if (std::abs(bp.front()) > 1e-15 || std::abs(bp.back() - 1.0) > 1e-15)
        throw InvalidMap("breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        if (!(bp[i] < bp[i + 1])) throw InvalidMap("breakpoints must be strictly increasing");
    all_positive_ = true;
    full_branch_ = true;
    image_lo_.resize(sl.size());
    for (std::size_t i = 0; i < sl.size(); ++i) {
        if (!(std::abs(sl[i]) > 1.0)) throw InvalidMap("all |slopes| must exceed 1");
        if (sl[i] < 0) all_positive_ = false;
        double width = bp[i + 1] - bp[i];
        double span = std::abs(sl[i]) * width;
        // branch image must be a union of partition elements; we support the
        // full-branch case (image = [0,1]) and verify alignment for it
        image_lo_[i] = 0.0;
        if (std::abs(span - 1.0) > 1e-9) full_branch_ = false;
    }
    if (!full_branch_)
        throw InvalidMap("branch images must cover [0,1]; non-full Markov branches unsupported");
}

int PiecewiseLinearMap::branch_of(double x) const {
    const auto& bp = params_.breakpoints;
    // half-open cells [b_i, b_{i+1}); x = 1 belongs to the last branch
    auto it = std::upper_bound(bp.begin(), bp.end(), x);
    int i = static_cast<int>(it - bp.begin()) - 1;
    if (i < 0) i = 0;
    if (i >= static_cast<int>(params_.slopes.size()))
        i = static_cast<int>(params_.slopes.size()) - 1;
    return i;
}

double PiecewiseLinearMap::eval_unchecked(double x) const {
    int i = branch_of(x);
    double s = params_.slopes[i];
    double y = s > 0 ? s * (x - params_.breakpoints[i])
                     : 1.0 + s * (x - params_.breakpoints[i]);
    // keep orbits inside [0, 1): endpoint images fold back by the mod-1 convention
    if (y >= 1.0) y -= 1.0;
    if (y < 0.0) y = 0.0;
    return y;
}

double PiecewiseLinearMap::deriv_unchecked(double x) const {
    return params_.slopes[branch_of(x)];
}

bool PiecewiseLinearMap::near_branch_boundary(double x) const {
    for (std::size_t i = 1; i + 1 < params_.breakpoints.size(); ++i)
        if (std::abs(x - params_.breakpoints[i]) < kBoundaryTol) return true;
    return false;
}

PiecewiseLinearParams doubling_params() {
    return PiecewiseLinearParams{{0.0, 0.5, 1.0}, {2.0, 2.0}};
}

// ---------------------------------------------------------------------------
// MapSpec
// ---------------------------------------------------------------------------

double MapSpec::domain_lo() const {
    return with_concrete([](const auto& m) { return m.domain_lo(); });
}

double MapSpec::domain_hi() const {
    return with_concrete([](const auto& m) { return m.domain_hi(); });
}

double MapSpec::check_input(double x) const {
    if (!std::isfinite(x)) throw NonFiniteInput("map input is not finite");
    double lo = domain_lo();
    double hi = domain_hi();
    if (x < lo) {
        if (x < lo - kDomainTol) throw OutOfDomain("point below the invariant interval");
        return lo;
    }
    if (x > hi) {
        if (x > hi + kDomainTol) throw OutOfDomain("point above the invariant interval");
        return hi;
    }
    return x;
}

double MapSpec::eval(double x) const {
    double xc = check_input(x);
    return with_concrete([xc](const auto& m) { return m.eval_unchecked(xc); });
}

double MapSpec::deriv(double x) const {
    double xc = check_input(x);
    bool boundary = with_concrete([xc](const auto& m) { return m.near_branch_boundary(xc); });
    if (boundary)
        throw AtBranchBoundary("derivative queried at a branch junction");
    return with_concrete([xc](const auto& m) { return m.deriv_unchecked(xc); });
}

std::string MapSpec::id() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* q = std::get_if<QuadraticMisMap>(&map_)) {
        os << "quad_a" << q->a();
    } else if (const auto* d = std::get_if<DoublyIntermittentMap>(&map_)) {
        const auto& p = d->params();
        os << "di_l" << p.l1 << "_" << p.l2 << "_k" << p.k1 << "_" << p.k2 << "_a" << p.a1
           << "_" << p.a2 << "_b" << p.b1 << "_" << p.b2 << "_i" << p.iota;
    } else {
        const auto& p = std::get<PiecewiseLinearMap>(map_).params();
        os << "pl";
        for (std::size_t i = 0; i < p.slopes.size(); ++i)
            os << "_" << p.breakpoints[i] << "s" << p.slopes[i];
    }
    return os.str();
}

const QuadraticMisMap& MapSpec::quadratic() const {
    if (const auto* q = std::get_if<QuadraticMisMap>(&map_)) return *q;
    throw InvalidFamily("expected a quadratic map");
}

const DoublyIntermittentMap& MapSpec::doubly_intermittent() const {
    if (const auto* d = std::get_if<DoublyIntermittentMap>(&map_)) return *d;
    throw InvalidFamily("expected a doubly intermittent map");
}

const PiecewiseLinearMap& MapSpec::piecewise_linear() const {
    if (const auto* p = std::get_if<PiecewiseLinearMap>(&map_)) return *p;
    throw InvalidFamily("expected a piecewise linear map");
}

// ---------------------------------------------------------------------------
// Orbit helpers
// ---------------------------------------------------------------------------

std::vector<double> orbit(const MapSpec& map, double x0, std::uint64_t n) {
    if (!std::isfinite(x0)) throw NonFiniteInput("orbit start is not finite");
    std::vector<double> out;
    out.reserve(n + 1);
    out.push_back(x0);
    double x = x0;
    for (std::uint64_t i = 0; i < n; ++i) {
        x = map.eval(x);
        out.push_back(x);
    }
    return out;
}

double deriv_along_orbit(const MapSpec& map, double x, std::uint64_t n) {
    double prod = 1.0;
    double y = x;
    for (std::uint64_t i = 0; i < n; ++i) {
        try {
            prod *= map.deriv(y);
        } catch (const AtBranchBoundary&) {
            throw AtBranchBoundary("orbit point at a branch junction", static_cast<long>(i));
        }
        y = map.eval(y);
    }
    return prod;
}

double iterate_point(const MapSpec& map, double x, std::uint64_t p) {
    double y = x;
    for (std::uint64_t i = 0; i < p; ++i) y = map.eval(y);
    return y;
}

double find_periodic(const MapSpec& map, std::uint64_t p, Interval bracket) {
    if (p < 1) throw PreconditionFailed("period must be >= 1");
    auto g = [&](double x) { return iterate_point(map, x, p) - x; };
    double glo = g(bracket.lo);
    double ghi = g(bracket.hi);
    double zeta;
    if (glo == 0) {
        zeta = bracket.lo;
    } else if (ghi == 0) {
        zeta = bracket.hi;
    } else if ((glo < 0) == (ghi < 0)) {
        throw NoSignChange("T^p(x) - x does not change sign on the bracket");
    } else {
        auto dg = [&](double x) {
            try {
                return deriv_along_orbit(map, x, p) - 1.0;
            } catch (const AtBranchBoundary&) {
                return 0.0;  // fall back to bisection near junctions
            }
        };
        zeta = solve_root(g, dg, bracket.lo, bracket.hi, 12);
    }
    if (std::abs(g(zeta)) > kPeriodicTol)
        throw NoSignChange("bracketed root did not converge to a periodic point");
    for (std::uint64_t q = 1; q < p; ++q) {
        if (std::abs(iterate_point(map, zeta, q) - zeta) <= kPrimePeriodTol)
            throw NotPrimePeriod("periodic point has a shorter period");
    }
    return zeta;
}

// ---------------------------------------------------------------------------
// Doubly intermittent validation
// ---------------------------------------------------------------------------

DIValidationReport validate_doubly_intermittent(const DoublyIntermittentParams& params,
                                                std::size_t depth) {
    if (!(params.beta() < 1.0))
        throw BetaTooLarge("beta = max(k1*l1, k2*l2) must be < 1");
    DoublyIntermittentMap map(params);
    DIValidationReport rep;
    rep.beta = params.beta();

    // coarse partitions: Delta_0^- = (T_-^{-1}(0), 0), then successive
    // left-branch preimages marching toward -1 (mirrored on the right)
    double d0m_lo = map.invert_left(0.0);
    double d0p_hi = map.invert_right(0.0);
    rep.delta_minus.push_back({d0m_lo, 0.0});
    rep.delta_plus.push_back({0.0, d0p_hi});
    for (std::size_t n = 1; n <= depth; ++n) {
        const auto prev_m = rep.delta_minus.back();
        rep.delta_minus.push_back({map.invert_left(prev_m.lo), prev_m.lo});
        const auto prev_p = rep.delta_plus.back();
        rep.delta_plus.push_back({prev_p.hi, map.invert_right(prev_p.hi)});
    }

    // return ladders delta_n^- = T_-^{-1}(Delta_n^+) within Delta_0^-, and the
    // mirror image; endpoints march monotonically toward 0
    for (std::size_t n = 1; n <= depth; ++n) {
        const auto dnp = rep.delta_plus[n];
        rep.delta_small_minus.push_back({map.invert_left(dnp.lo), map.invert_left(dnp.hi)});
        const auto dnm = rep.delta_minus[n];
        rep.delta_small_plus.push_back({map.invert_right(dnm.lo), map.invert_right(dnm.hi)});
    }

    MapSpec spec(params);
    double lambda_hat = std::numeric_limits<double>::infinity();
    const int grid = 33;
    auto scan = [&](const Interval& iv, std::uint64_t n) {
        for (int i = 1; i < grid; ++i) {
            double x = iv.lo + (iv.hi - iv.lo) * i / grid;
            try {
                lambda_hat = std::min(lambda_hat, deriv_along_orbit(spec, x, n));
            } catch (const AtBranchBoundary&) {
            }
        }
    };
    // minimum expansion (T^n)' over delta_n^-, n = 1 .. min(n_-, depth), where
    // n_- is the first ladder rung inside U_0-; mirrored on the plus side
    for (std::size_t idx = 0; idx < rep.delta_small_minus.size(); ++idx) {
        scan(rep.delta_small_minus[idx], idx + 1);
        if (rep.delta_small_minus[idx].lo > -params.iota) break;
    }
    for (std::size_t idx = 0; idx < rep.delta_small_plus.size(); ++idx) {
        scan(rep.delta_small_plus[idx], idx + 1);
        if (rep.delta_small_plus[idx].hi < params.iota) break;
    }
    rep.lambda_hat = lambda_hat;
    rep.pass = rep.beta < 1.0 && rep.lambda_hat > 1.0;
    return rep;
}

bool on_critical_orbit(const MapSpec& map, double zeta, double tol) {
    if (map.family() != MapFamily::QuadraticMis) return false;
    double x = 0.0;
    for (int k = 1; k <= 256; ++k) {
        x = map.eval(x);
        if (std::abs(x - zeta) <= tol) return true;
    }
    return false;
}

}  // namespace repp_lab::maps

// ---------------------------------------------------------------------------
// SymbolicCursor
// ---------------------------------------------------------------------------

#include "repp_lab/orbit_cursor.hpp"

namespace repp_lab::maps {

SymbolicCursor::SymbolicCursor(const PiecewiseLinearMap& map, std::uint64_t seed)
    : map_(map), rng_(seed) {
    if (!map_.full_branch() || !map_.orientation_preserving())
        throw InvalidMap("symbolic orbits need full increasing branches");
    double min_slope = map_.slope(0);
    double total = 0.0;
    for (std::size_t i = 0; i < map_.branch_count(); ++i) {
        min_slope = std::min(min_slope, map_.slope(i));
        total += map_.branch_hi(i) - map_.branch_lo(i);
        cum_prob_.push_back(total);
    }
    cum_prob_.back() = 1.0;
    auto len = static_cast<std::size_t>(std::ceil(54.0 / std::log2(min_slope)));
    window_.resize(std::max<std::size_t>(len, 2));
    for (auto& w : window_) w = static_cast<std::uint8_t>(draw_symbol());
    recompute();
}

int SymbolicCursor::draw_symbol() {
    double u = rng_.unit();
    for (std::size_t i = 0; i + 1 < cum_prob_.size(); ++i)
        if (u < cum_prob_[i]) return static_cast<int>(i);
    return static_cast<int>(cum_prob_.size()) - 1;
}

void SymbolicCursor::recompute() {
    // nest the branch inverses backward across the window; the result lies in
    // the depth-L cylinder of the symbol word, pinned to within 2^-54
    double y = 0.5;
    const std::size_t L = window_.size();
    for (std::size_t j = L; j-- > 0;) {
        std::uint8_t w = window_[(head_ + j) % L];
        y = map_.branch_lo(w) + y / map_.slope(w);
    }
    x_ = y;
}

bool SymbolicCursor::step() {
    window_[head_] = static_cast<std::uint8_t>(draw_symbol());
    head_ = (head_ + 1) % window_.size();
    recompute();
    return true;
}

}  // namespace repp_lab::maps
