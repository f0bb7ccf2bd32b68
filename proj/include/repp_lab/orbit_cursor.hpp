#ifndef REPP_LAB_ORBIT_CURSOR_HPP
#define REPP_LAB_ORBIT_CURSOR_HPP

#include <cstdint>
#include <vector>

#include "repp_lab/maps.hpp"
#include "repp_lab/rng.hpp"

namespace repp_lab::maps {

// Cursors drive measure-faithful random orbits for the Monte Carlo kernels.
// They differ from plain iteration in two ways:
//
//  * Float cursors watch for iterates frozen by rounding (an exactly fixed
//    double under a repelling map, or a neutral crawl whose increment
//    underflows) and reseed from a fresh uniform point. Restarts are counted;
//    consumers reset any gap statistics that would straddle one.
//
//  * Piecewise-linear full-branch maps cannot be iterated in floating point
//    at all (2x mod 1 loses one bit per step and collapses), so their cursor
//    regenerates the orbit from an i.i.d. symbol stream, which reproduces the
//    Lebesgue-stationary orbit law exactly.

template <class ConcreteMap>
class FloatCursor {
  public:
    FloatCursor(const ConcreteMap& map, std::uint64_t seed)
        : map_(map), rng_(seed) {
        x_ = rng_.uniform(map_.domain_lo(), map_.domain_hi());
    }

    double x() const { return x_; }

    bool step() {
        double next = map_.eval_unchecked(x_);
        if (next == x_) {
            x_ = rng_.uniform(map_.domain_lo(), map_.domain_hi());
            ++restarts_;
            return false;
        }
        x_ = next;
        return true;
    }

    void burn(std::uint64_t n) {
        for (std::uint64_t i = 0; i < n; ++i) step();
    }

    std::uint64_t restarts() const { return restarts_; }

  private:
    ConcreteMap map_;
    Rng rng_;
    double x_;
    std::uint64_t restarts_ = 0;
};

class SymbolicCursor {
  public:
    SymbolicCursor(const PiecewiseLinearMap& map, std::uint64_t seed);

    double x() const { return x_; }
    bool step();
    void burn(std::uint64_t n) {
        for (std::uint64_t i = 0; i < n; ++i) step();
    }
    std::uint64_t restarts() const { return 0; }

  private:
    int draw_symbol();
    void recompute();

    PiecewiseLinearMap map_;
    Rng rng_;
    std::vector<double> cum_prob_;   // cumulative branch probabilities
    std::vector<std::uint8_t> window_;
    std::size_t head_ = 0;           // index of the oldest symbol
    double x_ = 0;
};

// Runs body(cursor) with the concrete cursor type for the map family.
template <class Body>
void with_cursor(const MapSpec& map, std::uint64_t seed, Body&& body) {
    map.with_concrete([&](const auto& concrete) {
        using M = std::decay_t<decltype(concrete)>;
        if constexpr (std::is_same_v<M, PiecewiseLinearMap>) {
            SymbolicCursor cursor(concrete, seed);
            body(cursor);
        } else {
            FloatCursor<M> cursor(concrete, seed);
            body(cursor);
        }
    });
}

}  // namespace repp_lab::maps

#endif
