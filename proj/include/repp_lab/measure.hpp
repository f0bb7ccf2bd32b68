#ifndef REPP_LAB_MEASURE_HPP
#define REPP_LAB_MEASURE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "repp_lab/maps.hpp"

namespace repp_lab::measure {

// Sorted Birkhoff sample of the invariant measure; immutable once built.
struct EmpiricalMeasure {
    std::vector<double> samples;  // ascending
    std::uint64_t n_samples = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t seed = 0;
    std::string map_id;
    std::uint64_t restarts = 0;  // rounding-freeze reseeds during sampling
};

// One long orbit from a uniform random start, burn_in iterates discarded.
EmpiricalMeasure sample_invariant(const maps::MapSpec& map, std::uint64_t n,
                                  std::uint64_t burn_in, std::uint64_t seed);

// Same law, built as `tasks` independent orbits merged by sorting; the result
// depends on (n, burn_in, seed, tasks) but not on the thread count.
EmpiricalMeasure sample_invariant_parallel(const maps::MapSpec& map, std::uint64_t n,
                                           std::uint64_t burn_in, std::uint64_t seed,
                                           std::size_t tasks, unsigned threads);

// Fraction of samples in the open ball (zeta - r, zeta + r); O(log n).
double ball_mass(const EmpiricalMeasure& m, double zeta, double r);

// Exact ball mass under the a = 2 density 1 / (pi sqrt(1 - x^2)).
double exact_mass_fullquad(double zeta, double r);

// Smallest radius whose ball mass matches `target` to within 1/n (empirical
// quantile inversion of |samples - zeta|).
double radius_for_mass(const EmpiricalMeasure& m, double zeta, double target);

// Monotone bisection of the exact a = 2 mass; |mass - target| <= 1e-12.
double radius_for_mass_exact_fullquad(double zeta, double target);

// Piecewise-constant density fitted to an EmpiricalMeasure; total mass 1.
class HistogramDensity {
  public:
    HistogramDensity(const EmpiricalMeasure& m, std::size_t bins, double lo, double hi);
    double mass(double zeta, double r) const;
    std::size_t bins() const { return bin_mass_.size(); }

  private:
    double lo_, hi_, width_;
    std::vector<double> bin_mass_;
};

// Mass/radius queries backed either by the exact a = 2 density or by an
// empirical sample. An experiment uses exactly one model throughout.
class MassModel {
  public:
    static MassModel exact_fullquad() { return MassModel(nullptr); }
    static MassModel empirical(const EmpiricalMeasure& m) { return MassModel(&m); }

    bool is_exact() const { return emp_ == nullptr; }
    double mass(double zeta, double r) const;
    double radius_for_mass(double zeta, double target) const;
    const EmpiricalMeasure& measure() const;

  private:
    explicit MassModel(const EmpiricalMeasure* emp) : emp_(emp) {}
    const EmpiricalMeasure* emp_;
};

// Flat little-endian f64 array with an 8-byte count header, so expensive
// sampling runs can be cached across experiments.
void save_samples(const std::string& path, const EmpiricalMeasure& m);
EmpiricalMeasure load_samples(const std::string& path);

}  // namespace repp_lab::measure

#endif
