#ifndef REPP_LAB_POINT_PROCESS_HPP
#define REPP_LAB_POINT_PROCESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repp_lab/inducing.hpp"
#include "repp_lab/maps.hpp"
#include "repp_lab/measure.hpp"

namespace repp_lab::repp {

// Shrinking target: an open ball around zeta with its stored normalization
// mass and, when zeta is periodic, its prime period.
struct TargetSet {
    double zeta = 0;
    double r = 0;
    std::optional<std::uint64_t> period;
    bool on_critical_orbit = false;
    double mass = 0;

    bool contains(double x) const { return x > zeta - r && x < zeta + r; }
};

// Visit times to a target along one orbit, plus the mass-normalized
// interarrival times (first entry is mass * first hit index).
struct HitSeries {
    std::vector<std::uint64_t> hit_indices;  // strictly increasing, may start at 0
    std::uint64_t horizon = 0;
    double mass = 0;

    std::vector<double> normalized_interarrivals() const;
    std::string to_csv() const;              // column: index
    std::vector<std::uint8_t> to_binary() const;
    static HitSeries from_binary(const std::vector<std::uint8_t>& bytes);
};

// Maximal runs of hits exactly p apart; one run = one cluster.
struct Cluster {
    std::uint64_t start_index = 0;
    std::uint64_t size = 0;
};

struct ClusterSeries {
    std::vector<Cluster> clusters;
    std::uint64_t period = 0;

    std::vector<std::uint64_t> sizes() const;
    std::uint64_t total_hits() const;
    std::string to_csv() const;  // columns: start,size
};

// Extremal-index estimates: the escape-annulus mass ratio and the reciprocal
// mean cluster size, with standard errors; the closed-form value when the
// derivative formula applies.
struct ThetaEstimate {
    std::optional<double> theoretical;
    double ratio = 0;
    double ratio_se = 0;
    double cluster_fit = 0;
    double cluster_fit_se = 0;
    std::uint64_t n_ratio = 0;
    std::uint64_t n_clusters = 0;
};

// All orbit times i <= horizon with T^i(x0) in B.
HitSeries hit_times(const maps::MapSpec& map, double x0, const TargetSet& B,
                    std::uint64_t horizon);

constexpr std::uint64_t kDefaultAnnulusDepth = 200;

// Index of the escape annulus containing x (smallest k >= 0 such that
// T^((k+1)p)(x) leaves B); nullopt for points still inside after max_depth
// iterations, counted by the caller via `exceeded`.
std::optional<std::uint64_t> annulus_index(const maps::MapSpec& map, const TargetSet& B,
                                           double x,
                                           std::uint64_t max_depth = kDefaultAnnulusDepth,
                                           std::uint64_t* exceeded = nullptr);

// x sits in the entrance ring: outside B but mapped into B by T^p.
bool entrance_member(const maps::MapSpec& map, const TargetSet& B, double x);

// Maximal gap-exactly-p runs. For non-periodic targets callers pass p = 1 on
// a series whose gaps never equal 1, or simply treat every hit as a cluster.
ClusterSeries extract_clusters(const HitSeries& h, std::uint64_t p);

// Closed-form extremal index at a periodic point: 1 - |(T^p)'(zeta)|^(-1),
// with exponent -1/2 on the critical orbit; 0 at a neutral point.
double theta_theoretical(const maps::MapSpec& map, double zeta, std::uint64_t p,
                         bool on_critical_orbit);

// Empirical extremal-index estimates from measure samples (annulus ratio) and
// cluster sizes (geometric maximum likelihood).
ThetaEstimate theta_estimates(const maps::MapSpec& map, const TargetSet& B,
                              const measure::EmpiricalMeasure& m,
                              const ClusterSeries& clusters);

// Hits of the induced orbit to the shadow of B, indexed by induced time.
// mass_base_shadow is mu_A(B'), the normalization stored on the series.
HitSeries induced_hit_series(const maps::MapSpec& map, const inducing::BaseSet& A,
                             const TargetSet& B, double x0, std::uint64_t induced_horizon,
                             double mass_base_shadow,
                             std::uint64_t cap = inducing::kDefaultReturnCap);

// Masses of the first `depth` escape annuli (index k = 0 .. depth-1) plus the
// entrance ring, estimated over the measure's samples.
struct AnnulusMasses {
    std::vector<double> q_mass;        // mu(Q_k)
    std::vector<std::uint64_t> q_count;
    double entrance_mass = 0;          // mu(E(B))
    std::uint64_t entrance_count = 0;
    double ball_mass = 0;              // mu(B) over the same sample
    std::uint64_t ball_count = 0;
    std::uint64_t core_count = 0;      // samples deeper than every tracked annulus
    std::uint64_t n_samples = 0;
};

AnnulusMasses annulus_masses(const maps::MapSpec& map, const TargetSet& B,
                             const measure::EmpiricalMeasure& m, std::uint64_t depth);

}  // namespace repp_lab::repp

#endif
