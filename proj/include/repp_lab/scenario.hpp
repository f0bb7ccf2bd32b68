#ifndef REPP_LAB_SCENARIO_HPP
#define REPP_LAB_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "repp_lab/maps.hpp"
#include "repp_lab/stats.hpp"

namespace repp_lab::cli {

using json = nlohmann::json;

// Fully parsed experiment description. One structured file, strict keys:
// unknown keys are configuration errors, not warnings.
struct Config {
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency

    json map;              // family block, parsed lazily per scenario
    json zeta;             // {"value": x[, "period": p]} or {"search": {...}}
    json base;             // base-set selection
    json mass_model;       // {"kind": "exact_arcsine"} or {"kind": "empirical"}
    json measure_samples;  // {"n": ..., "burn_in": ...}
    std::vector<double> radius_schedule;  // target masses, strictly decreasing
    json orbit;            // {"length": ..., "tasks": ...}
    std::uint64_t starts = 2000;
    double window_len = 5.0;
    json tails;            // tail-scenario block
    json oracle;           // oracle-scenario block
    json tolerances;       // per-test thresholds

    json raw;              // canonical parsed form (for hashing)
};

Config parse_config(const json& j);
Config load_config_file(const std::string& path);

std::string config_hash(const Config& cfg);

struct ScenarioResult {
    std::string scenario;
    std::vector<stats::TestReport> reports;
    json estimates;  // deterministic numeric payload (thetas, censoring, ...)
    std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content

    bool all_pass() const;
    json to_json(const Config& cfg) const;  // results.json payload (no clocks)
};

ScenarioResult run_oracle_validate(const Config& cfg);
ScenarioResult run_inducing_equivalence(const Config& cfg);
ScenarioResult run_dichotomy_mis(const Config& cfg);
ScenarioResult run_dichotomy_di(const Config& cfg);
ScenarioResult run_cluster_reconstruction(const Config& cfg);
ScenarioResult run_tails(const Config& cfg);

// Dispatch by scenario name; throws ConfigInvalid for unknown names.
ScenarioResult run_scenario(const std::string& name, const Config& cfg);

// Runs the scenario and writes results.json, manifest.json and the CSV
// curves under out_dir. Returns the process exit status: 0 when every
// configured test passed, 1 otherwise.
int run_scenario_to_dir(const std::string& name, const Config& cfg,
                        const std::string& out_dir);

// One CSV per figure-like output, written next to results.json.
void emit_plotdata(const ScenarioResult& result, const std::string& out_dir);

const std::vector<std::string>& scenario_names();

}  // namespace repp_lab::cli

#endif
