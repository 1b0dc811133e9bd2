#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhl/config.hpp"

namespace qhl {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string tool_version;
    std::string config_digest;  // hex64 of the canonical config serialization
    std::string started, finished;
    std::vector<std::pair<std::string, std::string>> outputs;  // file name, checksum
    nlohmann::json assumptions;                                // embedded report
};

struct RunOverrides {
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool force = false;
};

// Dispatches the configured experiment, distributes paths over OpenMP
// workers with counter-derived per-path seeds, writes outputs and the
// manifest into the run directory, and returns the manifest.
RunManifest run_experiment(ExperimentConfig cfg, const RunOverrides& ov = {});

// Human-readable summary of a finished run plus long-form plot CSVs.
void emit_report(const std::string& run_dir, std::ostream& os);

// Assumption check entry point used by the `check` subcommand; returns true
// when the configured parameters pass their regime's assumptions.
bool check_only(const ExperimentConfig& cfg, std::ostream& os);

// Price increments of an event path sampled on a uniform grid with `points`
// nodes on [0, span]: r_j = P(t_{j+1}) - P(t_j).
std::vector<double> price_increments(const EventPath& path, double span,
                                     std::size_t points);

}  // namespace qhl
