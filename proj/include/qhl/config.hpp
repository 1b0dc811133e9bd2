#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhl/params.hpp"
#include "qhl/qhawkes_sim.hpp"

namespace qhl {

// Experiment kinds accepted in configuration files.
enum class ExperimentKind {
    simulate_micro,
    simulate_limit_stable,
    simulate_limit_unstable,
    mean_intensity_check,
    resolvent_check,
    picard,
    convergence_study,
    tra_study,
    roughness_study,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct GridConfig {
    double span = 1.0;
    std::size_t points = 257;
};

struct TraConfig {
    std::size_t window = 17;  // centred realized-variance window (odd)
    std::vector<std::size_t> lags = {1, 2, 4, 8, 16, 32};
    std::size_t pairs = 200;
    std::size_t bootstrap_reps = 200;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::simulate_micro;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = runtime default
    std::size_t paths = 100;
    GridConfig grid;
    std::string output = "run";
    bool override_assumptions = false;
    bool write_paths = true;

    std::optional<MicroParams> micro;
    SimConfig sim;
    std::optional<LimitParams> limit;
    std::optional<ShapeParams> shapes;
    std::vector<double> t_schedule;
    std::size_t limit_reference_paths = 500;  // convergence study
    TraConfig tra;
    std::optional<MicroParams> micro_base;  // tra study: matched alpha = 0 arm
    double picard_tol = 1e-10;
    std::size_t picard_max_iter = 200;
};

// Tagged kernel records, e.g. {"type":"power_law","alpha":0.75,"cutoff":1.0}.
KernelSpec kernel_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json kernel_to_json(const KernelSpec& k);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
nlohmann::json serialize_config(const ExperimentConfig& c);

// Digest of the canonical serialized form; timestamps never enter it.
std::uint64_t config_digest(const ExperimentConfig& c);

}  // namespace qhl
