#include "qhl/config.hpp"

#include <fstream>

#include "qhl/csv.hpp"

namespace qhl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path, what);
}

double need_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) fail(path + "." + key, "number required");
    return j[key].get<double>();
}

double opt_number(const json& j, const char* key, double dflt) {
    return j.contains(key) ? j[key].get<double>() : dflt;
}

MicroParams micro_from_json(const json& j, const std::string& path) {
    MicroParams p;
    p.mu1 = need_number(j, path, "mu1");
    p.mu2 = need_number(j, path, "mu2");
    if (j.contains("phi1")) p.phi1 = kernel_from_json(j["phi1"], path + ".phi1");
    if (j.contains("phi2")) p.phi2 = kernel_from_json(j["phi2"], path + ".phi2");
    if (j.contains("k")) p.k = kernel_from_json(j["k"], path + ".k");
    p.alpha1 = opt_number(j, "alpha1", 0.0);
    p.alpha2 = opt_number(j, "alpha2", 0.0);
    try {
        p.validate();
    } catch (const ParameterError& e) {
        fail(path, e.what());
    }
    return p;
}

json micro_to_json(const MicroParams& p) {
    json j;
    j["mu1"] = p.mu1;
    j["mu2"] = p.mu2;
    j["phi1"] = kernel_to_json(p.phi1);
    j["phi2"] = kernel_to_json(p.phi2);
    j["k"] = kernel_to_json(p.k);
    j["alpha1"] = p.alpha1;
    j["alpha2"] = p.alpha2;
    return j;
}

LimitParams limit_from_json(const json& j, const std::string& path) {
    LimitParams p;
    std::string regime = j.value("regime", "near_unstable");
    if (regime == "stable")
        p.regime = Regime::stable;
    else if (regime == "near_unstable")
        p.regime = Regime::near_unstable;
    else
        fail(path + ".regime", "expected \"stable\" or \"near_unstable\"");
    p.alpha1 = opt_number(j, "alpha1", 0.0);
    p.alpha2 = opt_number(j, "alpha2", 0.0);
    if (p.regime == Regime::near_unstable) {
        p.alpha_tilde = need_number(j, path, "alpha_tilde");
        p.sigma = need_number(j, path, "sigma");
        p.c1 = need_number(j, path, "c1");
        p.c2 = need_number(j, path, "c2");
        p.mu_star = need_number(j, path, "mu_star");
        p.mu_bar_star = need_number(j, path, "mu_bar_star");
    } else {
        p.mu = need_number(j, path, "mu");
        p.mu_bar = need_number(j, path, "mu_bar");
        p.beta = need_number(j, path, "beta");
        p.beta_bar = need_number(j, path, "beta_bar");
        if (j.contains("phi")) p.phi = kernel_from_json(j["phi"], path + ".phi");
    }
    if (j.contains("k")) p.k = kernel_from_json(j["k"], path + ".k");
    if (j.contains("grid_points")) p.grid_points = j["grid_points"].get<std::size_t>();
    try {
        p.validate();
    } catch (const ParameterError& e) {
        fail(path, e.what());
    }
    return p;
}

json limit_to_json(const LimitParams& p) {
    json j;
    j["regime"] = p.regime == Regime::stable ? "stable" : "near_unstable";
    j["alpha1"] = p.alpha1;
    j["alpha2"] = p.alpha2;
    if (p.regime == Regime::near_unstable) {
        j["alpha_tilde"] = p.alpha_tilde;
        j["sigma"] = p.sigma;
        j["c1"] = p.c1;
        j["c2"] = p.c2;
        j["mu_star"] = p.mu_star;
        j["mu_bar_star"] = p.mu_bar_star;
    } else {
        j["mu"] = p.mu;
        j["mu_bar"] = p.mu_bar;
        j["beta"] = p.beta;
        j["beta_bar"] = p.beta_bar;
        j["phi"] = kernel_to_json(p.phi);
    }
    j["k"] = kernel_to_json(p.k);
    j["grid_points"] = p.grid_points;
    return j;
}

ShapeParams shapes_from_json(const json& j, const std::string& path) {
    ShapeParams s;
    if (j.contains("phi")) s.phi = kernel_from_json(j["phi"], path + ".phi");
    if (j.contains("k")) s.k = kernel_from_json(j["k"], path + ".k");
    s.alpha1 = opt_number(j, "alpha1", 0.0);
    s.alpha2 = opt_number(j, "alpha2", 0.0);
    return s;
}

json shapes_to_json(const ShapeParams& s) {
    json j;
    j["phi"] = kernel_to_json(s.phi);
    j["k"] = kernel_to_json(s.k);
    j["alpha1"] = s.alpha1;
    j["alpha2"] = s.alpha2;
    return j;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::simulate_micro: return "simulate_micro";
        case ExperimentKind::simulate_limit_stable: return "simulate_limit_stable";
        case ExperimentKind::simulate_limit_unstable: return "simulate_limit_unstable";
        case ExperimentKind::mean_intensity_check: return "mean_intensity_check";
        case ExperimentKind::resolvent_check: return "resolvent_check";
        case ExperimentKind::picard: return "picard";
        case ExperimentKind::convergence_study: return "convergence_study";
        case ExperimentKind::tra_study: return "tra_study";
        case ExperimentKind::roughness_study: return "roughness_study";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::roughness_study); ++k)
        if (to_string(static_cast<ExperimentKind>(k)) == s)
            return static_cast<ExperimentKind>(k);
    throw SchemaError("experiment", "unknown experiment kind: " + s);
}

KernelSpec kernel_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) fail(path, "tagged kernel object required");
    std::string type = j["type"].get<std::string>();
    try {
        KernelSpec base = [&] {
            if (type == "exponential")
                return KernelSpec::exponential(need_number(j, path, "rate"),
                                               need_number(j, path, "scale"));
            if (type == "power_law")
                return KernelSpec::power_law(need_number(j, path, "alpha"),
                                             need_number(j, path, "cutoff"));
            if (type == "ml_density")
                return KernelSpec::ml_density(need_number(j, path, "alpha"),
                                              need_number(j, path, "sigma"));
            if (type == "ml_series")
                return KernelSpec::ml_series(need_number(j, path, "alpha"),
                                             need_number(j, path, "sigma"));
            if (type == "tabulated") {
                if (!j.contains("t") || !j.contains("v")) fail(path, "tabulated needs t and v");
                return KernelSpec::tabulated(j["t"].get<std::vector<double>>(),
                                             j["v"].get<std::vector<double>>());
            }
            if (type == "zero") return KernelSpec::zero();
            fail(path + ".type", "unknown kernel type: " + type);
        }();
        double ts = opt_number(j, "time_scale", 1.0);
        double am = opt_number(j, "amplitude", 1.0);
        return (ts != 1.0 || am != 1.0) ? base.scaled(ts, am) : base;
    } catch (const ParameterError& e) {
        fail(path, e.what());
    }
}

json kernel_to_json(const KernelSpec& k) {
    json j;
    switch (k.variant()) {
        case KernelVariant::exponential:
            if (k.is_zero()) {
                j["type"] = "zero";
                return j;
            }
            j["type"] = "exponential";
            j["rate"] = k.param1();
            j["scale"] = k.param2();
            break;
        case KernelVariant::power_law:
            j["type"] = "power_law";
            j["alpha"] = k.param1();
            j["cutoff"] = k.param2();
            break;
        case KernelVariant::ml_density:
            j["type"] = "ml_density";
            j["alpha"] = k.param1();
            j["sigma"] = k.param2();
            break;
        case KernelVariant::ml_series:
            j["type"] = "ml_series";
            j["alpha"] = k.param1();
            j["sigma"] = k.param2();
            break;
        case KernelVariant::tabulated:
            j["type"] = "tabulated";
            j["t"] = k.table_times();
            j["v"] = k.table_values();
            break;
    }
    if (k.time_scale() != 1.0) j["time_scale"] = k.time_scale();
    if (k.amplitude() != 1.0) j["amplitude"] = k.amplitude();
    return j;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw SchemaError("$", "configuration must be a JSON object");
    if (!j.contains("experiment")) throw SchemaError("experiment", "missing");
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(j["experiment"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("paths")) c.paths = j["paths"].get<std::size_t>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
    if (j.contains("override_assumptions"))
        c.override_assumptions = j["override_assumptions"].get<bool>();
    if (j.contains("write_paths")) c.write_paths = j["write_paths"].get<bool>();
    if (j.contains("grid")) {
        c.grid.span = need_number(j["grid"], "grid", "span");
        if (j["grid"].contains("points")) c.grid.points = j["grid"]["points"].get<std::size_t>();
        if (c.grid.points < 2) fail("grid.points", "need at least 2 grid points");
        if (!(c.grid.span > 0.0)) fail("grid.span", "span must be positive");
    }
    if (j.contains("micro")) c.micro = micro_from_json(j["micro"], "micro");
    if (j.contains("micro_base")) c.micro_base = micro_from_json(j["micro_base"], "micro_base");
    if (j.contains("sim")) {
        const auto& s = j["sim"];
        c.sim.micro_step = opt_number(s, "micro_step", 0.0);
        c.sim.safety = opt_number(s, "safety", 1.5);
        if (s.contains("max_events")) c.sim.max_events = s["max_events"].get<std::uint64_t>();
        if (s.contains("sample_points"))
            c.sim.sample_points = s["sample_points"].get<std::size_t>();
    }
    if (j.contains("limit")) c.limit = limit_from_json(j["limit"], "limit");
    if (j.contains("shapes")) c.shapes = shapes_from_json(j["shapes"], "shapes");
    if (j.contains("t_schedule")) {
        c.t_schedule = j["t_schedule"].get<std::vector<double>>();
        for (std::size_t i = 1; i < c.t_schedule.size(); ++i)
            if (c.t_schedule[i] <= c.t_schedule[i - 1])
                fail("t_schedule", "must be strictly increasing");
    }
    if (j.contains("limit_reference_paths"))
        c.limit_reference_paths = j["limit_reference_paths"].get<std::size_t>();
    if (j.contains("tra")) {
        const auto& t = j["tra"];
        if (t.contains("window")) c.tra.window = t["window"].get<std::size_t>();
        if (t.contains("lags")) c.tra.lags = t["lags"].get<std::vector<std::size_t>>();
        if (t.contains("pairs")) c.tra.pairs = t["pairs"].get<std::size_t>();
        if (t.contains("bootstrap_reps"))
            c.tra.bootstrap_reps = t["bootstrap_reps"].get<std::size_t>();
    }
    if (j.contains("picard_tol")) c.picard_tol = j["picard_tol"].get<double>();
    if (j.contains("picard_max_iter"))
        c.picard_max_iter = j["picard_max_iter"].get<std::size_t>();
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

json serialize_config(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.kind);
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["paths"] = c.paths;
    j["output"] = c.output;
    j["override_assumptions"] = c.override_assumptions;
    j["write_paths"] = c.write_paths;
    j["grid"] = {{"span", c.grid.span}, {"points", c.grid.points}};
    if (c.micro) j["micro"] = micro_to_json(*c.micro);
    if (c.micro_base) j["micro_base"] = micro_to_json(*c.micro_base);
    j["sim"] = {{"micro_step", c.sim.micro_step},
                {"safety", c.sim.safety},
                {"max_events", c.sim.max_events},
                {"sample_points", c.sim.sample_points}};
    if (c.limit) j["limit"] = limit_to_json(*c.limit);
    if (c.shapes) j["shapes"] = shapes_to_json(*c.shapes);
    if (!c.t_schedule.empty()) j["t_schedule"] = c.t_schedule;
    j["limit_reference_paths"] = c.limit_reference_paths;
    j["tra"] = {{"window", c.tra.window},
                {"lags", c.tra.lags},
                {"pairs", c.tra.pairs},
                {"bootstrap_reps", c.tra.bootstrap_reps}};
    j["picard_tol"] = c.picard_tol;
    j["picard_max_iter"] = c.picard_max_iter;
    return j;
}

std::uint64_t config_digest(const ExperimentConfig& c) {
    // delivery details do not affect what gets computed
    ExperimentConfig canon = c;
    canon.output.clear();
    canon.workers = 0;
    std::string s = serialize_config(canon).dump();
    return fnv1a64(s.data(), s.size());
}

}  // namespace qhl
