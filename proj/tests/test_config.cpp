#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qhl/config.hpp"

using namespace qhl;
using nlohmann::json;

TEST_CASE("kernel records round-trip through their tagged form") {
    for (auto k : {KernelSpec::exponential(1.5, 0.4), KernelSpec::power_law(0.7, 2.0),
                   KernelSpec::ml_density(0.6, 1.1), KernelSpec::ml_series(0.8, 0.9),
                   KernelSpec::tabulated({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0}),
                   KernelSpec::zero(), KernelSpec::power_law(0.75, 1.0).scaled(2.0, 0.5)}) {
        auto j = kernel_to_json(k);
        auto back = kernel_from_json(j, "k");
        CHECK(kernel_to_json(back) == j);
        for (double t : {0.3, 1.7})  // ml_density is singular at 0
            CHECK(back.value(t) == doctest::Approx(k.value(t)).epsilon(1e-14));
    }
}

TEST_CASE("config parse -> serialize -> parse is a fixed point") {
    json j = {
        {"experiment", "mean_intensity_check"},
        {"seed", 42},
        {"paths", 250},
        {"grid", {{"span", 10.0}, {"points", 33}}},
        {"micro",
         {{"mu1", 0.5},
          {"mu2", 0.5},
          {"phi1", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 0.3}}},
          {"phi2", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 0.1}}},
          {"k", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 0.5656854249492381}}},
          {"alpha1", 1.0},
          {"alpha2", 1.0}}},
    };
    auto c1 = parse_config(j);
    auto s1 = serialize_config(c1);
    auto c2 = parse_config(s1);
    auto s2 = serialize_config(c2);
    CHECK(s1 == s2);
    CHECK(config_digest(c1) == config_digest(c2));
    CHECK(c1.kind == ExperimentKind::mean_intensity_check);
    CHECK(c1.paths == 250);
    CHECK(c1.micro.has_value());
    CHECK(c1.micro->alpha1 == 1.0);
}

TEST_CASE("schema errors carry the failing field path") {
    CHECK_THROWS_WITH_AS(parse_config(json{{"paths", 3}}), "experiment: missing",
                         SchemaError);
    json bad = {{"experiment", "simulate_micro"},
                {"micro", {{"mu1", 0.5}, {"mu2", 0.5},
                           {"phi1", {{"type", "nope"}}}}}};
    try {
        parse_config(bad);
        CHECK(false);
    } catch (const SchemaError& e) {
        CHECK(e.field_path == "micro.phi1.type");
    }
    json bad2 = {{"experiment", "simulate_micro"},
                 {"micro", {{"mu1", -1.0}, {"mu2", 0.5}}}};
    CHECK_THROWS_AS(parse_config(bad2), SchemaError);
    json bad3 = {{"experiment", "resolvent_check"}, {"t_schedule", {50.0, 20.0}}};
    CHECK_THROWS_AS(parse_config(bad3), SchemaError);
    CHECK_THROWS_AS(parse_config(json{{"experiment", "unknown_kind"}}), SchemaError);
}

TEST_CASE("limit parameter block parses both regimes") {
    json ju = {{"experiment", "simulate_limit_unstable"},
               {"limit",
                {{"regime", "near_unstable"},
                 {"alpha_tilde", 0.75},
                 {"sigma", 1.0},
                 {"c1", 3.0},
                 {"c2", 2.0},
                 {"alpha1", 1.0},
                 {"alpha2", 1.0},
                 {"mu_star", 0.5},
                 {"mu_bar_star", 1.0},
                 {"k", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 1.4142135623730951}}},
                 {"grid_points", 1024}}}};
    auto c = parse_config(ju);
    CHECK(c.limit->c1 == 3.0);
    CHECK(c.limit->grid_points == 1024);

    json js = {{"experiment", "simulate_limit_stable"},
               {"limit",
                {{"regime", "stable"},
                 {"mu", 0.2},
                 {"mu_bar", 1.0},
                 {"beta", 0.3},
                 {"beta_bar", 0.5},
                 {"alpha1", 0.4},
                 {"alpha2", 0.4},
                 {"phi", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 1.0}}},
                 {"k", {{"type", "exponential"}, {"rate", 1.0}, {"scale", 0.5}}}}}};
    auto cs = parse_config(js);
    CHECK(cs.limit->regime == Regime::stable);
    CHECK(cs.limit->beta == doctest::Approx(0.3));
    // ordering violation surfaces as a schema error with the block path
    json badlim = ju;
    badlim["limit"]["c2"] = 5.0;
    CHECK_THROWS_AS(parse_config(badlim), SchemaError);
}

TEST_CASE("experiment kind names round-trip") {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::roughness_study); ++k) {
        auto kind = static_cast<ExperimentKind>(k);
        CHECK(experiment_kind_from_string(to_string(kind)) == kind);
    }
}
