// qhlab: configuration-driven experiment runner for the quadratic Hawkes
// laboratory. Subcommands:
//   run <config.json>     execute an experiment and write outputs + manifest
//   report <run-dir>      summarize a finished run and emit plot CSVs
//   check <config.json>   run the assumption checks only
// Exit codes: 0 ok, 2 config/schema error, 3 assumption failure, 4 runtime/IO.

#include <CLI11.hpp>

#include <iostream>

#include "qhl/errors.hpp"
#include "qhl/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"quadratic Hawkes scaling-limit laboratory"};
    app.require_subcommand(1);

    std::string config_path, run_dir, output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    bool force = false;

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "configuration file")->required();
    run->add_option("--output", output_dir, "output directory (overrides config)");
    run->add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--workers", workers, "worker threads (0 = all)");
    run->add_flag("--force", force, "allow writing into a non-empty directory");

    auto* rep = app.add_subcommand("report", "summarize a finished run");
    rep->add_option("run_dir", run_dir, "run directory")->required();

    auto* chk = app.add_subcommand("check", "run assumption checks for a config");
    chk->add_option("config", config_path, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto cfg = qhl::load_config_file(config_path);
            qhl::RunOverrides ov;
            if (!output_dir.empty()) ov.output = output_dir;
            if (seed_set) ov.seed = seed;
            if (workers >= 0) ov.workers = workers;
            ov.force = force;
            auto man = qhl::run_experiment(cfg, ov);
            std::cout << "run complete: " << man.outputs.size() << " outputs, config "
                      << man.config_digest << "\n";
            return 0;
        }
        if (rep->parsed()) {
            qhl::emit_report(run_dir, std::cout);
            return 0;
        }
        auto cfg = qhl::load_config_file(config_path);
        bool ok = qhl::check_only(cfg, std::cout);
        return ok ? 0 : 3;
    } catch (const qhl::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qhl::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const qhl::PreconditionError& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
