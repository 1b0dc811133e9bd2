#include "qhl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "qhl/assumptions.hpp"
#include "qhl/csv.hpp"
#include "qhl/limit_sde.hpp"
#include "qhl/parallel.hpp"
#include "qhl/qhawkes_sim.hpp"
#include "qhl/rng.hpp"
#include "qhl/stats.hpp"
#include "qhl/volterra.hpp"

namespace fs = std::filesystem;

namespace qhl {
namespace {

using nlohmann::json;

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t stream_tag(const ExperimentConfig& cfg, const char* suffix = "") {
    std::string s = to_string(cfg.kind) + suffix;
    return fnv1a64(s.data(), s.size());
}

// Collects outputs and their checksums as they are written.
struct RunDir {
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> entries;

    explicit RunDir(const std::string& d, bool force) : dir(d) {
        std::error_code ec;
        if (fs::exists(dir) && !fs::is_directory(dir))
            throw IoError("output path exists and is not a directory: " + d);
        if (fs::exists(dir) && !fs::is_empty(dir) && !force)
            throw IoError("output directory not empty (use --force): " + d);
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory: " + d);
    }

    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
        auto p = (dir / name).string();
        write_csv(p, header, rows);
        entries.emplace_back(name, hex64(fnv1a64_file(p)));
    }

    void text(const std::string& name, const std::string& body) {
        auto p = (dir / name).string();
        std::ofstream os(p, std::ios::binary);
        if (!os) throw IoError("cannot write " + p);
        os << body;
        os.close();
        entries.emplace_back(name, hex64(fnv1a64_file(p)));
    }

    void js(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
};

json report_to_json(const AssumptionReport& r) {
    json j;
    j["regime"] = r.regime == Regime::stable ? "stable" : "near_unstable";
    j["stability_margin"] = r.stability_margin;
    j["contraction_ok_v"] = r.contraction_ok_v;
    j["contraction_ok_vbar"] = r.contraction_ok_vbar;
    if (r.eta) j["eta"] = *r.eta;
    if (r.eta_bar) j["eta_bar"] = *r.eta_bar;
    j["contraction_bound_v"] = r.contraction_bound_v;
    j["contraction_bound_vbar"] = r.contraction_bound_vbar;
    if (r.tail_K) j["tail_K"] = *r.tail_K;
    if (r.delta) j["delta"] = *r.delta;
    j["messages"] = r.messages;
    return j;
}

AssumptionReport gate_assumptions(const ExperimentConfig& cfg) {
    AssumptionReport rep;
    bool have = false;
    switch (cfg.kind) {
        case ExperimentKind::simulate_micro:
        case ExperimentKind::mean_intensity_check:
        case ExperimentKind::tra_study:
            if (!cfg.micro) throw SchemaError("micro", "required for this experiment");
            rep = check_assumptions(*cfg.micro);
            have = true;
            break;
        case ExperimentKind::simulate_limit_stable:
        case ExperimentKind::simulate_limit_unstable:
        case ExperimentKind::roughness_study: {
            if (!cfg.limit) throw SchemaError("limit", "required for this experiment");
            ShapeParams sh;
            sh.phi = cfg.limit->phi;
            sh.k = cfg.limit->k;
            sh.alpha1 = cfg.limit->alpha1;
            sh.alpha2 = cfg.limit->alpha2;
            if (cfg.shapes) sh = *cfg.shapes;
            rep = check_assumptions(sh, *cfg.limit);
            have = true;
            break;
        }
        case ExperimentKind::resolvent_check:
        case ExperimentKind::convergence_study:
            if (!cfg.limit) throw SchemaError("limit", "required for this experiment");
            if (!cfg.shapes) throw SchemaError("shapes", "required for this experiment");
            rep = check_assumptions(*cfg.shapes, *cfg.limit);
            have = true;
            break;
        case ExperimentKind::picard:
            if (!cfg.micro) throw SchemaError("micro", "required for this experiment");
            rep = check_assumptions(*cfg.micro);
            have = true;
            break;
    }
    if (have && !rep.ok() && !cfg.override_assumptions)
        throw PreconditionError("assumption check failed; set override_assumptions to run");
    return rep;
}

std::string path_name(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04zu.csv", stem, i);
    return buf;
}

// --- individual experiments -------------------------------------------------

void run_simulate_micro(const ExperimentConfig& cfg, RunDir& out) {
    const auto& p = *cfg.micro;
    SimConfig sc = cfg.sim;
    sc.allow_unstable = cfg.override_assumptions;
    sc.sample_points = std::max(sc.sample_points, cfg.grid.points);
    std::vector<SimResult> results(cfg.paths);
    for_each_index(cfg.paths, cfg.workers, [&](std::size_t i) {
        results[i] = simulate(p, cfg.grid.span, derive_seed(cfg.seed, stream_tag(cfg), i), sc);
    });

    McAccumulator acc;
    EventPath::Diagnostics total;
    double mean_count = 0.0;
    for (std::size_t i = 0; i < cfg.paths; ++i) {
        const auto& r = results[i];
        std::vector<std::vector<double>> rows;
        rows.reserve(r.path.times.size());
        for (std::size_t e = 0; e < r.path.times.size(); ++e)
            rows.push_back({r.path.times[e], static_cast<double>(r.path.marks[e])});
        out.csv(path_name("events", i), {"time", "mark"}, rows);
        if (cfg.write_paths) {
            std::vector<std::vector<double>> irows;
            for (std::size_t g = 0; g < r.lambda1.size(); ++g)
                irows.push_back({r.lambda1.time(g), r.lambda1[g], r.lambda2[g]});
            out.csv(path_name("intensity", i), {"t", "lambda1", "lambda2"}, irows);
        }
        acc.add(i, r.lambda1 + r.lambda2);
        total.accepted += r.path.diag.accepted;
        total.rejected += r.path.diag.rejected;
        total.candidates += r.path.diag.candidates;
        total.bound_refreshes += r.path.diag.bound_refreshes;
        total.bound_violations += r.path.diag.bound_violations;
        mean_count += static_cast<double>(r.path.times.size());
    }
    mean_count /= static_cast<double>(cfg.paths);

    auto summary = acc.finalize();
    std::vector<std::vector<double>> mrows;
    for (std::size_t g = 0; g < summary.mean.size(); ++g)
        mrows.push_back({summary.mean.time(g), summary.mean[g], summary.stderr_of_mean[g]});
    out.csv("lambda_bar_mean.csv", {"t", "mean", "stderr"}, mrows);

    json s;
    s["paths"] = cfg.paths;
    s["mean_event_count"] = mean_count;
    s["accepted"] = total.accepted;
    s["rejected"] = total.rejected;
    s["candidates"] = total.candidates;
    s["bound_refreshes"] = total.bound_refreshes;
    s["bound_violations"] = total.bound_violations;
    s["violation_rate"] =
        total.candidates ? static_cast<double>(total.bound_violations) / total.candidates : 0.0;
    out.js("summary.json", s);
}

void run_mean_intensity(const ExperimentConfig& cfg, RunDir& out) {
    const auto& p = *cfg.micro;
    SimConfig sc = cfg.sim;
    sc.sample_points = std::max(sc.sample_points, cfg.grid.points);

    McAccumulator acc;
    std::vector<GridSeries> lam(cfg.paths);
    for_each_index(cfg.paths, cfg.workers, [&](std::size_t i) {
        auto r = simulate(p, cfg.grid.span, derive_seed(cfg.seed, stream_tag(cfg), i), sc);
        GridSeries lb = r.lambda1 + r.lambda2;
        if (sc.sample_points == cfg.grid.points) {
            lam[i] = std::move(lb);
        } else {  // subsample onto the requested grid
            GridSeries g = GridSeries::zeros(0.0, cfg.grid.span, cfg.grid.points);
            std::size_t stride = (lb.size() - 1) / (cfg.grid.points - 1);
            for (std::size_t j = 0; j < cfg.grid.points; ++j) g[j] = lb[j * stride];
            lam[i] = std::move(g);
        }
    });
    for (std::size_t i = 0; i < cfg.paths; ++i) acc.add(i, std::move(lam[i]));
    auto mc = acc.finalize();

    // oracle: g = mu_bar + (phibar + (a1+a2)/2 k^2) * g
    double q = 0.5 * (p.alpha1 + p.alpha2);
    auto kernel = [&](double t) {
        double v = p.phi1.value(t) + p.phi2.value(t);
        if (p.quad_active()) {
            double kv = p.k.value(t);
            v += q * kv * kv;
        }
        return v;
    };
    std::size_t fine = (cfg.grid.points - 1) * 64;
    GridSeries oracle = solve_linear_volterra(p.mu_bar(), kernel, cfg.grid.span, fine);

    double a = p.stability_functional();
    double bound = a < 1.0 ? p.mu_bar() / (1.0 - a) : -1.0;
    std::size_t within = 0;
    bool bound_ok = true;
    double max_z = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < cfg.grid.points; ++j) {
        double ov = oracle[j * 64];
        double se = std::max(mc.stderr_of_mean[j], 1e-300);
        double z = (mc.mean[j] - ov) / se;
        max_z = std::max(max_z, std::abs(z));
        if (std::abs(z) <= 3.0) ++within;
        if (bound > 0.0 && mc.mean[j] > bound + 3.0 * se) bound_ok = false;
        rows.push_back({mc.mean.time(j), ov, mc.mean[j], mc.stderr_of_mean[j], z});
    }
    out.csv("table.csv", {"t", "oracle", "mc_mean", "stderr", "z_score"}, rows);

    json rep;
    rep["paths"] = cfg.paths;
    rep["points_within_3se"] = within;
    rep["points_total"] = cfg.grid.points;
    rep["max_abs_z"] = max_z;
    rep["stability_bound"] = bound;
    rep["bound_respected"] = bound_ok;
    out.js("report.json", rep);
}

void run_resolvent_check(const ExperimentConfig& cfg, RunDir& out) {
    if (cfg.t_schedule.empty()) throw SchemaError("t_schedule", "required");
    auto chk =
        scaled_resolvent_check(cfg.shapes->phi, cfg.t_schedule, *cfg.limit, cfg.grid.points);
    std::vector<std::vector<double>> rows;
    bool decreasing = true;
    for (std::size_t i = 0; i < chk.rows.size(); ++i) {
        rows.push_back({chk.rows[i].T, chk.rows[i].sup_gap});
        if (i > 0 && chk.rows[i].sup_gap >= chk.rows[i - 1].sup_gap) decreasing = false;
    }
    out.csv("gaps.csv", {"T", "sup_gap"}, rows);

    std::vector<std::vector<double>> curves;
    for (std::size_t i = 0; i < chk.F_T.size(); ++i)
        for (std::size_t j = 0; j < chk.F_T[i].size(); ++j)
            curves.push_back({chk.rows[i].T, chk.F_T[i].time(j), chk.F_T[i][j],
                              chk.limit_F[j]});
    out.csv("curves.csv", {"T", "t", "F_T", "F_limit"}, curves);

    json rep;
    rep["strictly_decreasing"] = decreasing;
    rep["final_gap"] = chk.rows.empty() ? -1.0 : chk.rows.back().sup_gap;
    out.js("report.json", rep);
}

void run_picard(const ExperimentConfig& cfg, RunDir& out) {
    json rep;
    for (PicardKind kind : {PicardKind::V, PicardKind::Vbar}) {
        auto prob = picard_problem(*cfg.micro, kind);
        auto res = picard_solve(prob, cfg.grid.span, cfg.grid.points - 1, cfg.picard_tol,
                                cfg.picard_max_iter, cfg.override_assumptions);
        const char* name = kind == PicardKind::V ? "solution_v.csv" : "solution_vbar.csv";
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < res.solution.size(); ++j)
            rows.push_back({res.solution.time(j), res.solution[j]});
        out.csv(name, {"t", "value"}, rows);
        json r;
        r["iterations"] = res.iterations;
        r["residual_sup"] = res.residual_sup;
        r["converged"] = res.converged;
        r["rate_estimates"] = res.rate_estimates;
        if (res.witness_eta) r["witness_eta"] = *res.witness_eta;
        r["analytic_bound"] = res.analytic_bound;
        rep[kind == PicardKind::V ? "V" : "Vbar"] = r;
    }
    out.js("report.json", rep);
}

void write_limit_path(RunDir& out, std::size_t i, const LimitPath& lp) {
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < lp.V.size(); ++j)
        rows.push_back({lp.V.time(j), lp.V[j], lp.Vbar[j], lp.X[j], lp.Xbar[j], lp.Mstar[j],
                        lp.Mbarstar[j], lp.Zstar[j], lp.rho[j]});
    out.csv(path_name("path", i),
            {"t", "V", "Vbar", "X", "Xbar", "Mstar", "Mbarstar", "Zstar", "rho"}, rows);
}

void run_simulate_limit(const ExperimentConfig& cfg, RunDir& out, bool stable) {
    const auto& lp = *cfg.limit;
    std::vector<LimitPath> paths(cfg.paths);
    for_each_index(cfg.paths, cfg.workers, [&](std::size_t i) {
        auto s = derive_seed(cfg.seed, stream_tag(cfg), i);
        paths[i] = stable ? simulate_stable_limit(lp, s) : simulate_unstable_limit(lp, s);
    });

    McAccumulator acc;
    std::vector<CovariationInput> cov;
    std::size_t clips = 0, truncs = 0, steps = 0;
    for (std::size_t i = 0; i < cfg.paths; ++i) {
        if (cfg.write_paths) write_limit_path(out, i, paths[i]);
        acc.add(i, paths[i].Vbar);
        cov.push_back({paths[i].Mstar, paths[i].Mbarstar, paths[i].X, paths[i].Xbar});
        clips += paths[i].diag.rho_clips;
        truncs += paths[i].diag.vbar_truncations;
        steps += paths[i].diag.steps;
    }
    auto mc = acc.finalize();
    std::vector<std::vector<double>> mrows;
    for (std::size_t g = 0; g < mc.mean.size(); ++g)
        mrows.push_back({mc.mean.time(g), mc.mean[g], mc.stderr_of_mean[g]});
    out.csv("vbar_mean.csv", {"t", "mean", "stderr"}, mrows);

    auto cr = covariation_check(cov);
    json s;
    s["paths"] = cfg.paths;
    s["rho_clip_rate"] = steps ? static_cast<double>(clips) / steps : 0.0;
    s["vbar_truncation_rate"] = steps ? static_cast<double>(truncs) / steps : 0.0;
    s["covariation"] = {{"skipped", cr.skipped},
                        {"note", cr.note},
                        {"rel_err_qv", cr.rel_err_qv},
                        {"rel_err_qv_bar", cr.rel_err_qv_bar},
                        {"rel_err_cross", cr.rel_err_cross},
                        {"mean_x", cr.mean_x},
                        {"mean_xbar", cr.mean_xbar}};
    out.js("summary.json", s);
}

void run_convergence_study(const ExperimentConfig& cfg, RunDir& out) {
    if (cfg.t_schedule.empty()) throw SchemaError("t_schedule", "required");
    const auto& shapes = *cfg.shapes;
    LimitParams lim = *cfg.limit;
    lim.k = shapes.k;
    lim.alpha1 = shapes.alpha1;
    lim.alpha2 = shapes.alpha2;

    // reference limit-model samples of Xbar at t = 1
    std::vector<double> ref(cfg.limit_reference_paths);
    for_each_index(cfg.limit_reference_paths, cfg.workers, [&](std::size_t i) {
        auto p = simulate_unstable_limit(lim, derive_seed(cfg.seed, stream_tag(cfg, "/limit"), i));
        ref[i] = p.Xbar[p.Xbar.size() - 1];
    });
    {
        std::vector<std::vector<double>> rows;
        for (double v : ref) rows.push_back({v});
        out.csv("limit_samples.csv", {"xbar_1"}, rows);
    }

    std::vector<std::vector<double>> table;
    for (std::size_t ti = 0; ti < cfg.t_schedule.size(); ++ti) {
        double T = cfg.t_schedule[ti];
        auto rs = rescale_params(shapes, lim, T);
        SimConfig sc = cfg.sim;
        sc.sample_points = std::max<std::size_t>(cfg.grid.points, 257);
        if (sc.micro_step <= 0.0) sc.micro_step = T / 2e4;

        std::vector<double> xbar1(cfg.paths);
        std::vector<double> l10(cfg.paths);
        std::string tagstr = "/micro" + std::to_string(ti);
        for_each_index(cfg.paths, cfg.workers, [&](std::size_t i) {
            auto r = simulate(rs.micro, T, derive_seed(cfg.seed, stream_tag(cfg, tagstr.c_str()), i), sc);
            auto sp = scaled_processes(r, rs.meta, shapes.k, cfg.grid.points);
            xbar1[i] = sp.Xbar[sp.Xbar.size() - 1];
            l10[i] = sp.Xbar.sup_gap(sp.LambdaBar);
        });
        {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < cfg.paths; ++i) rows.push_back({xbar1[i], l10[i]});
            char nm[48];
            std::snprintf(nm, sizeof(nm), "micro_samples_T%g.csv", T);
            out.csv(nm, {"xbar_1", "l10_gap"}, rows);
        }
        double ks = ks_distance(xbar1, ref);
        double gap = 0.0;
        for (double g : l10) gap += g;
        gap /= static_cast<double>(cfg.paths);
        table.push_back({T, ks, gap, rs.meta.a_T_residual});
    }
    out.csv("table.csv", {"T", "ks_distance", "lemma_l10_gap", "aT_residual"}, table);

    json rep;
    bool ks_ok = true, gap_ok = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
        if (table[i][1] > table[i - 1][1]) ks_ok = false;
        if (table[i][2] >= table[i - 1][2]) gap_ok = false;
    }
    rep["ks_non_increasing"] = ks_ok;
    rep["l10_gap_decreasing"] = gap_ok;
    rep["final_ks"] = table.back()[1];
    out.js("report.json", rep);
}

void run_tra_study(const ExperimentConfig& cfg, RunDir& out) {
    if (!cfg.micro_base) throw SchemaError("micro_base", "required for tra_study");
    const auto quad = *cfg.micro;
    const auto base = *cfg.micro_base;
    SimConfig sc = cfg.sim;

    std::vector<double> idx_q(cfg.tra.pairs), idx_b(cfg.tra.pairs);
    for_each_index(cfg.tra.pairs, cfg.workers, [&](std::size_t i) {
        auto seed = derive_seed(cfg.seed, stream_tag(cfg), i);
        auto rq = simulate(quad, cfg.grid.span, seed, sc);
        auto rb = simulate(base, cfg.grid.span, seed, sc);
        auto lags = cfg.tra.lags;
        idx_q[i] = tra_statistic(price_increments(rq.path, cfg.grid.span, cfg.grid.points),
                                 cfg.tra.window, lags)
                       .asymmetry_index;
        idx_b[i] = tra_statistic(price_increments(rb.path, cfg.grid.span, cfg.grid.points),
                                 cfg.tra.window, lags)
                       .asymmetry_index;
    });

    std::vector<std::vector<double>> rows;
    std::size_t n_pos = 0;
    double mq = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < cfg.tra.pairs; ++i) {
        rows.push_back({static_cast<double>(i), idx_q[i], idx_b[i]});
        if (idx_q[i] > idx_b[i]) ++n_pos;
        mq += idx_q[i];
        mb += idx_b[i];
    }
    mq /= cfg.tra.pairs;
    mb /= cfg.tra.pairs;
    out.csv("pairs.csv", {"pair", "index_quadratic", "index_linear"}, rows);

    // path-level bootstrap of the alpha = 0 arm's mean index
    Rng rng(derive_seed(cfg.seed, stream_tag(cfg, "/boot"), 0));
    double se_b;
    {
        std::vector<double> means(cfg.tra.bootstrap_reps);
        for (auto& m : means) {
            double acc = 0.0;
            for (std::size_t i = 0; i < cfg.tra.pairs; ++i) {
                auto j = std::min(static_cast<std::size_t>(rng.uniform() * cfg.tra.pairs),
                                  cfg.tra.pairs - 1);
                acc += idx_b[j];
            }
            m = acc / cfg.tra.pairs;
        }
        double mm = 0.0;
        for (double m : means) mm += m;
        mm /= means.size();
        double s2 = 0.0;
        for (double m : means) s2 += (m - mm) * (m - mm);
        se_b = std::sqrt(s2 / (means.size() - 1));
    }

    json rep;
    rep["pairs"] = cfg.tra.pairs;
    rep["mean_index_quadratic"] = mq;
    rep["mean_index_linear"] = mb;
    rep["pairs_quadratic_larger"] = n_pos;
    rep["sign_test_p"] = binomial_sf_half(cfg.tra.pairs, n_pos);
    rep["linear_arm_bootstrap_se"] = se_b;
    rep["linear_arm_within_3se"] = std::abs(mb) <= 3.0 * se_b;
    out.js("report.json", rep);
}

void run_roughness_study(const ExperimentConfig& cfg, RunDir& out) {
    const auto& lim = *cfg.limit;
    std::vector<double> H(cfg.paths), R2(cfg.paths);
    for_each_index(cfg.paths, cfg.workers, [&](std::size_t i) {
        auto p = simulate_unstable_limit(lim, derive_seed(cfg.seed, stream_tag(cfg), i));
        auto est = hurst_estimate(p.Vbar);
        H[i] = est.H;
        R2[i] = est.r_squared;
    });
    std::vector<std::vector<double>> rows;
    double mean = 0.0;
    for (std::size_t i = 0; i < cfg.paths; ++i) {
        rows.push_back({static_cast<double>(i), H[i], R2[i]});
        mean += H[i];
    }
    mean /= static_cast<double>(cfg.paths);
    double s2 = 0.0;
    for (double h : H) s2 += (h - mean) * (h - mean);
    out.csv("hurst.csv", {"path", "H", "r_squared"}, rows);
    json rep;
    rep["paths"] = cfg.paths;
    rep["mean_H"] = mean;
    rep["stderr_H"] =
        std::sqrt(s2 / (cfg.paths - 1)) / std::sqrt(static_cast<double>(cfg.paths));
    rep["target_H"] = lim.alpha_tilde - 0.5;
    out.js("report.json", rep);
}

}  // namespace

std::vector<double> price_increments(const EventPath& path, double span, std::size_t points) {
    if (span > path.horizon * (1.0 + 1e-12))
        throw RangeError("price_increments: grid exceeds horizon");
    GridSeries pgrid = GridSeries::zeros(0.0, span, points);
    std::size_t ev = 0;
    long long p = 0;
    for (std::size_t j = 0; j < points; ++j) {
        double tau = pgrid.time(j);
        while (ev < path.times.size() && path.times[ev] <= tau) {
            p += path.marks[ev];
            ++ev;
        }
        pgrid[j] = static_cast<double>(p);
    }
    return pgrid.increments();
}

RunManifest run_experiment(ExperimentConfig cfg, const RunOverrides& ov) {
    if (ov.output) cfg.output = *ov.output;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.workers) cfg.workers = *ov.workers;

    RunManifest man;
    man.tool_version = kToolVersion;
    man.started = iso_now();

    auto assumptions = gate_assumptions(cfg);
    man.assumptions = report_to_json(assumptions);

    RunDir out(cfg.output, ov.force);
    {
        ExperimentConfig canon = cfg;  // keep config.json byte-identical across
        canon.output.clear();          // output locations and worker counts
        canon.workers = 0;
        out.js("config.json", serialize_config(canon));
    }
    man.config_digest = hex64(config_digest(cfg));

    switch (cfg.kind) {
        case ExperimentKind::simulate_micro: run_simulate_micro(cfg, out); break;
        case ExperimentKind::mean_intensity_check: run_mean_intensity(cfg, out); break;
        case ExperimentKind::resolvent_check: run_resolvent_check(cfg, out); break;
        case ExperimentKind::picard: run_picard(cfg, out); break;
        case ExperimentKind::simulate_limit_stable: run_simulate_limit(cfg, out, true); break;
        case ExperimentKind::simulate_limit_unstable: run_simulate_limit(cfg, out, false); break;
        case ExperimentKind::convergence_study: run_convergence_study(cfg, out); break;
        case ExperimentKind::tra_study: run_tra_study(cfg, out); break;
        case ExperimentKind::roughness_study: run_roughness_study(cfg, out); break;
    }

    man.finished = iso_now();
    man.outputs = out.entries;

    json mj;
    mj["tool_version"] = man.tool_version;
    mj["config_digest"] = man.config_digest;
    mj["started"] = man.started;
    mj["finished"] = man.finished;
    mj["assumptions"] = man.assumptions;
    json outs = json::array();
    for (const auto& [f, c] : man.outputs) outs.push_back({{"file", f}, {"checksum", c}});
    mj["outputs"] = outs;
    std::ofstream os(fs::path(cfg.output) / "manifest.json", std::ios::binary);
    os << mj.dump(2) << "\n";
    return man;
}

bool check_only(const ExperimentConfig& cfg, std::ostream& os) {
    ExperimentConfig c = cfg;
    c.override_assumptions = true;  // gate reports instead of throwing
    auto rep = gate_assumptions(c);
    os << report_to_json(rep).dump(2) << "\n";
    return rep.ok();
}

void emit_report(const std::string& run_dir, std::ostream& os) {
    fs::path dir(run_dir);
    auto manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw IoError("no manifest.json in " + run_dir);
    json man;
    {
        std::ifstream is(manifest_path);
        is >> man;
    }
    os << "run " << run_dir << " (tool " << man.value("tool_version", "?") << ", config "
       << man.value("config_digest", "?") << ")\n";
    for (const auto& o : man["outputs"]) {
        auto f = o["file"].get<std::string>();
        if (!fs::exists(dir / f)) throw IoError("missing output listed in manifest: " + f);
    }
    os << "outputs: " << man["outputs"].size() << " files, all present\n";

    for (const char* rn : {"report.json", "summary.json"}) {
        if (fs::exists(dir / rn)) {
            json r;
            std::ifstream is(dir / rn);
            is >> r;
            os << rn << ":\n";
            for (auto it = r.begin(); it != r.end(); ++it)
                os << "  " << it.key() << " = " << it.value().dump() << "\n";
        }
    }

    // long-form plot data: one observation per row, melted from mean curves
    for (const char* curve : {"lambda_bar_mean.csv", "vbar_mean.csv", "table.csv"}) {
        if (!fs::exists(dir / curve)) continue;
        std::ifstream is(dir / curve);
        std::string header;
        std::getline(is, header);
        std::vector<std::string> cols;
        {
            std::string tok;
            for (char ch : header) {
                if (ch == ',') {
                    cols.push_back(tok);
                    tok.clear();
                } else
                    tok += ch;
            }
            cols.push_back(tok);
        }
        std::ofstream po(dir / (std::string("plot_") + curve), std::ios::binary);
        po << "series,x,value\n";
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<std::string> vals;
            std::string tok;
            for (char ch : line) {
                if (ch == ',') {
                    vals.push_back(tok);
                    tok.clear();
                } else
                    tok += ch;
            }
            vals.push_back(tok);
            for (std::size_t c = 1; c < vals.size() && c < cols.size(); ++c)
                po << cols[c] << "," << vals[0] << "," << vals[c] << "\n";
        }
        os << "wrote plot_" << curve << "\n";
    }
}

}  // namespace qhl
