#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhl/assumptions.hpp"
#include "qhl/parallel.hpp"
#include "qhl/qhawkes_sim.hpp"
#include "qhl/rng.hpp"
#include "qhl/stats.hpp"
#include "qhl/volterra.hpp"
#include "support/oracles.hpp"

using namespace qhl;

namespace {

MicroParams poisson_params(double mu) {
    MicroParams p;
    p.mu1 = p.mu2 = mu;
    return p;
}

MicroParams flagship_params() {
    // stability margin 0.44: |phibar|_1 = 0.4, alphas 1, |k|_2^2 = 0.16
    MicroParams p;
    p.mu1 = p.mu2 = 0.5;
    p.phi1 = KernelSpec::exponential(1.0, 0.3);
    p.phi2 = KernelSpec::exponential(1.0, 0.1);
    p.k = KernelSpec::exponential(1.0, std::sqrt(0.32));
    p.alpha1 = p.alpha2 = 1.0;
    return p;
}

GridSeries mc_mean_lambda_bar(const MicroParams& p, double horizon, std::size_t paths,
                              std::size_t points, std::uint64_t master,
                              GridSeries* stderr_out) {
    SimConfig sc;
    sc.sample_points = points;
    sc.micro_step = horizon / 2e4;
    McAccumulator acc;
    std::vector<GridSeries> lam(paths);
    for_each_index(paths, 0, [&](std::size_t i) {
        auto r = simulate(p, horizon, derive_seed(master, 7, i), sc);
        lam[i] = r.lambda1 + r.lambda2;
    });
    for (std::size_t i = 0; i < paths; ++i) acc.add(i, std::move(lam[i]));
    auto s = acc.finalize();
    if (stderr_out) *stderr_out = s.stderr_of_mean;
    return s.mean;
}

}  // namespace

TEST_CASE("empty history returns the baseline intensities") {
    MicroParams p = flagship_params();
    QHawkesState st(p, 10.0);
    CHECK(st.lambda1() == doctest::Approx(0.5));
    CHECK(st.lambda2() == doctest::Approx(0.5));
    // without events the compensated feedback integral turns negative, so the
    // squared term pushes the intensity slightly above the baseline
    st.advance(0.5);
    CHECK(st.lambda1() >= 0.5);
    CHECK(st.lambda1() < 0.52);
    CHECK(st.Lambda1() >= 0.25);
    CHECK(st.Lambda1() < 0.26);
}

TEST_CASE("single buy event against the hand-computed scheme arithmetic") {
    MicroParams p;
    p.mu1 = 0.3;
    p.mu2 = 0.2;
    p.phi1 = KernelSpec::exponential(1.2, 0.5);
    p.phi2 = KernelSpec::exponential(0.8, 0.2);
    p.k = KernelSpec::exponential(1.0, 0.7);
    p.alpha1 = 1.0;
    p.alpha2 = 0.25;
    const double ck1 = 0.75, ck2 = 0.25;  // (sqrt(a1)+-sqrt(a2))/2
    const double h = 0.01;

    QHawkesState st(p, 1.0);
    st.apply_event(+1);
    double j1_0 = 0.7;  // k(0)
    double r1_0 = ck1 * j1_0, r2_0 = ck2 * j1_0;
    double lam1_0 = 0.3 + 0.5 + r1_0 * r1_0;
    double lam2_0 = 0.2 + 0.2 + r2_0 * r2_0;
    CHECK(st.lambda1() == doctest::Approx(lam1_0).epsilon(1e-14));
    CHECK(st.lambda2() == doctest::Approx(lam2_0).epsilon(1e-14));

    st.advance(h);
    // replicate the predictor/trapezoid compensator step by hand
    double kh = 0.7 * std::exp(-h), k0 = 0.7;
    double lin1 = 0.3 + 0.5 * std::exp(-1.2 * h);
    double lin2 = 0.2 + 0.2 * std::exp(-0.8 * h);
    double c1p = h * kh * lam1_0;
    double c2p = h * kh * lam2_0;
    double jj = 0.7 * std::exp(-h);  // jump sum at t = h
    auto sq = [&](double c1v, double c2v, double& q1, double& q2) {
        double j1 = jj - c1v, j2 = -c2v;
        double r1 = ck1 * j1 - ck2 * j2;
        double r2 = ck2 * j1 - ck1 * j2;
        q1 = r1 * r1;
        q2 = r2 * r2;
    };
    double q1, q2;
    sq(c1p, c2p, q1, q2);
    double c1 = 0.5 * h * (kh * lam1_0 + k0 * (lin1 + q1));
    double c2 = 0.5 * h * (kh * lam2_0 + k0 * (lin2 + q2));
    sq(c1, c2, q1, q2);
    CHECK(st.lambda1() == doctest::Approx(lin1 + q1).epsilon(1e-13));
    CHECK(st.lambda2() == doctest::Approx(lin2 + q2).epsilon(1e-13));
    CHECK(st.Lambda1() == doctest::Approx(0.5 * h * (lam1_0 + lin1 + q1)).epsilon(1e-13));
}

TEST_CASE("k1 = k2 leaves the price intensity without a quadratic part") {
    MicroParams p;
    p.mu1 = 0.6;
    p.mu2 = 0.4;
    p.phi1 = KernelSpec::exponential(1.0, 0.25);
    p.phi2 = KernelSpec::exponential(2.0, 0.1);
    p.k = KernelSpec::exponential(1.0, 0.8);
    p.alpha1 = 0.9;
    p.alpha2 = 0.0;  // k1 = k2
    SimConfig sc;
    sc.sample_points = 41;
    auto r = simulate(p, 20.0, 99, sc);
    // linear part of lambda1 - lambda2 recomputed directly from the events
    for (std::size_t j = 0; j < r.lambda1.size(); ++j) {
        double t = r.lambda1.time(j);
        double lin = p.mu1 - p.mu2;
        for (std::size_t e = 0; e < r.path.times.size() && r.path.times[e] <= t; ++e) {
            double age = t - r.path.times[e];
            double d = 0.25 * std::exp(-age) - 0.1 * std::exp(-2.0 * age);
            lin += r.path.marks[e] == 1 ? d : -d;
        }
        CHECK(r.lambda1[j] - r.lambda2[j] == doctest::Approx(lin).epsilon(1e-9));
    }
}

TEST_CASE("poisson degeneration: counts, compensator, inter-arrival law") {
    auto p = poisson_params(0.5);  // total rate 1
    const std::size_t paths = 500;
    std::vector<double> counts(paths);
    std::vector<std::vector<double>> gaps(paths);
    SimConfig sc;
    sc.sample_points = 11;
    for_each_index(paths, 0, [&](std::size_t i) {
        auto r = simulate(p, 100.0, derive_seed(5, 1, i), sc);
        counts[i] = static_cast<double>(r.path.times.size());
        auto& g = gaps[i];
        double prev = 0.0;
        for (double t : r.path.times) {
            g.push_back(t - prev);
            prev = t;
        }
        // compensator of a unit-rate Poisson process is t itself
        CHECK(r.Lambda1[10] + r.Lambda2[10] == doctest::Approx(100.0).epsilon(1e-9));
    });
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= paths;
    double se = 10.0 / std::sqrt(static_cast<double>(paths));  // sd of Poisson(100)
    CHECK(std::abs(mean - 100.0) < 3.0 * se);

    // KS inter-arrival test at 1% per seed; expect >= 95% passes
    std::size_t pass = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        double d = qhl_test::ks_exponential(gaps[i], 1.0);
        if (d < qhl_test::ks_critical(gaps[i].size(), 0.01)) ++pass;
    }
    CHECK(pass >= 95);
}

TEST_CASE("linear Hawkes mean intensity tracks the Volterra oracle") {
    MicroParams p = flagship_params();
    p.alpha1 = p.alpha2 = 0.0;
    p.k = KernelSpec::zero();
    GridSeries se;
    auto mean = mc_mean_lambda_bar(p, 5.0, 400, 11, 21, &se);
    auto oracle = solve_linear_volterra(
        1.0, [&](double t) { return 0.4 * std::exp(-t); }, 5.0, 2000);
    std::size_t ok = 0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
        double ov = oracle[j * 200];
        if (std::abs(mean[j] - ov) <= 3.0 * std::max(se[j], 1e-12)) ++ok;
    }
    CHECK(ok >= 10);
}

TEST_CASE("full quadratic model tracks the mean-intensity equation") {
    MicroParams p = flagship_params();
    GridSeries se;
    auto mean = mc_mean_lambda_bar(p, 5.0, 400, 11, 22, &se);
    auto oracle = solve_linear_volterra(
        1.0,
        [&](double t) {
            double kv = std::sqrt(0.32) * std::exp(-t);
            return 0.4 * std::exp(-t) + kv * kv;
        },
        5.0, 2000);
    std::size_t ok = 0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
        double ov = oracle[j * 200];
        if (std::abs(mean[j] - ov) <= 3.0 * std::max(se[j], 1e-12)) ++ok;
    }
    CHECK(ok >= 10);
}

TEST_CASE("martingale property: counts minus compensator average to zero") {
    MicroParams p = flagship_params();
    const std::size_t paths = 300;
    SimConfig sc;
    sc.sample_points = 6;
    sc.micro_step = 1e-3;
    std::vector<std::vector<double>> diffs(paths);
    for_each_index(paths, 0, [&](std::size_t i) {
        auto r = simulate(p, 5.0, derive_seed(31, 2, i), sc);
        auto& d = diffs[i];
        for (std::size_t j = 0; j < 6; ++j) {
            double t = r.Lambda1.time(j);
            double nbar = 0.0;
            for (double te : r.path.times)
                if (te <= t) nbar += 1.0;
            d.push_back(nbar - (r.Lambda1[j] + r.Lambda2[j]));
        }
    });
    for (std::size_t j = 1; j < 6; ++j) {
        double m = 0.0, s2 = 0.0;
        for (auto& d : diffs) m += d[j];
        m /= paths;
        for (auto& d : diffs) s2 += (d[j] - m) * (d[j] - m);
        double se = std::sqrt(s2 / (paths - 1)) / std::sqrt(static_cast<double>(paths));
        CHECK(std::abs(m) <= 3.0 * se + 1e-3);
    }
}

TEST_CASE("intensities stay nonnegative and ordered") {
    MicroParams p = flagship_params();
    SimConfig sc;
    sc.sample_points = 101;
    auto r = simulate(p, 20.0, 123, sc);
    for (std::size_t j = 0; j < r.lambda1.size(); ++j) {
        CHECK(r.lambda1[j] >= -1e-12);
        CHECK(r.lambda2[j] >= -1e-12);
        CHECK(std::abs(r.lambda1[j] - r.lambda2[j]) <= r.lambda1[j] + r.lambda2[j] + 1e-12);
    }
    CHECK(r.path.diag.bound_violations * 1000 <= r.path.diag.candidates);
}

TEST_CASE("identical inputs reproduce the path byte for byte") {
    MicroParams p = flagship_params();
    SimConfig sc;
    sc.micro_step = 0.01;
    auto a = simulate(p, 30.0, 77, sc);
    auto b = simulate(p, 30.0, 77, sc);
    CHECK(a.path.times == b.path.times);
    CHECK(a.path.marks == b.path.marks);
    CHECK(a.Lambda1.values() == b.Lambda1.values());
    auto c = simulate(p, 30.0, 78, sc);
    CHECK(a.path.times != c.path.times);
}

TEST_CASE("event times are strictly increasing within the horizon") {
    auto r = simulate(flagship_params(), 50.0, 3);
    for (std::size_t e = 1; e < r.path.times.size(); ++e)
        CHECK(r.path.times[e] > r.path.times[e - 1]);
    if (!r.path.times.empty()) {
        CHECK(r.path.times.front() > 0.0);
        CHECK(r.path.times.back() <= 50.0);
    }
}

TEST_CASE("unstable parameters require the override and then explode") {
    MicroParams p;
    p.mu1 = p.mu2 = 0.5;
    p.phi1 = KernelSpec::exponential(1.0, 1.3);  // mass 1.3 > 1
    SimConfig sc;
    CHECK_THROWS_AS(simulate(p, 400.0, 9, sc), PreconditionError);
    sc.allow_unstable = true;
    sc.max_events = 20000;
    CHECK_THROWS_AS(simulate(p, 400.0, 9, sc), ExplosionError);
}

TEST_CASE("compensator path resamples onto a requested grid") {
    auto r = simulate(poisson_params(0.5), 10.0, 4);
    auto [L, Lb] = compensator_path(r, 8.0, 17);
    CHECK(Lb[16] == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(L[16] == doctest::Approx(0.0).epsilon(1e-9));
    for (std::size_t j = 1; j < Lb.size(); ++j) CHECK(Lb[j] >= Lb[j - 1]);
    CHECK(Lb[0] == 0.0);
    CHECK_THROWS_AS(compensator_path(r, 11.0, 5), RangeError);
}

TEST_CASE("rescale_params near-unstable constants and residual") {
    ShapeParams sh;
    sh.phi = KernelSpec::power_law(0.6, 1.0);
    sh.k = KernelSpec::exponential(1.0, std::sqrt(2.0));
    sh.alpha1 = sh.alpha2 = 1.0;
    LimitParams lim;
    lim.regime = Regime::near_unstable;
    lim.alpha_tilde = 0.6;
    lim.sigma = 1.0;
    lim.c1 = 3.0;
    lim.c2 = 2.0;
    lim.alpha1 = lim.alpha2 = 1.0;
    lim.mu_star = 0.5;
    lim.mu_bar_star = 1.0;
    lim.k = sh.k;

    auto rs = rescale_params(sh, lim, 200.0);
    // delta = K Gamma(1-a)/a = Gamma(0.4) for the unit power law
    CHECK(rs.meta.delta == doctest::Approx(2.218159543757688).epsilon(1e-10));
    // definitional identity (1 - a_T) T^alpha = sigma delta
    CHECK((1.0 - rs.meta.a_T) * std::pow(200.0, 0.6) ==
          doctest::Approx(lim.sigma * rs.meta.delta).epsilon(1e-12));
    CHECK(rs.meta.beta_T == doctest::Approx(1.0 / (1.0 + 3.0 * (1.0 - rs.meta.a_T))));
    CHECK(rs.meta.mu_T == doctest::Approx(0.5 / (rs.meta.delta * std::pow(200.0, 0.4))));
    CHECK(rs.meta.a_T_residual > 0.0);     // the relation is only asymptotic
    CHECK(rs.meta.a_T_residual < 0.05);
    CHECK(rs.micro.phi1.l1_norm() + rs.micro.phi2.l1_norm() ==
          doctest::Approx(rs.meta.beta_bar_T).epsilon(1e-10));
    CHECK(rs.micro.k.l2_norm_sq() ==
          doctest::Approx((1.0 - rs.meta.a_T) / 200.0 * 200.0 * 1.0 / 200.0 * 200.0)
              .epsilon(1e-10));  // = (1-a_T) for the unit-norm shape
    // T too small for a_T in (0,1)
    CHECK_THROWS_AS(rescale_params(sh, lim, 2.0), ParameterError);
}

TEST_CASE("rescale_params stable regime keeps the assumption bound") {
    ShapeParams sh;
    sh.phi = KernelSpec::exponential(1.0, 1.0);  // unit mass shape
    sh.k = KernelSpec::exponential(1.0, std::sqrt(0.8));
    sh.alpha1 = sh.alpha2 = 0.5;
    LimitParams lim;
    lim.regime = Regime::stable;
    lim.mu = 0.0;
    lim.mu_bar = 1.0;
    lim.beta = 0.3;
    lim.beta_bar = 0.5;
    lim.alpha1 = lim.alpha2 = 0.5;
    lim.k = sh.k;
    lim.phi = sh.phi;
    auto rs = rescale_params(sh, lim, 100.0);
    CHECK(rs.meta.a_T == doctest::Approx(0.5 + 0.5 * 0.4).epsilon(1e-12));  // 0.7 < 1
    CHECK(rs.micro.phi1.l1_norm() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rs.micro.phi2.l1_norm() == doctest::Approx(0.1).epsilon(1e-12));
    // the 1/sqrt(T) amplitude against the T time stretch leaves |k|_2^2 alone
    CHECK(rs.micro.k.l2_norm_sq() == doctest::Approx(0.4).epsilon(1e-12));
    lim.beta = 0.6;  // violates |beta| < beta_bar
    CHECK_THROWS_AS(rescale_params(sh, lim, 100.0), ParameterError);
}

TEST_CASE("scaled processes on a synthetic event-free path") {
    SimResult r;
    r.path.horizon = 50.0;
    r.lambda1 = GridSeries::zeros(0.0, 50.0, 101);
    r.lambda2 = r.lambda1;
    r.Lambda1 = r.lambda1;
    r.Lambda2 = r.lambda1;
    for (std::size_t j = 0; j < 101; ++j) {
        r.Lambda1[j] = 0.02 * r.Lambda1.time(j);  // Lambda1 = 0.02 t
        r.Lambda2[j] = 0.01 * r.Lambda2.time(j);
    }
    RescaledParams meta;
    meta.T = 50.0;
    meta.regime = Regime::near_unstable;
    meta.a_T = 0.8;
    meta.mu_bar_T = 0.05;
    auto sp = scaled_processes(r, meta, KernelSpec::exponential(1.0, 1.0), 26);
    double cs = meta.count_scale(), ms = meta.martingale_scale();
    for (std::size_t j = 0; j < 26; ++j) {
        double tau = sp.X.time(j) * 50.0;
        CHECK(sp.X[j] == 0.0);
        CHECK(sp.Xbar[j] == 0.0);
        CHECK(sp.Mstar[j] == doctest::Approx(-ms * 0.01 * tau).epsilon(1e-10));
        CHECK(sp.LambdaBar[j] == doctest::Approx(cs * 0.03 * tau).epsilon(1e-10));
    }
    CHECK(sp.Mstar[0] == 0.0);
}

TEST_CASE("scaled jumps have the definitional size and l10 gap shrinks with T") {
    ShapeParams sh;
    sh.phi = KernelSpec::power_law(0.75, 1.0);
    sh.k = KernelSpec::exponential(1.0, std::sqrt(2.0));
    sh.alpha1 = sh.alpha2 = 1.0;
    LimitParams lim;
    lim.regime = Regime::near_unstable;
    lim.alpha_tilde = 0.75;
    lim.sigma = 1.0;
    lim.c1 = 3.0;
    lim.c2 = 2.0;
    lim.alpha1 = lim.alpha2 = 1.0;
    lim.mu_star = 0.5;
    lim.mu_bar_star = 1.0;
    lim.k = sh.k;

    double prev_gap = 1e30;
    for (double T : {20.0, 80.0}) {
        auto rs = rescale_params(sh, lim, T);
        SimConfig sc;
        sc.micro_step = T / 5e3;
        sc.sample_points = 201;
        double gap = 0.0;
        const std::size_t paths = 30;
        std::vector<double> gaps(paths);
        for_each_index(paths, 0, [&](std::size_t i) {
            auto r = simulate(rs.micro, T, derive_seed(17, 3, i), sc);
            auto sp = scaled_processes(r, rs.meta, sh.k, 51);
            gaps[i] = sp.Xbar.sup_gap(sp.LambdaBar);
            if (i == 0 && !r.path.times.empty()) {
                // jump size of the scaled count process
                auto before = sp.Xbar;
                double cs = rs.meta.count_scale();
                long long n = 0;
                for (double te : r.path.times)
                    if (te <= T) ++n;
                CHECK(sp.Xbar[50] == doctest::Approx(cs * n).epsilon(1e-12));
            }
        });
        for (double g : gaps) gap += g;
        gap /= paths;
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}
