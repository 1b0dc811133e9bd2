#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qhl/special.hpp"
#include "qhl/volterra.hpp"

using namespace qhl;

namespace {
// g = mu (c e^{(c-b)t} - b)/(c-b) solves g = mu + int c e^{-b(t-s)} g(s) ds
// (reduce to the ODE g' = (c-b) g + b mu with g(0) = mu).
double exp_oracle(double mu, double b, double c, double t) {
    return mu * (c * std::exp((c - b) * t) - b) / (c - b);
}
}  // namespace

TEST_CASE("zero kernel returns the constant base") {
    auto g = solve_linear_volterra(0.7, KernelSpec::zero(), 4.0, 128);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g[j] == doctest::Approx(0.7));
}

TEST_CASE("zero base gives the zero solution") {
    auto g = solve_linear_volterra(0.0, KernelSpec::exponential(1.0, 0.8), 4.0, 128);
    CHECK(g.sup_norm() == 0.0);
}

TEST_CASE("exponential kernel matches the analytic ODE reduction") {
    double mu = 1.0, b = 2.0, c = 0.8;
    auto g = solve_linear_volterra(mu, KernelSpec::exponential(b, c), 5.0, 4096);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(g[j] - exp_oracle(mu, b, c, g.time(j))));
    CHECK(worst < 1e-6);
}

TEST_CASE("callable-kernel overload agrees with the closed-form weights") {
    double mu = 0.5, b = 1.5, c = 0.6;
    auto a = solve_linear_volterra(mu, KernelSpec::exponential(b, c), 3.0, 512);
    auto f = solve_linear_volterra(
        mu, [&](double t) { return c * std::exp(-b * t); }, 3.0, 512);
    CHECK(a.sup_gap(f) < 1e-10);
}

TEST_CASE("solution is nondecreasing for positive base and kernel") {
    for (auto kern : {KernelSpec::exponential(1.0, 0.5), KernelSpec::power_law(0.6, 0.2)}) {
        auto g = solve_linear_volterra(0.3, kern, 6.0, 1024);
        for (std::size_t j = 1; j < g.size(); ++j) CHECK(g[j] >= g[j - 1] - 1e-12);
    }
}

TEST_CASE("grid refinement converges at first order or better") {
    double mu = 1.0, b = 2.0, c = 0.8;
    double errs[3];
    std::size_t steps[3] = {256, 512, 1024};
    for (int i = 0; i < 3; ++i) {
        auto g = solve_linear_volterra(mu, KernelSpec::exponential(b, c), 5.0, steps[i]);
        double worst = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            worst = std::max(worst, std::abs(g[j] - exp_oracle(mu, b, c, g.time(j))));
        errs[i] = worst;
    }
    CHECK(errs[1] < errs[0] / 1.8);
    CHECK(errs[2] < errs[1] / 1.8);
}

TEST_CASE("resolvent with zero coefficient vanishes") {
    auto psi = resolvent(KernelSpec::exponential(1.0, 1.0), 0.0, 3.0, 256);
    CHECK(psi.sup_norm() == 0.0);
}

TEST_CASE("resolvent of an exponential matches the Laplace-transform oracle") {
    // phi = b e^{-bt} with unit mass; psi = beta b e^{-b(1-beta) t}
    double b = 2.0, beta = 0.5;
    auto psi = resolvent(KernelSpec::exponential(b, b), beta, 3.0, 2048);
    double worst = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j)
        worst = std::max(
            worst, std::abs(psi[j] - beta * b * std::exp(-b * (1.0 - beta) * psi.time(j))));
    CHECK(worst < 1e-6);
}

TEST_CASE("resolvent mass obeys the geometric-series identity") {
    double b = 2.0, beta = 0.6;
    auto psi = resolvent(KernelSpec::exponential(b, b), beta, 40.0, 8192);
    double mass = psi.cumulative_integral()[psi.size() - 1];
    CHECK(mass == doctest::Approx(beta / (1.0 - beta)).epsilon(1e-4));
}

TEST_CASE("mean intensity reconstructed through the resolvent") {
    // g = mu (1 + int_0^t psi) where psi is the resolvent of the full kernel
    double mu = 0.8, b = 1.0, c = 0.45;
    auto psi = resolvent(KernelSpec::exponential(b, c), 1.0, 6.0, 4096);
    auto cum = psi.cumulative_integral();
    auto g = solve_linear_volterra(mu, KernelSpec::exponential(b, c), 6.0, 4096);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(g[j] - mu * (1.0 + cum[j])));
    CHECK(worst < 1e-6);
}

TEST_CASE("scaled resolvent gaps shrink along a short schedule") {
    LimitParams lim;
    lim.regime = Regime::near_unstable;
    lim.alpha_tilde = 0.6;
    lim.sigma = 1.0;
    lim.c1 = 3.0;
    lim.c2 = 2.0;
    lim.alpha1 = lim.alpha2 = 1.0;
    lim.mu_star = 0.5;
    lim.mu_bar_star = 1.0;
    lim.k = KernelSpec::exponential(1.0, std::sqrt(2.0));
    auto phi = KernelSpec::power_law(0.6, 1.0);
    auto chk = scaled_resolvent_check(phi, {25.0, 100.0}, lim, 101, 0.02);
    REQUIRE(chk.rows.size() == 2);
    CHECK(chk.rows[1].sup_gap < chk.rows[0].sup_gap);
    CHECK(chk.F_T[0][0] == 0.0);  // t = 0 gap vanishes pointwise
    CHECK(chk.limit_F[0] == 0.0);
    CHECK_THROWS_AS(scaled_resolvent_check(phi, {100.0, 25.0}, lim), ParameterError);
}

TEST_CASE("picard iteration is immediate for a constant operator") {
    PicardProblem prob;
    prob.base = 0.4;
    auto res = picard_solve(prob, 1.0, 64, 1e-12, 50);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    for (std::size_t j = 0; j < res.solution.size(); ++j)
        CHECK(res.solution[j] == doctest::Approx(0.4));
}

TEST_CASE("picard solution against an 8x refinement oracle") {
    // V = 0.1 + 0.05 (int_0^t V)^2 via a flat unit kernel
    PicardProblem prob;
    prob.base = 0.1;
    prob.k = KernelSpec::tabulated({0.0, 1.0}, {1.0, 1.0});
    prob.quad_coeff = 0.05;
    auto coarse = picard_solve(prob, 1.0, 64, 1e-12, 100);
    auto fine = picard_solve(prob, 1.0, 512, 1e-12, 100);
    CHECK(coarse.converged);
    CHECK(fine.converged);
    double worst = 0.0;
    for (std::size_t j = 0; j < coarse.solution.size(); ++j)
        worst = std::max(worst, std::abs(coarse.solution[j] - fine.solution[j * 8]));
    CHECK(worst < 1e-4);
    CHECK(coarse.residual_sup < 1e-12);
}

TEST_CASE("picard rates stay within the analytic contraction bound") {
    MicroParams p;
    p.mu1 = 0.1;
    p.mu2 = 0.0;
    p.phi1 = KernelSpec::exponential(1.0, 0.2);
    p.phi2 = KernelSpec::zero();
    p.k = KernelSpec::exponential(1.0, 1.0);  // |k|_2^2 = 0.5
    p.alpha1 = 0.1;
    p.alpha2 = 0.025;  // alpha = 0.05
    auto prob = picard_problem(p, PicardKind::V);
    CHECK(prob.base == doctest::Approx(0.1));
    CHECK(prob.quad_coeff == doctest::Approx(0.05));
    auto res = picard_solve(prob, 1.0, 256, 1e-11, 200);
    CHECK(res.converged);
    CHECK(res.witness_eta.has_value());
    CHECK(res.residual_sup < 1e-10);
    for (double r : res.rate_estimates) CHECK(r <= res.analytic_bound + 0.02);
}

TEST_CASE("picard without a witness needs the override flag") {
    PicardProblem prob;
    prob.base = 1.0;
    prob.phi = KernelSpec::exponential(1.0, 2.0);  // |phi|_1 = 2 > 1, no contraction
    CHECK_THROWS_AS(picard_solve(prob, 1.0, 64, 1e-10, 20), PreconditionError);
    // the override runs the iteration anyway; on a finite interval the linear
    // Volterra operator still converges, just without the a-priori witness
    auto res = picard_solve(prob, 1.0, 64, 1e-10, 60, true);
    CHECK(!res.witness_eta.has_value());
    CHECK(res.residual_sup < 1e-8);
}

TEST_CASE("marching refuses steps holding a full kernel mass") {
    // kernel mass over one cell near 1 -> step-size error
    auto fat = KernelSpec::exponential(1e-6, 3.0);
    CHECK_THROWS_AS(solve_linear_volterra(1.0, fat, 4.0, 4), StepSizeError);
}
