// Benchmark comparing the serial reference path loop against the OpenMP
// loop on the two Monte Carlo workloads (micro thinning, limit SDE). Also
// verifies that both produce identical results before timing.

#include <chrono>
#include <cstdio>
#include <vector>

#include "qhl/limit_sde.hpp"
#include "qhl/parallel.hpp"
#include "qhl/qhawkes_sim.hpp"
#include "qhl/rng.hpp"

using namespace qhl;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

MicroParams micro_params() {
    MicroParams p;
    p.mu1 = p.mu2 = 0.5;
    p.phi1 = KernelSpec::exponential(1.0, 0.3);
    p.phi2 = KernelSpec::exponential(1.0, 0.1);
    p.k = KernelSpec::exponential(1.0, 0.5656854249492381);
    p.alpha1 = p.alpha2 = 1.0;
    return p;
}

LimitParams limit_params() {
    LimitParams p;
    p.regime = Regime::near_unstable;
    p.alpha_tilde = 0.75;
    p.sigma = 1.0;
    p.c1 = 3.0;
    p.c2 = 2.0;
    p.alpha1 = p.alpha2 = 1.0;
    p.mu_star = 0.5;
    p.mu_bar_star = 1.0;
    p.k = KernelSpec::exponential(1.0, 1.4142135623730951);
    p.grid_points = 512;
    return p;
}

}  // namespace

int main() {
    const std::size_t n_micro = 64, n_limit = 128;
    auto mp = micro_params();
    auto lp = limit_params();
    SimConfig sc;
    sc.micro_step = 0.01;

    std::vector<double> a(n_micro), b(n_micro);
    auto micro_job = [&](std::vector<double>& dst) {
        return [&, p = mp](std::size_t i) {
            auto r = simulate(p, 50.0, derive_seed(7, 11, i), sc);
            dst[i] = static_cast<double>(r.path.times.size());
        };
    };
    auto t0 = Clock::now();
    for_each_index_serial(n_micro, micro_job(a));
    double ts = seconds_since(t0);
    t0 = Clock::now();
    for_each_index(n_micro, 0, micro_job(b));
    double tp = seconds_since(t0);
    bool same = a == b;
    std::printf("micro thinning   %4zu paths  serial %7.3fs  openmp %7.3fs  speedup %5.2fx  %s\n",
                n_micro, ts, tp, ts / tp, same ? "identical" : "MISMATCH");

    std::vector<double> c(n_limit), d(n_limit);
    auto limit_job = [&](std::vector<double>& dst) {
        return [&, p = lp](std::size_t i) {
            auto path = simulate_unstable_limit(p, derive_seed(7, 13, i));
            dst[i] = path.Xbar[path.Xbar.size() - 1];
        };
    };
    t0 = Clock::now();
    for_each_index_serial(n_limit, limit_job(c));
    ts = seconds_since(t0);
    t0 = Clock::now();
    for_each_index(n_limit, 0, limit_job(d));
    tp = seconds_since(t0);
    same = c == d;
    std::printf("limit SDE        %4zu paths  serial %7.3fs  openmp %7.3fs  speedup %5.2fx  %s\n",
                n_limit, ts, tp, ts / tp, same ? "identical" : "MISMATCH");
    return 0;
}
