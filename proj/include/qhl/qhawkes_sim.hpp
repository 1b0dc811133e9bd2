#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qhl/grid_series.hpp"
#include "qhl/params.hpp"

namespace qhl {

struct EventPath {
    double horizon = 0.0;
    std::vector<double> times;  // strictly increasing, in (0, horizon]
    std::vector<int> marks;     // +1 buy, -1 sell
    struct Diagnostics {
        std::uint64_t accepted = 0;
        std::uint64_t rejected = 0;
        std::uint64_t candidates = 0;
        std::uint64_t bound_refreshes = 0;
        std::uint64_t bound_violations = 0;  // true intensity above the bound
    } diag;
};

struct SimConfig {
    double micro_step = 0.0;  // 0 picks horizon / 1e5
    double safety = 1.5;      // dominating-bound inflation factor
    std::uint64_t max_events = 2000000;
    bool allow_unstable = false;       // run even when the stability bound fails
    std::size_t sample_points = 257;   // intensity/compensator sampling grid
};

struct SimResult {
    EventPath path;
    GridSeries lambda1, lambda2;  // intensity samples on the uniform grid
    GridSeries Lambda1, Lambda2;  // cumulative compensators on the same grid
};

// Online intensity state of the bivariate quadratic Hawkes system
//   lambda1 = mu1 + sum phi1(buys) + sum phi2(sells) + (ck1 J1 - ck2 J2)^2
//   lambda2 = mu2 + sum phi2(buys) + sum phi1(sells) + (ck2 J1 - ck1 J2)^2
// with J_j(t) = int k(t-s) dM^j_s split into the jump sum minus the
// compensator convolution, the latter advanced by trapezoid quadrature on the
// caller's micro-grid. Exponential kernels update in O(1); other variants
// re-evaluate a truncated event history.
class QHawkesState {
  public:
    QHawkesState(const MicroParams& params, double horizon);
    ~QHawkesState();
    QHawkesState(QHawkesState&&) noexcept;

    double time() const;
    double lambda1() const;
    double lambda2() const;
    double Lambda1() const;  // int_0^t lambda1
    double Lambda2() const;

    // Move the clock forward by dt assuming no event occurs in between.
    void advance(double dt);
    // Register an event (+1 buy, -1 sell) at the current clock time.
    void apply_event(int mark);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Ogata thinning with a piecewise-constant dominating bound refreshed every
// micro-step and after every accepted event. A candidate whose true total
// intensity exceeds the bound is accepted, counted as a violation, and the
// bound is re-inflated, so under-sampling is never silent.
SimResult simulate(const MicroParams& params, double horizon, std::uint64_t seed,
                   const SimConfig& cfg = {});

// Compensator pair (Lambda, Lambda_bar) = (L1 - L2, L1 + L2) resampled onto a
// uniform grid with `points` nodes on [0, span]; RangeError past the horizon.
std::pair<GridSeries, GridSeries> compensator_path(const SimResult& res, double span,
                                                   std::size_t points);

struct ScaledPaths {
    GridSeries X, Xbar;            // scaled counts
    GridSeries Mstar, Mbarstar;    // scaled martingales
    GridSeries Zstar;              // int k(t-s) dM* via integration by parts
    GridSeries Lambda, LambdaBar;  // scaled compensators
};

// Applies the regime scaling to a simulated path on the unit time grid.
// k_shape is the unit-scale feedback kernel (must be C1 for Z*).
ScaledPaths scaled_processes(const SimResult& res, const RescaledParams& scaling,
                             const KernelSpec& k_shape, std::size_t unit_points);

struct Rescaled {
    RescaledParams meta;
    MicroParams micro;
};

// Builds the concrete scale-T parameter set from base shapes and macroscopic
// parameters, for either regime.
Rescaled rescale_params(const ShapeParams& shapes, const LimitParams& limit, double T);

}  // namespace qhl
