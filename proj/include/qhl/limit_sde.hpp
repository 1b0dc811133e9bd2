#pragma once

#include <cstdint>

#include "qhl/grid_series.hpp"
#include "qhl/params.hpp"
#include "qhl/volterra.hpp"

namespace qhl {

// One simulated macroscopic path on the unit interval.
struct LimitPath {
    GridSeries V, Vbar, X, Xbar, Mstar, Mbarstar, Zstar, rho;
    struct Diag {
        std::size_t steps = 0;
        std::size_t vbar_truncations = 0;  // V_bar < 0 inside a square root
        std::size_t rho_clips = 0;         // |V/Vbar| > 1 before clipping
        std::size_t v_exceeds_vbar = 0;    // |V| > Vbar at a step (monitored only)
    } diag;
};

// Cell-mass table for the stochastic convolutions, shared read-only across
// paths. weight[j][i] of the dense table equals m0[j-i].
ConvWeights build_kernel_weights(const KernelSpec& kernel, double dt, std::size_t steps);

// Theorem-1 system on [0,1]:
//   V    = mu    + beta     int phi(t-s) V ds    + alpha (Z*)^2
//   Vbar = mubar + beta_bar int phi(t-s) Vbar ds + (a1+a2)/2 (Z*)^2
//   M*   = int sqrt(Vbar) dB,  Z* = int k(t-s) dM*
// Drift convolutions use piecewise-linear product integration (so the
// deterministic alpha -> 0 limit reproduces solve_linear_volterra exactly);
// the dM* convolution uses left-point increments with exact cell masses.
LimitPath simulate_stable_limit(const LimitParams& params, std::uint64_t seed,
                                bool noise_off = false);

// Theorem-2 system on [0,1], driven by two Brownian motions with
// state-dependent correlation rho = V / Vbar:
//   V    = int (1/c1) f^{a,c1 s}(t-u) [ dM*/sqrt(s mubar*)  + (mu*/mubar* + alpha Z*^2) du ]
//   Vbar = int (1/c2) f^{a,c2 s}(t-u) [ dMbar*/sqrt(s mubar*) + (1 + (a1+a2)/2 Z*^2) du ]
// The Mittag-Leffler rates carry the factors c1, c2 picked up by the
// near-critical resolvent (see scaled_resolvent_check).
LimitPath simulate_unstable_limit(const LimitParams& params, std::uint64_t seed,
                                  bool noise_off = false);

// Floor used in the rho denominator before clipping.
inline constexpr double kRhoFloor = 1e-12;

}  // namespace qhl
