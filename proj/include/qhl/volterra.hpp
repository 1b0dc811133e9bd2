#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qhl/assumptions.hpp"
#include "qhl/grid_series.hpp"
#include "qhl/params.hpp"

namespace qhl {

// Product-integration weights for convolution against a (possibly singular)
// kernel on a uniform grid. For offset d = j - i >= 1,
//   m0[d] = int over cell [t_{d-1}, t_d] of k(u) du          (exact cell mass)
//   m1[d] = (1/h) int over the same cell of (d h - u) k(u) du
// A piecewise-linear integrand g then contributes
//   sum_i g_i (m0[d] - m1[d]) + g_{i+1} m1[d],  d = j - i.
// Full lower-triangular tables weight[j][i] are recovered as m0[j-i].
struct ConvWeights {
    double dt = 0.0;
    std::vector<double> m0;  // index 0 unused
    std::vector<double> m1;

    // Convolution of a piecewise-linear integrand, evaluated at node j using
    // values g[0..j]; the caller guarantees g has at least j+1 entries.
    double linear_conv_at(const std::vector<double>& g, std::size_t j) const;
    // Left-point convolution against increments dm[0..j-1] (cell-average kernel).
    double increment_conv_at(const std::vector<double>& dm, std::size_t j) const;
};

ConvWeights conv_weights(const KernelSpec& kernel, double dt, std::size_t steps);
ConvWeights conv_weights(const std::function<double(double)>& kernel, double dt,
                         std::size_t steps);

// g(t) = base + int_0^t kernel(t-s) g(s) ds on [0, span], marching scheme.
GridSeries solve_linear_volterra(double base, const KernelSpec& kernel, double span,
                                 std::size_t steps);
GridSeries solve_linear_volterra(double base, const std::function<double(double)>& kernel,
                                 double span, std::size_t steps);

// Resolvent psi of coeff * phi: psi = c phi + c phi (*) psi. Excludes the
// i = 0 identity term, so lambda = g + psi (*) g + psi (*) dM matches the
// series sum_{i>=1} (c phi)^{(*) i}.
GridSeries resolvent(const KernelSpec& phi, double coeff, double span, std::size_t steps);

struct ResolventGapRow {
    double T = 0.0;
    double sup_gap = 0.0;
};

struct ScaledResolventCheck {
    std::vector<ResolventGapRow> rows;
    GridSeries limit_F;           // (1/c1) F^{alpha, c1 sigma} on the unit grid
    std::vector<GridSeries> F_T;  // per schedule entry, on the unit grid
};

// Builds F^T(t) = (1-a^T) int_0^{tT} psi^T with psi^T the resolvent of
// beta^T phi, and reports sup-norm gaps against the Mittag-Leffler limit.
// The limit integral carries rate c1*sigma: the resolvent coefficient decays
// like 1 - beta^T ~ c1 (1 - a^T), which scales the rate accordingly.
ScaledResolventCheck scaled_resolvent_check(const KernelSpec& phi,
                                            const std::vector<double>& schedule,
                                            const LimitParams& limit,
                                            std::size_t unit_points = 257,
                                            double phys_dt = 0.02);

// Deterministic quadratic Volterra equation of the appendix:
//   T[g](t) = base + phi_coeff int phi(t-s) g ds + quad_coeff (int k(t-s) g ds)^2
struct PicardProblem {
    double base = 0.0;
    KernelSpec phi = KernelSpec::zero();
    double phi_coeff = 1.0;
    KernelSpec k = KernelSpec::zero();
    double quad_coeff = 0.0;
};

// Reduced problem for the V / Vbar equations of a micro parameter set; the
// two linear kernels must be exponentials with a common rate.
PicardProblem picard_problem(const MicroParams& params, PicardKind kind);

struct PicardResult {
    GridSeries solution;
    std::size_t iterations = 0;
    double residual_sup = 0.0;           // sup |g - T[g]| at the returned iterate
    std::vector<double> rate_estimates;  // successive update-norm ratios
    bool converged = false;
    std::optional<double> witness_eta;
    double analytic_bound = 0.0;  // contraction constant at the witness
};

// Picard iteration g_{n+1} = T[g_n] from g_0 = base. PreconditionError when
// no contraction witness exists, unless override_precondition is set (the
// solver then runs and reports whatever happened).
PicardResult picard_solve(const PicardProblem& prob, double span, std::size_t steps,
                          double tol, std::size_t max_iter,
                          bool override_precondition = false);

}  // namespace qhl
