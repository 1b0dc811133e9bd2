#include "qhl/volterra.hpp"

#include <algorithm>
#include <cmath>

#include "qhl/quadrature.hpp"
#include "qhl/special.hpp"

namespace qhl {

double ConvWeights::linear_conv_at(const std::vector<double>& g, std::size_t j) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
        std::size_t d = j - i;
        acc += g[i] * (m0[d] - m1[d]) + g[i + 1] * m1[d];
    }
    return acc;
}

double ConvWeights::increment_conv_at(const std::vector<double>& dm, std::size_t j) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) acc += m0[j - i] / dt * dm[i];
    return acc;
}

ConvWeights conv_weights(const KernelSpec& kernel, double dt, std::size_t steps) {
    if (!(dt > 0.0)) throw ParameterError("conv_weights: dt must be positive");
    ConvWeights w;
    w.dt = dt;
    w.m0.assign(steps + 1, 0.0);
    w.m1.assign(steps + 1, 0.0);
    double p_prev = 0.0, m_prev = 0.0;
    if (!std::isfinite(kernel.primitive(dt)))
        throw DivergenceError("conv_weights: kernel mass diverges on the first cell");
    for (std::size_t d = 1; d <= steps; ++d) {
        double td = dt * static_cast<double>(d);
        double p = kernel.primitive(td);
        double m = kernel.moment_primitive(td);
        w.m0[d] = p - p_prev;
        w.m1[d] = (td * w.m0[d] - (m - m_prev)) / dt;
        p_prev = p;
        m_prev = m;
    }
    return w;
}

ConvWeights conv_weights(const std::function<double(double)>& kernel, double dt,
                         std::size_t steps) {
    if (!(dt > 0.0)) throw ParameterError("conv_weights: dt must be positive");
    ConvWeights w;
    w.dt = dt;
    w.m0.assign(steps + 1, 0.0);
    w.m1.assign(steps + 1, 0.0);
    for (std::size_t d = 1; d <= steps; ++d) {
        double a = dt * static_cast<double>(d - 1);
        double b = dt * static_cast<double>(d);
        w.m0[d] = integrate(kernel, a, b);
        w.m1[d] = integrate([&](double u) { return (b - u) / dt * kernel(u); }, a, b);
    }
    return w;
}

namespace {

// Shared marching loop: g_j = base_j + sum of product-integration terms, with
// the implicit g_j coefficient m1[1] solved per step.
GridSeries march(const ConvWeights& w, const std::vector<double>& inhom, double span,
                 std::size_t steps) {
    double dt = span / static_cast<double>(steps);
    std::vector<double> g(steps + 1, 0.0);
    double c_self = w.m1[1];
    if (!(std::abs(1.0 - c_self) > 1e-12) || c_self >= 1.0)
        throw StepSizeError("volterra march: kernel mass per step >= 1, refine the grid");
    g[0] = inhom[0];
    for (std::size_t j = 1; j <= steps; ++j) {
        double known = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            std::size_t d = j - i;
            double gi1 = (i + 1 == j) ? 0.0 : g[i + 1];
            known += g[i] * (w.m0[d] - w.m1[d]) + gi1 * w.m1[d];
        }
        g[j] = (inhom[j] + known) / (1.0 - c_self);
    }
    return GridSeries(0.0, dt, std::move(g));
}

GridSeries solve_with_weights(double base, const ConvWeights& w, double span,
                              std::size_t steps) {
    std::vector<double> inhom(steps + 1, base);
    return march(w, inhom, span, steps);
}

}  // namespace

GridSeries solve_linear_volterra(double base, const KernelSpec& kernel, double span,
                                 std::size_t steps) {
    return solve_with_weights(base, conv_weights(kernel, span / steps, steps), span, steps);
}

GridSeries solve_linear_volterra(double base, const std::function<double(double)>& kernel,
                                 double span, std::size_t steps) {
    return solve_with_weights(base, conv_weights(kernel, span / steps, steps), span, steps);
}

GridSeries resolvent(const KernelSpec& phi, double coeff, double span, std::size_t steps) {
    double dt = span / static_cast<double>(steps);
    if (coeff == 0.0) return GridSeries::zeros(0.0, span, steps + 1);
    ConvWeights w = conv_weights(phi, dt, steps);
    for (auto& v : w.m0) v *= coeff;
    for (auto& v : w.m1) v *= coeff;
    std::vector<double> inhom(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j)
        inhom[j] = coeff * phi.value(dt * static_cast<double>(j));
    return march(w, inhom, span, steps);
}

ScaledResolventCheck scaled_resolvent_check(const KernelSpec& phi,
                                            const std::vector<double>& schedule,
                                            const LimitParams& limit,
                                            std::size_t unit_points, double phys_dt) {
    limit.validate();
    if (limit.regime != Regime::near_unstable)
        throw ParameterError("scaled_resolvent_check: near-unstable parameters required");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw ParameterError("scaled_resolvent_check: schedule must increase");

    double K = tail_constant(phi, limit.alpha_tilde);
    double delta = K * std::tgamma(1.0 - limit.alpha_tilde) / limit.alpha_tilde;

    ScaledResolventCheck out;
    out.limit_F = GridSeries::zeros(0.0, 1.0, unit_points);
    for (std::size_t j = 0; j < unit_points; ++j)
        out.limit_F[j] = ml_kernel(limit.alpha_tilde, limit.c1 * limit.sigma,
                                   out.limit_F.time(j), MlForm::integral) /
                         limit.c1;

    for (double T : schedule) {
        double one_minus_a = limit.sigma * delta * std::pow(T, -limit.alpha_tilde);
        if (!(one_minus_a > 0.0 && one_minus_a < 1.0))
            throw ParameterError("scaled_resolvent_check: a^T falls outside (0,1)");
        double beta_T = 1.0 / (1.0 + limit.c1 * one_minus_a);
        auto steps = static_cast<std::size_t>(std::ceil(T / phys_dt));
        GridSeries psi = resolvent(phi, beta_T, T, steps);
        GridSeries cum = psi.cumulative_integral();

        GridSeries FT = GridSeries::zeros(0.0, 1.0, unit_points);
        for (std::size_t j = 0; j < unit_points; ++j) {
            double tau = FT.time(j) * T;
            auto idx = static_cast<std::size_t>(tau / cum.dt());
            idx = std::min(idx, cum.size() - 2);
            double wfrac = (tau - cum.time(idx)) / cum.dt();
            FT[j] = one_minus_a * (cum[idx] + wfrac * (cum[idx + 1] - cum[idx]));
        }
        out.rows.push_back({T, FT.sup_gap(out.limit_F)});
        out.F_T.push_back(std::move(FT));
    }
    return out;
}

PicardProblem picard_problem(const MicroParams& params, PicardKind kind) {
    params.validate();
    const auto& a = params.phi1;
    const auto& b = params.phi2;
    auto exp_like = [](const KernelSpec& k) {
        return k.variant() == KernelVariant::exponential;
    };
    if (!exp_like(a) || !exp_like(b))
        throw ParameterError("picard_problem: reduced form needs exponential phi kernels");
    if (!a.is_zero() && !b.is_zero() && std::abs(a.param1() - b.param1()) > 1e-12)
        throw ParameterError("picard_problem: phi kernels must share one rate");
    double rate = a.is_zero() ? (b.is_zero() ? 1.0 : b.param1()) : a.param1();
    double ca = a.is_zero() ? 0.0 : a.param2() * a.amplitude();
    double cb = b.is_zero() ? 0.0 : b.param2() * b.amplitude();

    PicardProblem prob;
    prob.k = params.k;
    if (kind == PicardKind::V) {
        prob.base = params.mu();
        prob.phi = KernelSpec::exponential(rate, std::abs(ca - cb));
        prob.phi_coeff = ca >= cb ? 1.0 : -1.0;
        prob.quad_coeff = params.alpha();
    } else {
        prob.base = params.mu_bar();
        prob.phi = KernelSpec::exponential(rate, ca + cb);
        prob.quad_coeff = 0.5 * (params.alpha1 + params.alpha2);
    }
    return prob;
}

PicardResult picard_solve(const PicardProblem& prob, double span, std::size_t steps,
                          double tol, std::size_t max_iter, bool override_precondition) {
    if (!(tol > 0.0)) throw ParameterError("picard_solve: tol must be positive");
    double dt = span / static_cast<double>(steps);

    double phi_l1 = std::abs(prob.phi_coeff) * prob.phi.l1_norm();
    double k2 = prob.k.is_zero() ? 0.0 : prob.k.l2_norm_sq();
    std::optional<double> witness;
    double bound = 0.0;
    {
        double gb = std::abs(prob.base) > 0.0 ? std::abs(prob.base) : 1.0;
        for (int j = -4; j <= 10; ++j) {
            double eta = std::ldexp(gb, j);
            auto c = contraction_at(phi_l1, k2, 2.0 * prob.quad_coeff, std::abs(prob.base), eta);
            if (c.ok && (!witness || c.lhs < bound)) {
                witness = eta;
                bound = c.lhs;
            }
        }
    }
    if (!witness && !override_precondition)
        throw PreconditionError(
            "picard_solve: no contraction witness on the eta grid; pass the override "
            "flag to iterate anyway");

    ConvWeights wphi = conv_weights(prob.phi, dt, steps);
    ConvWeights wk = conv_weights(prob.k, dt, steps);

    auto apply = [&](const std::vector<double>& g, std::vector<double>& out) {
        for (std::size_t j = 0; j <= steps; ++j) {
            double lin = prob.phi_coeff * wphi.linear_conv_at(g, j);
            double qd = wk.linear_conv_at(g, j);
            out[j] = prob.base + lin + prob.quad_coeff * qd * qd;
        }
    };

    PicardResult res;
    res.witness_eta = witness;
    res.analytic_bound = bound;
    std::vector<double> g(steps + 1, prob.base), next(steps + 1, 0.0);
    double prev_update = -1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        apply(g, next);
        double upd = 0.0;
        for (std::size_t j = 0; j <= steps; ++j) upd = std::max(upd, std::abs(next[j] - g[j]));
        g.swap(next);
        res.iterations = it;
        if (prev_update > 0.0) res.rate_estimates.push_back(upd / prev_update);
        prev_update = upd > 0.0 ? upd : -1.0;
        if (upd < tol) {
            res.converged = true;
            break;
        }
    }
    apply(g, next);
    double resid = 0.0;
    for (std::size_t j = 0; j <= steps; ++j) resid = std::max(resid, std::abs(next[j] - g[j]));
    res.residual_sup = resid;
    res.solution = GridSeries(0.0, dt, std::move(g));
    return res;
}

}  // namespace qhl
