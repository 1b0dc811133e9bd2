#include "qhl/limit_sde.hpp"

#include <cmath>

#include "qhl/rng.hpp"

namespace qhl {

ConvWeights build_kernel_weights(const KernelSpec& kernel, double dt, std::size_t steps) {
    return conv_weights(kernel, dt, steps);
}

namespace {

GridSeries make_series(double dt, std::vector<double> v) {
    return GridSeries(0.0, dt, std::move(v));
}

LimitPath assemble(double dt, std::vector<double>& V, std::vector<double>& Vb,
                   std::vector<double>& Ms, std::vector<double>& Mbs,
                   std::vector<double>& Zs, std::vector<double>& rho,
                   LimitPath::Diag diag) {
    LimitPath out;
    out.V = make_series(dt, std::move(V));
    out.Vbar = make_series(dt, std::move(Vb));
    out.X = out.V.cumulative_integral();
    out.Xbar = out.Vbar.cumulative_integral();
    out.Mstar = make_series(dt, std::move(Ms));
    out.Mbarstar = make_series(dt, std::move(Mbs));
    out.Zstar = make_series(dt, std::move(Zs));
    out.rho = make_series(dt, std::move(rho));
    out.diag = diag;
    return out;
}

}  // namespace

LimitPath simulate_stable_limit(const LimitParams& params, std::uint64_t seed,
                                bool noise_off) {
    params.validate();
    if (params.regime != Regime::stable)
        throw ParameterError("simulate_stable_limit: stable-regime parameters required");
    const std::size_t n = params.grid_points;
    const double dt = 1.0 / static_cast<double>(n);

    ConvWeights wphi = params.phi.is_zero() ? ConvWeights{dt, std::vector<double>(n + 1, 0.0),
                                                          std::vector<double>(n + 1, 0.0)}
                                            : conv_weights(params.phi, dt, n);
    const bool with_k = !params.k.is_zero();
    ConvWeights wk = with_k ? conv_weights(params.k, dt, n) : ConvWeights{};

    const double qv = params.alpha();
    const double qvb = 0.5 * (params.alpha1 + params.alpha2);
    const double cv = params.beta * wphi.m1[1];
    const double cvb = params.beta_bar * wphi.m1[1];
    if (cv >= 1.0 || cvb >= 1.0)
        throw StepSizeError("simulate_stable_limit: kernel mass per step >= 1");

    std::vector<double> V(n + 1), Vb(n + 1), Ms(n + 1, 0.0), Mbs(n + 1, 0.0),
        Zs(n + 1, 0.0), rho(n + 1, 0.0), dM(n, 0.0);
    LimitPath::Diag diag;
    diag.steps = n;
    V[0] = params.mu;
    Vb[0] = params.mu_bar;
    Rng rng(seed);
    const double sdt = std::sqrt(dt);

    for (std::size_t m = 1; m <= n; ++m) {
        double vb_prev = Vb[m - 1];
        if (vb_prev < 0.0) ++diag.vbar_truncations;
        double vol = std::sqrt(std::max(vb_prev, 0.0));
        double db = noise_off ? 0.0 : rng.normal() * sdt;
        dM[m - 1] = vol * db;
        Ms[m] = Ms[m - 1] + dM[m - 1];
        Zs[m] = with_k ? wk.increment_conv_at(dM, m) : 0.0;

        // piecewise-linear drift convolution with the unknown endpoint solved out
        double convV = 0.0, convVb = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t d = m - i;
            double w0 = wphi.m0[d] - wphi.m1[d];
            double w1 = (i + 1 == m) ? 0.0 : wphi.m1[d];
            convV += V[i] * w0 + V[i + 1] * w1;
            convVb += Vb[i] * w0 + Vb[i + 1] * w1;
        }
        V[m] = (params.mu + params.beta * convV + qv * Zs[m] * Zs[m]) / (1.0 - cv);
        Vb[m] = (params.mu_bar + params.beta_bar * convVb + qvb * Zs[m] * Zs[m]) /
                (1.0 - cvb);

        double denom = std::max(Vb[m], kRhoFloor);
        double r = V[m] / denom;
        if (std::abs(V[m]) > Vb[m]) ++diag.v_exceeds_vbar;
        if (std::abs(r) > 1.0) {
            ++diag.rho_clips;
            r = std::copysign(1.0, r);
        }
        rho[m] = r;
    }
    rho[0] = rho.size() > 1 ? rho[1] : 0.0;
    return assemble(dt, V, Vb, Ms, Mbs, Zs, rho, diag);
}

LimitPath simulate_unstable_limit(const LimitParams& params, std::uint64_t seed,
                                  bool noise_off) {
    params.validate();
    if (params.regime != Regime::near_unstable)
        throw ParameterError("simulate_unstable_limit: near-unstable parameters required");
    const std::size_t n = params.grid_points;
    const double dt = 1.0 / static_cast<double>(n);

    // Volterra kernels (1/c_i) f^{alpha, c_i sigma}; exact cell masses via F.
    KernelSpec f1 = KernelSpec::ml_density(params.alpha_tilde, params.c1 * params.sigma)
                        .scaled(1.0, 1.0 / params.c1);
    KernelSpec f2 = KernelSpec::ml_density(params.alpha_tilde, params.c2 * params.sigma)
                        .scaled(1.0, 1.0 / params.c2);
    ConvWeights w1 = conv_weights(f1, dt, n);
    ConvWeights w2 = conv_weights(f2, dt, n);
    const bool with_k = !params.k.is_zero();
    ConvWeights wk = with_k ? conv_weights(params.k, dt, n) : ConvWeights{};

    const double am = 1.0 / std::sqrt(params.sigma * params.mu_bar_star);
    const double drift_ratio = params.mu_star / params.mu_bar_star;
    const double qv = params.alpha();
    const double qvb = 0.5 * (params.alpha1 + params.alpha2);

    // flattened weight tables for the O(n^2) inner loops
    std::vector<double> a1(n + 1, 0.0), b1(n + 1, 0.0), n1(n + 1, 0.0);
    std::vector<double> a2(n + 1, 0.0), b2(n + 1, 0.0), n2(n + 1, 0.0);
    std::vector<double> nk(n + 1, 0.0);
    for (std::size_t d = 1; d <= n; ++d) {
        a1[d] = w1.m0[d] - w1.m1[d];
        b1[d] = w1.m1[d];
        n1[d] = am * w1.m0[d] / dt;
        a2[d] = w2.m0[d] - w2.m1[d];
        b2[d] = w2.m1[d];
        n2[d] = am * w2.m0[d] / dt;
        if (with_k) nk[d] = wk.m0[d] / dt;
    }

    std::vector<double> V(n + 1, 0.0), Vb(n + 1, 0.0), Ms(n + 1, 0.0), Mbs(n + 1, 0.0),
        Zs(n + 1, 0.0), rho(n + 1, 0.0), dM(n, 0.0), dMb(n, 0.0), g(n + 1, 0.0),
        gb(n + 1, 0.0);
    LimitPath::Diag diag;
    diag.steps = n;
    g[0] = drift_ratio;
    gb[0] = 1.0;
    Rng rng(seed);
    const double sdt = std::sqrt(dt);

    for (std::size_t m = 1; m <= n; ++m) {
        double v_prev = V[m - 1];
        double vb_prev = Vb[m - 1];

        double r = v_prev / std::max(vb_prev, kRhoFloor);
        if (std::abs(r) > 1.0) {
            ++diag.rho_clips;
            r = std::copysign(1.0, r);
        }
        rho[m - 1] = r;
        if (std::abs(v_prev) > vb_prev) ++diag.v_exceeds_vbar;

        if (vb_prev < 0.0) ++diag.vbar_truncations;
        double vol = std::sqrt(std::max(vb_prev, 0.0));
        double db2 = noise_off ? 0.0 : rng.normal() * sdt;
        double dwp = noise_off ? 0.0 : rng.normal() * sdt;
        double db1 = r * db2 + std::sqrt(std::max(0.0, 1.0 - r * r)) * dwp;
        dM[m - 1] = vol * db1;
        dMb[m - 1] = vol * db2;
        Ms[m] = Ms[m - 1] + dM[m - 1];
        Mbs[m] = Mbs[m - 1] + dMb[m - 1];

        double z = 0.0, v = 0.0, vb = 0.0;
        if (with_k) {
            for (std::size_t i = 0; i < m; ++i) z += nk[m - i] * dM[i];
        }
        Zs[m] = z;
        g[m] = drift_ratio + qv * z * z;
        gb[m] = 1.0 + qvb * z * z;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t d = m - i;
            v += g[i] * a1[d] + g[i + 1] * b1[d] + n1[d] * dM[i];
            vb += gb[i] * a2[d] + gb[i + 1] * b2[d] + n2[d] * dMb[i];
        }
        V[m] = v;
        Vb[m] = vb;
    }
    // terminal rho for completeness
    {
        double r = V[n] / std::max(Vb[n], kRhoFloor);
        rho[n] = std::clamp(r, -1.0, 1.0);
    }
    return assemble(dt, V, Vb, Ms, Mbs, Zs, rho, diag);
}

}  // namespace qhl
