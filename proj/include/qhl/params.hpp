#pragma once

#include <cmath>
#include <cstdint>

#include "qhl/kernels.hpp"

namespace qhl {

enum class Regime { stable, near_unstable };

// Full bivariate QHawkes parameter set. The two feedback kernels k1, k2 share
// one shape k with k1 + k2 = sqrt(alpha1) k and k1 - k2 = sqrt(alpha2) k, so
// the pair is stored as (k, alpha1, alpha2). Nonnegativity of k2 requires
// alpha1 >= alpha2; alpha1 = alpha2 = 0 switches the quadratic term off.
struct MicroParams {
    double mu1 = 0.0, mu2 = 0.0;
    KernelSpec phi1 = KernelSpec::zero();
    KernelSpec phi2 = KernelSpec::zero();
    KernelSpec k = KernelSpec::zero();
    double alpha1 = 0.0, alpha2 = 0.0;

    void validate() const {
        if (mu1 < 0.0 || mu2 < 0.0) throw ParameterError("MicroParams: negative baseline rate");
        if (alpha1 < 0.0 || alpha2 < 0.0) throw ParameterError("MicroParams: negative alpha");
        if (alpha1 < alpha2)
            throw ParameterError("MicroParams: alpha1 < alpha2 makes k2 negative");
    }

    double mu() const { return mu1 - mu2; }
    double mu_bar() const { return mu1 + mu2; }
    double alpha() const { return std::sqrt(alpha1 * alpha2); }
    double k1_coef() const { return 0.5 * (std::sqrt(alpha1) + std::sqrt(alpha2)); }
    double k2_coef() const { return 0.5 * (std::sqrt(alpha1) - std::sqrt(alpha2)); }
    KernelSpec k1() const { return k.scaled(1.0, k1_coef()); }
    KernelSpec k2() const { return k.scaled(1.0, k2_coef()); }

    // stability functional a = |phibar|_1 + (alpha1+alpha2)/2 |k|_2^2
    double stability_functional() const {
        return phi1.l1_norm() + phi2.l1_norm() +
               0.5 * (alpha1 + alpha2) * (quad_active() ? k.l2_norm_sq() : 0.0);
    }
    bool quad_active() const { return alpha1 > 0.0 && !k.is_zero(); }
};

// Base shapes fed into the scaling regimes: a single linear-kernel shape phi
// (phi1/phi2 at scale T are both proportional to it) and the feedback shape k.
struct ShapeParams {
    KernelSpec phi = KernelSpec::zero();
    KernelSpec k = KernelSpec::zero();
    double alpha1 = 0.0, alpha2 = 0.0;
};

// Macroscopic parameters for the two limit theorems.
struct LimitParams {
    Regime regime = Regime::near_unstable;

    // near-unstable fields
    double alpha_tilde = 0.75;
    double sigma = 1.0;
    double c1 = 3.0, c2 = 2.0;
    double mu_star = 0.0, mu_bar_star = 1.0;

    // stable fields
    double mu = 0.0, mu_bar = 0.0;
    double beta = 0.0, beta_bar = 0.0;
    KernelSpec phi = KernelSpec::zero();  // stable-regime linear kernel shape

    // shared
    double alpha1 = 0.0, alpha2 = 0.0;
    KernelSpec k = KernelSpec::zero();  // feedback kernel shape for Z*
    std::size_t grid_points = 1024;

    double alpha() const { return std::sqrt(alpha1 * alpha2); }

    void validate() const {
        if (alpha1 < 0.0 || alpha2 < 0.0) throw ParameterError("LimitParams: negative alpha");
        if (regime == Regime::near_unstable) {
            if (!(alpha_tilde > 0.5 && alpha_tilde < 1.0))
                throw ParameterError("LimitParams: alpha_tilde must lie in (1/2, 1)");
            if (!(sigma > 0.0)) throw ParameterError("LimitParams: sigma must be positive");
            if (!(c1 > c2 && c2 > 0.5 * (alpha1 + alpha2)))
                throw ParameterError("LimitParams: need c1 > c2 > (alpha1+alpha2)/2");
            if (!(mu_bar_star > 0.0)) throw ParameterError("LimitParams: mu_bar_star must be positive");
            if (std::abs(mu_star) > mu_bar_star)
                throw ParameterError("LimitParams: |mu_star| exceeds mu_bar_star");
        } else {
            if (!(mu_bar >= std::abs(mu))) throw ParameterError("LimitParams: need mu_bar >= |mu|");
            if (!(beta_bar >= std::abs(beta)))
                throw ParameterError("LimitParams: need |beta| <= beta_bar");
        }
        if (grid_points < 2) throw ParameterError("LimitParams: grid too small");
    }
};

// Scale-T parameters produced by rescale_params.
struct RescaledParams {
    double T = 0.0;
    Regime regime = Regime::stable;
    double a_T = 0.0;  // near-unstable stability functional
    double beta_T = 0.0, beta_bar_T = 0.0;
    double mu_T = 0.0, mu_bar_T = 0.0;
    double k_amplitude = 0.0;  // sqrt((1-a_T)/T), or 1/sqrt(T) when stable
    double delta = 0.0;        // K Gamma(1-alpha)/alpha (near-unstable)
    double tail_K = 0.0;
    // |a_T - (beta_bar_T + (alpha1+alpha2)/2 (1-a_T))| under unit norms; the
    // scaling relation holds only asymptotically and this reports the slack.
    double a_T_residual = 0.0;

    double count_scale() const {  // X^T = count_scale * P_{tT}
        return regime == Regime::stable ? 1.0 / T : (1.0 - a_T) / (mu_bar_T * T);
    }
    double martingale_scale() const {  // M*^T = martingale_scale * M_{tT}
        return regime == Regime::stable ? 1.0 / std::sqrt(T)
                                        : std::sqrt((1.0 - a_T) / (mu_bar_T * T));
    }
};

}  // namespace qhl
