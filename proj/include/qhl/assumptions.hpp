#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhl/params.hpp"

namespace qhl {

// Outcome of validating a parameter set against the regime's assumptions.
// Failures are reported, never thrown.
struct AssumptionReport {
    Regime regime = Regime::stable;
    double stability_margin = 0.0;  // 1 - a; positive iff the stability bound holds
    bool contraction_ok_v = false;
    bool contraction_ok_vbar = false;
    std::optional<double> eta;       // witness for the V contraction
    std::optional<double> eta_bar;   // witness for the Vbar contraction
    double contraction_bound_v = 0.0;     // LHS of the contraction inequality at eta
    double contraction_bound_vbar = 0.0;  // same at eta_bar
    std::optional<double> tail_K;  // near-unstable only
    std::optional<double> delta;
    std::vector<std::string> messages;

    bool ok() const { return stability_margin > 0.0; }
};

enum class PicardKind { V, Vbar };

struct ContractionCheck {
    double lhs = 0.0;  // |phi|_1 + (2 alpha or alpha1+alpha2) |k|_2^2 (eta + base)
    double rhs = 0.0;  // eta / (eta + base)
    bool ok = false;
};

// Contraction inequality at a candidate eta, in the reduced parametrisation
// (linear-kernel L1 norm, feedback L2^2 norm, quadratic coefficient, base level).
ContractionCheck contraction_at(double phi_l1, double k_l2_sq, double quad_coef,
                                double base, double eta);

// Stable-regime check on a concrete micro parameter set: stability margin
// plus a witness search for the two contraction conditions over the grid
// eta = 2^j * base, j = -4..10 (base 1 when the level is zero).
AssumptionReport check_assumptions(const MicroParams& params);

// Regime check on shapes + limit parameters. Stable: margin of
// beta_bar |phi|_1 + (alpha1+alpha2)/2 |k|_2^2 and the contraction witnesses
// for the Theorem-1 evolution equations. Near-unstable: the c1 > c2 ordering,
// unit-norm checks, and the tail constant K with delta = K Gamma(1-a)/a.
AssumptionReport check_assumptions(const ShapeParams& shapes, const LimitParams& limit);

}  // namespace qhl
