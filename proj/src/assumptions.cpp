#include "qhl/assumptions.hpp"

#include <cmath>
#include <sstream>

#include "qhl/quadrature.hpp"

namespace qhl {
namespace {

struct WitnessSearch {
    bool found = false;
    double eta = 0.0;
    double lhs = 0.0;
};

// Scan eta = 2^j * base over j = -4..10 and keep the witness with the
// smallest contraction constant. The assumptions only assert existence of
// some eta, so a bounded grid with reported failure is the honest check.
WitnessSearch search_witness(double phi_l1, double k_l2_sq, double quad_coef, double base) {
    double grid_base = base > 0.0 ? base : 1.0;
    WitnessSearch best;
    for (int j = -4; j <= 10; ++j) {
        double eta = std::ldexp(grid_base, j);
        auto c = contraction_at(phi_l1, k_l2_sq, quad_coef, base, eta);
        if (c.ok && (!best.found || c.lhs < best.lhs)) {
            best.found = true;
            best.eta = eta;
            best.lhs = c.lhs;
        }
    }
    return best;
}

// L1 norm of phi1 - phi2 (signed difference), by quadrature.
double l1_diff(const KernelSpec& a, const KernelSpec& b) {
    if (b.is_zero()) return a.is_zero() ? 0.0 : a.l1_norm();
    if (a.is_zero()) return b.l1_norm();
    double hi = std::max(a.support_bound(1e-14), b.support_bound(1e-14));
    if (!std::isfinite(hi)) throw DivergenceError("l1_diff: kernel without decay");
    return integrate([&](double t) { return std::abs(a.value(t) - b.value(t)); }, 0.0,
                     hi, 1e-9);
}

void fill_contractions(AssumptionReport& rep, double phiV_l1, double phiVbar_l1,
                       double k_l2_sq, double alpha, double a1, double a2, double mu,
                       double mu_bar) {
    auto v = search_witness(phiV_l1, k_l2_sq, 2.0 * alpha, std::abs(mu));
    rep.contraction_ok_v = v.found;
    if (v.found) {
        rep.eta = v.eta;
        rep.contraction_bound_v = v.lhs;
    }
    auto vb = search_witness(phiVbar_l1, k_l2_sq, a1 + a2, mu_bar);
    rep.contraction_ok_vbar = vb.found;
    if (vb.found) {
        rep.eta_bar = vb.eta;
        rep.contraction_bound_vbar = vb.lhs;
    }
    if (!v.found) rep.messages.push_back("no contraction witness found for V on the eta grid");
    if (!vb.found)
        rep.messages.push_back("no contraction witness found for Vbar on the eta grid");
}

}  // namespace

ContractionCheck contraction_at(double phi_l1, double k_l2_sq, double quad_coef,
                                double base, double eta) {
    ContractionCheck c;
    c.lhs = phi_l1 + quad_coef * k_l2_sq * (eta + base);
    c.rhs = eta > 0.0 ? eta / (eta + base) : 0.0;
    c.ok = eta > 0.0 && c.lhs < c.rhs;
    return c;
}

AssumptionReport check_assumptions(const MicroParams& p) {
    p.validate();
    AssumptionReport rep;
    rep.regime = Regime::stable;
    double a = p.stability_functional();
    rep.stability_margin = 1.0 - a;
    {
        std::ostringstream os;
        os << "stability functional a = " << a;
        rep.messages.push_back(os.str());
    }
    if (rep.stability_margin <= 0.0)
        rep.messages.push_back("stability bound violated: |phibar|_1 + (a1+a2)/2 |k|_2^2 >= 1");

    double k2 = p.quad_active() ? p.k.l2_norm_sq() : 0.0;
    fill_contractions(rep, l1_diff(p.phi1, p.phi2), p.phi1.l1_norm() + p.phi2.l1_norm(), k2,
                      p.alpha(), p.alpha1, p.alpha2, p.mu(), p.mu_bar());
    return rep;
}

AssumptionReport check_assumptions(const ShapeParams& shapes, const LimitParams& limit) {
    limit.validate();
    AssumptionReport rep;
    rep.regime = limit.regime;

    if (limit.regime == Regime::stable) {
        double phi_l1 = shapes.phi.l1_norm();
        double k2 = shapes.k.is_zero() ? 0.0 : shapes.k.l2_norm_sq();
        double a = limit.beta_bar * phi_l1 + 0.5 * (limit.alpha1 + limit.alpha2) * k2;
        rep.stability_margin = 1.0 - a;
        if (a <= 0.0) rep.messages.push_back("stability functional is not positive");
        if (rep.stability_margin <= 0.0)
            rep.messages.push_back("Assumption (i) bound violated at the given beta_bar");
        fill_contractions(rep, std::abs(limit.beta) * phi_l1, limit.beta_bar * phi_l1, k2,
                          limit.alpha(), limit.alpha1, limit.alpha2, limit.mu,
                          limit.mu_bar);
        return rep;
    }

    // near-unstable
    bool ordering = limit.c1 > limit.c2 && limit.c2 > 0.5 * (limit.alpha1 + limit.alpha2);
    if (!ordering) rep.messages.push_back("ordering c1 > c2 > (alpha1+alpha2)/2 violated");

    double phi_l1 = shapes.phi.l1_norm();
    if (std::abs(phi_l1 - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "|phi|_1 = " << phi_l1 << " but the regime requires 1";
        rep.messages.push_back(os.str());
    }
    double k2 = shapes.k.l2_norm_sq();
    if (std::abs(k2 - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "|k|_2^2 = " << k2 << " but the regime requires 1";
        rep.messages.push_back(os.str());
    }
    if (!shapes.k.is_c1())
        rep.messages.push_back("feedback kernel is not C1; Z* reconstruction unavailable");
    if (limit.mu_star < 0.0)
        rep.messages.push_back("mu_star < 0: price intensity is negatively biased");

    try {
        double K = tail_constant(shapes.phi, limit.alpha_tilde);
        rep.tail_K = K;
        rep.delta = K * std::tgamma(1.0 - limit.alpha_tilde) / limit.alpha_tilde;
    } catch (const DivergenceError& e) {
        rep.messages.push_back(std::string("tail constant: ") + e.what());
    }

    bool ok = ordering && std::abs(phi_l1 - 1.0) <= 1e-8 && std::abs(k2 - 1.0) <= 1e-8 &&
              rep.tail_K.has_value();
    rep.stability_margin = ok ? 1.0 : -1.0;  // sign carries the verdict; a^T -> 1 by design
    return rep;
}

}  // namespace qhl
