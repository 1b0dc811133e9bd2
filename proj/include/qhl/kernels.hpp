#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhl/errors.hpp"
#include "qhl/special.hpp"

namespace qhl {

enum class KernelVariant { exponential, power_law, ml_density, ml_series, tabulated };

// A nonnegative decay kernel on [0, inf). Five variants:
//
//   exponential(rate b > 0, scale c >= 0)      c e^{-bt}
//   power_law(alpha in (1/2,1), cutoff > 0)    alpha t^{-alpha-1} 1{t >= cutoff}
//   ml_density(alpha in (1/2,1), sigma > 0)    sigma t^{alpha-1} E_{alpha,alpha}(-sigma t^alpha)
//   ml_series(alpha in (1/2,1), sigma > 0)     E_{alpha,sigma}(t)  (smooth at 0, not integrable)
//   tabulated(grid, values)                    linear interpolation, 0 outside the grid
//
// plus a (time_scale, amplitude) modifier pair: spec.scaled(a, m) evaluates
// m * k(t/a). L1 and squared L2 norms are cached at construction; ml_series
// has no finite norms and norm accessors raise DivergenceError.
class KernelSpec {
  public:
    static KernelSpec exponential(double rate, double scale);
    static KernelSpec power_law(double alpha, double cutoff);
    static KernelSpec ml_density(double alpha, double sigma);
    static KernelSpec ml_series(double alpha, double sigma);
    static KernelSpec tabulated(std::vector<double> times, std::vector<double> values);
    static KernelSpec zero() { return exponential(1.0, 0.0); }

    KernelSpec scaled(double time_scale, double amplitude) const;

    double value(double t) const;      // k(t), t >= 0
    double primitive(double t) const;  // int_0^t k(u) du
    double moment_primitive(double t) const;  // int_0^t u k(u) du
    double derivative(double t) const;        // k'(t); ParameterError unless C1

    bool has_finite_norms() const { return l1_.has_value(); }
    double l1_norm() const;
    double l2_norm_sq() const;

    bool is_zero() const;
    bool is_c1() const;
    // Largest age beyond which the kernel stays below eps (used to truncate
    // event histories). Returns infinity for ml_series.
    double support_bound(double eps) const;

    KernelVariant variant() const { return variant_; }
    double param1() const { return p1_; }  // rate | alpha
    double param2() const { return p2_; }  // scale | cutoff | sigma
    double time_scale() const { return time_scale_; }
    double amplitude() const { return amplitude_; }
    const std::vector<double>& table_times() const { return tab_t_; }
    const std::vector<double>& table_values() const { return tab_v_; }
    std::string describe() const;

  private:
    KernelSpec() = default;
    void compute_norms();
    double base_value(double t) const;
    double base_primitive(double t) const;
    double base_moment(double t) const;

    KernelVariant variant_ = KernelVariant::exponential;
    double p1_ = 1.0, p2_ = 0.0;
    double time_scale_ = 1.0, amplitude_ = 1.0;
    std::vector<double> tab_t_, tab_v_;
    std::vector<double> tab_prim_, tab_mom_;  // prefix integrals at table nodes
    std::optional<double> l1_, l2sq_;
};

// (l1, l2 squared) of a kernel; DivergenceError when not integrable.
struct KernelNorms {
    double l1;
    double l2_sq;
};
KernelNorms kernel_norms(const KernelSpec& spec);

// Tail constant K with alpha x^alpha int_x^inf k -> K. Exact for the built-in
// power_law variant; otherwise estimated at geometrically increasing x until
// two successive estimates agree to 1e-4. DivergenceError when the limit
// fails to stabilize or is zero (no power tail). alpha_tilde defaults to the
// exponent stored in the variant; kernels without one are probed with 0.75.
double tail_constant(const KernelSpec& spec);
double tail_constant(const KernelSpec& spec, double alpha_tilde);

}  // namespace qhl
