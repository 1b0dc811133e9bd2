#include "qhl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qhl/quadrature.hpp"

namespace qhl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// int_0^t u f(u) du for the ML density, by term-wise integration of the
// series; falls back to quadrature once the series argument gets large.
double ml_density_moment(double alpha, double sigma, double t) {
    if (t <= 0.0) return 0.0;
    double y = sigma * std::pow(t, alpha);
    if (y < 20.0) {
        double sum = 0.0;
        double sign = 1.0;
        double yn = 1.0;  // (sigma t^alpha)^n
        double ta1 = std::pow(t, alpha + 1.0);
        for (int n = 0; n < 600; ++n) {
            double expo = alpha * n + alpha + 1.0;
            double term = sign * sigma * yn * ta1 * std::pow(t, alpha * n) /
                          (expo * std::tgamma(alpha * n + alpha));
            sum += term;
            if (n > 3 && std::abs(term) < 1e-16 * (1.0 + std::abs(sum))) return sum;
            yn *= sigma;
            sign = -sign;
        }
        return sum;
    }
    return integrate(
        [alpha, sigma](double u) { return u * ml_kernel(alpha, sigma, u, MlForm::density); },
        0.0, t, 1e-10);
}
}  // namespace

KernelSpec KernelSpec::exponential(double rate, double scale) {
    if (!(rate > 0.0)) throw ParameterError("exponential kernel: rate must be positive");
    if (scale < 0.0) throw ParameterError("exponential kernel: negative scale");
    KernelSpec k;
    k.variant_ = KernelVariant::exponential;
    k.p1_ = rate;
    k.p2_ = scale;
    k.compute_norms();
    return k;
}

KernelSpec KernelSpec::power_law(double alpha, double cutoff) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw ParameterError("power_law kernel: exponent must lie in (1/2, 1)");
    if (!(cutoff > 0.0)) throw ParameterError("power_law kernel: cutoff must be positive");
    KernelSpec k;
    k.variant_ = KernelVariant::power_law;
    k.p1_ = alpha;
    k.p2_ = cutoff;
    k.compute_norms();
    return k;
}

KernelSpec KernelSpec::ml_density(double alpha, double sigma) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw ParameterError("ml_density kernel: exponent must lie in (1/2, 1)");
    if (!(sigma > 0.0)) throw ParameterError("ml_density kernel: sigma must be positive");
    KernelSpec k;
    k.variant_ = KernelVariant::ml_density;
    k.p1_ = alpha;
    k.p2_ = sigma;
    k.compute_norms();
    return k;
}

KernelSpec KernelSpec::ml_series(double alpha, double sigma) {
    if (!(alpha > 0.5 && alpha < 1.0))
        throw ParameterError("ml_series kernel: exponent must lie in (1/2, 1)");
    if (!(sigma > 0.0)) throw ParameterError("ml_series kernel: sigma must be positive");
    KernelSpec k;
    k.variant_ = KernelVariant::ml_series;
    k.p1_ = alpha;
    k.p2_ = sigma;
    // grows super-polynomially; no finite norms to cache
    return k;
}

KernelSpec KernelSpec::tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw ParameterError("tabulated kernel: need matching arrays of >= 2 points");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && times[i] <= times[i - 1])
            throw ParameterError("tabulated kernel: times must increase");
        if (values[i] < 0.0) throw ParameterError("tabulated kernel: negative value");
    }
    if (times.front() < 0.0) throw ParameterError("tabulated kernel: negative time");
    KernelSpec k;
    k.variant_ = KernelVariant::tabulated;
    k.tab_t_ = std::move(times);
    k.tab_v_ = std::move(values);
    k.tab_prim_.assign(k.tab_t_.size(), 0.0);
    k.tab_mom_.assign(k.tab_t_.size(), 0.0);
    for (std::size_t i = 1; i < k.tab_t_.size(); ++i) {
        double h = k.tab_t_[i] - k.tab_t_[i - 1];
        k.tab_prim_[i] = k.tab_prim_[i - 1] + 0.5 * h * (k.tab_v_[i] + k.tab_v_[i - 1]);
        k.tab_mom_[i] = k.tab_mom_[i - 1] +
                        0.5 * h * (k.tab_t_[i] * k.tab_v_[i] + k.tab_t_[i - 1] * k.tab_v_[i - 1]);
    }
    k.compute_norms();
    return k;
}

KernelSpec KernelSpec::scaled(double time_scale, double amplitude) const {
    if (!(time_scale > 0.0)) throw ParameterError("scaled kernel: time scale must be positive");
    if (amplitude < 0.0) throw ParameterError("scaled kernel: negative amplitude");
    KernelSpec k = *this;
    k.time_scale_ *= time_scale;
    k.amplitude_ *= amplitude;
    // cached norms are stored for the base kernel; accessors apply modifiers
    return k;
}

// --- base (unscaled) evaluations ------------------------------------------

double KernelSpec::base_value(double t) const {
    switch (variant_) {
        case KernelVariant::exponential:
            return p2_ * std::exp(-p1_ * t);
        case KernelVariant::power_law:
            return t >= p2_ ? p1_ * std::pow(t, -p1_ - 1.0) : 0.0;
        case KernelVariant::ml_density:
            return ml_kernel(p1_, p2_, t, MlForm::density);
        case KernelVariant::ml_series:
            return mittag_leffler(p1_, p2_, t);
        case KernelVariant::tabulated: {
            if (t < tab_t_.front() || t > tab_t_.back()) return 0.0;
            auto it = std::upper_bound(tab_t_.begin(), tab_t_.end(), t);
            std::size_t i = static_cast<std::size_t>(it - tab_t_.begin());
            if (i == 0) return tab_v_.front();
            if (i >= tab_t_.size()) return tab_v_.back();
            double w = (t - tab_t_[i - 1]) / (tab_t_[i] - tab_t_[i - 1]);
            return tab_v_[i - 1] + w * (tab_v_[i] - tab_v_[i - 1]);
        }
    }
    return 0.0;
}

double KernelSpec::base_primitive(double t) const {
    if (t <= 0.0) return 0.0;
    switch (variant_) {
        case KernelVariant::exponential:
            return p2_ / p1_ * (1.0 - std::exp(-p1_ * t));
        case KernelVariant::power_law:
            return t <= p2_ ? 0.0 : std::pow(p2_, -p1_) - std::pow(t, -p1_);
        case KernelVariant::ml_density:
            return ml_kernel(p1_, p2_, t, MlForm::integral);
        case KernelVariant::ml_series: {
            // sum t^{n+1} / ((n+1) Gamma(alpha n + sigma))
            double sum = 0.0, tn = t;
            for (int n = 0; n < 4000; ++n) {
                double g = std::lgamma(p1_ * n + p2_);
                double term = tn / (n + 1.0) * std::exp(-g);
                sum += term;
                tn *= t;
                if (n > 4 && term < 1e-17 * (1.0 + sum) && t < 1.0) break;
                if (n > 4 && term < 1e-17 * (1.0 + sum)) break;
            }
            return sum;
        }
        case KernelVariant::tabulated: {
            if (t <= tab_t_.front()) return 0.0;
            if (t >= tab_t_.back()) return tab_prim_.back();
            auto it = std::upper_bound(tab_t_.begin(), tab_t_.end(), t);
            std::size_t i = static_cast<std::size_t>(it - tab_t_.begin());
            double v = base_value(t);
            double h = t - tab_t_[i - 1];
            return tab_prim_[i - 1] + 0.5 * h * (tab_v_[i - 1] + v);
        }
    }
    return 0.0;
}

double KernelSpec::base_moment(double t) const {
    if (t <= 0.0) return 0.0;
    switch (variant_) {
        case KernelVariant::exponential:
            return p2_ / (p1_ * p1_) * (1.0 - std::exp(-p1_ * t) * (1.0 + p1_ * t));
        case KernelVariant::power_law: {
            if (t <= p2_) return 0.0;
            double a = p1_;
            return a / (1.0 - a) * (std::pow(t, 1.0 - a) - std::pow(p2_, 1.0 - a));
        }
        case KernelVariant::ml_density:
            return ml_density_moment(p1_, p2_, t);
        case KernelVariant::ml_series: {
            double sum = 0.0, tn = t * t;
            for (int n = 0; n < 4000; ++n) {
                double g = std::lgamma(p1_ * n + p2_);
                double term = tn / (n + 2.0) * std::exp(-g);
                sum += term;
                tn *= t;
                if (n > 4 && term < 1e-17 * (1.0 + sum)) break;
            }
            return sum;
        }
        case KernelVariant::tabulated: {
            if (t <= tab_t_.front()) return 0.0;
            if (t >= tab_t_.back()) return tab_mom_.back();
            auto it = std::upper_bound(tab_t_.begin(), tab_t_.end(), t);
            std::size_t i = static_cast<std::size_t>(it - tab_t_.begin());
            double v = base_value(t);
            double h = t - tab_t_[i - 1];
            return tab_mom_[i - 1] + 0.5 * h * (tab_t_[i - 1] * tab_v_[i - 1] + t * v);
        }
    }
    return 0.0;
}

// --- public evaluations with the (time_scale, amplitude) modifiers ---------

double KernelSpec::value(double t) const {
    if (t < 0.0) throw ParameterError("kernel value: negative time");
    return amplitude_ * base_value(t / time_scale_);
}

double KernelSpec::primitive(double t) const {
    return amplitude_ * time_scale_ * base_primitive(t / time_scale_);
}

double KernelSpec::moment_primitive(double t) const {
    return amplitude_ * time_scale_ * time_scale_ * base_moment(t / time_scale_);
}

double KernelSpec::derivative(double t) const {
    if (!is_c1()) throw ParameterError("kernel derivative: kernel is not C1");
    double u = t / time_scale_;
    double d;
    if (variant_ == KernelVariant::exponential) {
        d = -p1_ * p2_ * std::exp(-p1_ * u);
    } else {  // ml_series: term-wise derivative, sum n t^{n-1}/Gamma(alpha n + sigma)
        double sum = 0.0, tn = 1.0;
        for (int n = 1; n < 4000; ++n) {
            double term = n * tn * std::exp(-std::lgamma(p1_ * n + p2_));
            sum += term;
            tn *= u;
            if (n > 4 && term < 1e-17 * (1.0 + sum)) break;
        }
        d = sum;
    }
    return amplitude_ / time_scale_ * d;
}

bool KernelSpec::is_zero() const {
    if (amplitude_ == 0.0) return true;
    if (variant_ == KernelVariant::exponential && p2_ == 0.0) return true;
    if (variant_ == KernelVariant::tabulated) {
        for (double v : tab_v_)
            if (v != 0.0) return false;
        return true;
    }
    return false;
}

bool KernelSpec::is_c1() const {
    return variant_ == KernelVariant::exponential || variant_ == KernelVariant::ml_series;
}

double KernelSpec::support_bound(double eps) const {
    if (is_zero()) return 0.0;
    switch (variant_) {
        case KernelVariant::exponential: {
            double a = amplitude_ * p2_;
            if (a <= eps) return 0.0;
            return time_scale_ / p1_ * std::log(a / eps);
        }
        case KernelVariant::power_law: {
            double x = std::pow(amplitude_ * p1_ / eps, 1.0 / (p1_ + 1.0));
            return time_scale_ * std::max(x, p2_);
        }
        case KernelVariant::ml_density: {
            // tail ~ t^{-alpha-1} / (sigma |Gamma(-alpha)|)
            double c = amplitude_ / (p2_ * std::abs(std::tgamma(-p1_)));
            return time_scale_ * std::max(1.0, std::pow(c / eps, 1.0 / (p1_ + 1.0)));
        }
        case KernelVariant::tabulated:
            return time_scale_ * tab_t_.back();
        case KernelVariant::ml_series:
            return kInf;
    }
    return kInf;
}

void KernelSpec::compute_norms() {
    switch (variant_) {
        case KernelVariant::exponential:
            l1_ = p2_ / p1_;
            l2sq_ = p2_ * p2_ / (2.0 * p1_);
            return;
        case KernelVariant::power_law:
            l1_ = std::pow(p2_, -p1_);
            l2sq_ = p1_ * p1_ / (2.0 * p1_ + 1.0) * std::pow(p2_, -2.0 * p1_ - 1.0);
            return;
        case KernelVariant::ml_density: {
            l1_ = 1.0;
            // int_0^1 f^2 with the u = t^alpha substitution, plus the tail
            double a = p1_, s = p2_;
            double head = integrate(
                [a, s](double u) {
                    double t = std::pow(u, 1.0 / a);
                    double f = ml_kernel(a, s, t, MlForm::density);
                    return f * f * std::pow(u, 1.0 / a - 1.0) / a;
                },
                0.0, 1.0, 1e-10);
            double tail = integrate_to_inf(
                [a, s](double t) {
                    double f = ml_kernel(a, s, t, MlForm::density);
                    return f * f;
                },
                1.0, 1e-10);
            l2sq_ = head + tail;
            return;
        }
        case KernelVariant::tabulated: {
            l1_ = tab_prim_.back();
            double acc = 0.0;
            for (std::size_t i = 1; i < tab_t_.size(); ++i)
                acc += 0.5 * (tab_t_[i] - tab_t_[i - 1]) *
                       (tab_v_[i] * tab_v_[i] + tab_v_[i - 1] * tab_v_[i - 1]);
            l2sq_ = acc;
            return;
        }
        case KernelVariant::ml_series:
            return;  // divergent
    }
}

double KernelSpec::l1_norm() const {
    if (!l1_) throw DivergenceError("kernel L1 norm diverges");
    return amplitude_ * time_scale_ * *l1_;
}

double KernelSpec::l2_norm_sq() const {
    if (!l2sq_) throw DivergenceError("kernel L2 norm diverges");
    return amplitude_ * amplitude_ * time_scale_ * *l2sq_;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    switch (variant_) {
        case KernelVariant::exponential: os << "exponential(rate=" << p1_ << ",scale=" << p2_ << ")"; break;
        case KernelVariant::power_law: os << "power_law(alpha=" << p1_ << ",cutoff=" << p2_ << ")"; break;
        case KernelVariant::ml_density: os << "ml_density(alpha=" << p1_ << ",sigma=" << p2_ << ")"; break;
        case KernelVariant::ml_series: os << "ml_series(alpha=" << p1_ << ",sigma=" << p2_ << ")"; break;
        case KernelVariant::tabulated: os << "tabulated(" << tab_t_.size() << " points)"; break;
    }
    if (time_scale_ != 1.0 || amplitude_ != 1.0)
        os << "[x" << amplitude_ << ",/" << time_scale_ << "]";
    return os.str();
}

KernelNorms kernel_norms(const KernelSpec& spec) {
    return KernelNorms{spec.l1_norm(), spec.l2_norm_sq()};
}

double tail_constant(const KernelSpec& spec) {
    switch (spec.variant()) {
        case KernelVariant::power_law:
        case KernelVariant::ml_density:
        case KernelVariant::ml_series:
            return tail_constant(spec, spec.param1());
        default:
            return tail_constant(spec, 0.75);  // probe exponent
    }
}

double tail_constant(const KernelSpec& spec, double alpha_tilde) {
    if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0))
        throw ParameterError("tail_constant: exponent must lie in (0, 1)");
    if (spec.variant() == KernelVariant::power_law && alpha_tilde == spec.param1()) {
        // tail integral from x is (amp * scale) * (x/scale)^{-alpha}; the limit is exact
        return alpha_tilde * spec.amplitude() *
               std::pow(spec.time_scale(), 1.0 + alpha_tilde);
    }
    if (!spec.has_finite_norms()) throw DivergenceError("tail_constant: kernel not integrable");
    double total = spec.l1_norm();
    double x = 100.0 * std::max(1.0, spec.time_scale());
    double prev = std::numeric_limits<double>::quiet_NaN();
    int stable_steps = 0;
    for (int j = 0; j < 24; ++j) {
        double tail = total - spec.primitive(x);
        double est = alpha_tilde * std::pow(x, alpha_tilde) * tail;
        if (std::isfinite(prev) && std::abs(est - prev) <= 1e-4 * std::max(1.0, std::abs(est))) {
            if (++stable_steps >= 2) {
                if (est < 1e-8)
                    throw DivergenceError("tail_constant: no power tail (limit is zero)");
                return est;
            }
        } else {
            stable_steps = 0;
        }
        prev = est;
        x *= 2.0;
    }
    throw DivergenceError("tail_constant: estimates failed to stabilize");
}

}  // namespace qhl
