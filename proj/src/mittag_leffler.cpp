#include "qhl/special.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "qhl/errors.hpp"

// Evaluation strategy, following Gorenflo, Loutchko & Luchko (2002) in spirit:
//
//   s >= 0             plain series in long double (all terms positive, no
//                      cancellation), guarded against overflow;
//   s < 0, mild        plain series in long double, accepted only when an
//                      a-priori estimate of the cancellation loss stays below
//                      the 1e-12 target;
//   s << 0             algebraic asymptotic expansion
//                        E(s) ~ -sum_{k>=1} s^{-k}/Gamma(beta - alpha k)
//                      truncated at its smallest term (valid on the negative
//                      axis for alpha < 1);
//   otherwise          the same power series summed with MPFR at a precision
//                      chosen from the predicted peak-term magnitude.
//
// The spec's nominal switch point |s| = 10 sits inside the "mild" band for
// the alpha range this project uses; the cancellation estimate simply makes
// the switch exact instead of hard-coded.

namespace qhl {
namespace {

constexpr double kAbsTarget = 1e-13;
constexpr double kNegGuard = 1e12;

// log10 of the largest series term |s|^n / Gamma(alpha n + beta) over n >= 0.
double peak_term_log10(double alpha, double beta, double abs_s) {
    if (abs_s <= 1.0) return 0.0;
    // Stationary point of n ln|s| - lgamma(alpha n + beta): psi(x) = ln|s|/alpha.
    double x = std::exp(std::log(abs_s) / alpha);  // psi(x) ~ ln x
    double n = std::max(0.0, (x - beta) / alpha);
    double l = n * std::log(abs_s) - std::lgamma(alpha * n + beta);
    return std::max(0.0, l) / std::log(10.0);
}

double series_long_double(double alpha, double beta, double s) {
    long double sum = 0.0L, comp = 0.0L;
    long double term;
    long double ls = static_cast<long double>(s);
    long double power = 1.0L;
    for (int n = 0; n < 100000; ++n) {
        long double g = lgammal(static_cast<long double>(alpha) * n + beta);
        if (g > 11300.0L) break;  // 1/Gamma underflows
        term = power * expl(-g);
        // Kahan update
        long double y = term - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        power *= ls;
        if (n > 4 && fabsl(term) < 1e-30L * (1.0L + fabsl(sum)) && fabsl(power) * expl(-g) < 1e-30L)
            break;
    }
    return static_cast<double>(sum);
}

// sin(pi w) without the catastrophic loss for large |w|.
double sin_pi(double w) {
    double r = w - std::round(w);
    double sgn = (static_cast<long long>(std::llround(w - r)) % 2 == 0) ? 1.0 : -1.0;
    return sgn * std::sin(M_PI * r);
}

// 1/Gamma(w), valid for all real w (zero at the poles).
double recip_gamma(double w) {
    if (w > 0.5) {
        if (w > 170.0) {
            double lg = std::lgamma(w);
            return lg > 700.0 ? 0.0 : std::exp(-lg);
        }
        return 1.0 / std::tgamma(w);
    }
    // reflection: 1/Gamma(w) = Gamma(1-w) sin(pi w)/pi
    double s = sin_pi(w);
    if (s == 0.0) return 0.0;
    double lg = std::lgamma(1.0 - w);
    double mag = lg + std::log(std::abs(s)) - std::log(M_PI);
    if (mag > 700.0) return std::copysign(std::numeric_limits<double>::infinity(), s);
    return std::copysign(std::exp(mag), s);
}

struct Asymptotic {
    double value = 0.0;
    double err = std::numeric_limits<double>::infinity();
};

// E_{alpha,beta}(-x) ~ -sum_{k>=1} (-x)^{-k} / Gamma(beta - alpha k), x > 0.
// Truncated at the smallest nonzero term (the sine factor in the reflected
// 1/Gamma makes magnitudes oscillate, so the whole envelope is scanned
// rather than stopping at the first local rise). Terms at Gamma poles vanish
// and carry no error information; they are skipped.
Asymptotic asymptotic_negative(double alpha, double beta, double x) {
    Asymptotic out;
    if (!(alpha < 1.0) || x <= 2.0) return out;
    const double lx = std::log(x);
    double sum = 0.0;
    double best_sum = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 400; ++k) {
        double w = beta - alpha * k;
        double rg = recip_gamma(w);
        if (rg == 0.0) continue;
        if (std::isinf(rg)) break;
        double mag = std::exp(-k * lx) * std::abs(rg);
        if (mag < best_err) {  // truncating before term k bounds the error by mag
            best_err = mag;
            best_sum = sum;
        }
        sum += ((k % 2 == 0) ? -1.0 : 1.0) * std::exp(-k * lx) * rg;
        if (best_err < 1e-18) break;
        if (mag > 1e8 * best_err) break;  // deep in the divergent tail
    }
    out.value = best_sum;
    out.err = best_err;
    return out;
}

double series_mpfr(double alpha, double beta, double s, double peak_log10) {
    long prec = std::clamp(static_cast<long>((peak_log10 + 45.0) * 3.3219281), 128L, 16384L);
    mpfr_t sum, term, power, g, arg;
    mpfr_inits2(prec, sum, term, power, g, arg, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_zero(sum, 1);
    mpfr_set_d(power, 1.0, MPFR_RNDN);
    bool converged = false;
    for (unsigned long n = 0; n < 200000; ++n) {
        // the Gamma argument must be formed at full precision: a double
        // rounding of alpha*n, scaled by terms of size 10^peak, would leave
        // absolute errors far above the target
        mpfr_set_d(arg, alpha, MPFR_RNDN);
        mpfr_mul_ui(arg, arg, n, MPFR_RNDN);
        mpfr_add_d(arg, arg, beta, MPFR_RNDN);
        mpfr_gamma(g, arg, MPFR_RNDN);
        mpfr_div(term, power, g, MPFR_RNDN);
        mpfr_add(sum, sum, term, MPFR_RNDN);
        mpfr_mul_d(power, power, s, MPFR_RNDN);
        if (n > 4) {
            double t10 = mpfr_get_d(term, MPFR_RNDN);
            if (std::abs(t10) < std::pow(10.0, -(peak_log10 + 25.0))) {
                converged = true;
                break;
            }
        }
    }
    double out = mpfr_get_d(sum, MPFR_RNDN);
    mpfr_clears(sum, term, power, g, arg, static_cast<mpfr_ptr>(nullptr));
    if (!converged) throw DivergenceError("mittag_leffler: extended-precision series stalled");
    return out;
}

}  // namespace

double mittag_leffler(double alpha, double beta, double s) {
    if (!(alpha > 0.0)) throw ParameterError("mittag_leffler: alpha must be positive");
    if (!(beta > 0.0)) throw ParameterError("mittag_leffler: beta must be positive");
    if (!std::isfinite(s)) throw ParameterError("mittag_leffler: argument not finite");

    if (s >= 0.0) {
        if (std::pow(s, 1.0 / alpha) > 700.0)
            throw RangeError("mittag_leffler: argument beyond overflow guard");
        return series_long_double(alpha, beta, s);
    }

    double x = -s;
    if (x > kNegGuard) throw RangeError("mittag_leffler: argument beyond overflow guard");
    double peak = peak_term_log10(alpha, beta, x);
    // long double keeps ~18.9 digits; accept the plain series while the
    // rounding of the peak term stays under the 1e-13 budget.
    if (peak - 18.9 < std::log10(kAbsTarget)) return series_long_double(alpha, beta, s);

    Asymptotic a = asymptotic_negative(alpha, beta, x);
    if (a.err < kAbsTarget) return a.value;

    return series_mpfr(alpha, beta, s, peak);
}

double ml_kernel(double alpha, double sigma, double t, MlForm form) {
    if (!(alpha > 0.0) || !(sigma > 0.0))
        throw ParameterError("ml_kernel: alpha and sigma must be positive");
    if (form == MlForm::density) {
        if (!(t > 0.0)) throw SingularityError("ml_kernel: density is singular at t = 0");
        return sigma * std::pow(t, alpha - 1.0) *
               mittag_leffler(alpha, alpha, -sigma * std::pow(t, alpha));
    }
    if (t < 0.0) throw ParameterError("ml_kernel: negative time");
    if (t == 0.0) return 0.0;
    return 1.0 - mittag_leffler(alpha, 1.0, -sigma * std::pow(t, alpha));
}

}  // namespace qhl
