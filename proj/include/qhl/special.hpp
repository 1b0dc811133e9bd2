#pragma once

namespace qhl {

// Two-parameter Mittag-Leffler function E_{alpha,beta}(s) = sum s^n/Gamma(alpha n + beta).
// Absolute error <= 1e-12 for |s| within the overflow guard; relative ~1e-13
// once the value grows past O(1). Throws ParameterError for alpha<=0 or
// beta<=0 and RangeError past the overflow guard.
double mittag_leffler(double alpha, double beta, double s);

enum class MlForm { density, integral };

// Mittag-Leffler kernel pair used as the limit kernels:
//   density  f(t) = sigma t^{alpha-1} E_{alpha,alpha}(-sigma t^alpha)
//   integral F(t) = 1 - E_{alpha,1}(-sigma t^alpha)
// The density is singular at t=0 (SingularityError); F(0) = 0.
double ml_kernel(double alpha, double sigma, double t, MlForm form);

}  // namespace qhl
