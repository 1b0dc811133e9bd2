#pragma once

#include <functional>

namespace qhl {

// Adaptive quadrature, backed by GSL Gauss-Kronrod rules. Relative tolerance
// defaults to 1e-8 with a hard subdivision cap; failure to converge raises
// DivergenceError. Integrable endpoint singularities are handled (QAGS).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8);

// Integral over [a, infinity).
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-8);

}  // namespace qhl
