#include "qhl/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

#include "qhl/errors.hpp"

namespace qhl {
namespace {

constexpr std::size_t kMaxSubdivisions = 4096;

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const {
        gsl_integration_workspace_free(w);
    }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

double call_trampoline(double x, void* p) {
    return (*static_cast<const std::function<double(double)>*>(p))(x);
}

struct HandlerOff {
    HandlerOff() { gsl_set_error_handler_off(); }
};
const HandlerOff handler_off_once;

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    if (!(b >= a)) throw ParameterError("integrate: b < a");
    if (a == b) return 0.0;
    Workspace w(gsl_integration_workspace_alloc(kMaxSubdivisions));
    gsl_function F;
    F.function = &call_trampoline;
    F.params = const_cast<void*>(static_cast<const void*>(&f));
    double result = 0.0, abserr = 0.0;
    // QAGS first (copes with endpoint singularities); fall back to plain QAG.
    int status = gsl_integration_qags(&F, a, b, 0.0, rel_tol, kMaxSubdivisions,
                                      w.get(), &result, &abserr);
    if (status == GSL_EROUND || status == GSL_ESING || status == GSL_EDIVERGE) {
        status = gsl_integration_qag(&F, a, b, 0.0, rel_tol, kMaxSubdivisions,
                                     GSL_INTEG_GAUSS31, w.get(), &result, &abserr);
    }
    if (status != GSL_SUCCESS && std::abs(abserr) > rel_tol * (1.0 + std::abs(result)))
        throw DivergenceError("integrate: quadrature failed to converge");
    return result;
}

double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol) {
    Workspace w(gsl_integration_workspace_alloc(kMaxSubdivisions));
    gsl_function F;
    F.function = &call_trampoline;
    F.params = const_cast<void*>(static_cast<const void*>(&f));
    double result = 0.0, abserr = 0.0;
    int status = gsl_integration_qagiu(&F, a, 0.0, rel_tol, kMaxSubdivisions,
                                       w.get(), &result, &abserr);
    if (status != GSL_SUCCESS && std::abs(abserr) > rel_tol * (1.0 + std::abs(result)))
        throw DivergenceError("integrate_to_inf: quadrature failed to converge");
    return result;
}

}  // namespace qhl
