#pragma once

#include <functional>

namespace symnorm {

// Adaptive Simpson integration with Richardson extrapolation.  `rel_tol`
// controls the relative error against the running estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-8, int max_depth = 48);

// Integral of a non-negative integrand over [a, infinity).  Integrates
// [a, first_to], then doubles the frontier until the integrand there is
// negligible against the accumulated value.  Suitable for integrands that
// rise at most once and then decay super-exponentially; `first_to` must sit
// past the peak (callers derive it from the integrand's critical point).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double first_to, double rel_tol = 1e-8);

}  // namespace symnorm
