#pragma once

#include <functional>
#include <vector>

namespace dppss {

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a,b]. The interval is
/// first split at `breakpoints` (kinks, discontinuities). Subintervals are
/// bisected until the Kronrod-Gauss difference is below their share of
/// `abs_tol`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, const std::vector<double>& breakpoints = {});

/// Iterated adaptive integration over [0,1]^2: outer integral of inner
/// integrals, both with the same breakpoints.
double integrate_adaptive_2d(const std::function<double(double, double)>& f,
                             double abs_tol = 1e-10,
                             const std::vector<double>& breakpoints = {});

}  // namespace dppss
