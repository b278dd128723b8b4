#pragma once

#include <functional>

namespace swkb {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b] to absolute tolerance `tol`.
/// Throws QuadratureFailure when the error estimate stays above tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol);

/// Same as integrate() after the substitution x = t^p, which smooths
/// x^gamma-type endpoint behaviour at 0. Requires 0 <= a <= b.
QuadratureResult integrate_graded(const std::function<double(double)>& f, double a, double b, int p,
                                  double tol);

}  // namespace swkb
