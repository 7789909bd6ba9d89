#pragma once

#include <functional>

namespace plasmondet {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

// Globally adaptive Gauss-Kronrod (7/15) integration on [a, b].
// Throws NumericError carrying the achieved error if the tolerance
// cannot be met within max_intervals subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

// Integral over [a, inf) through the substitution x = a + scale * t / (1 - t).
// `scale` should be of the order of the integrand's decay length.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double scale = 1.0, const QuadratureOptions& opts = {});

}  // namespace plasmondet
