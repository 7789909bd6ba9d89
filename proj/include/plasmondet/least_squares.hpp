#pragma once

#include <Eigen/Dense>
#include <functional>

namespace plasmondet {

// Fills `residuals` (already sized) for the parameter vector.
using ResidualFunction = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LeastSquaresOptions {
  int max_iterations = 500;
  double step_tol = 1e-15;  // relative parameter step
  double cost_tol = 1e-30;  // absolute cost floor treated as an exact fit
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;
  int iterations = 0;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and a central
// difference Jacobian. Throws NumericError (achieved = residual norm) when
// the iteration budget runs out before the step criterion is met.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd start,
                                       Eigen::Index residual_count,
                                       const LeastSquaresOptions& opts = {});

}  // namespace plasmondet
