#include "plasmondet/least_squares.hpp"

#include <cmath>

#include "plasmondet/errors.hpp"

namespace plasmondet {
namespace {

Eigen::MatrixXd jacobian(const ResidualFunction& residual, const Eigen::VectorXd& p,
                         Eigen::Index m) {
  Eigen::MatrixXd jac(m, p.size());
  Eigen::VectorXd plus(m);
  Eigen::VectorXd minus(m);
  Eigen::VectorXd q = p;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = 1e-6 * std::max(std::abs(p[j]), 1e-10);
    q[j] = p[j] + h;
    residual(q, plus);
    q[j] = p[j] - h;
    residual(q, minus);
    q[j] = p[j];
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd p,
                                       Eigen::Index m, const LeastSquaresOptions& opts) {
  Eigen::VectorXd r(m);
  residual(p, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::VectorXd trial_r(m);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (cost <= opts.cost_tol) return {p, std::sqrt(cost), it};
    const Eigen::MatrixXd jac = jacobian(residual, p, m);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal();
    const double floor = 1e-12 * std::max(diag.maxCoeff(), 1e-300);
    diag = diag.cwiseMax(floor);

    bool improved = false;
    while (lambda < 1e20) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = p + step;
      residual(trial, trial_r);
      const double trial_cost = trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const bool tiny = step.norm() <= opts.step_tol * (p.norm() + opts.step_tol);
        p = trial;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        improved = true;
        if (tiny) return {p, std::sqrt(cost), it + 1};
        break;
      }
      lambda *= 10.0;
    }
    // No descent direction left at working precision: converged.
    if (!improved) return {p, std::sqrt(cost), it + 1};
  }
  throw NumericError("levenberg_marquardt: no convergence, residual norm " +
                         std::to_string(std::sqrt(cost)),
                     std::sqrt(cost));
}

}  // namespace plasmondet
