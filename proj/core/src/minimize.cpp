#include "minimize.hpp"

#include <cmath>
#include <limits>

namespace quadent::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

BfgsResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options) {
  using Eigen::VectorXd;
  const Eigen::Index n = x0.size();
  BfgsResult res;
  auto eval = [&](const VectorXd& x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : kInf;
  };
  auto gradient = [&](const VectorXd& x) {
    VectorXd g(n);
    VectorXd xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = options.fd_step * std::max(1.0, std::abs(x(i)));
      xp(i) = x(i) + h;
      const double fp = eval(xp);
      xp(i) = x(i) - h;
      const double fm = eval(xp);
      xp(i) = x(i);
      g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  VectorXd x = std::move(x0);
  double fx = eval(x);
  if (!std::isfinite(fx)) {
    res.x = x;
    res.value = fx;
    return res;
  }
  VectorXd g = gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  res.trace.push_back(fx);
  int stalls = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it + 1;
    if (g.cwiseAbs().maxCoeff() <= options.gradient_tol * (1.0 + std::abs(fx))) {
      res.converged = true;
      break;
    }
    if (res.evaluations > options.max_evaluations) {
      res.budget_exhausted = true;
      break;
    }
    VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }
    double alpha = 1.0;
    double f_new = kInf;
    VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + alpha * dir;
      f_new = eval(x_new);
      if (f_new <= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (hinv.isIdentity()) {
        // Steepest descent cannot make progress: at a minimum to FD accuracy.
        res.converged = g.cwiseAbs().maxCoeff() <= 1e3 * options.gradient_tol * (1.0 + std::abs(fx));
        break;
      }
      hinv.setIdentity();
      continue;
    }
    const VectorXd g_new = gradient(x_new);
    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const double decrease = fx - f_new;
    stalls = decrease <= 1e-15 * (1.0 + std::abs(fx)) ? stalls + 1 : 0;
    x = x_new;
    fx = f_new;
    g = g_new;
    res.trace.push_back(fx);
    if (stalls >= 5) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged && !res.budget_exhausted) res.budget_exhausted = true;
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace quadent::detail
