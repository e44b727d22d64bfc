#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace quadent::detail {

struct BfgsOptions {
  int max_iterations = 400;
  int max_evaluations = 400000;
  double gradient_tol = 1e-9;
  double fd_step = 1e-6;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool budget_exhausted = false;
  std::vector<double> trace;
};

/// Quasi-Newton descent with central-difference gradients and Armijo
/// backtracking. Non-finite objective values are treated as +inf.
BfgsResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options);

}  // namespace quadent::detail
