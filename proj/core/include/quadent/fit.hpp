#pragma once

#include <vector>

namespace quadent {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 distinct x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace quadent
