#include "quadent/fit.hpp"

#include <cmath>

#include "quadent/error.hpp"

namespace quadent {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_line: x and y lengths differ");
  const size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::WindowTooShort, "fit_line needs at least two points");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::WindowTooShort, "fit_line needs distinct abscissae");
  LinearFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.slope * x[i] + f.intercept);
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

}  // namespace quadent
