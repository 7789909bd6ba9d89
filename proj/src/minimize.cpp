#include "plasmondet/minimize.hpp"

#include <cmath>
#include <limits>

#include "plasmondet/errors.hpp"

namespace plasmondet {

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol) {
  if (!(lo < hi)) throw InvalidArgument("golden_section_minimize: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (c >= d) break;  // bracket exhausted at floating-point resolution
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fc < fx && fc <= fd) return {c, fc};
  if (fd < fx) return {d, fd};
  return {x, fx};
}

ScalarMinimum bracketed_minimize(const std::function<double(double)>& f, double lo, double hi,
                                 int grid_points, double tol) {
  if (!(lo < hi)) throw InvalidArgument("bracketed_minimize: empty interval");
  if (grid_points < 3) throw InvalidArgument("bracketed_minimize: need at least 3 grid points");
  const double step = (hi - lo) / (grid_points - 1);
  int best = -1;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = f(lo + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best <= 0 || best >= grid_points - 1) {
    throw NoBracket("bracketed_minimize: no interior minimum on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  ScalarMinimum refined =
      golden_section_minimize(f, lo + (best - 1) * step, lo + (best + 1) * step, tol);
  if (refined.value > best_value) return {lo + best * step, best_value};
  return refined;
}

}  // namespace plasmondet
