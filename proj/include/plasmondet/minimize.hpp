#pragma once

#include <functional>

namespace plasmondet {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for a minimum inside [lo, hi]; assumes f is
// unimodal on the interval. Stops when the bracket is narrower than tol.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol = 1e-9);

// Coarse grid scan followed by golden-section refinement of the bracket
// around the best grid point. Throws NoBracket when the grid minimum sits
// on an end of the interval (f monotone there).
ScalarMinimum bracketed_minimize(const std::function<double(double)>& f, double lo, double hi,
                                 int grid_points = 200, double tol = 1e-9);

}  // namespace plasmondet
