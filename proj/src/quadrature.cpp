#include "plasmondet/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "plasmondet/errors.hpp"

namespace plasmondet {
namespace {

// Kronrod 15-point nodes/weights and the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw InvalidArgument("integrate: bounds must be finite");
  }
  std::priority_queue<Segment> work;
  Segment first = gauss_kronrod(f, a, b);
  work.push(first);
  double total = first.value;
  double error = first.error;
  int evaluations = 15;
  int intervals = 1;
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (error > tolerance()) {
    if (intervals >= opts.max_intervals) {
      throw NumericError("integrate: tolerance not reached, achieved error " +
                             std::to_string(error),
                         error);
    }
    const Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval can no longer be split in floating point.
      throw NumericError("integrate: interval underflow, achieved error " + std::to_string(error),
                         error);
    }
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    evaluations += 30;
    ++intervals;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  double value = 0.0;
  double err = 0.0;
  while (!work.empty()) {
    value += work.top().value;
    err += work.top().error;
    work.pop();
  }
  return {value, err, evaluations};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double scale, const QuadratureOptions& opts) {
  if (!(scale > 0.0)) throw InvalidArgument("integrate_to_infinity: scale must be positive");
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    const double x = a + scale * t / s;
    const double v = f(x);
    return v == 0.0 ? 0.0 : scale * v / (s * s);
  };
  // The open endpoint t = 1 is never sampled by Gauss-Kronrod nodes.
  return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace plasmondet
