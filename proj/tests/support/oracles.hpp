#pragma once

// Reference computations that share no code with the library. Every
// formula here is written out from first principles so a bug in the
// transfer-matrix path cannot hide in both places.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// k_z with Im >= 0, and Re >= 0 on the real axis.
inline cplx kz(cplx n, double n1, double k0, double theta) {
  const double s = n1 * std::sin(theta);
  cplx w = std::sqrt(cplx((n * n).real() - s * s, (n * n).imag() + 0.0));
  if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
  return k0 * w;
}

struct Pair {
  cplx r;
  cplx t;
};

// p-polarized single interface, electric-field amplitudes.
inline Pair fresnel(cplx ni, cplx nj, cplx ki, cplx kj) {
  const cplx d = ki * nj * nj + kj * ni * ni;
  return {(ki * nj * nj - kj * ni * ni) / d, 2.0 * ki * ni * nj / d};
}

// Three-layer multiple-beam (Airy) sum for n1 | n2 (thickness d) | n3.
inline Pair airy(double n1, cplx n2, cplx n3, double d, double lambda, double theta) {
  const double k0 = 2.0 * pi / lambda;
  const cplx k1 = kz(n1, n1, k0, theta);
  const cplx k2 = kz(n2, n1, k0, theta);
  const cplx k3 = kz(n3, n1, k0, theta);
  const Pair a = fresnel(n1, n2, k1, k2);
  const Pair b = fresnel(n2, n1, k2, k1);
  const Pair c = fresnel(n2, n3, k2, k3);
  const cplx phase = std::exp(cplx(0.0, 1.0) * k2 * d);
  const cplx denom = 1.0 - b.r * c.r * phase * phase;
  return {a.r + a.t * b.t * c.r * phase * phase / denom, a.t * c.t * phase / denom};
}

// Parratt recursion from the exit side. n holds every layer, d the
// interior thicknesses (n.size() - 2 entries).
inline cplx parratt(const std::vector<cplx>& n, const std::vector<double>& d, double lambda,
                    double theta) {
  const double k0 = 2.0 * pi / lambda;
  const double n1 = n.front().real();
  const std::size_t last = n.size() - 1;
  cplx r = fresnel(n[last - 1], n[last], kz(n[last - 1], n1, k0, theta),
                   kz(n[last], n1, k0, theta)).r;
  for (std::size_t j = last - 1; j-- > 0;) {
    const cplx kj = kz(n[j], n1, k0, theta);
    const cplx kn = kz(n[j + 1], n1, k0, theta);
    const cplx rij = fresnel(n[j], n[j + 1], kj, kn).r;
    const cplx ph = std::exp(cplx(0.0, 2.0) * kn * d[j]);
    r = (rij + r * ph) / (1.0 + rij * r * ph);
  }
  return r;
}

// Time-averaged z-flux of a p-polarized plane wave of unit E amplitude,
// up to a common constant: Re(n conj(k_z / (k0 n))).
inline double flux_factor(cplx n, cplx k, double k0) {
  return (n * std::conj(k / (k0 * n))).real();
}

// Composite trapezoid on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

// Composite Simpson on [a, b] with an even n.
inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

}  // namespace oracle
