#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>

#include "plasmondet/errors.hpp"
#include "plasmondet/stack_optics.hpp"
#include "plasmondet/units.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace plasmondet;
namespace u = plasmondet::units;

namespace {

const complex kGold{0.1805, 4.9763};

LayerStack kretschmann(double n1 = 1.51, complex metal = kGold, double d = 40e-9) {
  return LayerStack({Layer::half_space(n1), Layer::film(metal, d), Layer::half_space(1.0)},
                    780e-9);
}

double rel(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("layer stack rejects invalid layers") {
  CHECK_THROWS_AS(LayerStack({Layer::half_space(1.5)}, 780e-9), InvalidArgument);
  CHECK_THROWS_AS(LayerStack({Layer::half_space({1.5, 0.1}), Layer::half_space(1.0)}, 780e-9),
                  InvalidArgument);
  CHECK_THROWS_AS(LayerStack({Layer::half_space(1.5), Layer::film({1.0, -0.1}, 1e-9),
                              Layer::half_space(1.0)},
                             780e-9),
                  InvalidArgument);
  CHECK_THROWS_AS(LayerStack({Layer::half_space(1.5), Layer::half_space(2.0),
                              Layer::half_space(1.0)},
                             780e-9),
                  InvalidArgument);
  CHECK_THROWS_AS(PlaneWaveContext(std::numbers::pi / 2), InvalidArgument);
  CHECK_THROWS_AS(PlaneWaveContext(-0.1), InvalidArgument);
}

TEST_CASE("vertical wavenumber branches") {
  const double k0 = 2 * std::numbers::pi / 780e-9;
  SUBCASE("normal incidence is real") {
    const complex k = vertical_wavenumber(1.0, 1.5, k0, 0.0);
    CHECK(k.real() == doctest::Approx(k0).epsilon(1e-15));
    CHECK(k.imag() == 0.0);
  }
  SUBCASE("beyond the critical angle it is purely imaginary") {
    const complex k = vertical_wavenumber(1.0, 1.5, k0, u::from_deg(45));
    CHECK(k.real() == 0.0);
    CHECK(k.imag() == doctest::Approx(std::sqrt(0.125) * k0).epsilon(1e-14));
  }
  SUBCASE("gold against a 40-digit evaluation") {
    // mpmath, 40 digits: k0 sqrt(n^2 - (1.51 sin 43 deg)^2)
    const complex ref{1423861.625040269276841506, 40934218.78530253150786067};
    const complex k = vertical_wavenumber(kGold, 1.51, k0, u::from_deg(43));
    CHECK(rel(k, ref) < 1e-13);
  }
  SUBCASE("random lossless layers beyond critical decay") {
    gen::Source g(11);
    for (int i = 0; i < 500; ++i) {
      const double n1 = g.uniform(1.3, 2.0);
      const double nj = g.uniform(1.0, n1 * 0.95);
      const double crit = std::asin(nj / n1);
      const double theta = g.uniform(crit + 1e-6, std::numbers::pi / 2 - 1e-6);
      const complex k = vertical_wavenumber(nj, n1, k0, theta);
      CHECK(k.real() == 0.0);
      CHECK(k.imag() > 0.0);
    }
  }
}

TEST_CASE("fresnel interface") {
  const PlaneWaveContext ctx(u::from_deg(30));
  SUBCASE("no interface") {
    const LayerStack s({Layer::half_space(1.5), Layer::half_space(1.5)}, 780e-9);
    const auto f = fresnel_interface(s, 0, 1, ctx);
    CHECK(std::abs(f.r) == 0.0);
    CHECK(std::abs(f.t - 1.0) < 1e-15);
    CHECK((interface_matrix(s, 0, 1, ctx) - Matrix2::Identity()).norm() < 1e-15);
  }
  SUBCASE("Brewster angle") {
    const LayerStack s({Layer::half_space(1.0), Layer::half_space(1.5)}, 780e-9);
    const auto f = fresnel_interface(s, 0, 1, PlaneWaveContext(std::atan(1.5)));
    CHECK(std::abs(f.r) < 1e-12);
    CHECK(reflectivity(s, PlaneWaveContext(std::atan(1.5))) < 1e-24);
  }
  SUBCASE("reciprocity and single-interface energy balance") {
    gen::Source g(3);
    for (int i = 0; i < 300; ++i) {
      const double ni = g.uniform(1.0, 2.5);
      const double nj = g.uniform(1.0, 2.5);
      const double theta_max = nj < ni ? std::asin(nj / ni) : std::numbers::pi / 2;
      const double theta = g.uniform(0.0, 0.98 * theta_max);
      const LayerStack s({Layer::half_space(ni), Layer::half_space(nj)}, 780e-9);
      const PlaneWaveContext c(theta);
      const auto fwd = fresnel_interface(s, 0, 1, c);
      const auto back = fresnel_interface(s, 1, 0, c);
      CHECK(std::abs(fwd.r + back.r) < 1e-14);
      const double k0 = s.k0();
      const complex ki = oracle::kz(ni, ni, k0, theta);
      const complex kj = oracle::kz(nj, ni, k0, theta);
      const double t_power = std::norm(fwd.t) * oracle::flux_factor(nj, kj, k0) /
                             oracle::flux_factor(ni, ki, k0);
      CHECK(std::abs(std::norm(fwd.r) + t_power - 1.0) < 1e-12);
    }
  }
  SUBCASE("interface matrix entries and determinant") {
    const LayerStack s = kretschmann();
    const PlaneWaveContext c(u::from_deg(43));
    const auto f = fresnel_interface(s, 0, 1, c);
    const Matrix2 m = interface_matrix(s, 0, 1, c);
    CHECK(std::abs(m(0, 0) - 1.0 / f.t) < 1e-15 * std::abs(1.0 / f.t));
    CHECK(std::abs(m(0, 1) - f.r / f.t) < 1e-15 * std::abs(f.r / f.t));
    CHECK(std::abs(m(1, 0) - m(0, 1)) == 0.0);
    CHECK(rel(m.determinant(), (1.0 - f.r * f.r) / (f.t * f.t)) < 1e-13);
  }
}

TEST_CASE("propagation matrix") {
  const LayerStack s = kretschmann();
  CHECK_THROWS_AS(propagation_matrix(s, 0, PlaneWaveContext(0.5)), InvalidArgument);
  CHECK_THROWS_AS(propagation_matrix(s, 2, PlaneWaveContext(0.5)), InvalidArgument);
  CHECK((propagation_matrix(complex(3e6, 1e6), 0.0) - Matrix2::Identity()).norm() == 0.0);
  const double kappa = 5e6;
  const Matrix2 p = propagation_matrix(complex(0.0, kappa), 1.0 / kappa);
  CHECK(std::abs(p(0, 0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(p(1, 1) - std::exp(1.0)) < 1e-14);
  CHECK(std::abs(p(0, 1)) == 0.0);

  const PlaneWaveContext c(u::from_deg(43));
  const complex k2 = oracle::kz(kGold, 1.51, s.k0(), c.incidence_angle());
  const Matrix2 m = propagation_matrix(s, 1, c);
  CHECK(rel(m(0, 0), std::exp(complex(0, 1) * k2 * 40e-9)) < 1e-13);
  CHECK(rel(m(1, 1), std::exp(complex(0, -1) * k2 * 40e-9)) < 1e-13);
}

TEST_CASE("total matrix composition") {
  SUBCASE("two layers equal the interface matrix") {
    const LayerStack s({Layer::half_space(1.5), Layer::half_space(1.0)}, 780e-9);
    const PlaneWaveContext c(0.3);
    CHECK((total_matrix(s, c).total - interface_matrix(s, 0, 1, c)).norm() == 0.0);
  }
  SUBCASE("four layers split into A and B") {
    const LayerStack s({Layer::half_space(1.51), Layer::film(kGold, 40e-9),
                        Layer::film(1.0, 100e-9), Layer::half_space({1.001, 1e-4})},
                       780e-9);
    const PlaneWaveContext c(u::from_deg(42.7));
    const Matrix2 a = interface_matrix(s, 0, 1, c) * propagation_matrix(s, 1, c) *
                      interface_matrix(s, 1, 2, c) * propagation_matrix(s, 2, c);
    const Matrix2 b = interface_matrix(s, 2, 3, c);
    const auto tm = total_matrix(s, c);
    CHECK((tm.total - a * b).norm() < 1e-12 * tm.total.norm());
    CHECK((tm.partial - a).norm() < 1e-12 * a.norm());
  }
  SUBCASE("product over any contiguous split") {
    gen::Source g(21);
    for (int i = 0; i < 200; ++i) {
      const LayerStack s = g.stack(g.integer(1, 5), false);
      const PlaneWaveContext c(g.uniform(0.0, 1.4));
      const std::size_t last = s.size() - 1;
      const std::size_t cut = static_cast<std::size_t>(g.integer(1, static_cast<int>(last)));
      Matrix2 left = Matrix2::Identity();
      Matrix2 right = Matrix2::Identity();
      for (std::size_t j = 1; j <= last; ++j) {
        Matrix2& side = j <= cut ? left : right;
        side = side * interface_matrix(s, j - 1, j, c);
        if (j < last) side = side * propagation_matrix(s, j, c);
      }
      const Matrix2 total = total_matrix(s, c).total;
      CHECK((left * right - total).norm() <= 1e-10 * total.norm());
    }
  }
}

TEST_CASE("reflectivity") {
  SUBCASE("single interface at normal incidence") {
    const LayerStack s({Layer::half_space(1.0), Layer::half_space(1.5)}, 780e-9);
    CHECK(reflectivity(s, PlaneWaveContext(0.0)) == doctest::Approx(0.04).epsilon(1e-14));
  }
  SUBCASE("matches the Airy series over random three-layer stacks") {
    gen::Source g(5);
    for (int i = 0; i < 1000; ++i) {
      const double n1 = g.uniform(1.3, 2.0);
      const complex n2 = g.any_index();
      const complex n3 = g.coin() ? complex(1.0, 0.0) : g.any_index();
      const double d = g.uniform(0.0, 200e-9);
      const double theta = g.uniform(0.0, 1.5);
      const LayerStack s({Layer::half_space(n1), Layer::film(n2, d), Layer::half_space(n3)},
                         780e-9);
      const PlaneWaveContext c(theta);
      const auto ref = oracle::airy(n1, n2, n3, d, 780e-9, theta);
      INFO("draw " << i);
      CHECK(std::abs(reflection_amplitude(s, c) - ref.r) < 1e-10);
      CHECK(std::abs(transmission_amplitude(s, c) - ref.t) < 1e-10 * std::max(1.0, std::abs(ref.t)));
    }
  }
  SUBCASE("plasmon dip of the default stack") {
    const LayerStack s = kretschmann();
    const double crit = s.critical_angle();
    const double theta_sp = find_resonance_angle(s, crit + 1e-4, crit + 0.17);
    CHECK(theta_sp > crit);
    const auto ref = oracle::airy(1.51, kGold, 1.0, 40e-9, 780e-9, theta_sp);
    CHECK(std::norm(ref.r) < 0.2);
    CHECK(std::abs(reflectivity(s, PlaneWaveContext(theta_sp)) - std::norm(ref.r)) < 1e-12);
  }
  SUBCASE("vacuum atom layer changes nothing") {
    const LayerStack s = kretschmann();
    const LayerStack with = s.with_layer_inserted(2, Layer::film(1.0, 100e-9));
    for (double deg = 30.0; deg < 60.0; deg += 0.37) {
      const PlaneWaveContext c(u::from_deg(deg));
      CHECK(std::abs(reflectivity(with, c) - reflectivity(s, c)) < 1e-14);
    }
  }
  SUBCASE("zero-thickness insertion") {
    gen::Source g(8);
    for (int i = 0; i < 300; ++i) {
      const LayerStack s = g.stack(g.integer(0, 4), false);
      const auto pos = static_cast<std::size_t>(g.integer(1, static_cast<int>(s.size() - 1)));
      const LayerStack t = s.with_layer_inserted(pos, Layer::film(g.any_index(), 0.0));
      const PlaneWaveContext c(g.uniform(0.0, 1.5));
      CHECK(std::abs(reflectivity(t, c) - reflectivity(s, c)) < 1e-13);
    }
  }
  SUBCASE("lossless stacks conserve energy") {
    gen::Source g(13);
    for (int i = 0; i < 500; ++i) {
      const LayerStack s = g.stack(g.integer(0, 5), true);
      const PlaneWaveContext c(g.uniform(0.0, 1.5));
      INFO("draw " << i);
      CHECK(std::abs(reflectivity(s, c) + transmittance(s, c) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("field enhancement") {
  SUBCASE("plain interface below the critical angle is of order one") {
    const LayerStack s({Layer::half_space(1.51), Layer::half_space(1.0)}, 780e-9);
    const double e = field_enhancement(s, PlaneWaveContext(0.3), 0.0);
    CHECK(e > 0.1);
    CHECK(e < 10.0);
  }
  SUBCASE("decays by e over half a decay length") {
    const LayerStack s = kretschmann();
    const PlaneWaveContext c(u::from_deg(42.7));
    const double kappa = vertical_wavenumber(s, 2, c).imag();
    const double a = field_enhancement(s, c, 150e-9);
    const double b = field_enhancement(s, c, 150e-9 + 1.0 / (2.0 * kappa));
    CHECK(a / b == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  }
  SUBCASE("surface value is |t|^2 from the Airy series") {
    const LayerStack s = kretschmann();
    const double crit = s.critical_angle();
    const double theta = find_resonance_angle(s, crit + 1e-4, crit + 0.17);
    const auto ref = oracle::airy(1.51, kGold, 1.0, 40e-9, 780e-9, theta);
    const double e = field_enhancement(s, PlaneWaveContext(theta), 0.0);
    CHECK(e == doctest::Approx(std::norm(ref.t)).epsilon(1e-10));
    CHECK(e > 50.0);
  }
  CHECK_THROWS_AS(field_enhancement(kretschmann(), PlaneWaveContext(0.8), -1e-9), InvalidArgument);
}

TEST_CASE("resonance angle search") {
  CHECK(find_resonance_angle([](double t) { return (t - 0.7) * (t - 0.7); }, 0.2, 1.3) ==
        doctest::Approx(0.7).epsilon(1e-6));
  CHECK_THROWS_AS(find_resonance_angle([](double t) { return t; }, 0.2, 1.3), NoBracket);

  const LayerStack s = kretschmann();
  const double crit = s.critical_angle();
  CHECK(crit == doctest::Approx(std::asin(1.0 / 1.51)).epsilon(1e-15));
  const double lo = crit + 1e-4;
  const double hi = crit + 0.17;
  const double theta_sp = find_resonance_angle(s, lo, hi);
  CHECK(theta_sp > crit);

  // Dense grid around the minimum: 1e6 points over the search window.
  double best = lo;
  double best_r = 2.0;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const double r = std::norm(oracle::airy(1.51, kGold, 1.0, 40e-9, 780e-9, t).r);
    if (r < best_r) {
      best_r = r;
      best = t;
    }
  }
  CHECK(std::abs(theta_sp - best) < 1e-5);
}
