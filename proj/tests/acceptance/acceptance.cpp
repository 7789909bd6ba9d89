// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "plasmondet/config.hpp"
#include "plasmondet/detection_metrics.hpp"
#include "plasmondet/spectra_imaging.hpp"
#include "plasmondet/units.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace plasmondet;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Stack and transition from the shipped defaults (gold from the material table).
struct Setup {
  RunConfig run = resolve_config(Config::defaults());
  LayerStack stack = run.stack();
  AngleWindow window = evanescent_angle_window(stack, run.qnd_window);
  double theta_sp = find_resonance_angle(stack, window.lo, window.hi);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

double flank_angle() {
  const LayerStack& s = setup().stack;
  const double lo = s.critical_angle() + units::from_deg(0.05);
  const double hi = setup().theta_sp;
  double best = hi;
  double best_theta = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double a = lo + (hi - lo) * i / 2000.0;
    const double t = std::abs(gap_response(s, PlaneWaveContext(a), 0.0).theta);
    if (t > best_theta) {
      best_theta = t;
      best = a;
    }
  }
  return best;
}

double n_max_at(double density, double ratio) {
  const Setup& s = setup();
  const AtomicMedium m(s.run.transition, ratio, density);
  return maximize_qnd_over_angle(s.stack, m, s.run.geometry, s.run.efficiency, s.window).n_max;
}

Outcome qnd_peak() {
  const Setup& s = setup();
  const auto start = std::chrono::steady_clock::now();
  const AtomicMedium m(s.run.transition, -30.0, units::from_per_cm3(1e13));
  const QndOptimum best =
      maximize_qnd_over_angle(s.stack, m, {100e-9, kSemiInfinite}, 1.0, s.window);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {best.n_max >= 490.0 && best.n_max <= 910.0 && seconds < 5.0,
          fmt("N_max=%.1f at theta=%.4f deg (target [490, 910]), %.3f s", best.n_max,
              units::to_deg(best.angle), seconds)};
}

Outcome qnd_shape() {
  const int n = 13;
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i < n; ++i) {
    const double rho = units::from_per_cm3(1e11 * std::pow(100.0, i / double(n - 1)));
    const double v = n_max_at(rho, -30.0);
    monotone = monotone && v > prev;
    prev = v;
  }
  const double rho = units::from_per_cm3(1e13);
  std::vector<double> ratios;
  std::vector<double> values;
  for (int i = -50; i <= 50; ++i) {
    if (i == 0) continue;
    ratios.push_back(2.0 * i);
    values.push_back(n_max_at(rho, 2.0 * i));
  }
  const auto peak = std::max_element(values.begin(), values.end()) - values.begin();
  const bool interior = peak > 0 && peak + 1 < static_cast<long>(values.size());
  const double plus = n_max_at(rho, 30.0);
  const double minus = n_max_at(rho, -30.0);
  const double asym = std::abs(plus - minus) / std::max(plus, minus);
  return {monotone && interior && asym > 0.05,
          fmt("monotone=%d peak at 2delta/Gamma=%.0f interior=%d asymmetry=%.3f", monotone,
              2.0 * ratios[peak], interior, asym)};
}

Outcome linearization() {
  const Setup& s = setup();
  gen::Source g(1003);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const double angle = s.theta_sp + units::from_deg(g.uniform(-1.0, 1.0));
    const double x = g.log_uniform(20.0, 2000.0) * (g.coin() ? 1.0 : -1.0);
    const double rho = g.log_uniform(1e13, 1e17);
    const double gap = g.uniform(0.0, 500e-9);
    const AtomicMedium m(s.run.transition, x / 2.0, rho);
    const PlaneWaveContext ctx(angle);
    const double e = rel(delta_R_linear(s.stack, m, gap, ctx),
                         delta_R_exact(s.stack, m, {gap, kSemiInfinite}, ctx));
    worst = std::max(worst, e);
    failures += e >= 0.02;
  }

  // derivative against a central difference of the real-index reflectivity
  double worst_d = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double angle = s.theta_sp + units::from_deg(g.uniform(-1.0, 1.0));
    const double x = g.log_uniform(20.0, 2000.0) * (g.coin() ? 1.0 : -1.0);
    const double gap = g.uniform(0.0, 500e-9);
    const AtomicMedium m(s.run.transition, x / 2.0, 0.0);
    const PlaneWaveContext ctx(angle);
    const double beta = polarizability_factor(m);
    const double h = 1e14;
    auto r_of = [&](double dn) {
      return reflectivity(stack_with_atoms(s.stack, {gap, kSemiInfinite}, complex(1.0 + dn, 0.0)),
                          ctx);
    };
    const double fd = (r_of(beta * h) - r_of(-beta * h)) / (2.0 * h);
    worst_d = std::max(worst_d, rel(reflectivity_derivative(s.stack, m, gap, ctx), fd));
  }
  return {failures == 0 && worst_d < 1e-4,
          fmt("linear vs exact: %d/100 draws >= 2%%, worst %.3g; derivative vs FD worst %.3g",
              failures, worst, worst_d)};
}

Outcome absorption() {
  const Setup& s = setup();
  const double k0 = s.stack.k0();
  const double n1 = s.stack.incidence_index();
  const complex n2 = s.stack.layer(1).index;
  const double d2 = s.stack.layer(1).thickness;
  gen::Source g(1004);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double angle = g.uniform(units::from_deg(42.0), units::from_deg(48.0));
    const double gap = g.uniform(0.0, 400e-9);
    const AtomicMedium m(s.run.transition, g.uniform(-100.0, 100.0), g.log_uniform(1e15, 1e18));
    const complex n4 = refractive_index(m);
    const complex k4 = oracle::kz(n4, n1, k0, angle);
    const double kr = k4.imag();
    const double ki = -k4.real();
    const double t2 =
        std::norm(oracle::airy(n1, n2, 1.0, d2, s.stack.vacuum_wavelength(), angle).t);
    // divergence of the evanescent Poynting flux inside the atom layer
    auto div = [&](double z) {
      return t2 * (4 * kr * kr * n4.imag() - 2 * kr * ki) / k0 * std::exp(-2 * kr * z);
    };
    const double ref = oracle::simpson(div, gap, gap + 25.0 / kr, 40000);
    const double full = absorbed_fraction(s.stack, m, {gap, kSemiInfinite}, PlaneWaveContext(angle)).full;
    worst = std::max(worst, rel(full, ref));
  }
  double worst_l = 0.0;
  for (int i = 0; i < 50; ++i) {
    const PlaneWaveContext ctx(g.uniform(units::from_deg(42.0), units::from_deg(48.0)));
    const AtomLayerGeometry geo{g.uniform(0.0, 400e-9), kSemiInfinite};
    const double rho = g.log_uniform(1e13, 1e17);
    const double x = g.uniform(-200.0, 200.0);
    const double f0 =
        absorbed_fraction(s.stack, AtomicMedium(s.run.transition, 0.0, rho), geo, ctx).simplified;
    const double f =
        absorbed_fraction(s.stack, AtomicMedium(s.run.transition, x / 2.0, rho), geo, ctx)
            .simplified;
    worst_l = std::max(worst_l, rel(f / f0, 1.0 / (1.0 + x * x)));
  }
  return {worst < 1e-6 && worst_l < 1e-12,
          fmt("full vs flux quadrature worst %.3g; lorentzian scaling worst %.3g", worst, worst_l)};
}

Outcome snr_asymptote() {
  const Setup& s = setup();
  const PlaneWaveContext ctx(flank_angle());
  const AtomLayerGeometry geo = s.run.geometry;
  auto sn = [&](double x) {
    const AtomicMedium m(s.run.transition, x / 2.0, s.run.density);
    return snr_photon_budget(s.stack, m, geo, ctx, 1.0, 1.0).snr;
  };
  const double a = sn(120.0);
  const double b = sn(1200.0);
  const double zero = sn(0.0);
  return {rel(a, b) < 0.02 && zero == 0.0,
          fmt("S_N(120)=%.5g S_N(1200)=%.5g diff %.3g; S_N(0)=%g", a, b, rel(a, b), zero)};
}

Outcome optics_core() {
  gen::Source g(1006);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double n1 = g.uniform(1.3, 2.0);
    const complex n2 = g.any_index();
    const complex n3 = g.any_index();
    const double d = g.uniform(0.0, 300e-9);
    const double lambda = g.uniform(400e-9, 1600e-9);
    const double angle = g.uniform(0.0, 1.5);
    const LayerStack s({Layer::half_space(n1), Layer::film(n2, d), Layer::half_space(n3)}, lambda);
    const auto ref = oracle::airy(n1, n2, n3, d, lambda, angle);
    const complex r = reflection_amplitude(s, PlaneWaveContext(angle));
    const complex t = transmission_amplitude(s, PlaneWaveContext(angle));
    worst = std::max({worst, std::abs(r - ref.r) / std::max(1.0, std::abs(ref.r)),
                      std::abs(t - ref.t) / std::max(1.0, std::abs(ref.t))});
  }
  double worst_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const LayerStack s = g.stack(g.integer(1, 4), true);
    const PlaneWaveContext ctx(g.uniform(0.0, 1.5));
    worst_rt = std::max(worst_rt, std::abs(reflectivity(s, ctx) + transmittance(s, ctx) - 1.0));
  }
  double worst_b = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double n1 = g.uniform(1.0, 2.5);
    const double n2 = g.uniform(1.0, 2.5);
    const LayerStack s({Layer::half_space(n1), Layer::half_space(n2)}, 780e-9);
    worst_b = std::max(worst_b,
                       std::abs(reflection_amplitude(s, PlaneWaveContext(std::atan(n2 / n1)))));
  }
  return {worst < 1e-10 && worst_rt < 1e-10 && worst_b < 1e-12,
          fmt("TMM vs Airy worst %.3g; R+T-1 worst %.3g; Brewster |r| worst %.3g", worst,
              worst_rt, worst_b)};
}

Outcome broadening() {
  const Setup& s = setup();
  SpectrumScenario sc;
  for (int i = 0; i <= 240; ++i) sc.detunings.push_back(units::from_mhz(-60.0 + 0.5 * i));
  sc.gap_policy = 500e-9;
  CloudModel cloud = s.run.cloud;
  cloud.peak_density = units::from_per_cm3(5e11);
  const AtomicMedium tmpl(s.run.transition, 0.0, 0.0);
  const auto pts = spectrum(sc, s.stack, tmpl, cloud, PlaneWaveContext(s.theta_sp), 1);
  const double w = units::to_mhz(fit_dispersive_lineshape(pts).width);
  const double gamma = units::to_mhz(s.run.transition.natural_linewidth);
  return {w > gamma && w >= 6.5 && w <= 26.0,
          fmt("fitted width %.3f MHz (natural %.1f, target 13 within a factor 2)", w, gamma)};
}

Outcome resolution() {
  const double height = 1e-4;
  const double atoms = 9000.0;
  const Setup& s = setup();
  const double width = s.run.cloud.radius_z / s.run.cloud.velocity_z;
  int inside = 0;
  double lo = 1e300;
  double hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    TraceOptions o;
    o.noise_rms = height / 300.0;
    o.seed = seed;
    const GaussianPeakFit fit = fit_gaussian_peak(synthesize_gaussian_trace(height, width, o));
    const double dn = atom_number_resolution(atoms, fit.snr);
    lo = std::min(lo, dn);
    hi = std::max(hi, dn);
    inside += dn >= 25.5 && dn <= 34.5;
  }
  return {inside == 100, fmt("%d/100 seeds with dN in [25.5, 34.5]; range [%.2f, %.2f]", inside,
                             lo, hi)};
}

Outcome overlap() {
  const Setup& s = setup();
  const double f = overlap_average_factor(s.run.cloud, s.run.beam);
  return {f >= 3.0 && f <= 5.0, fmt("overlap factor %.3f (target 4 +- 1)", f)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"qnd-peak", qnd_peak},           {"qnd-shape", qnd_shape},
      {"linearization", linearization}, {"absorption-oracle", absorption},
      {"snr-asymptote", snr_asymptote}, {"optics-core", optics_core},
      {"broadening", broadening},       {"resolution", resolution},
      {"overlap", overlap}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
