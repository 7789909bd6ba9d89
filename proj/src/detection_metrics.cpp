#include "plasmondet/detection_metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "plasmondet/errors.hpp"
#include "plasmondet/minimize.hpp"

namespace plasmondet {
namespace {

constexpr double kPi = std::numbers::pi;

void require_vacuum_exit(const LayerStack& substrate) {
  const complex n = substrate.layers().back().index;
  if (std::abs(n - complex(1.0, 0.0)) > 1e-12) {
    throw InvalidArgument("atoms must sit in a vacuum exit medium (n = 1)");
  }
}

double clip_unit(double v, bool& clipped) {
  if (v < 0.0) {
    clipped = true;
    return 0.0;
  }
  if (v > 1.0) {
    clipped = true;
    return 1.0;
  }
  return v;
}

}  // namespace

LayerStack stack_with_atoms(const LayerStack& substrate, const AtomLayerGeometry& geometry,
                            complex atom_index) {
  require_vacuum_exit(substrate);
  if (!(geometry.gap >= 0.0) || !std::isfinite(geometry.gap)) {
    throw InvalidArgument("atom layer gap must be finite and >= 0");
  }
  if (!(geometry.thickness >= 0.0)) throw InvalidArgument("atom layer thickness must be >= 0");
  std::vector<Layer> layers(substrate.layers().begin(), substrate.layers().end());
  const Layer exit = layers.back();
  layers.back() = Layer::film(exit.index, geometry.gap);
  if (geometry.thickness == kSemiInfinite) {
    layers.push_back(Layer::half_space(atom_index));
  } else {
    layers.push_back(Layer::film(atom_index, geometry.thickness));
    layers.push_back(exit);
  }
  return LayerStack(std::move(layers), substrate.vacuum_wavelength());
}

GapResponse gap_response(const LayerStack& substrate, const PlaneWaveContext& ctx, double gap) {
  require_vacuum_exit(substrate);
  const complex kz = vertical_wavenumber(substrate, substrate.size() - 1, ctx);
  if (!(kz.imag() > 0.0) || std::abs(kz.real()) > 1e-12 * std::abs(kz)) {
    throw NotEvanescent("incidence angle is below the critical angle of the exit medium");
  }
  GapResponse out;
  const Matrix2 total = total_matrix(substrate, ctx).total;
  out.a = total * propagation_matrix(kz, gap);
  out.kappa = kz.imag();
  const complex a11 = out.a(0, 0);
  const complex a12 = out.a(0, 1);
  const complex a21 = out.a(1, 0);
  const complex a22 = out.a(1, 1);
  out.theta = (a11 * std::conj(a12)).real() -
              std::norm(a12) / std::norm(a22) * (a21 * std::conj(a22)).real();
  out.surface_enhancement = 1.0 / std::norm(total(1, 1));
  out.enhancement_at_gap = 1.0 / std::norm(a22);
  const double k0 = substrate.k0();
  out.index_response = 1.0 + k0 * k0 / (2.0 * out.kappa * out.kappa);
  return out;
}

double reflectivity_with_atoms(const LayerStack& substrate, const AtomicMedium& medium,
                               const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx) {
  return reflectivity(stack_with_atoms(substrate, geometry, refractive_index(medium)), ctx);
}

double delta_R_exact(const LayerStack& substrate, const AtomicMedium& medium,
                     const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx) {
  if (medium.density() == 0.0) return 0.0;
  return reflectivity_with_atoms(substrate, medium, geometry, ctx) - reflectivity(substrate, ctx);
}

double reflectivity_derivative(const LayerStack& substrate, const AtomicMedium& medium,
                               double gap, const PlaneWaveContext& ctx) {
  const GapResponse g = gap_response(substrate, ctx, gap);
  return 2.0 * polarizability_factor(medium) * g.index_response * g.enhancement_at_gap * g.theta;
}

double delta_R_linear(const LayerStack& substrate, const AtomicMedium& medium, double gap,
                      const PlaneWaveContext& ctx) {
  const GapResponse g = gap_response(substrate, ctx, gap);
  const double x = medium.scaled_detuning();
  const double lambda = medium.transition().vacuum_wavelength;
  return 3.0 * g.theta / (4.0 * kPi * kPi) * g.enhancement_at_gap * g.index_response *
         (x / (1.0 + x * x)) * lambda * lambda * lambda * medium.density();
}

double delta_R_profile(const LayerStack& substrate, const AtomicMedium& medium,
                       const DensityProfile& profile, const PlaneWaveContext& ctx,
                       const QuadratureOptions& quadrature) {
  const GapResponse g = gap_response(substrate, ctx, 0.0);
  const double two_kappa = 2.0 * g.kappa;
  auto weighted = [&](double z) {
    const double rho = profile.at(z);
    return rho == 0.0 ? 0.0 : rho * std::exp(-two_kappa * z);
  };
  double integral = 0.0;
  double lo = 0.0;
  for (double b : profile.breakpoints()) {
    if (b <= lo) continue;
    integral += integrate(weighted, lo, b, quadrature).value;
    lo = b;
  }
  integral += integrate_to_infinity(weighted, lo, 1.0 / two_kappa, quadrature).value;

  const double x = medium.scaled_detuning();
  const double lambda = medium.transition().vacuum_wavelength;
  return 3.0 * g.theta / (2.0 * kPi * kPi) * g.surface_enhancement * g.index_response *
         (x / (1.0 + x * x)) * lambda * lambda * lambda * g.kappa * integral;
}

void ProbeConfig::validate() const {
  if (!(incidence_angle >= 0.0 && incidence_angle < kPi / 2)) {
    throw InvalidArgument("probe: incidence angle outside [0, pi/2)");
  }
  if (!(detection_efficiency >= 0.0 && detection_efficiency <= 1.0)) {
    throw InvalidArgument("probe: detection efficiency outside [0, 1]");
  }
  if (!(incident_photons >= 0.0) || !(max_absorbed_photons >= 0.0)) {
    throw InvalidArgument("probe: photon numbers must be >= 0");
  }
}

SignalNoise signal_and_noise(double reflectivity, double delta_r, double efficiency,
                             double incident_photons) {
  SignalNoise out;
  out.signal = efficiency * delta_r * incident_photons;
  out.shot_noise = std::sqrt(efficiency * reflectivity * incident_photons);
  if (out.signal == 0.0) {
    out.snr = 0.0;
  } else if (reflectivity <= 0.0) {
    out.snr = std::numeric_limits<double>::infinity();
    out.snr_unbounded = true;
  } else {
    out.snr = std::sqrt(efficiency * incident_photons / reflectivity) * delta_r;
  }
  return out;
}

AbsorptionBudget absorbed_fraction(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry,
                                   const PlaneWaveContext& ctx) {
  const GapResponse g = gap_response(substrate, ctx, geometry.gap);
  AbsorptionBudget out;
  if (medium.density() == 0.0) return out;

  const double k0 = substrate.k0();
  const complex n4 = refractive_index(medium);
  const complex k4 = vertical_wavenumber(n4, substrate.incidence_index(), k0, ctx.incidence_angle());
  const double kappa_r = k4.imag();
  const double kappa_i = -k4.real();
  const double depth = geometry.thickness;
  // Integrating exp(-2 kappa z) over a finite layer instead of to infinity.
  const double finite_r = depth == kSemiInfinite ? 1.0 : -std::expm1(-2.0 * kappa_r * depth);
  const double finite_3 = depth == kSemiInfinite ? 1.0 : -std::expm1(-2.0 * g.kappa * depth);

  out.full = g.surface_enhancement * (2.0 * kappa_r * n4.imag() - kappa_i) / k0 *
             std::exp(-2.0 * kappa_r * geometry.gap) * finite_r;
  out.simplified = g.enhancement_at_gap * (k0 / g.kappa) * n4.imag() * finite_3;
  out.full = clip_unit(out.full, out.clipped);
  out.simplified = clip_unit(out.simplified, out.clipped);

  const LayerStack with_atoms = stack_with_atoms(substrate, geometry, n4);
  const std::size_t gap_layer = substrate.size() - 1;
  double exact = layer_power_flux(with_atoms, ctx, gap_layer);
  if (geometry.thickness != kSemiInfinite) exact -= transmittance(with_atoms, ctx);
  out.exact = exact;
  return out;
}

double chi_factor(const LayerStack& substrate, double gap, const PlaneWaveContext& ctx,
                  double efficiency) {
  const GapResponse g = gap_response(substrate, ctx, gap);
  const double r = reflectivity(substrate, ctx);
  const double root = g.kappa / substrate.k0();  // sqrt(n1^2 sin^2 - 1)
  return 3.0 * efficiency / (2.0 * kPi * kPi) * g.theta * g.theta * root / r *
         g.index_response * g.index_response * g.enhancement_at_gap;
}

PhotonBudgetSnr snr_photon_budget(const LayerStack& substrate, const AtomicMedium& medium,
                                  const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                                  double efficiency, double max_absorbed_photons) {
  if (!(max_absorbed_photons > 0.0)) {
    throw InvalidArgument("snr_photon_budget: N_abs^max must be > 0");
  }
  PhotonBudgetSnr out;
  out.chi = chi_factor(substrate, geometry.gap, ctx, efficiency);
  const double x = medium.scaled_detuning();
  const double lambda = medium.transition().vacuum_wavelength;
  out.closed_form_snr = std::sqrt(out.chi * lambda * lambda * lambda * medium.density() *
                                  (x * x / (1.0 + x * x)) * max_absorbed_photons);
  out.absorbed_fraction = absorbed_fraction(substrate, medium, geometry, ctx).simplified;
  if (out.absorbed_fraction == 0.0) {
    out.incident_photons = std::numeric_limits<double>::infinity();
    out.unlimited_photons = true;
    return out;
  }
  out.incident_photons = max_absorbed_photons / out.absorbed_fraction;
  // dispersive first-order signal on the bare reflectivity, as in chi
  const double r = reflectivity(substrate, ctx);
  const double dr = delta_R_linear(substrate, medium, geometry.gap, ctx);
  out.snr = std::abs(signal_and_noise(r, dr, efficiency, out.incident_photons).snr);
  return out;
}

double qnd_max_atoms(const LayerStack& substrate, const AtomicMedium& medium,
                     const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                     double efficiency) {
  if (medium.density() == 0.0) return 0.0;
  const double f = absorbed_fraction(substrate, medium, geometry, ctx).full;
  const double r = reflectivity_with_atoms(substrate, medium, geometry, ctx);
  const double dr = r - reflectivity(substrate, ctx);
  if (f == 0.0 || r == 0.0) return std::numeric_limits<double>::infinity();
  return efficiency / f * dr * dr / r;
}

AngleWindow evanescent_angle_window(const LayerStack& substrate, double span, double margin) {
  const double critical = substrate.critical_angle();
  if (std::isnan(critical)) {
    throw NotEvanescent("exit medium admits no total internal reflection");
  }
  const double lo = critical + margin;
  const double hi = std::min(critical + span, kPi / 2 - 1e-6);
  if (!(lo < hi)) throw InvalidArgument("evanescent_angle_window: empty window");
  return {lo, hi};
}

QndOptimum maximize_qnd_over_angle(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry, double efficiency,
                                   const AngleWindow& window, int grid_points) {
  auto objective = [&](double angle) {
    return -qnd_max_atoms(substrate, medium, geometry, PlaneWaveContext(angle), efficiency);
  };
  ScalarMinimum best;
  bool edge = false;
  try {
    best = bracketed_minimize(objective, window.lo, window.hi, grid_points, 1e-11);
  } catch (const NoBracket&) {
    const double lo = objective(window.lo);
    const double hi = objective(window.hi);
    best = lo <= hi ? ScalarMinimum{window.lo, lo} : ScalarMinimum{window.hi, hi};
    edge = true;
  }
  const PlaneWaveContext ctx(best.x);
  QndOptimum out;
  out.at_window_edge = edge;
  out.angle = best.x;
  out.n_max = -best.value;
  out.reflectivity_without_atoms = reflectivity(substrate, ctx);
  out.reflectivity_with_atoms = reflectivity_with_atoms(substrate, medium, geometry, ctx);
  out.delta_r = out.reflectivity_with_atoms - out.reflectivity_without_atoms;
  out.absorbed_fraction = absorbed_fraction(substrate, medium, geometry, ctx).full;
  return out;
}

double atom_number_resolution(double atoms, double snr) {
  if (snr == 0.0) throw InvalidArgument("atom_number_resolution: undefined for S_N = 0");
  return atoms / snr;
}

DetectionReport evaluate_detection(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry, const ProbeConfig& probe) {
  probe.validate();
  const PlaneWaveContext ctx(probe.incidence_angle);
  DetectionReport out;
  out.reflectivity_without_atoms = reflectivity(substrate, ctx);
  out.reflectivity = reflectivity_with_atoms(substrate, medium, geometry, ctx);
  out.delta_r = medium.density() == 0.0 ? 0.0 : out.reflectivity - out.reflectivity_without_atoms;
  const SignalNoise sn =
      signal_and_noise(out.reflectivity, out.delta_r, probe.detection_efficiency,
                       probe.incident_photons);
  out.signal = sn.signal;
  out.snr = sn.snr;
  out.absorbed_fraction = absorbed_fraction(substrate, medium, geometry, ctx).full;
  out.chi = chi_factor(substrate, geometry.gap, ctx, probe.detection_efficiency);
  out.theta = gap_response(substrate, ctx, geometry.gap).theta;
  out.n_max = qnd_max_atoms(substrate, medium, geometry, ctx, probe.detection_efficiency);
  return out;
}

}  // namespace plasmondet
