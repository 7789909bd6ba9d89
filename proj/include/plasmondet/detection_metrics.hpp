#pragma once

#include "plasmondet/atomic_medium.hpp"
#include "plasmondet/quadrature.hpp"
#include "plasmondet/stack_optics.hpp"

// Sensitivity, photon budget and QND limits for atoms above a plasmonic
// film. Every function takes the atom-free "substrate" stack, whose exit
// half-space is the (vacuum) medium hosting the gap and the atoms.
namespace plasmondet {

struct AtomLayerGeometry {
  double gap = 100e-9;                // z_B, distance of the atoms from the metal
  double thickness = kSemiInfinite;   // d4
};

// Substrate with its exit medium split into a gap film and the atom layer.
// A finite atom layer is followed by the original exit medium again.
LayerStack stack_with_atoms(const LayerStack& substrate, const AtomLayerGeometry& geometry,
                            complex atom_index);

// Quantities of the atom-free stack seen from the gap.
struct GapResponse {
  Matrix2 a;                         // A = M12 M2 ... M_gap, propagated to z_B
  double theta = 0.0;                // Re(A11 A12*) - |A12|^2/|A22|^2 Re(A21 A22*)
  double kappa = 0.0;                // inverse decay length in the gap
  double surface_enhancement = 0.0;  // |t|^2 at the metal surface
  double enhancement_at_gap = 0.0;   // 1/|A22|^2 = |t|^2 exp(-2 kappa z_B)
  double index_response = 0.0;       // 1 + k0^2 / (2 kappa^2) = d r34 / d n4
};

// Throws NotEvanescent unless the exit medium carries a purely decaying wave.
GapResponse gap_response(const LayerStack& substrate, const PlaneWaveContext& ctx, double gap);

double reflectivity_with_atoms(const LayerStack& substrate, const AtomicMedium& medium,
                               const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx);

// R(complex n4) - R(rho = 0), valid at any density.
double delta_R_exact(const LayerStack& substrate, const AtomicMedium& medium,
                     const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx);

// dR/drho at rho = 0 for a real index change n4 = 1 + beta rho.
double reflectivity_derivative(const LayerStack& substrate, const AtomicMedium& medium,
                               double gap, const PlaneWaveContext& ctx);

// First-order dispersive change for a semi-infinite uniform layer beyond z_B:
// (3 Theta / 4 pi^2) |t|^2 (1 + k0^2 / 2 kappa^2) x/(1+x^2) lambda^3 rho exp(-2 kappa z_B).
double delta_R_linear(const LayerStack& substrate, const AtomicMedium& medium, double gap,
                      const PlaneWaveContext& ctx);

// Linear response to an inhomogeneous density, weighting rho(z) with
// exp(-2 kappa z). Only the transition and detuning of `medium` are used.
double delta_R_profile(const LayerStack& substrate, const AtomicMedium& medium,
                       const DensityProfile& profile, const PlaneWaveContext& ctx,
                       const QuadratureOptions& quadrature = {1e-8, 0.0, 4000});

struct ProbeConfig {
  double incidence_angle = 0.0;      // rad
  double detection_efficiency = 1.0;  // eta
  double incident_photons = 0.0;      // N_in
  double max_absorbed_photons = 1.0;  // N_abs^max

  void validate() const;
};

struct SignalNoise {
  double signal = 0.0;      // eta dR N_in
  double shot_noise = 0.0;  // sqrt(eta R N_in)
  double snr = 0.0;
  bool snr_unbounded = false;  // R == 0 with a nonzero signal
};

SignalNoise signal_and_noise(double reflectivity, double delta_r, double efficiency,
                             double incident_photons);

struct AbsorptionBudget {
  double full = 0.0;        // |t|^2 (2 kappa_r n4i - kappa_i)/k0 exp(-2 kappa_r z_B)
  double simplified = 0.0;  // Lorentzian closed form with kappa_i ~ -k0 n4i / sqrt(n1^2 sin^2 - 1)
  double exact = 0.0;       // Poynting flux into the atom layer from the full field solution
  bool clipped = false;     // a closed form left [0, 1] and was clipped
};

AbsorptionBudget absorbed_fraction(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry,
                                   const PlaneWaveContext& ctx);

// chi of the closed-form photon-budget SNR, using the atom-free reflectivity.
double chi_factor(const LayerStack& substrate, double gap, const PlaneWaveContext& ctx,
                  double efficiency);

struct PhotonBudgetSnr {
  double snr = 0.0;
  double incident_photons = 0.0;  // N_in^max = N_abs^max / f_N
  double absorbed_fraction = 0.0;
  double chi = 0.0;
  double closed_form_snr = 0.0;   // sqrt(chi lambda^3 rho x^2/(1+x^2) N_abs^max)
  bool unlimited_photons = false;  // f_N == 0
};

// SNR when the incident photon number is set by an absorption budget.
PhotonBudgetSnr snr_photon_budget(const LayerStack& substrate, const AtomicMedium& medium,
                                  const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                                  double efficiency, double max_absorbed_photons);

// Largest atom number measurable with single-atom resolution while
// absorbing no more photons than atoms: (eta / f_N) dR^2 / R.
double qnd_max_atoms(const LayerStack& substrate, const AtomicMedium& medium,
                     const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                     double efficiency);

struct AngleWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// Evanescent range above the critical angle of the exit medium.
AngleWindow evanescent_angle_window(const LayerStack& substrate, double span = 0.1745329251994,
                                    double margin = 1.7453292519943e-4);

struct QndOptimum {
  double angle = 0.0;
  double n_max = 0.0;
  double reflectivity_without_atoms = 0.0;
  double reflectivity_with_atoms = 0.0;
  double delta_r = 0.0;
  double absorbed_fraction = 0.0;
  bool at_window_edge = false;  // grid maximum on a window endpoint, no refinement
};

// Maximizes qnd_max_atoms over the incidence angle (coarse grid, then
// golden-section refinement of the bracket around the grid maximum).
QndOptimum maximize_qnd_over_angle(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry, double efficiency,
                                   const AngleWindow& window, int grid_points = 2000);

// N / S_N. Throws InvalidArgument for S_N == 0.
double atom_number_resolution(double atoms, double snr);

struct DetectionReport {
  double reflectivity_without_atoms = 0.0;
  double reflectivity = 0.0;  // with atoms
  double delta_r = 0.0;
  double signal = 0.0;
  double snr = 0.0;
  double absorbed_fraction = 0.0;
  double chi = 0.0;
  double theta = 0.0;
  double n_max = 0.0;
};

DetectionReport evaluate_detection(const LayerStack& substrate, const AtomicMedium& medium,
                                   const AtomLayerGeometry& geometry, const ProbeConfig& probe);

}  // namespace plasmondet
