#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "plasmondet/detection_metrics.hpp"

// Synthetic counterparts of the measured observables: detuning spectra,
// reflection time traces with their Gaussian fit, and dispersive images.
namespace plasmondet {

// Ellipsoidal Gaussian cloud, rho = peak exp(-2 x^2/rx^2 - 2 y^2/ry^2 - 2 z^2/rz^2).
struct CloudModel {
  double radius_x = 50e-6;  // 1/e^2 radii, m
  double radius_y = 155e-6;
  double radius_z = 50e-6;
  double peak_density = 0.0;  // m^-3
  double atom_number = 0.0;
  double velocity_z = 0.127;  // m/s towards the surface

  void validate() const;
  // |N - rho0 V| / N with V the Gaussian volume; callers warn above 0.2.
  double atom_number_mismatch() const;
  static CloudModel from_atom_number(double radius_x, double radius_y, double radius_z,
                                     double atom_number, double velocity_z);
};

// (pi/2)^{3/2} rx ry rz: integral of the unit-peak Gaussian density.
double gaussian_cloud_volume(double radius_x, double radius_y, double radius_z);

struct BeamModel {
  double waist_x = 146e-6;  // 1/e^2 intensity radii on the surface
  double waist_y = 111e-6;
  double intensity_ratio = 0.0;  // I_in / I_sat

  void validate() const;
};

// Phenomenological scattering plateau: 1 - A / (1 + (2 delta / width)^2).
struct PlateauModel {
  double amplitude = 0.0;
  double width = 2.0 * 3.141592653589793 * 6e6;  // rad/s

  double suppression(double detuning) const;
};

// Detuning-dependent turning point, linearly interpolated and clamped.
struct GapTable {
  std::vector<double> detuning;  // rad/s, strictly increasing
  std::vector<double> gap;       // m

  double at(double detuning) const;
};

struct SpectrumScenario {
  std::vector<double> detunings;  // rad/s, strictly increasing
  std::variant<double, GapTable> gap_policy = 100e-9;
  PlateauModel plateau;
  double atom_layer_thickness = kSemiInfinite;

  void validate() const;
  double gap_at(double detuning) const;
};

struct SpectrumPoint {
  double detuning = 0.0;  // rad/s
  double delta_r = 0.0;
};

// dR(delta) of a layer at the cloud's peak density, times the plateau factor.
std::vector<SpectrumPoint> spectrum(const SpectrumScenario& scenario, const LayerStack& substrate,
                                    const AtomicMedium& medium_template, const CloudModel& cloud,
                                    const PlaneWaveContext& ctx, int threads = 0);

// (A X + B) / (1 + X^2), X = 2 (delta - center) / width: a Fano profile
// with asymmetry q = B / A. Width is the fitted linewidth, equal to Gamma
// for a weak response.
struct LineshapeFit {
  double dispersive = 0.0;  // A
  double absorptive = 0.0;  // B
  double center = 0.0;      // rad/s
  double width = 0.0;       // rad/s
  double residual_norm = 0.0;
};

LineshapeFit fit_dispersive_lineshape(std::span<const SpectrumPoint> points);
double dispersive_lineshape(const LineshapeFit& fit, double detuning);

enum class NoiseModel { white, shot };

struct TraceOptions {
  double sample_rate = 100e3;    // Hz
  double noise_rms = 0.0;        // white noise, in units of dR
  double tail_duration = 4e-3;   // noise-only window after the pulse, s
  double lead_widths = 4.0;      // pulse center sits this many widths after t = 0
  std::uint64_t seed = 1;
  double lowpass_cutoff = 0.0;   // Hz, single-pole filter; 0 disables
  NoiseModel noise = NoiseModel::white;
  double photons_per_sample = 0.0;  // shot-noise mode
  double detection_efficiency = 1.0;
  double background_reflectivity = 0.0;  // shot-noise mode
};

struct TimeTrace {
  std::vector<double> time;   // s
  std::vector<double> value;  // dR
  std::size_t tail_begin = 0;  // first sample of the noise-only window
  double injected_height = 0.0;
  double injected_center = 0.0;
  double injected_width = 0.0;  // 1/e^2 half-width, s
};

// Gaussian pulse height * exp(-2 (t - c)^2 / width^2) plus noise.
TimeTrace synthesize_gaussian_trace(double height, double width, const TraceOptions& options);

// Pulse of width r_z / v_z whose height is the overlap-averaged dR of the cloud.
TimeTrace synthesize_time_trace(const CloudModel& cloud, const BeamModel& beam,
                                const LayerStack& substrate, const AtomicMedium& medium,
                                const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                                TraceOptions options);

struct GaussianPeakFit {
  double height = 0.0;
  double center = 0.0;
  double width = 0.0;  // 1/e^2 half-width
  double offset = 0.0;
  double noise_std = 0.0;
  double snr = 0.0;  // |height| / noise_std
  double residual_norm = 0.0;
};

// Offset + Gaussian least-squares fit; noise from the trace's tail window.
GaussianPeakFit fit_gaussian_peak(const TimeTrace& trace);

struct SliceCount {
  double atoms = 0.0;
  double thickness = 0.0;  // l = 1 / kappa
};

// Atoms in the evanescent slice l = 1/kappa through the cloud center.
SliceCount detected_atoms_in_slice(const CloudModel& cloud, const LayerStack& substrate,
                                   const PlaneWaveContext& ctx);

// Center-of-cloud dR over the beam-weighted average dR.
double overlap_average_factor(const CloudModel& cloud, const BeamModel& beam);
double overlap_average_factor(const CloudModel& cloud, const BeamModel& beam,
                              const std::function<double(double)>& response);

struct DensityMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double pitch = 1e-6;  // m
  std::vector<double> density;  // row-major, m^-3

  double& at(std::size_t r, std::size_t c) { return density[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return density[r * cols + c]; }
};

// Transverse profile of the cloud in its central slice, centered on the map.
DensityMap gaussian_cloud_map(const CloudModel& cloud, std::size_t rows, std::size_t cols,
                              double pitch);

enum class PixelResponse { linear_profile, exact };

struct ImageOptions {
  double blur_fwhm = 0.0;  // m; 0 disables
  PixelResponse response = PixelResponse::linear_profile;
  int threads = 0;
};

struct ImageMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double pitch = 1e-6;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Every pixel is an independent stratified medium with a uniform slab of
// the local density beyond the gap.
ImageMap dispersive_image(const DensityMap& map, const LayerStack& substrate,
                          const AtomicMedium& medium, double gap, const PlaneWaveContext& ctx,
                          const ImageOptions& options = {});

std::vector<double> gaussian_blur(std::span<const double> values, std::size_t rows,
                                  std::size_t cols, double sigma_pixels);

}  // namespace plasmondet
