#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

// Transfer-matrix optics of a planar stack for p-polarized (TM) light.
//
// Amplitude convention: the two-vector carried through the stack holds
// (backward, forward) electric-field amplitudes, so the stack reflection is
// M(0,1)/M(1,1) and the transmitted amplitude 1/M(1,1). Interfaces use
//   r_ij = (k_iz n_j^2 - k_jz n_i^2) / (k_iz n_j^2 + k_jz n_i^2)
//   t_ij = 2 k_iz n_i n_j / (k_iz n_j^2 + k_jz n_i^2)
// and a layer of thickness d propagates with diag(exp(i k_z d), exp(-i k_z d)).
namespace plasmondet {

using complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kSemiInfinite = std::numeric_limits<double>::infinity();

struct Layer {
  complex index{1.0, 0.0};
  double thickness = kSemiInfinite;  // meters

  static Layer half_space(complex n) { return {n, kSemiInfinite}; }
  static Layer film(complex n, double thickness) { return {n, thickness}; }
  bool semi_infinite() const { return thickness == kSemiInfinite; }
};

// Ordered layers, first = incidence half-space, last = exit half-space.
// The outer layers are always treated as semi-infinite.
class LayerStack {
 public:
  LayerStack(std::vector<Layer> layers, double vacuum_wavelength);

  std::span<const Layer> layers() const { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  std::size_t size() const { return layers_.size(); }
  double vacuum_wavelength() const { return wavelength_; }
  double k0() const;
  double incidence_index() const { return layers_.front().index.real(); }

  // Angle of total internal reflection into the exit medium; NaN when the
  // exit medium is lossy or optically denser than the incidence medium.
  double critical_angle() const;

  LayerStack with_layer_inserted(std::size_t position, Layer layer) const;
  LayerStack with_exit_index(complex n) const;

 private:
  std::vector<Layer> layers_;
  double wavelength_;
};

class PlaneWaveContext {
 public:
  explicit PlaneWaveContext(double incidence_angle);
  double incidence_angle() const { return angle_; }

 private:
  double angle_;
};

struct FresnelCoefficients {
  complex r;
  complex t;
};

struct TransferMatrices {
  Matrix2 total;
  // Product of every factor except the final interface; this is the
  // A matrix of the four-layer atom geometry (identity for two layers).
  Matrix2 partial;
};

// k_z = k0 sqrt(n^2 - n1^2 sin^2(theta)) on the branch Re >= 0, Im >= 0.
complex vertical_wavenumber(complex n, double incidence_index, double k0, double angle);
complex vertical_wavenumber(const LayerStack& stack, std::size_t layer,
                            const PlaneWaveContext& ctx);

FresnelCoefficients fresnel_p(complex n_i, complex n_j, complex kz_i, complex kz_j);
FresnelCoefficients fresnel_interface(const LayerStack& stack, std::size_t i, std::size_t j,
                                      const PlaneWaveContext& ctx);

Matrix2 interface_matrix(const LayerStack& stack, std::size_t i, std::size_t j,
                         const PlaneWaveContext& ctx);
// Throws InvalidArgument for a semi-infinite layer.
Matrix2 propagation_matrix(const LayerStack& stack, std::size_t layer,
                           const PlaneWaveContext& ctx);
Matrix2 propagation_matrix(complex kz, double thickness);

TransferMatrices total_matrix(const LayerStack& stack, const PlaneWaveContext& ctx);

complex reflection_amplitude(const LayerStack& stack, const PlaneWaveContext& ctx);
complex transmission_amplitude(const LayerStack& stack, const PlaneWaveContext& ctx);

// |M(0,1)/M(1,1)|^2. Throws NumericError when |M(1,1)| < 1e-30.
double reflectivity(const LayerStack& stack, const PlaneWaveContext& ctx);

// Fraction of the incident power flowing into the exit half-space.
double transmittance(const LayerStack& stack, const PlaneWaveContext& ctx);

// Normalized z-component of the Poynting flux in `layer`, evaluated at the
// end of the layer closest to the exit (the start for the exit half-space).
// Equals 1 - R in the incidence medium.
double layer_power_flux(const LayerStack& stack, const PlaneWaveContext& ctx, std::size_t layer);

// 1/|A22|^2 with the exit medium propagated to height z above the last
// interface; at z = 0 this is the intensity enhancement |t|^2.
double field_enhancement(const LayerStack& stack, const PlaneWaveContext& ctx, double z);

// Reflectivity minimizer on [lo, hi] (coarse grid + golden section, 1e-9 rad).
double find_resonance_angle(const LayerStack& stack, double lo, double hi);
double find_resonance_angle(const std::function<double(double)>& reflectivity_of_angle, double lo,
                            double hi);

}  // namespace plasmondet
