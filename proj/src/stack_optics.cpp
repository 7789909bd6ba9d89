#include "plasmondet/stack_optics.hpp"

#include <cmath>
#include <string>

#include "plasmondet/errors.hpp"
#include "plasmondet/minimize.hpp"

namespace plasmondet {
namespace {

const complex kI{0.0, 1.0};

void check_index(std::size_t i, const LayerStack& stack) {
  if (i >= stack.size()) {
    throw InvalidArgument("layer index " + std::to_string(i) + " outside stack of " +
                          std::to_string(stack.size()));
  }
}

// (backward, forward) amplitudes at the end of `layer` for unit incidence,
// obtained by carrying the exit amplitudes (0, t) back through the stack.
Eigen::Vector2cd amplitudes_at_end(const LayerStack& stack, const PlaneWaveContext& ctx,
                                   std::size_t layer) {
  const std::size_t last = stack.size() - 1;
  Eigen::Vector2cd v(0.0, transmission_amplitude(stack, ctx));
  if (layer == last) return v;
  Matrix2 m = Matrix2::Identity();
  for (std::size_t j = layer + 1; j <= last; ++j) {
    m = m * interface_matrix(stack, j - 1, j, ctx);
    if (j < last) m = m * propagation_matrix(stack, j, ctx);
  }
  return m * v;
}

}  // namespace

LayerStack::LayerStack(std::vector<Layer> layers, double vacuum_wavelength)
    : layers_(std::move(layers)), wavelength_(vacuum_wavelength) {
  if (layers_.size() < 2) throw InvalidArgument("LayerStack: at least two layers required");
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
    throw InvalidArgument("LayerStack: vacuum wavelength must be positive");
  }
  const complex n1 = layers_.front().index;
  if (n1.imag() != 0.0 || !(n1.real() > 0.0)) {
    throw InvalidArgument("LayerStack: incidence medium must be lossless with positive index");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.index.imag() < 0.0) {
      throw InvalidArgument("LayerStack: layer " + std::to_string(i) +
                            " has Im(n) < 0 (gain media are not supported)");
    }
    const bool outer = i == 0 || i + 1 == layers_.size();
    if (!outer && (l.semi_infinite() || !(l.thickness >= 0.0) || std::isnan(l.thickness))) {
      throw InvalidArgument("LayerStack: interior layer " + std::to_string(i) +
                            " needs a finite thickness >= 0");
    }
  }
  layers_.front().thickness = kSemiInfinite;
  layers_.back().thickness = kSemiInfinite;
}

double LayerStack::k0() const { return 2.0 * std::numbers::pi / wavelength_; }

double LayerStack::critical_angle() const {
  const complex n_exit = layers_.back().index;
  const double n1 = incidence_index();
  if (n_exit.imag() != 0.0 || n_exit.real() >= n1) return std::nan("");
  return std::asin(n_exit.real() / n1);
}

LayerStack LayerStack::with_layer_inserted(std::size_t position, Layer layer) const {
  if (position == 0 || position > layers_.size() - 1) {
    throw InvalidArgument("with_layer_inserted: position must be between the outer layers");
  }
  std::vector<Layer> out = layers_;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(position), layer);
  return LayerStack(std::move(out), wavelength_);
}

LayerStack LayerStack::with_exit_index(complex n) const {
  std::vector<Layer> out = layers_;
  out.back().index = n;
  return LayerStack(std::move(out), wavelength_);
}

PlaneWaveContext::PlaneWaveContext(double incidence_angle) : angle_(incidence_angle) {
  if (!(incidence_angle >= 0.0 && incidence_angle < std::numbers::pi / 2)) {
    throw InvalidArgument("PlaneWaveContext: incidence angle must lie in [0, pi/2)");
  }
}

complex vertical_wavenumber(complex n, double incidence_index, double k0, double angle) {
  const double s = incidence_index * std::sin(angle);
  complex arg = n * n - s * s;
  // Signed zero would select the lower branch in std::sqrt.
  if (arg.imag() == 0.0) arg.imag(0.0);
  complex kz = std::sqrt(arg);
  if (kz.imag() < 0.0 || (kz.imag() == 0.0 && kz.real() < 0.0)) kz = -kz;
  return k0 * kz;
}

complex vertical_wavenumber(const LayerStack& stack, std::size_t layer,
                            const PlaneWaveContext& ctx) {
  check_index(layer, stack);
  return vertical_wavenumber(stack.layer(layer).index, stack.incidence_index(), stack.k0(),
                             ctx.incidence_angle());
}

FresnelCoefficients fresnel_p(complex n_i, complex n_j, complex kz_i, complex kz_j) {
  const complex a = kz_i * n_j * n_j;
  const complex b = kz_j * n_i * n_i;
  const complex denom = a + b;
  return {(a - b) / denom, 2.0 * kz_i * n_i * n_j / denom};
}

FresnelCoefficients fresnel_interface(const LayerStack& stack, std::size_t i, std::size_t j,
                                      const PlaneWaveContext& ctx) {
  check_index(i, stack);
  check_index(j, stack);
  return fresnel_p(stack.layer(i).index, stack.layer(j).index,
                   vertical_wavenumber(stack, i, ctx), vertical_wavenumber(stack, j, ctx));
}

Matrix2 interface_matrix(const LayerStack& stack, std::size_t i, std::size_t j,
                         const PlaneWaveContext& ctx) {
  const FresnelCoefficients f = fresnel_interface(stack, i, j, ctx);
  Matrix2 m;
  m << 1.0, f.r, f.r, 1.0;
  return m / f.t;
}

Matrix2 propagation_matrix(complex kz, double thickness) {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = std::exp(kI * kz * thickness);
  m(1, 1) = std::exp(-kI * kz * thickness);
  return m;
}

Matrix2 propagation_matrix(const LayerStack& stack, std::size_t layer,
                           const PlaneWaveContext& ctx) {
  check_index(layer, stack);
  if (layer == 0 || layer + 1 == stack.size() || stack.layer(layer).semi_infinite()) {
    throw InvalidArgument("propagation_matrix: layer " + std::to_string(layer) +
                          " is semi-infinite");
  }
  return propagation_matrix(vertical_wavenumber(stack, layer, ctx), stack.layer(layer).thickness);
}

TransferMatrices total_matrix(const LayerStack& stack, const PlaneWaveContext& ctx) {
  Matrix2 partial = Matrix2::Identity();
  const std::size_t last = stack.size() - 1;
  for (std::size_t j = 1; j < last; ++j) {
    partial = partial * interface_matrix(stack, j - 1, j, ctx);
    partial = partial * propagation_matrix(stack, j, ctx);
  }
  return {partial * interface_matrix(stack, last - 1, last, ctx), partial};
}

complex reflection_amplitude(const LayerStack& stack, const PlaneWaveContext& ctx) {
  const Matrix2 m = total_matrix(stack, ctx).total;
  if (std::abs(m(1, 1)) < 1e-30) throw NumericError("reflectivity: degenerate stack, M22 ~ 0");
  return m(0, 1) / m(1, 1);
}

complex transmission_amplitude(const LayerStack& stack, const PlaneWaveContext& ctx) {
  const Matrix2 m = total_matrix(stack, ctx).total;
  if (std::abs(m(1, 1)) < 1e-30) throw NumericError("transmission: degenerate stack, M22 ~ 0");
  return 1.0 / m(1, 1);
}

double reflectivity(const LayerStack& stack, const PlaneWaveContext& ctx) {
  return std::norm(reflection_amplitude(stack, ctx));
}

double transmittance(const LayerStack& stack, const PlaneWaveContext& ctx) {
  return layer_power_flux(stack, ctx, stack.size() - 1);
}

double layer_power_flux(const LayerStack& stack, const PlaneWaveContext& ctx, std::size_t layer) {
  check_index(layer, stack);
  const double k0 = stack.k0();
  const complex n = stack.layer(layer).index;
  const complex cos_theta = vertical_wavenumber(stack, layer, ctx) / (k0 * n);
  const double cos_in = std::cos(ctx.incidence_angle());
  const double incident = stack.incidence_index() * cos_in;
  if (layer == 0) {
    const complex r = reflection_amplitude(stack, ctx);
    const complex forward = 1.0;
    return (n * std::conj(cos_theta) * (forward + r) * std::conj(forward - r)).real() / incident;
  }
  const Eigen::Vector2cd v = amplitudes_at_end(stack, ctx, layer);
  const complex backward = v(0);
  const complex forward = v(1);
  return (n * std::conj(cos_theta) * (forward + backward) * std::conj(forward - backward)).real() /
         incident;
}

double field_enhancement(const LayerStack& stack, const PlaneWaveContext& ctx, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("field_enhancement: z must be >= 0");
  const complex kz = vertical_wavenumber(stack, stack.size() - 1, ctx);
  const Matrix2 a = total_matrix(stack, ctx).total * propagation_matrix(kz, z);
  return 1.0 / std::norm(a(1, 1));
}

double find_resonance_angle(const std::function<double(double)>& reflectivity_of_angle, double lo,
                            double hi) {
  return bracketed_minimize(reflectivity_of_angle, lo, hi, 400, 1e-10).x;
}

double find_resonance_angle(const LayerStack& stack, double lo, double hi) {
  return find_resonance_angle(
      [&](double angle) { return reflectivity(stack, PlaneWaveContext(angle)); }, lo, hi);
}

}  // namespace plasmondet
