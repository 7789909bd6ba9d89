#include "plasmondet/spectra_imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "plasmondet/errors.hpp"
#include "plasmondet/least_squares.hpp"
#include "plasmondet/parallel.hpp"
#include "plasmondet/quadrature.hpp"

namespace plasmondet {
namespace {

constexpr double kPi = std::numbers::pi;

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

double fano(double a, double b, double center, double width, double detuning) {
  const double x = 2.0 * (detuning - center) / width;
  return (a * x + b) / (1.0 + x * x);
}

// Integral of f over the real line for an even integrand. `typical` is the
// expected magnitude of the result; it sets an absolute floor because an
// exact response carries cancellation noise far from the cloud center.
double even_integral(const std::function<double(double)>& f, double scale, double rel_tol,
                     double typical) {
  const QuadratureOptions opts{rel_tol, 1e-12 * std::abs(typical), 4000};
  return 2.0 * integrate_to_infinity(f, 0.0, scale, opts).value;
}

}  // namespace

void CloudModel::validate() const {
  if (!positive_finite(radius_x) || !positive_finite(radius_y) || !positive_finite(radius_z)) {
    throw InvalidArgument("cloud: radii must be positive and finite");
  }
  if (!(peak_density >= 0.0) || !std::isfinite(peak_density)) {
    throw InvalidArgument("cloud: peak density must be >= 0");
  }
  if (!(atom_number >= 0.0)) throw InvalidArgument("cloud: atom number must be >= 0");
  if (!positive_finite(velocity_z)) throw InvalidArgument("cloud: velocity must be positive");
}

double gaussian_cloud_volume(double radius_x, double radius_y, double radius_z) {
  return std::pow(kPi / 2.0, 1.5) * radius_x * radius_y * radius_z;
}

double CloudModel::atom_number_mismatch() const {
  if (atom_number == 0.0) return peak_density == 0.0 ? 0.0 : 1.0;
  const double implied = peak_density * gaussian_cloud_volume(radius_x, radius_y, radius_z);
  return std::abs(atom_number - implied) / atom_number;
}

CloudModel CloudModel::from_atom_number(double radius_x, double radius_y, double radius_z,
                                        double atom_number, double velocity_z) {
  CloudModel c;
  c.radius_x = radius_x;
  c.radius_y = radius_y;
  c.radius_z = radius_z;
  c.atom_number = atom_number;
  c.velocity_z = velocity_z;
  c.validate();
  c.peak_density = atom_number / gaussian_cloud_volume(radius_x, radius_y, radius_z);
  return c;
}

void BeamModel::validate() const {
  if (!positive_finite(waist_x) || !positive_finite(waist_y)) {
    throw InvalidArgument("beam: waists must be positive and finite");
  }
  if (!(intensity_ratio >= 0.0)) throw InvalidArgument("beam: intensity ratio must be >= 0");
}

double PlateauModel::suppression(double detuning) const {
  const double x = 2.0 * detuning / width;
  return 1.0 - amplitude / (1.0 + x * x);
}

double GapTable::at(double d) const {
  if (detuning.empty() || detuning.size() != gap.size()) {
    throw InvalidArgument("gap table: detuning and gap columns must be non-empty and equal length");
  }
  if (d <= detuning.front()) return gap.front();
  if (d >= detuning.back()) return gap.back();
  const auto it = std::upper_bound(detuning.begin(), detuning.end(), d);
  const std::size_t hi = static_cast<std::size_t>(it - detuning.begin());
  const std::size_t lo = hi - 1;
  const double f = (d - detuning[lo]) / (detuning[hi] - detuning[lo]);
  return gap[lo] + f * (gap[hi] - gap[lo]);
}

void SpectrumScenario::validate() const {
  if (detunings.empty()) throw InvalidArgument("spectrum: detuning grid is empty");
  for (std::size_t i = 1; i < detunings.size(); ++i) {
    if (!(detunings[i] > detunings[i - 1])) {
      throw InvalidArgument("spectrum: detuning grid must be strictly increasing");
    }
  }
  if (const auto* table = std::get_if<GapTable>(&gap_policy)) {
    if (table->detuning.empty() || table->detuning.size() != table->gap.size()) {
      throw InvalidArgument("spectrum: malformed gap table");
    }
    for (std::size_t i = 1; i < table->detuning.size(); ++i) {
      if (!(table->detuning[i] > table->detuning[i - 1])) {
        throw InvalidArgument("spectrum: gap table detunings must be strictly increasing");
      }
    }
    for (double g : table->gap) {
      if (!(g >= 0.0)) throw InvalidArgument("spectrum: gap table entries must be >= 0");
    }
  } else if (!(std::get<double>(gap_policy) >= 0.0)) {
    throw InvalidArgument("spectrum: gap must be >= 0");
  }
  if (!(plateau.amplitude >= 0.0 && plateau.amplitude <= 1.0)) {
    throw InvalidArgument("spectrum: plateau amplitude outside [0, 1]");
  }
  if (!positive_finite(plateau.width)) throw InvalidArgument("spectrum: plateau width must be > 0");
}

double SpectrumScenario::gap_at(double detuning) const {
  if (const auto* table = std::get_if<GapTable>(&gap_policy)) return table->at(detuning);
  return std::get<double>(gap_policy);
}

std::vector<SpectrumPoint> spectrum(const SpectrumScenario& scenario, const LayerStack& substrate,
                                    const AtomicMedium& medium_template, const CloudModel& cloud,
                                    const PlaneWaveContext& ctx, int threads) {
  scenario.validate();
  cloud.validate();
  std::vector<SpectrumPoint> out(scenario.detunings.size());
  parallel_for(
      out.size(),
      [&](std::size_t i) {
        const double d = scenario.detunings[i];
        const AtomicMedium m =
            AtomicMedium::from_detuning(medium_template.transition(), d, cloud.peak_density);
        const AtomLayerGeometry geom{scenario.gap_at(d), scenario.atom_layer_thickness};
        out[i] = {d, delta_R_exact(substrate, m, geom, ctx) * scenario.plateau.suppression(d)};
      },
      threads);
  return out;
}

double dispersive_lineshape(const LineshapeFit& fit, double detuning) {
  return fano(fit.dispersive, fit.absorptive, fit.center, fit.width, detuning);
}

LineshapeFit fit_dispersive_lineshape(std::span<const SpectrumPoint> points) {
  if (points.size() < 5) throw InvalidArgument("lineshape fit: need at least 5 points");
  const auto [min_it, max_it] = std::minmax_element(
      points.begin(), points.end(),
      [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.delta_r < b.delta_r; });
  const double span = points.back().detuning - points.front().detuning;
  if (!(span > 0.0)) throw InvalidArgument("lineshape fit: detunings must span a range");
  const double peak = std::max(std::abs(min_it->delta_r), std::abs(max_it->delta_r));
  if (peak == 0.0) return {};

  // Fit in units of the grid span and the peak signal.
  const double d0 = 0.5 * (min_it->detuning + max_it->detuning);
  const double w0 = std::max(std::abs(max_it->detuning - min_it->detuning), span * 1e-3);
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const SpectrumPoint& s = points[static_cast<std::size_t>(i)];
      r(i) = fano(p(0), p(1), p(2), p(3), s.detuning / span) - s.delta_r / peak;
    }
  };

  LineshapeFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  const double amp0 = 0.5 * (max_it->delta_r - min_it->delta_r) / peak;
  for (double sign : {1.0, -1.0}) {
    for (double mix : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
      Eigen::VectorXd start(4);
      start << sign * amp0, mix * amp0, d0 / span, w0 / span;
      LeastSquaresResult r;
      try {
        r = levenberg_marquardt(residual, start, n);
      } catch (const NumericError&) {
        continue;
      }
      if (!std::isfinite(r.residual_norm) || r.residual_norm >= best_cost) continue;
      best_cost = r.residual_norm;
      best.dispersive = r.params(0) * peak;
      best.absorptive = r.params(1) * peak;
      best.center = r.params(2) * span;
      best.width = std::abs(r.params(3)) * span;
      best.residual_norm = r.residual_norm * peak;
    }
  }
  if (!std::isfinite(best_cost)) {
    throw NumericError("lineshape fit: no start converged");
  }
  return best;
}

TimeTrace synthesize_gaussian_trace(double height, double width, const TraceOptions& options) {
  if (!positive_finite(width)) throw InvalidArgument("trace: pulse width must be positive");
  if (!positive_finite(options.sample_rate)) {
    throw InvalidArgument("trace: sample rate must be positive");
  }
  if (!(options.tail_duration >= 4e-3)) {
    throw InvalidArgument("trace: noise tail must last at least 4 ms");
  }
  if (!(options.noise_rms >= 0.0)) throw InvalidArgument("trace: noise rms must be >= 0");
  if (!(options.lead_widths >= 0.0)) throw InvalidArgument("trace: lead must be >= 0");
  if (!(options.lowpass_cutoff >= 0.0)) throw InvalidArgument("trace: cutoff must be >= 0");

  const double dt = 1.0 / options.sample_rate;
  const double center = options.lead_widths * width;
  const double tail_start = center + 4.0 * width;
  const double end = tail_start + options.tail_duration;
  const auto samples = static_cast<std::size_t>(std::ceil(end / dt)) + 1;

  double sigma = options.noise_rms;
  if (options.noise == NoiseModel::shot) {
    if (!positive_finite(options.photons_per_sample) ||
        !(options.detection_efficiency > 0.0 && options.detection_efficiency <= 1.0) ||
        !(options.background_reflectivity >= 0.0)) {
      throw InvalidArgument("trace: shot-noise mode needs photons, efficiency and reflectivity");
    }
    sigma = std::sqrt(options.background_reflectivity /
                      (options.detection_efficiency * options.photons_per_sample));
  }

  TimeTrace t;
  t.time.resize(samples);
  t.value.resize(samples);
  t.injected_height = height;
  t.injected_center = center;
  t.injected_width = width;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  t.tail_begin = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const double time = static_cast<double>(i) * dt;
    const double u = (time - center) / width;
    t.time[i] = time;
    t.value[i] = height * std::exp(-2.0 * u * u) + sigma * noise(rng);
    if (t.tail_begin == samples && time >= tail_start) t.tail_begin = i;
  }
  if (options.lowpass_cutoff > 0.0) {
    const double rc = 1.0 / (2.0 * kPi * options.lowpass_cutoff);
    const double alpha = dt / (rc + dt);
    double y = t.value.front();
    for (double& v : t.value) {
      y += alpha * (v - y);
      v = y;
    }
  }
  return t;
}

TimeTrace synthesize_time_trace(const CloudModel& cloud, const BeamModel& beam,
                                const LayerStack& substrate, const AtomicMedium& medium,
                                const AtomLayerGeometry& geometry, const PlaneWaveContext& ctx,
                                TraceOptions options) {
  cloud.validate();
  beam.validate();
  const auto response = [&](double rho) {
    return delta_R_exact(substrate, medium.with_density(rho), geometry, ctx);
  };
  const double center = response(cloud.peak_density);
  const double height =
      center == 0.0 ? 0.0 : center / overlap_average_factor(cloud, beam, response);
  if (options.noise == NoiseModel::shot && options.background_reflectivity == 0.0) {
    options.background_reflectivity = reflectivity(substrate, ctx);
  }
  return synthesize_gaussian_trace(height, cloud.radius_z / cloud.velocity_z, options);
}

GaussianPeakFit fit_gaussian_peak(const TimeTrace& trace) {
  const std::size_t n = trace.value.size();
  if (n < 8 || trace.time.size() != n) throw InvalidArgument("peak fit: trace too short");
  if (trace.tail_begin + 2 > n) throw InvalidArgument("peak fit: trace has no noise tail");

  GaussianPeakFit out;
  double mean = 0.0;
  for (std::size_t i = trace.tail_begin; i < n; ++i) mean += trace.value[i];
  const double tail_n = static_cast<double>(n - trace.tail_begin);
  mean /= tail_n;
  double var = 0.0;
  for (std::size_t i = trace.tail_begin; i < n; ++i) {
    var += (trace.value[i] - mean) * (trace.value[i] - mean);
  }
  out.noise_std = std::sqrt(var / (tail_n - 1.0));

  std::size_t peak_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(trace.value[i] - mean) > std::abs(trace.value[peak_i] - mean)) peak_i = i;
  }
  const double h0 = trace.value[peak_i] - mean;
  if (h0 == 0.0) {
    out.offset = mean;
    return out;
  }
  const double level = std::abs(h0) * std::exp(-2.0);
  std::size_t lo = peak_i;
  std::size_t hi = peak_i;
  while (lo > 0 && std::abs(trace.value[lo] - mean) > level) --lo;
  while (hi + 1 < n && std::abs(trace.value[hi] - mean) > level) ++hi;
  const double dt = trace.time[1] - trace.time[0];
  const double w0 = std::max(0.5 * (trace.time[hi] - trace.time[lo]), 2.0 * dt);
  const double t0 = trace.time[peak_i];

  const double scale = std::abs(h0);
  auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (trace.time[i] - p(2) * w0) / (p(3) * w0);
      r(static_cast<Eigen::Index>(i)) =
          p(0) + p(1) * std::exp(-2.0 * u * u) - trace.value[i] / scale;
    }
  };
  Eigen::VectorXd start(4);
  start << mean / scale, h0 / scale, t0 / w0, 1.0;
  const LeastSquaresResult r =
      levenberg_marquardt(residual, start, static_cast<Eigen::Index>(n), {500, 1e-12, 1e-30});
  out.offset = r.params(0) * scale;
  out.height = r.params(1) * scale;
  out.center = r.params(2) * w0;
  out.width = std::abs(r.params(3)) * w0;
  out.residual_norm = r.residual_norm * scale;
  out.snr = out.noise_std > 0.0 ? std::abs(out.height) / out.noise_std
                                : std::numeric_limits<double>::infinity();
  return out;
}

SliceCount detected_atoms_in_slice(const CloudModel& cloud, const LayerStack& substrate,
                                   const PlaneWaveContext& ctx) {
  cloud.validate();
  const double kappa = gap_response(substrate, ctx, 0.0).kappa;
  SliceCount out;
  out.thickness = 1.0 / kappa;
  out.atoms = cloud.peak_density * kPi * cloud.radius_x * cloud.radius_y / 2.0 * out.thickness;
  return out;
}

double overlap_average_factor(const CloudModel& cloud, const BeamModel& beam) {
  return overlap_average_factor(cloud, beam, [](double rho) { return rho; });
}

double overlap_average_factor(const CloudModel& cloud, const BeamModel& beam,
                              const std::function<double(double)>& response) {
  cloud.validate();
  beam.validate();
  const double center = response(cloud.peak_density);
  if (center == 0.0) throw InvalidArgument("overlap: response vanishes at the cloud center");
  const double sx = std::min(cloud.radius_x, beam.waist_x);
  const double sy = std::min(cloud.radius_y, beam.waist_y);
  const auto weighted = [&](double x) {
    const double ix = std::exp(-2.0 * x * x / (beam.waist_x * beam.waist_x));
    const double cx = std::exp(-2.0 * x * x / (cloud.radius_x * cloud.radius_x));
    return ix * even_integral(
                    [&](double y) {
                      const double iy = std::exp(-2.0 * y * y / (beam.waist_y * beam.waist_y));
                      const double cy =
                          std::exp(-2.0 * y * y / (cloud.radius_y * cloud.radius_y));
                      return iy * response(cloud.peak_density * cx * cy);
                    },
                    sy, 1e-11, center * sy);
  };
  const double numerator = even_integral(weighted, sx, 1e-9, center * sx * sy);
  // Beam normalization: integral of exp(-2 x^2 / w^2) over the line.
  const double norm = kPi / 2.0 * beam.waist_x * beam.waist_y;
  const double average = numerator / norm;
  if (average == 0.0) throw NumericError("overlap: beam-weighted response vanishes");
  return center / average;
}

DensityMap gaussian_cloud_map(const CloudModel& cloud, std::size_t rows, std::size_t cols,
                              double pitch) {
  cloud.validate();
  if (rows == 0 || cols == 0) throw InvalidArgument("density map: empty grid");
  if (!positive_finite(pitch)) throw InvalidArgument("density map: pitch must be positive");
  DensityMap m{rows, cols, pitch, std::vector<double>(rows * cols)};
  const double r0 = 0.5 * static_cast<double>(rows - 1);
  const double c0 = 0.5 * static_cast<double>(cols - 1);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = (static_cast<double>(r) - r0) * pitch;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = (static_cast<double>(c) - c0) * pitch;
      m.at(r, c) = cloud.peak_density *
                   std::exp(-2.0 * x * x / (cloud.radius_x * cloud.radius_x) -
                            2.0 * y * y / (cloud.radius_y * cloud.radius_y));
    }
  }
  return m;
}

std::vector<double> gaussian_blur(std::span<const double> values, std::size_t rows,
                                  std::size_t cols, double sigma_pixels) {
  if (values.size() != rows * cols) throw InvalidArgument("blur: size does not match grid");
  if (!(sigma_pixels > 0.0)) return {values.begin(), values.end()};
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_pixels));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double u = static_cast<double>(k) / sigma_pixels;
    kernel[static_cast<std::size_t>(k + radius)] = std::exp(-0.5 * u * u);
  }
  // Weights are renormalized over in-bounds samples so flat images stay flat.
  auto pass = [&](const std::vector<double>& in, std::size_t outer, std::size_t inner,
                  auto index) {
    std::vector<double> out(in.size());
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        double sum = 0.0;
        double wsum = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
          const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
          if (j < 0 || j >= static_cast<std::ptrdiff_t>(inner)) continue;
          const double w = kernel[static_cast<std::size_t>(k + radius)];
          sum += w * in[index(o, static_cast<std::size_t>(j))];
          wsum += w;
        }
        out[index(o, i)] = sum / wsum;
      }
    }
    return out;
  };
  std::vector<double> buf(values.begin(), values.end());
  buf = pass(buf, rows, cols, [cols](std::size_t r, std::size_t c) { return r * cols + c; });
  buf = pass(buf, cols, rows, [cols](std::size_t c, std::size_t r) { return r * cols + c; });
  return buf;
}

ImageMap dispersive_image(const DensityMap& map, const LayerStack& substrate,
                          const AtomicMedium& medium, double gap, const PlaneWaveContext& ctx,
                          const ImageOptions& options) {
  if (map.density.size() != map.rows * map.cols || map.density.empty()) {
    throw InvalidArgument("image: density map size does not match its grid");
  }
  if (!(gap >= 0.0)) throw InvalidArgument("image: gap must be >= 0");
  if (!(options.blur_fwhm >= 0.0)) throw InvalidArgument("image: blur FWHM must be >= 0");
  gap_response(substrate, ctx, gap);  // fail early on non-evanescent geometry

  ImageMap img{map.rows, map.cols, map.pitch, std::vector<double>(map.density.size())};
  parallel_for(
      img.values.size(),
      [&](std::size_t i) {
        const double rho = map.density[i];
        if (rho == 0.0) return;
        if (options.response == PixelResponse::exact) {
          img.values[i] =
              delta_R_exact(substrate, medium.with_density(rho), {gap, kSemiInfinite}, ctx);
        } else {
          img.values[i] =
              delta_R_profile(substrate, medium, DensityProfile::uniform_slab(rho, gap), ctx);
        }
      },
      options.threads);
  if (options.blur_fwhm > 0.0) {
    const double sigma = options.blur_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))) / map.pitch;
    img.values = gaussian_blur(img.values, img.rows, img.cols, sigma);
  }
  return img;
}

}  // namespace plasmondet
