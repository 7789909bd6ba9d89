#include "plasmondet/commands.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "plasmondet/errors.hpp"
#include "plasmondet/parallel.hpp"
#include "plasmondet/units.hpp"

namespace plasmondet {
namespace {

std::string note(std::string_view name, double value) {
  return "note: " + std::string(name) + " = " + format_double(value);
}

AngleWindow window_of(const RunConfig& config, const LayerStack& stack) {
  return evanescent_angle_window(stack, config.qnd_window);
}

}  // namespace

double probe_angle(const RunConfig& config) {
  if (config.angle) return *config.angle;
  const LayerStack stack = config.stack();
  const AngleWindow w = window_of(config, stack);
  return find_resonance_angle(stack, w.lo, w.hi);
}

CommandResult run_angle_sweep(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const AtomicMedium medium = config.medium();
  const std::vector<double> angles = config.angle_sweep.values();
  CommandResult res;
  res.command = "angle-sweep";
  res.table.columns = {"theta_deg", "R_no_atoms", "R_with_atoms", "delta_R", "N_max"};
  res.table.rows.resize(angles.size());
  parallel_for(
      angles.size(),
      [&](std::size_t i) {
        const PlaneWaveContext ctx(angles[i]);
        const double r0 = reflectivity(stack, ctx);
        const double r = medium.density() == 0.0
                             ? r0
                             : reflectivity_with_atoms(stack, medium, config.geometry, ctx);
        double n_max = std::numeric_limits<double>::quiet_NaN();
        try {
          n_max = qnd_max_atoms(stack, medium, config.geometry, ctx, config.efficiency);
        } catch (const NotEvanescent&) {
        }
        res.table.rows[i] = {units::to_deg(angles[i]), r0, r, r - r0, n_max};
      },
      config.threads);

  const AngleWindow w = window_of(config, stack);
  res.notes.push_back(note("theta_sp_deg", units::to_deg(find_resonance_angle(stack, w.lo, w.hi))));
  if (medium.density() > 0.0) {
    const QndOptimum best =
        maximize_qnd_over_angle(stack, medium, config.geometry, config.efficiency, w);
    res.notes.push_back(note("N_max_peak", best.n_max));
    res.notes.push_back(note("N_max_peak_theta_deg", units::to_deg(best.angle)));
  }
  return res;
}

CommandResult run_qnd_map(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const AngleWindow w = window_of(config, stack);
  const std::vector<double> densities = config.qnd_density.values();
  const std::vector<double> detunings = config.qnd_detuning.values();
  CommandResult res;
  res.command = "qnd-map";
  res.table.columns = {"density_cm3", "detuning_gamma", "theta_deg", "N_max"};
  res.table.rows.resize(densities.size() * detunings.size());
  parallel_for(
      res.table.rows.size(),
      [&](std::size_t i) {
        const double rho = densities[i / detunings.size()];
        const double ratio = detunings[i % detunings.size()];
        const AtomicMedium medium(config.transition, ratio, rho);
        double theta = std::numeric_limits<double>::quiet_NaN();
        double n_max = 0.0;
        if (rho > 0.0) {
          const QndOptimum best =
              maximize_qnd_over_angle(stack, medium, config.geometry, config.efficiency, w);
          theta = units::to_deg(best.angle);
          n_max = best.n_max;
        }
        res.table.rows[i] = {units::to_per_cm3(rho), ratio, theta, n_max};
      },
      config.threads);
  return res;
}

CommandResult run_spectrum(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const PlaneWaveContext ctx(probe_angle(config));
  SpectrumScenario scenario;
  scenario.detunings = config.spectrum.detuning.values();
  scenario.plateau = config.spectrum.plateau;
  scenario.atom_layer_thickness = config.geometry.thickness;
  if (config.spectrum.gap_table) {
    scenario.gap_policy = *config.spectrum.gap_table;
  } else {
    scenario.gap_policy = config.spectrum.gap;
  }
  CloudModel cloud = config.cloud;
  cloud.peak_density = config.spectrum.density;
  const AtomicMedium tmpl(config.transition, 0.0, 0.0);
  const std::vector<SpectrumPoint> points =
      spectrum(scenario, stack, tmpl, cloud, ctx, config.threads);

  CommandResult res;
  res.command = "spectrum";
  res.table.columns = {"detuning_MHz", "gap_nm", "delta_R"};
  for (const auto& p : points) {
    res.table.rows.push_back(
        {units::to_mhz(p.detuning), units::to_nm(scenario.gap_at(p.detuning)), p.delta_r});
  }
  res.notes.push_back(note("theta_deg", units::to_deg(ctx.incidence_angle())));
  if (config.spectrum.fit && points.size() >= 5) {
    const LineshapeFit fit = fit_dispersive_lineshape(points);
    res.notes.push_back(note("fit_width_MHz", units::to_mhz(fit.width)));
    res.notes.push_back(note("fit_center_MHz", units::to_mhz(fit.center)));
    res.notes.push_back(note("fit_dispersive", fit.dispersive));
    res.notes.push_back(note("fit_absorptive", fit.absorptive));
  }
  return res;
}

CommandResult run_trace(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const PlaneWaveContext ctx(probe_angle(config));
  const AtomicMedium medium =
      AtomicMedium::from_detuning(config.transition, config.trace.detuning,
                                  config.cloud.peak_density);
  const AtomLayerGeometry geometry{config.trace.gap, config.geometry.thickness};
  const TimeTrace trace = synthesize_time_trace(config.cloud, config.beam, stack, medium,
                                                geometry, ctx, config.trace.options);
  CommandResult res;
  res.command = "trace";
  res.table.columns = {"time_s", "delta_R"};
  for (std::size_t i = 0; i < trace.time.size(); ++i) {
    res.table.rows.push_back({trace.time[i], trace.value[i]});
  }
  res.notes.push_back(note("theta_deg", units::to_deg(ctx.incidence_angle())));
  res.notes.push_back(note("injected_height", trace.injected_height));
  res.notes.push_back(note("injected_width_s", trace.injected_width));
  res.notes.push_back(note("tail_begin_s", trace.time[trace.tail_begin]));
  const SliceCount slice = detected_atoms_in_slice(config.cloud, stack, ctx);
  res.notes.push_back(note("slice_thickness_nm", units::to_nm(slice.thickness)));
  res.notes.push_back(note("N_det", slice.atoms));
  if (config.trace.fit) {
    const GaussianPeakFit fit = fit_gaussian_peak(trace);
    res.notes.push_back(note("fit_height", fit.height));
    res.notes.push_back(note("fit_width_s", fit.width));
    res.notes.push_back(note("fit_noise_std", fit.noise_std));
    res.notes.push_back(note("fit_snr", fit.snr));
    if (fit.snr > 0.0) {
      res.notes.push_back(note("delta_N", atom_number_resolution(slice.atoms, fit.snr)));
    }
  }
  return res;
}

CommandResult run_image(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const PlaneWaveContext ctx(probe_angle(config));
  const AtomicMedium medium =
      AtomicMedium::from_detuning(config.transition, config.image.detuning, 0.0);
  const DensityMap map =
      gaussian_cloud_map(config.cloud, config.image.rows, config.image.cols, config.image.pitch);
  ImageMap img = dispersive_image(map, stack, medium, config.image.gap, ctx, config.image.options);

  CommandResult res;
  res.command = "image";
  res.table.columns = {"x_um", "y_um", "delta_R"};
  const double r0 = 0.5 * static_cast<double>(img.rows - 1);
  const double c0 = 0.5 * static_cast<double>(img.cols - 1);
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      res.table.rows.push_back({units::to_um((static_cast<double>(c) - c0) * img.pitch),
                                units::to_um((static_cast<double>(r) - r0) * img.pitch),
                                img.at(r, c)});
    }
  }
  res.notes.push_back(note("theta_deg", units::to_deg(ctx.incidence_angle())));
  res.notes.push_back(note("pitch_um", units::to_um(img.pitch)));
  res.image = std::move(img);
  return res;
}

CommandResult run_resonance(const RunConfig& config) {
  const LayerStack stack = config.stack();
  const AngleWindow w = window_of(config, stack);
  const double theta = find_resonance_angle(stack, w.lo, w.hi);
  const PlaneWaveContext ctx(theta);
  const GapResponse g = gap_response(stack, ctx, 0.0);
  CommandResult res;
  res.command = "resonance";
  res.table.columns = {"theta_sp_deg", "R_min", "t2_surface", "critical_angle_deg",
                       "decay_length_nm"};
  res.table.rows.push_back({units::to_deg(theta), reflectivity(stack, ctx), g.surface_enhancement,
                            units::to_deg(stack.critical_angle()), units::to_nm(1.0 / g.kappa)});
  return res;
}

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names = {"angle-sweep", "qnd-map", "spectrum",
                                                      "trace",       "image",   "resonance"};
  return names;
}

CommandResult run_command(std::string_view name, const RunConfig& config) {
  if (name == "angle-sweep") return run_angle_sweep(config);
  if (name == "qnd-map") return run_qnd_map(config);
  if (name == "spectrum") return run_spectrum(config);
  if (name == "trace") return run_trace(config);
  if (name == "image") return run_image(config);
  if (name == "resonance") return run_resonance(config);
  throw InvalidArgument("unknown command '" + std::string(name) + "'");
}

std::vector<std::string> result_header(const Config& config, const RunConfig& resolved,
                                       const CommandResult& result) {
  std::vector<std::string> h;
  h.push_back("plasmondet " + result.command);
  for (auto& line : config.lines()) h.push_back(std::move(line));
  for (const auto& [key, n] : resolved.resolved_materials) {
    h.push_back("material " + key + " = " + format_complex(n));
  }
  h.insert(h.end(), result.notes.begin(), result.notes.end());
  return h;
}

void write_result(std::ostream& out, const Config& config, const RunConfig& resolved,
                  const CommandResult& result) {
  const std::vector<std::string> header = result_header(config, resolved, result);
  if (resolved.format == OutputFormat::csv) {
    write_csv(out, result.table, header);
  } else if (result.image) {
    write_matrix(out, result.image->rows, result.image->cols, result.image->pitch,
                 result.image->values, header);
  } else {
    write_matrix(out, result.table, header);
  }
}

}  // namespace plasmondet
