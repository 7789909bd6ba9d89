#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plasmondet/detection_metrics.hpp"
#include "plasmondet/spectra_imaging.hpp"

// Run configuration: flat "key = value" text with '#' comments.
// Precedence: built-in defaults < --config file < --set overrides.
namespace plasmondet {

class Config {
 public:
  // Built-in defaults (configs/default.cfg compiled in). Its keys are the
  // complete set of accepted keys.
  static Config defaults();

  // Merges "key = value" lines; unknown keys and malformed lines throw
  // ConfigError naming the origin and line.
  void merge_text(std::string_view text, std::string_view origin);
  void merge_file(const std::filesystem::path& path);
  // "key=value" as given on the command line.
  void set_assignment(std::string_view assignment);
  void set(std::string_view key, std::string_view value);

  bool has(std::string_view key) const;
  const std::string& raw(std::string_view key) const;
  std::span<const std::pair<std::string, std::string>> entries() const { return entries_; }

  // "key = value" for every entry, in default-file order.
  std::vector<std::string> lines() const;

  // Rebuilds a configuration from output header lines: defaults plus every
  // line that parses as a known "key = value".
  static Config from_header(std::span<const std::string> header);

 private:
  std::pair<std::string, std::string>* find(std::string_view key);
  const std::pair<std::string, std::string>* find(std::string_view key) const;
  std::vector<std::pair<std::string, std::string>> entries_;
};

enum class SweepScale { linear, log };

struct SweepSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  SweepScale scale = SweepScale::linear;

  std::vector<double> values() const;
};

// "0.18+4.9i", "1.51", "-2e-3i"; nullopt on malformed text.
std::optional<complex> parse_complex(std::string_view text);
std::string format_complex(complex z);

// Directory holding <name>.nk tables: $PLASMONDET_MATERIALS or the
// source-tree data directory.
std::filesystem::path materials_directory();
// Linear interpolation of a "wavelength_nm n k" table.
complex material_index(std::string_view name, double vacuum_wavelength);

struct SpectrumSettings {
  SweepSpec detuning;  // rad/s
  double density = 0.0;
  double gap = 0.0;
  std::optional<GapTable> gap_table;
  PlateauModel plateau;
  bool fit = true;
};

struct TraceSettings {
  double gap = 0.0;
  double detuning = 0.0;  // rad/s
  TraceOptions options;
  bool fit = true;
};

struct ImageSettings {
  double gap = 0.0;
  double detuning = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double pitch = 0.0;
  ImageOptions options;
  std::string png;  // empty: no PNG
};

enum class OutputFormat { csv, matrix };

// Typed, SI-unit view of a Config.
struct RunConfig {
  double wavelength = 0.0;
  double incidence_index = 0.0;
  complex metal_index;
  double metal_thickness = 0.0;
  complex exit_index{1.0, 0.0};
  std::vector<std::pair<std::string, complex>> resolved_materials;  // key -> index

  AtomicTransition transition;
  double density = 0.0;
  double detuning_ratio = 0.0;
  AtomLayerGeometry geometry;

  std::optional<double> angle;  // nullopt: automatic
  double efficiency = 1.0;
  double max_absorbed_photons = 1.0;

  SweepSpec angle_sweep;    // rad
  SweepSpec qnd_density;    // m^-3
  SweepSpec qnd_detuning;   // delta / Gamma
  double qnd_window = 0.0;  // rad

  SpectrumSettings spectrum;
  CloudModel cloud;
  BeamModel beam;
  TraceSettings trace;
  ImageSettings image;

  std::uint64_t seed = 1;
  int threads = 0;
  OutputFormat format = OutputFormat::csv;

  LayerStack stack() const;
  AtomicMedium medium() const;
};

// Validates every field and throws ConfigValidationError listing all
// offending keys before any computation starts.
RunConfig resolve_config(const Config& config);

}  // namespace plasmondet
