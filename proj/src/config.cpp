#include "plasmondet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "plasmondet/errors.hpp"
#include "plasmondet/io.hpp"
#include "plasmondet/units.hpp"

#ifndef PLASMONDET_MATERIALS_DIR
#define PLASMONDET_MATERIALS_DIR "data/materials"
#endif

namespace plasmondet {

extern const std::string_view kDefaultConfigText;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Assignment {
  std::string key;
  std::string value;
};

// nullopt for blank or comment-only lines; throws on a malformed line.
std::optional<Assignment> parse_line(std::string_view line, std::string_view origin,
                                     std::size_t number) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  line = trim(line);
  if (line.empty()) return std::nullopt;
  const auto eq = line.find('=');
  const std::string where = std::string(origin) + ":" + std::to_string(number);
  if (eq == std::string_view::npos) {
    throw ConfigError("", where + ": expected 'key = value'");
  }
  Assignment a{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
  if (a.key.empty()) throw ConfigError("", where + ": empty key");
  if (a.value.empty()) throw ConfigError(a.key, where + ": empty value");
  return a;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) return std::nullopt;
  return v;
}

bool valid_material_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// Reads typed values, recording one issue per bad key.
class Reader {
 public:
  explicit Reader(const Config& c) : c_(c) {}

  const std::vector<ConfigIssue>& issues() const { return issues_; }
  void issue(std::string key, std::string message) {
    issues_.push_back({std::move(key), std::move(message)});
  }

  const std::string& raw(const std::string& key) const { return c_.raw(key); }

  double number(const std::string& key) {
    const auto v = parse_real(c_.raw(key));
    if (!v || std::isnan(*v)) {
      issue(key, "expected a number, got '" + c_.raw(key) + "'");
      return std::nan("");
    }
    return *v;
  }

  double finite(const std::string& key) {
    const double v = number(key);
    if (!std::isnan(v) && !std::isfinite(v)) issue(key, "must be finite");
    return v;
  }

  double positive(const std::string& key) {
    const double v = finite(key);
    if (std::isfinite(v) && !(v > 0.0)) issue(key, "must be > 0");
    return v;
  }

  double nonnegative(const std::string& key) {
    const double v = finite(key);
    if (std::isfinite(v) && v < 0.0) issue(key, "must be >= 0");
    return v;
  }

  double in_range(const std::string& key, double lo, double hi) {
    const double v = finite(key);
    if (std::isfinite(v) && !(v >= lo && v <= hi)) {
      issue(key, "must lie in [" + format_double(lo) + ", " + format_double(hi) + "]");
    }
    return v;
  }

  long long integer(const std::string& key, long long lo, long long hi) {
    const std::string& s = c_.raw(key);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      issue(key, "expected an integer, got '" + s + "'");
      return lo;
    }
    if (v < lo || v > hi) {
      issue(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return lo;
    }
    return v;
  }

  std::size_t choice(const std::string& key, std::initializer_list<std::string_view> options) {
    const std::string& s = c_.raw(key);
    std::size_t i = 0;
    std::string list;
    for (auto o : options) {
      if (s == o) return i;
      list += (i ? "|" : "") + std::string(o);
      ++i;
    }
    issue(key, "expected one of " + list + ", got '" + s + "'");
    return 0;
  }

  bool flag(const std::string& key) {
    const std::string& s = c_.raw(key);
    if (s == "yes" || s == "true" || s == "on" || s == "1") return true;
    if (s == "no" || s == "false" || s == "off" || s == "0") return false;
    issue(key, "expected yes|no, got '" + s + "'");
    return false;
  }

  std::optional<std::string> path_or_none(const std::string& key) {
    const std::string& s = c_.raw(key);
    if (s == "none") return std::nullopt;
    return s;
  }

  complex index(const std::string& key, double wavelength,
                std::vector<std::pair<std::string, complex>>& resolved) {
    const std::string& s = c_.raw(key);
    if (!s.empty() && s.front() == '@') {
      if (!std::isfinite(wavelength)) return {1.0, 0.0};
      try {
        const complex n = material_index(std::string_view(s).substr(1), wavelength);
        resolved.emplace_back(key, n);
        return n;
      } catch (const ConfigError& e) {
        issue(key, e.what());
        return {1.0, 0.0};
      }
    }
    const auto z = parse_complex(s);
    if (!z) {
      issue(key, "expected a complex index like 0.18+4.9i or @material, got '" + s + "'");
      return {1.0, 0.0};
    }
    return *z;
  }

  SweepSpec sweep(const std::string& prefix, const std::string& unit, double factor,
                  bool angular_frequency = false) {
    SweepSpec s;
    const double lo = finite(prefix + ".min_" + unit);
    const double hi = finite(prefix + ".max_" + unit);
    s.points = static_cast<int>(integer(prefix + ".points", 1, 1000000));
    s.scale = choice(prefix + ".scale", {"linear", "log"}) == 0 ? SweepScale::linear
                                                                 : SweepScale::log;
    const double scale = angular_frequency ? units::from_mhz(1.0) : factor;
    s.min = lo * scale;
    s.max = hi * scale;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      if (s.points > 1 && !(hi > lo)) issue(prefix + ".max_" + unit, "must exceed the minimum");
      if (s.scale == SweepScale::log && !(lo > 0.0)) {
        issue(prefix + ".min_" + unit, "log sweep needs a positive minimum");
      }
    }
    return s;
  }

 private:
  const Config& c_;
  std::vector<ConfigIssue> issues_;
};

GapTable load_gap_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("spectrum.gap_table", "cannot open '" + path + "'");
  GapTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double d = 0.0, g = 0.0;
    if (!(ls >> d)) continue;
    if (!(ls >> g)) throw ConfigError("spectrum.gap_table", "malformed row in '" + path + "'");
    t.detuning.push_back(units::from_mhz(d));
    t.gap.push_back(units::from_nm(g));
  }
  if (t.detuning.empty()) throw ConfigError("spectrum.gap_table", "no rows in '" + path + "'");
  return t;
}

}  // namespace

Config Config::defaults() {
  Config c;
  std::istringstream in{std::string(kDefaultConfigText)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto a = parse_line(line, "defaults", n)) {
      if (c.find(a->key)) throw ConfigError(a->key, "duplicate default");
      c.entries_.emplace_back(std::move(a->key), std::move(a->value));
    }
  }
  return c;
}

std::pair<std::string, std::string>* Config::find(std::string_view key) {
  for (auto& e : entries_) {
    if (e.first == key) return &e;
  }
  return nullptr;
}

const std::pair<std::string, std::string>* Config::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return &e;
  }
  return nullptr;
}

void Config::merge_text(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto a = parse_line(line, origin, n);
    if (!a) continue;
    auto* e = find(a->key);
    if (!e) {
      throw ConfigError(a->key,
                        "unknown key (" + std::string(origin) + ":" + std::to_string(n) + ")");
    }
    e->second = a->value;
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str(), path.string());
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("", "--set expects key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(std::string_view key, std::string_view value) {
  auto* e = find(key);
  if (!e) throw ConfigError(std::string(key), "unknown key");
  if (trim(value).empty()) throw ConfigError(std::string(key), "empty value");
  e->second = std::string(trim(value));
}

bool Config::has(std::string_view key) const { return find(key) != nullptr; }

const std::string& Config::raw(std::string_view key) const {
  const auto* e = find(key);
  if (!e) throw ConfigError(std::string(key), "unknown key");
  return e->second;
}

std::vector<std::string> Config::lines() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k + " = " + v);
  return out;
}

Config Config::from_header(std::span<const std::string> header) {
  Config c = defaults();
  for (const auto& line : header) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (auto* e = c.find(key); e && !value.empty()) e->second = std::string(value);
  }
  return c;
}

std::vector<double> SweepSpec::values() const {
  if (points < 1) throw InvalidArgument("sweep: points must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(points));
  if (points == 1) {
    v[0] = min;
    return v;
  }
  const double steps = static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / steps;
    v[static_cast<std::size_t>(i)] = scale == SweepScale::linear
                                         ? min + f * (max - min)
                                         : std::exp(std::log(min) + f * std::log(max / min));
  }
  v.back() = max;
  return v;
}

std::optional<complex> parse_complex(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i' && s.back() != 'j') {
    const auto v = parse_real(s);
    if (!v || !std::isfinite(*v)) return std::nullopt;
    return complex(*v, 0.0);
  }
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::optional<double> re = 0.0;
  std::string im_text = s;
  if (split != std::string::npos) {
    re = parse_real(s.substr(0, split));
    im_text = s.substr(split);
  }
  if (im_text == "+" || im_text == "-" || im_text.empty()) im_text += "1";
  const auto im = parse_real(im_text);
  if (!re || !im || !std::isfinite(*re) || !std::isfinite(*im)) return std::nullopt;
  return complex(*re, *im);
}

std::string format_complex(complex z) {
  std::string s = format_double(z.real());
  if (z.imag() >= 0.0 && !std::signbit(z.imag())) s += "+";
  return s + format_double(z.imag()) + "i";
}

std::filesystem::path materials_directory() {
  if (const char* env = std::getenv("PLASMONDET_MATERIALS"); env && *env) return env;
  return PLASMONDET_MATERIALS_DIR;
}

complex material_index(std::string_view name, double vacuum_wavelength) {
  if (!valid_material_name(name)) {
    throw ConfigError("", "invalid material name '" + std::string(name) + "'");
  }
  const auto path = materials_directory() / (std::string(name) + ".nk");
  std::ifstream in(path);
  if (!in) throw ConfigError("", "material table '" + path.string() + "' not found");
  std::vector<double> wl, n, k;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a = 0.0, b = 0.0, c = 0.0;
    if (!(ls >> a)) continue;
    if (!(ls >> b >> c)) throw ConfigError("", "malformed row in '" + path.string() + "'");
    if (!wl.empty() && !(a > wl.back())) {
      throw ConfigError("", "wavelengths must increase in '" + path.string() + "'");
    }
    wl.push_back(a);
    n.push_back(b);
    k.push_back(c);
  }
  const double nm = units::to_nm(vacuum_wavelength);
  if (wl.empty() || nm < wl.front() || nm > wl.back()) {
    throw ConfigError("", "wavelength " + format_double(nm) + " nm outside table '" +
                              path.string() + "'");
  }
  std::size_t hi = 1;
  while (hi < wl.size() - 1 && wl[hi] < nm) ++hi;
  if (wl.size() == 1) return {n[0], k[0]};
  const std::size_t lo = hi - 1;
  const double f = (nm - wl[lo]) / (wl[hi] - wl[lo]);
  return {n[lo] + f * (n[hi] - n[lo]), k[lo] + f * (k[hi] - k[lo])};
}

LayerStack RunConfig::stack() const {
  return LayerStack({Layer::half_space(incidence_index), Layer::film(metal_index, metal_thickness),
                     Layer::half_space(exit_index)},
                    wavelength);
}

AtomicMedium RunConfig::medium() const { return AtomicMedium(transition, detuning_ratio, density); }

RunConfig resolve_config(const Config& config) {
  using namespace units;
  Reader r(config);
  RunConfig c;

  c.wavelength = from_nm(r.positive("stack.wavelength_nm"));
  c.incidence_index = r.positive("stack.incidence_index");
  c.metal_index = r.index("stack.metal", c.wavelength, c.resolved_materials);
  c.metal_thickness = from_nm(r.nonnegative("stack.metal_thickness_nm"));
  c.exit_index = r.index("stack.exit_index", c.wavelength, c.resolved_materials);
  if (c.metal_index.imag() < 0.0) r.issue("stack.metal", "Im(n) must be >= 0");
  if (std::abs(c.exit_index - complex(1.0, 0.0)) > 1e-12) {
    r.issue("stack.exit_index", "atoms need a vacuum exit medium (1)");
  }
  if (std::isfinite(c.incidence_index) && c.incidence_index <= 1.0) {
    r.issue("stack.incidence_index", "must exceed 1 for an evanescent exit field");
  }

  c.transition.vacuum_wavelength = c.wavelength;
  c.transition.natural_linewidth = from_mhz(r.positive("atoms.linewidth_MHz"));
  c.density = from_per_cm3(r.nonnegative("atoms.density_cm3"));
  c.detuning_ratio = r.finite("atoms.detuning_gamma");
  c.geometry.gap = from_nm(r.nonnegative("atoms.gap_nm"));
  {
    const double t = r.number("atoms.thickness_nm");
    if (!(t > 0.0)) r.issue("atoms.thickness_nm", "must be > 0 or inf");
    c.geometry.thickness = std::isinf(t) ? kSemiInfinite : from_nm(t);
  }

  if (r.raw("probe.angle_deg") != "auto") {
    const double a = r.finite("probe.angle_deg");
    if (std::isfinite(a) && !(a >= 0.0 && a < 90.0)) {
      r.issue("probe.angle_deg", "must lie in [0, 90) or be auto");
    }
    c.angle = from_deg(a);
  }
  c.efficiency = r.in_range("probe.efficiency", 0.0, 1.0);
  c.max_absorbed_photons = r.nonnegative("probe.max_absorbed_photons");

  c.angle_sweep = r.sweep("angle", "deg", from_deg(1.0));
  if (std::isfinite(c.angle_sweep.min) && (c.angle_sweep.min < 0.0 ||
                                           c.angle_sweep.max >= units::pi / 2)) {
    r.issue("angle.min_deg", "angles must lie in [0, 90)");
  }
  c.qnd_density = r.sweep("qnd.density", "cm3", from_per_cm3(1.0));
  if (c.qnd_density.min < 0.0) r.issue("qnd.density.min_cm3", "must be >= 0");
  c.qnd_detuning = r.sweep("qnd.detuning", "gamma", 1.0);
  c.qnd_window = from_deg(r.in_range("qnd.window_deg", 1e-3, 45.0));

  c.spectrum.detuning = r.sweep("spectrum.detuning", "MHz", 1.0, true);
  c.spectrum.density = from_per_cm3(r.nonnegative("spectrum.density_cm3"));
  c.spectrum.gap = from_nm(r.nonnegative("spectrum.gap_nm"));
  if (const auto path = r.path_or_none("spectrum.gap_table")) {
    try {
      c.spectrum.gap_table = load_gap_table(*path);
    } catch (const ConfigError& e) {
      r.issue("spectrum.gap_table", e.what());
    }
  }
  c.spectrum.plateau.amplitude = r.in_range("spectrum.plateau_amplitude", 0.0, 1.0);
  c.spectrum.plateau.width = from_mhz(r.positive("spectrum.plateau_width_MHz"));
  c.spectrum.fit = r.flag("spectrum.fit");

  const double rx = from_um(r.positive("cloud.radius_x_um"));
  const double ry = from_um(r.positive("cloud.radius_y_um"));
  const double rz = from_um(r.positive("cloud.radius_z_um"));
  const double atoms = r.nonnegative("cloud.atom_number");
  const double vz = r.positive("cloud.velocity_z_cm_s") * 1e-2;
  if (r.issues().empty()) c.cloud = CloudModel::from_atom_number(rx, ry, rz, atoms, vz);

  c.beam.waist_x = from_um(r.positive("beam.waist_x_um"));
  c.beam.waist_y = from_um(r.positive("beam.waist_y_um"));
  c.beam.intensity_ratio = r.nonnegative("beam.intensity_ratio");

  c.trace.gap = from_nm(r.nonnegative("trace.gap_nm"));
  c.trace.detuning = from_mhz(r.finite("trace.detuning_MHz"));
  TraceOptions& t = c.trace.options;
  t.sample_rate = r.positive("trace.sample_rate_Hz");
  t.noise = r.choice("trace.noise", {"white", "shot"}) == 0 ? NoiseModel::white : NoiseModel::shot;
  t.noise_rms = r.nonnegative("trace.noise_rms");
  t.tail_duration = r.in_range("trace.tail_ms", 4.0, 1e6) * 1e-3;
  t.lowpass_cutoff = r.nonnegative("trace.lowpass_Hz");
  t.photons_per_sample = r.positive("trace.photons_per_sample");
  t.detection_efficiency = c.efficiency;
  c.trace.fit = r.flag("trace.fit");

  c.image.gap = from_nm(r.nonnegative("image.gap_nm"));
  c.image.detuning = from_mhz(r.finite("image.detuning_MHz"));
  c.image.rows = static_cast<std::size_t>(r.integer("image.rows", 1, 100000));
  c.image.cols = static_cast<std::size_t>(r.integer("image.cols", 1, 100000));
  c.image.pitch = from_um(r.positive("image.pitch_um"));
  c.image.options.blur_fwhm = from_um(r.nonnegative("image.blur_fwhm_um"));
  c.image.options.response = r.choice("image.response", {"profile", "exact"}) == 0
                                 ? PixelResponse::linear_profile
                                 : PixelResponse::exact;
  c.image.png = r.path_or_none("image.png").value_or("");
  if (!c.image.png.empty() && !png_supported()) {
    r.issue("image.png", "this build has no PNG support");
  }

  {
    const std::string& s = r.raw("run.seed");
    std::uint64_t seed = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      r.issue("run.seed", "expected an unsigned 64-bit integer, got '" + s + "'");
    }
    c.seed = seed;
    c.trace.options.seed = seed;
  }
  c.threads = static_cast<int>(r.integer("run.threads", 0, 4096));
  c.image.options.threads = c.threads;
  c.format = r.choice("output.format", {"csv", "matrix"}) == 0 ? OutputFormat::csv
                                                              : OutputFormat::matrix;

  if (!r.issues().empty()) throw ConfigValidationError(r.issues());
  return c;
}

}  // namespace plasmondet
