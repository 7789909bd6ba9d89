#include "plasmondet/atomic_medium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "plasmondet/errors.hpp"
#include "plasmondet/units.hpp"

namespace plasmondet {

void AtomicTransition::validate() const {
  if (!(vacuum_wavelength > 0.0)) throw InvalidArgument("AtomicTransition: wavelength <= 0");
  if (!(natural_linewidth > 0.0)) throw InvalidArgument("AtomicTransition: linewidth <= 0");
}

double AtomicTransition::resonant_volume() const {
  const double l = vacuum_wavelength;
  return 3.0 * l * l * l / (8.0 * std::numbers::pi * std::numbers::pi);
}

AtomicMedium::AtomicMedium(AtomicTransition transition, double detuning_ratio, double density)
    : transition_(transition), detuning_ratio_(detuning_ratio), density_(density) {
  transition_.validate();
  if (!std::isfinite(detuning_ratio)) throw InvalidArgument("AtomicMedium: detuning not finite");
  if (!(density >= 0.0) || !std::isfinite(density)) {
    throw InvalidArgument("AtomicMedium: density must be finite and >= 0");
  }
}

AtomicMedium AtomicMedium::from_detuning(AtomicTransition transition, double detuning,
                                         double density) {
  transition.validate();
  return AtomicMedium(transition, detuning / transition.natural_linewidth, density);
}

AtomicMedium AtomicMedium::with_density(double density) const {
  return AtomicMedium(transition_, detuning_ratio_, density);
}

AtomicMedium AtomicMedium::with_detuning_ratio(double ratio) const {
  return AtomicMedium(transition_, ratio, density_);
}

double polarizability_factor(const AtomicMedium& medium) {
  const double x = medium.scaled_detuning();
  return medium.transition().resonant_volume() * x / (1.0 + x * x);
}

double absorption_factor(const AtomicMedium& medium) {
  const double x = medium.scaled_detuning();
  return medium.transition().resonant_volume() / (1.0 + x * x);
}

std::complex<double> refractive_index(const AtomicMedium& medium) {
  const double rho = medium.density();
  if (rho == 0.0) return {1.0, 0.0};
  return {1.0 + polarizability_factor(medium) * rho, absorption_factor(medium) * rho};
}

DensityProfile DensityProfile::uniform_slab(double peak_density, double gap, double thickness) {
  if (!(peak_density >= 0.0)) throw InvalidArgument("uniform_slab: density must be >= 0");
  if (!(gap >= 0.0) || !(thickness >= 0.0)) {
    throw InvalidArgument("uniform_slab: gap and thickness must be >= 0");
  }
  return DensityProfile(peak_density, UniformSlab{gap, thickness});
}

DensityProfile DensityProfile::exponential(double peak_density, double start,
                                           double decay_length) {
  if (!(peak_density >= 0.0)) throw InvalidArgument("exponential: density must be >= 0");
  if (!(start >= 0.0) || !(decay_length > 0.0)) {
    throw InvalidArgument("exponential: start >= 0 and decay length > 0 required");
  }
  return DensityProfile(peak_density, ExponentialTail{start, decay_length});
}

DensityProfile DensityProfile::gaussian(double peak_density, double center, double sigma) {
  if (!(peak_density >= 0.0)) throw InvalidArgument("gaussian: density must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(center)) {
    throw InvalidArgument("gaussian: sigma must be > 0");
  }
  return DensityProfile(peak_density, GaussianSheet{center, sigma});
}

DensityProfile DensityProfile::tabulated(std::vector<double> z, std::vector<double> density) {
  if (z.size() != density.size() || z.size() < 2) {
    throw InvalidArgument("tabulated: need at least two (z, density) pairs");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(density[i] >= 0.0)) throw InvalidArgument("tabulated: negative density");
    if (i > 0 && !(z[i] > z[i - 1])) throw InvalidArgument("tabulated: z not strictly increasing");
  }
  if (z.front() < 0.0) throw InvalidArgument("tabulated: z must be >= 0");
  const double peak = *std::max_element(density.begin(), density.end());
  return DensityProfile(peak, TabulatedProfile{std::move(z), std::move(density)});
}

double DensityProfile::at(double z) const {
  struct Visitor {
    double peak;
    double z;
    double operator()(const UniformSlab& s) const {
      return (z >= s.gap && z - s.gap < s.thickness) ? peak : 0.0;
    }
    double operator()(const ExponentialTail& e) const {
      return z >= e.start ? peak * std::exp(-(z - e.start) / e.decay_length) : 0.0;
    }
    double operator()(const GaussianSheet& g) const {
      const double u = (z - g.center) / g.sigma;
      return peak * std::exp(-0.5 * u * u);
    }
    double operator()(const TabulatedProfile& t) const {
      if (z < t.z.front() || z > t.z.back()) return 0.0;
      const auto hi = std::upper_bound(t.z.begin(), t.z.end(), z);
      if (hi == t.z.end()) return t.density.back();
      const std::size_t j = static_cast<std::size_t>(hi - t.z.begin());
      const double w = (z - t.z[j - 1]) / (t.z[j] - t.z[j - 1]);
      return t.density[j - 1] + w * (t.density[j] - t.density[j - 1]);
    }
  };
  return std::visit(Visitor{peak_, z}, shape_);
}

std::vector<double> DensityProfile::breakpoints() const {
  struct Visitor {
    std::vector<double> operator()(const UniformSlab& s) const {
      std::vector<double> out{s.gap};
      if (std::isfinite(s.thickness)) out.push_back(s.gap + s.thickness);
      return out;
    }
    std::vector<double> operator()(const ExponentialTail& e) const { return {e.start}; }
    std::vector<double> operator()(const GaussianSheet& g) const {
      return {std::max(0.0, g.center)};
    }
    std::vector<double> operator()(const TabulatedProfile& t) const { return t.z; }
  };
  return std::visit(Visitor{}, shape_);
}

DensityProfile parse_tabulated_profile(std::istream& in) {
  std::vector<double> z;
  std::vector<double> rho;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double z_nm = 0.0;
    double rho_cm3 = 0.0;
    if (!(row >> z_nm >> rho_cm3)) {
      throw InvalidArgument("density table line " + std::to_string(line_no) +
                            ": expected two numeric columns");
    }
    z.push_back(units::from_nm(z_nm));
    rho.push_back(units::from_per_cm3(rho_cm3));
  }
  return DensityProfile::tabulated(std::move(z), std::move(rho));
}

DensityProfile load_tabulated_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open density table " + path.string());
  return parse_tabulated_profile(in);
}

}  // namespace plasmondet
