#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

// Lorentz-model optical response of a dilute two-level atomic gas.
namespace plasmondet {

struct AtomicTransition {
  double vacuum_wavelength = 780e-9;               // m
  double natural_linewidth = 2.0 * std::numbers::pi * 6e6;  // rad/s (Gamma)

  // Throws InvalidArgument unless both fields are positive.
  void validate() const;
  // 3 lambda^3 / (8 pi^2), m^3.
  double resonant_volume() const;
};

class AtomicMedium {
 public:
  // detuning_ratio is delta / Gamma; density in m^-3.
  AtomicMedium(AtomicTransition transition, double detuning_ratio, double density);
  static AtomicMedium from_detuning(AtomicTransition transition, double detuning,
                                    double density);

  const AtomicTransition& transition() const { return transition_; }
  double detuning_ratio() const { return detuning_ratio_; }
  double detuning() const { return detuning_ratio_ * transition_.natural_linewidth; }
  // 2 delta / Gamma, the only combination the Lorentz model needs.
  double scaled_detuning() const { return 2.0 * detuning_ratio_; }
  double density() const { return density_; }

  AtomicMedium with_density(double density) const;
  AtomicMedium with_detuning_ratio(double ratio) const;

 private:
  AtomicTransition transition_;
  double detuning_ratio_;
  double density_;
};

// beta = (3 lambda^3 / 8 pi^2) x / (1 + x^2), x = 2 delta / Gamma.
double polarizability_factor(const AtomicMedium& medium);

// Absorptive part per unit density: (3 lambda^3 / 8 pi^2) / (1 + x^2).
double absorption_factor(const AtomicMedium& medium);

// n4 = 1 + beta rho + i (3 lambda^3 / 8 pi^2) rho / (1 + x^2).
std::complex<double> refractive_index(const AtomicMedium& medium);

struct UniformSlab {
  double gap = 0.0;  // start of the slab, z_B
  double thickness = std::numeric_limits<double>::infinity();
};
struct ExponentialTail {
  double start = 0.0;
  double decay_length = 1e-6;
};
struct GaussianSheet {
  double center = 0.0;
  double sigma = 1e-7;  // rho = peak exp(-(z - center)^2 / (2 sigma^2))
};
struct TabulatedProfile {
  std::vector<double> z;        // m, strictly increasing
  std::vector<double> density;  // m^-3
};

// Atomic density along the surface normal, z measured from the metal.
class DensityProfile {
 public:
  using Shape = std::variant<UniformSlab, ExponentialTail, GaussianSheet, TabulatedProfile>;

  static DensityProfile uniform_slab(double peak_density, double gap,
                                     double thickness = std::numeric_limits<double>::infinity());
  static DensityProfile exponential(double peak_density, double start, double decay_length);
  static DensityProfile gaussian(double peak_density, double center, double sigma);
  static DensityProfile tabulated(std::vector<double> z, std::vector<double> density);

  double at(double z) const;
  double peak_density() const { return peak_; }
  const Shape& shape() const { return shape_; }
  // Points where the profile has kinks or jumps, sorted, all >= 0.
  std::vector<double> breakpoints() const;

 private:
  DensityProfile(double peak, Shape shape) : peak_(peak), shape_(std::move(shape)) {}
  double peak_;
  Shape shape_;
};

inline double density_at(const DensityProfile& profile, double z) { return profile.at(z); }

// Two columns: z in nm, density in cm^-3; '#' starts a comment line.
DensityProfile parse_tabulated_profile(std::istream& in);
DensityProfile load_tabulated_profile(const std::filesystem::path& path);

}  // namespace plasmondet
