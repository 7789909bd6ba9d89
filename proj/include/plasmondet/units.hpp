#pragma once

#include <numbers>

// SI is used everywhere inside the library; these helpers convert the
// laboratory units accepted at the CLI and config boundary.
namespace plasmondet::units {

inline constexpr double pi = std::numbers::pi;

constexpr double from_nm(double v) { return v * 1e-9; }
constexpr double to_nm(double v) { return v * 1e9; }
constexpr double from_um(double v) { return v * 1e-6; }
constexpr double to_um(double v) { return v * 1e6; }
constexpr double from_deg(double v) { return v * pi / 180.0; }
constexpr double to_deg(double v) { return v * 180.0 / pi; }
// Number density, cm^-3 <-> m^-3.
constexpr double from_per_cm3(double v) { return v * 1e6; }
constexpr double to_per_cm3(double v) { return v * 1e-6; }
// Frequency in MHz to angular frequency in rad/s.
constexpr double from_mhz(double v) { return 2.0 * pi * v * 1e6; }
constexpr double to_mhz(double omega) { return omega / (2.0 * pi * 1e6); }

}  // namespace plasmondet::units
