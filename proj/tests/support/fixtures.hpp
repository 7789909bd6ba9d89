#pragma once

#include <complex>
#include <numbers>

#include "plasmondet/stack_optics.hpp"

namespace fixture {

// Ordal gold at 780 nm, as interpolated from data/materials/gold.nk.
inline const std::complex<double> kGold{0.180546875, 4.97625};
constexpr double kLambda = 780e-9;
constexpr double kMetal = 40e-9;
constexpr double kGlass = 1.51;

inline plasmondet::LayerStack paper_stack(std::complex<double> metal = kGold) {
  using plasmondet::Layer;
  return plasmondet::LayerStack({Layer::half_space(kGlass), Layer::film(metal, kMetal),
                                 Layer::half_space(1.0)},
                                kLambda);
}

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace fixture
