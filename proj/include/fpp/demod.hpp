#pragma once

// Four-step phase-shifting demodulation.
//
// Frame n of a stack carries the phase offset n * pi/2:
//   I_n = A + B cos(phi + n pi/2)
// so I_3 - I_1 = 2B sin(phi) and I_0 - I_2 = 2B cos(phi).

#include <array>
#include <cmath>
#include <stdexcept>

#include "fpp/raster.hpp"

namespace fpp {

inline constexpr double default_modulation_threshold = 5.0;

struct FringeStack {
  std::array<Grid, 4> frames;
  /// Projector pattern period in camera pixels (fringes per image = width / period_px).
  double period_px = 0.0;

  int width() const noexcept { return frames[0].width(); }
  int height() const noexcept { return frames[0].height(); }

  void validate() const {
    for (const auto& f : frames) {
      if (f.empty()) throw std::invalid_argument("fringe stack: empty frame");
      if (!f.same_shape(frames[0])) throw std::invalid_argument("fringe stack: mismatched frame dimensions");
    }
  }
};

struct WrappedPhaseMap {
  Grid phase;       // radians, (-pi, pi] where valid
  Grid modulation;  // intensity, >= 0
  Mask mask;
};

/// valid iff modulation > threshold
inline Mask validity_mask(const Grid& modulation, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("validity mask: threshold must be >= 0");
  Mask mask(modulation.width(), modulation.height(), false);
  for (std::size_t i = 0; i < modulation.size(); ++i) mask.set(i, modulation[i] > threshold);
  return mask;
}

inline WrappedPhaseMap four_step_phase(const FringeStack& stack,
                                       double modulation_threshold = default_modulation_threshold) {
  stack.validate();
  const auto& [i0, i1, i2, i3] = stack.frames;
  const int w = stack.width();
  const int h = stack.height();
  Grid phase(w, h, 0.0, Unit::radians);
  Grid modulation(w, h, 0.0, Unit::intensity);
  for (std::size_t i = 0; i < phase.size(); ++i) {
    const double s = i3[i] - i1[i];
    const double c = i0[i] - i2[i];
    double phi = std::atan2(s, c);
    if (phi <= -pi) phi = pi;
    phase[i] = phi;
    modulation[i] = 0.5 * std::hypot(s, c);
  }
  Mask mask = validity_mask(modulation, modulation_threshold);
  return {std::move(phase), std::move(modulation), std::move(mask)};
}

}  // namespace fpp
