#pragma once

// Temporal (pixelwise) fringe-order recovery.
//
//  * geometric_unwrap: the continuous phase of a reference plane placed at the
//    nearest admissible depth is a pixelwise lower bound phi_min for any
//    object phase, so K = ceil((phi_min - phi_w) / 2pi) and
//    Phi = phi_w + 2pi K, which puts Phi in [phi_min, phi_min + 2pi).
//  * residual_correct: removes the 2pi deficits left where the true phase
//    exceeds phi_min + 2pi, using the Itoh recursion along an anchored scan.
//  * dual_frequency_unwrap: the conventional baseline,
//    k = round((f2/f1 * phi_1 - phi_2) / 2pi).

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "fpp/demod.hpp"
#include "fpp/raster.hpp"
#include "fpp/spatial.hpp"

namespace fpp {

/// Fringe frequencies in fringes per image.
struct FrequencyPair {
  double low = 1.0;
  double high = 1.0;

  // Equal frequencies are accepted as the degenerate identity ratio.
  void validate() const {
    if (!(low > 0.0) || !(high > 0.0)) throw std::invalid_argument("frequency pair: frequencies must be > 0");
    if (low > high) throw std::invalid_argument("frequency pair: low frequency exceeds high frequency");
  }
  double ratio() const { return high / low; }
};

/// Continuous reference-plane phase at the nearest admissible depth.
struct MinPhaseMap {
  Grid phase;
  Mask mask;

  static MinPhaseMap from(const UnwrappedPhaseMap& unwrapped) { return {unwrapped.phase, unwrapped.mask}; }
};

inline UnwrappedPhaseMap dual_frequency_unwrap(const UnwrappedPhaseMap& low, const WrappedPhaseMap& high,
                                               const FrequencyPair& freqs) {
  freqs.validate();
  if (!low.phase.same_shape(high.phase) || !low.mask.same_shape(high.mask)) {
    throw std::invalid_argument("dual-frequency unwrap: dimension mismatch");
  }
  const double ratio = freqs.ratio();
  Mask mask = intersect(low.mask, high.mask);
  Grid out(high.phase.width(), high.phase.height(), std::numeric_limits<double>::quiet_NaN(), Unit::radians);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.valid(i)) continue;
    // std::round rounds halfway cases away from zero.
    const double k = std::round((ratio * low.phase[i] - high.phase[i]) / two_pi);
    out[i] = high.phase[i] + two_pi * k;
  }
  return {std::move(out), std::move(mask), Provenance::dual_frequency};
}

/// Fringe order K = ceil((phi_min - phi_w) / 2pi), nudged by one where
/// floating-point rounding would otherwise leave Phi - phi_min outside [0, 2pi).
inline double geometric_order(double phi_w, double phi_min) {
  double k = std::ceil((phi_min - phi_w) / two_pi);
  if (phi_w + two_pi * k < phi_min) k += 1.0;
  if ((phi_w + two_pi * k) - phi_min >= two_pi) k -= 1.0;
  return k;
}

inline UnwrappedPhaseMap geometric_unwrap(const WrappedPhaseMap& wrapped, const MinPhaseMap& phi_min) {
  if (!wrapped.phase.same_shape(phi_min.phase) || !wrapped.mask.same_shape(phi_min.mask)) {
    throw std::invalid_argument("geometric unwrap: dimension mismatch");
  }
  Grid out(wrapped.phase.width(), wrapped.phase.height(), std::numeric_limits<double>::quiet_NaN(),
           Unit::radians);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!wrapped.mask.valid(i)) continue;
    if (!phi_min.mask.valid(i) || !std::isfinite(phi_min.phase[i])) {
      const Pixel p = out.pixel(i);
      throw std::invalid_argument("geometric unwrap: missing phi_min under valid object pixel (" +
                                  std::to_string(p.x) + "," + std::to_string(p.y) + ")");
    }
    out[i] = wrapped.phase[i] + two_pi * geometric_order(wrapped.phase[i], phi_min.phase[i]);
  }
  return {std::move(out), wrapped.mask, Provenance::geometric};
}

/// True when some horizontally or vertically adjacent pair of valid pixels
/// differs by more than pi.
inline bool has_residual_wraps(const UnwrappedPhaseMap& map) {
  const Grid& v = map.phase;
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x) {
      const auto i = v.index(x, y);
      if (!map.mask.valid(i)) continue;
      if (map.mask.valid(x + 1, y) && std::abs(v[i + 1] - v[i]) > pi) return true;
      if (map.mask.valid(x, y + 1) && std::abs(v[v.index(x, y + 1)] - v[i]) > pi) return true;
    }
  }
  return false;
}

/// Column holding the highest-quality valid pixel (ties: smallest row-major index).
inline int anchor_column(const Grid& quality, const Mask& mask) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < quality.size(); ++i) {
    if (mask.valid(i) && (!best || quality[i] > quality[*best])) best = i;
  }
  return best ? mask.pixel(*best).x : 0;
}

/// Residual-wrap correction. The anchor column defaults to the column of the
/// first valid pixel in row-major order; pass anchor_column(modulation, mask)
/// to anchor on the best-quality pixel instead.
inline UnwrappedPhaseMap residual_correct(const UnwrappedPhaseMap& unwrapped,
                                          std::optional<int> anchor = std::nullopt) {
  const Mask& mask = unwrapped.mask;
  if (!unwrapped.phase.same_shape(mask)) throw std::invalid_argument("residual correct: dimension mismatch");
  int column = 0;
  if (anchor) {
    column = *anchor;
  } else {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask.valid(i)) {
        column = mask.pixel(i).x;
        break;
      }
    }
  }
  const auto orders = anchored_scan_orders(unwrapped.phase, mask, column);
  return detail::assemble(unwrapped.phase, mask, orders, Provenance::geometric_corrected);
}

}  // namespace fpp
