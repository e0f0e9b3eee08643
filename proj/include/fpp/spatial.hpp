#pragma once

// Spatial phase unwrapping: the one-dimensional Itoh recursion, an anchored
// two-dimensional scan built on it, and quality-guided flood fill.
//
// Every unwrapper here works on integer fringe orders and forms its output as
// value + 2*pi*K, so outputs are congruent to their inputs mod 2*pi by
// construction and methods that agree on K agree bit for bit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/demod.hpp"
#include "fpp/raster.hpp"

namespace fpp {

enum class Provenance {
  spatial_itoh,
  spatial_quality_guided,
  dual_frequency,
  geometric,
  geometric_corrected,
};

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::spatial_itoh: return "spatial-itoh";
    case Provenance::spatial_quality_guided: return "spatial-quality-guided";
    case Provenance::dual_frequency: return "dual-frequency";
    case Provenance::geometric: return "geometric";
    case Provenance::geometric_corrected: return "geometric+corrected";
  }
  return "unknown";
}

struct UnwrappedPhaseMap {
  Grid phase;  // radians; NaN where the mask is invalid
  Mask mask;
  Provenance provenance = Provenance::spatial_quality_guided;
};

/// Change in fringe order across one step whose raw difference is `diff`.
/// Differences in [-pi, pi] keep the order, below -pi raise it, above pi
/// lower it. For |diff| < 3*pi this is exactly +1 / -1; larger jumps take as
/// many periods as needed to land back in [-pi, pi].
inline int order_step(double diff) {
  if (diff < -pi) return static_cast<int>(std::ceil((-pi - diff) / two_pi));
  if (diff > pi) return -static_cast<int>(std::ceil((diff - pi) / two_pi));
  return 0;
}

inline double apply_order(double value, int order) { return value + two_pi * order; }

/// Fringe orders K_i of the Itoh recursion with K_0 = 0.
inline std::vector<int> itoh_fringe_orders(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("itoh: empty sequence");
  std::vector<int> orders(values.size(), 0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(values[i - 1])) {
      throw std::invalid_argument("itoh: non-finite value");
    }
    orders[i] = orders[i - 1] + order_step(values[i] - values[i - 1]);
  }
  return orders;
}

inline std::vector<double> itoh_unwrap_line(std::span<const double> values) {
  const auto orders = itoh_fringe_orders(values);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = apply_order(values[i], orders[i]);
  return out;
}

/// Two-pass anchored scan: the Itoh recursion runs down `anchor_column`, then
/// along every row in both directions starting from that row's anchor order.
/// Invalid pixels break a path; the first valid pixel after a break restarts
/// with order 0.
inline std::vector<int> anchored_scan_orders(const Grid& values, const Mask& mask, int anchor_column) {
  if (!values.same_shape(mask)) throw std::invalid_argument("scan: grid/mask dimension mismatch");
  if (anchor_column < 0 || anchor_column >= values.width()) {
    throw std::invalid_argument("scan: anchor column out of range");
  }
  const int w = values.width();
  const int h = values.height();
  std::vector<int> orders(values.size(), 0);

  // Walks one path; `k` and `prev` carry the recursion state across calls.
  auto step = [&](std::size_t i, int& k, std::optional<std::size_t>& prev) {
    if (!mask.valid(i)) {
      prev.reset();
      return;
    }
    k = prev ? k + order_step(values[i] - values[*prev]) : 0;
    orders[i] = k;
    prev = i;
  };

  {
    int k = 0;
    std::optional<std::size_t> prev;
    for (int y = 0; y < h; ++y) step(values.index(anchor_column, y), k, prev);
  }
  for (int y = 0; y < h; ++y) {
    const auto anchor = values.index(anchor_column, y);
    const bool anchored = mask.valid(anchor);
    for (int dir : {+1, -1}) {
      int k = orders[anchor];
      std::optional<std::size_t> prev;
      if (anchored) prev = anchor;
      for (int x = anchor_column + dir; x >= 0 && x < w; x += dir) step(values.index(x, y), k, prev);
    }
  }
  return orders;
}

namespace detail {

inline UnwrappedPhaseMap assemble(const Grid& wrapped, const Mask& mask, const std::vector<int>& orders,
                                  Provenance provenance) {
  Grid out(wrapped.width(), wrapped.height(), std::numeric_limits<double>::quiet_NaN(), Unit::radians);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.valid(i)) out[i] = apply_order(wrapped[i], orders[i]);
  }
  return {std::move(out), mask, provenance};
}

}  // namespace detail

/// Highest-modulation valid pixel; ties go to the smallest row-major index.
inline Pixel default_seed(const WrappedPhaseMap& wrapped) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < wrapped.modulation.size(); ++i) {
    if (!wrapped.mask.valid(i)) continue;
    if (!best || wrapped.modulation[i] > wrapped.modulation[*best]) best = i;
  }
  if (!best) throw std::invalid_argument("no valid pixel to seed from");
  return wrapped.mask.pixel(*best);
}

/// Row-scan spatial unwrapping anchored on the column of `seed` (default:
/// highest-modulation pixel).
inline UnwrappedPhaseMap itoh_unwrap(const WrappedPhaseMap& wrapped, std::optional<Pixel> seed = {}) {
  const Pixel s = seed ? *seed : default_seed(wrapped);
  if (!wrapped.mask.valid(s.x, s.y)) throw std::invalid_argument("invalid seed pixel");
  const auto orders = anchored_scan_orders(wrapped.phase, wrapped.mask, s.x);
  return detail::assemble(wrapped.phase, wrapped.mask, orders, Provenance::spatial_itoh);
}

/// Quality-guided flood fill over 4-connected valid pixels. The frontier is
/// settled in descending modulation order (ties: smallest row-major index,
/// then earliest insertion). Each admitted pixel takes the fringe order that
/// keeps it within [-pi, pi] of the settled neighbor that queued it. Only the
/// seed's connected component is unwrapped; the rest of the mask is cleared.
inline UnwrappedPhaseMap quality_guided_unwrap(const WrappedPhaseMap& wrapped, std::optional<Pixel> seed = {}) {
  const Grid& phase = wrapped.phase;
  const Grid& quality = wrapped.modulation;
  const Mask& valid = wrapped.mask;
  if (!phase.same_shape(valid) || !phase.same_shape(quality)) {
    throw std::invalid_argument("quality-guided unwrap: dimension mismatch");
  }
  const Pixel s = seed ? *seed : default_seed(wrapped);
  if (!valid.valid(s.x, s.y)) throw std::invalid_argument("invalid seed pixel");

  struct Candidate {
    double quality;
    std::size_t index;
    std::uint64_t sequence;
    std::size_t from;
  };
  auto lower_priority = [](const Candidate& a, const Candidate& b) {
    if (a.quality != b.quality) return a.quality < b.quality;
    if (a.index != b.index) return a.index > b.index;
    return a.sequence > b.sequence;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(lower_priority)> frontier(lower_priority);

  const int w = phase.width();
  const int h = phase.height();
  std::vector<int> orders(phase.size(), 0);
  Mask settled(w, h, false);
  std::uint64_t sequence = 0;

  auto settle = [&](std::size_t i) {
    settled.set(i, true);
    const Pixel p = phase.pixel(i);
    constexpr int dx[] = {1, -1, 0, 0};
    constexpr int dy[] = {0, 0, 1, -1};
    for (int n = 0; n < 4; ++n) {
      const int nx = p.x + dx[n];
      const int ny = p.y + dy[n];
      if (!valid.valid(nx, ny)) continue;
      const auto j = phase.index(nx, ny);
      if (!settled.valid(j)) frontier.push({quality[j], j, sequence++, i});
    }
  };

  settle(phase.index(s.x, s.y));
  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    frontier.pop();
    if (settled.valid(c.index)) continue;
    orders[c.index] = orders[c.from] + order_step(phase[c.index] - phase[c.from]);
    settle(c.index);
  }
  return detail::assemble(phase, settled, orders, Provenance::spatial_quality_guided);
}

}  // namespace fpp
