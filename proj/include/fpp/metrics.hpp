#pragma once

// Comparison of reconstructed phase against ground truth, and the inverse
// height model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "fpp/raster.hpp"
#include "fpp/spatial.hpp"
#include "fpp/synth.hpp"

namespace fpp {

/// Largest global piston, in whole periods, that evaluate() will remove.
inline constexpr int max_piston_periods = 50;

struct EvalReport {
  double rmse = 0.0;
  double max_abs_err = 0.0;
  std::size_t order_error_count = 0;
  double order_error_rate = 0.0;
  double piston_removed = 0.0;  // multiple of 2*pi
  int piston_periods = 0;
  std::size_t valid_pixel_count = 0;
};

namespace detail {

inline double sum_squared_error(const Grid& estimate, const Grid& truth, const Mask& mask, double piston) {
  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (!mask.valid(i)) continue;
    const double e = estimate[i] - piston - truth[i];
    sum += e * e;
  }
  return sum;
}

}  // namespace detail

/// Pixels are compared where `mask`, the estimate's mask, and finiteness of
/// both grids all agree. With remove_piston, the integer n in [-50, 50]
/// minimizing the RMSE of (estimate - 2 pi n - truth) is removed first. The
/// squared error is a convex quadratic in n, so the optimum is within one of
/// round(mean error / 2pi). A pixel is a fringe-order error when its residual
/// exceeds pi in magnitude.
inline EvalReport evaluate(const UnwrappedPhaseMap& estimate, const Grid& truth, const Mask& mask,
                           bool remove_piston = true) {
  if (!estimate.phase.same_shape(truth) || !estimate.phase.same_shape(mask) ||
      !estimate.mask.same_shape(mask)) {
    throw std::invalid_argument("evaluate: dimension mismatch");
  }
  Mask used(mask.width(), mask.height(), false);
  std::size_t n = 0;
  double mean = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool ok = mask.valid(i) && estimate.mask.valid(i) && std::isfinite(estimate.phase[i]) &&
                    std::isfinite(truth[i]);
    used.set(i, ok);
    if (ok) {
      ++n;
      mean += (estimate.phase[i] - truth[i] - mean) / static_cast<double>(n);
    }
  }
  if (n == 0) throw std::invalid_argument("evaluate: empty valid set");

  int periods = 0;
  if (remove_piston) {
    const double center = std::round(mean / two_pi);
    const int c = static_cast<int>(std::clamp(center, double(-max_piston_periods), double(max_piston_periods)));
    double best = std::numeric_limits<double>::infinity();
    for (int k = c - 1; k <= c + 1; ++k) {
      if (k < -max_piston_periods || k > max_piston_periods) continue;
      const double sse = detail::sum_squared_error(estimate.phase, truth, used, two_pi * k);
      if (sse < best) {
        best = sse;
        periods = k;
      }
    }
  }

  EvalReport r;
  r.piston_periods = periods;
  r.piston_removed = two_pi * periods;
  r.valid_pixel_count = n;
  double sse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!used.valid(i)) continue;
    const double e = std::abs(estimate.phase[i] - r.piston_removed - truth[i]);
    sse += e * e;
    r.max_abs_err = std::max(r.max_abs_err, e);
    if (e > pi) ++r.order_error_count;
  }
  r.rmse = std::sqrt(sse / static_cast<double>(n));
  r.order_error_rate = static_cast<double>(r.order_error_count) / static_cast<double>(n);
  return r;
}

struct DifferenceMap {
  Grid abs_error;
  Mask mask;
};

/// |estimate - piston - truth| on pixels valid in both.
inline DifferenceMap abs_difference(const UnwrappedPhaseMap& estimate, const Grid& truth, const Mask& mask,
                                    double piston = 0.0) {
  if (!estimate.phase.same_shape(truth) || !estimate.phase.same_shape(mask)) {
    throw std::invalid_argument("abs difference: dimension mismatch");
  }
  Grid out(truth.width(), truth.height(), std::numeric_limits<double>::quiet_NaN(), Unit::radians);
  Mask m(truth.width(), truth.height(), false);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (mask.valid(i) && estimate.mask.valid(i) && std::isfinite(estimate.phase[i]) && std::isfinite(truth[i])) {
      out[i] = std::abs(estimate.phase[i] - piston - truth[i]);
      m.set(i, true);
    }
  }
  return {std::move(out), std::move(m)};
}

/// Inverse of phase_from_height: h = L dphi / (dphi + 2 pi f d).
inline Grid height_from_phase(const Grid& delta_phase, const DfpGeometry& geom) {
  geom.validate();
  const double gain = two_pi * geom.fringe_density * geom.baseline_mm;
  Grid out(delta_phase.width(), delta_phase.height(), 0.0, Unit::millimeters);
  for (std::size_t i = 0; i < delta_phase.size(); ++i) {
    const double dphi = delta_phase[i];
    if (std::isnan(dphi)) {
      out[i] = dphi;
      continue;
    }
    const double denominator = dphi + gain;
    if (!(denominator > 0.0)) throw std::domain_error("height from phase: non-positive denominator");
    out[i] = geom.standoff_mm * dphi / denominator;
  }
  return out;
}

}  // namespace fpp
