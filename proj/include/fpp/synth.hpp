#pragma once

// Synthetic digital fringe projection: scene height fields, the crossed-axes
// height-to-phase model, and noisy four-step fringe rendering.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/demod.hpp"
#include "fpp/raster.hpp"

namespace fpp {

inline constexpr int default_scene_width = 624;
inline constexpr int default_scene_height = 441;

/// Camera/projector geometry. standoff_mm is the distance from the
/// camera-projector plane to the reference plane, baseline_mm the
/// camera-projector separation, and fringe_density the fringe frequency on the
/// reference plane in fringes per millimeter.
struct DfpGeometry {
  double standoff_mm = 700.0;
  double baseline_mm = 300.0;
  double fringe_density = 0.05;

  void validate() const {
    if (!(standoff_mm > 0.0) || !(baseline_mm > 0.0) || !(fringe_density > 0.0)) {
      throw std::invalid_argument("geometry: standoff, baseline and fringe density must be > 0");
    }
  }

  /// Same geometry observed through a pattern whose frequency is scaled by `factor`.
  DfpGeometry scaled_frequency(double factor) const {
    DfpGeometry g = *this;
    g.fringe_density *= factor;
    return g;
  }
};

enum class SceneKind { flat_plane, gaussian_peaks, plate_with_holes, step };

inline std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::flat_plane: return "flat-plane";
    case SceneKind::gaussian_peaks: return "gaussian-peaks";
    case SceneKind::plate_with_holes: return "plate-with-holes";
    case SceneKind::step: return "step";
  }
  return "unknown";
}

inline SceneKind scene_kind_from_string(std::string_view s) {
  if (s == "flat-plane") return SceneKind::flat_plane;
  if (s == "gaussian-peaks") return SceneKind::gaussian_peaks;
  if (s == "plate-with-holes") return SceneKind::plate_with_holes;
  if (s == "step") return SceneKind::step;
  throw std::invalid_argument("unknown scene kind: " + std::string(s));
}

struct GaussianPeak {
  double x = 0.0;
  double y = 0.0;
  double height_mm = 0.0;
  double sigma_px = 1.0;
};

struct Hole {
  double x = 0.0;
  double y = 0.0;
  double radius_px = 0.0;
};

struct SceneSpec {
  SceneKind kind = SceneKind::gaussian_peaks;
  int width = default_scene_width;
  int height = default_scene_height;
  double height_offset_mm = 0.0;
  std::vector<GaussianPeak> peaks;
  std::vector<Hole> holes;
  double plate_height_mm = 0.0;
  double step_height_mm = 0.0;
  int step_column = 0;

  void validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("scene: non-positive dimensions");
    if (!(height_offset_mm >= 0.0)) throw std::invalid_argument("scene: height offset must be >= 0");
    for (const auto& p : peaks) {
      if (!(p.height_mm >= 0.0)) throw std::invalid_argument("scene: peak heights must be >= 0");
      if (!(p.sigma_px > 0.0)) throw std::invalid_argument("scene: peak sigma must be > 0");
    }
    for (const auto& h : holes) {
      if (!(h.radius_px >= 0.0)) throw std::invalid_argument("scene: hole radius must be >= 0");
    }
    if (!(plate_height_mm >= 0.0) || !(step_height_mm >= 0.0)) {
      throw std::invalid_argument("scene: plate and step heights must be >= 0");
    }
  }

  /// Two smooth bumps standing in for a face model and an isolated cup, lifted
  /// off the reference plane so the whole object stays inside one fringe order.
  static SceneSpec face_and_cup() {
    SceneSpec s;
    s.kind = SceneKind::gaussian_peaks;
    s.height_offset_mm = 4.0;
    s.peaks = {{220.0, 220.0, 25.0, 70.0}, {450.0, 230.0, 18.0, 40.0}};
    return s;
  }

  /// A single peak tall enough to exceed one fringe order near its apex.
  static SceneSpec tall_peak() {
    SceneSpec s;
    s.kind = SceneKind::gaussian_peaks;
    s.height_offset_mm = 4.0;
    s.peaks = {{312.0, 220.0, 60.0, 50.0}};
    return s;
  }

  static SceneSpec plate_with_two_holes() {
    SceneSpec s;
    s.kind = SceneKind::plate_with_holes;
    s.height_offset_mm = 4.0;
    s.plate_height_mm = 8.0;
    s.holes = {{200.0, 220.0, 80.0}, {430.0, 220.0, 80.0}};
    return s;
  }
};

struct HeightField {
  Grid height;  // millimeters; NaN where invalid
  Mask mask;
};

inline HeightField height_field(const SceneSpec& scene) {
  scene.validate();
  Grid h(scene.width, scene.height, scene.height_offset_mm, Unit::millimeters);
  Mask mask(scene.width, scene.height, true);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      double v = scene.height_offset_mm;
      switch (scene.kind) {
        case SceneKind::flat_plane:
          break;
        case SceneKind::gaussian_peaks:
          for (const auto& p : scene.peaks) {
            const double dx = x - p.x;
            const double dy = y - p.y;
            v += p.height_mm * std::exp(-(dx * dx + dy * dy) / (2.0 * p.sigma_px * p.sigma_px));
          }
          break;
        case SceneKind::plate_with_holes:
          v += scene.plate_height_mm;
          break;
        case SceneKind::step:
          if (x >= scene.step_column) v += scene.step_height_mm;
          break;
      }
      h.at(x, y) = v;
    }
  }
  if (scene.kind == SceneKind::plate_with_holes) {
    for (const auto& hole : scene.holes) {
      for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
          const double dx = x - hole.x;
          const double dy = y - hole.y;
          if (dx * dx + dy * dy <= hole.radius_px * hole.radius_px) {
            const auto i = h.index(x, y);
            h[i] = std::numeric_limits<double>::quiet_NaN();
            mask.set(i, false);
          }
        }
      }
    }
  }
  return {std::move(h), std::move(mask)};
}

/// Crossed-optical-axes model: dphi = 2 pi f d h / (L - h). NaN heights
/// (no surface) stay NaN.
inline Grid phase_from_height(const Grid& height_mm, const DfpGeometry& geom) {
  geom.validate();
  const double gain = two_pi * geom.fringe_density * geom.baseline_mm;
  Grid out(height_mm.width(), height_mm.height(), 0.0, Unit::radians);
  for (std::size_t i = 0; i < height_mm.size(); ++i) {
    const double h = height_mm[i];
    if (std::isnan(h)) {
      out[i] = h;
      continue;
    }
    if (!(h < geom.standoff_mm)) throw std::domain_error("height exceeds standoff");
    out[i] = gain * h / (geom.standoff_mm - h);
  }
  return out;
}

enum class Quantization { none, eight_bit };

struct FringeParams {
  double period_px = 18.0;
  double mean_intensity = 128.0;  // A
  double modulation = 100.0;      // B
  double noise_sigma = 0.0;
  Quantization quantize = Quantization::none;
  std::uint64_t rng_seed = 1;

  static constexpr int n_shifts = 4;

  void validate() const {
    if (!(period_px > 0.0)) throw std::invalid_argument("fringe params: period must be > 0");
    if (!(modulation > 0.0)) throw std::invalid_argument("fringe params: modulation B must be > 0");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("fringe params: noise sigma must be >= 0");
    if (!(mean_intensity - modulation >= 0.0)) {
      throw std::invalid_argument("fringe params: A - B must be >= 0");
    }
    if (quantize == Quantization::eight_bit && mean_intensity + modulation > 255.0) {
      throw std::invalid_argument("fringe params: A + B exceeds the 8-bit range");
    }
  }

  /// Fringes across an image of the given width.
  double frequency(int width) const { return width / period_px; }
};

/// Linear projector carrier 2 pi x / period, constant down each column.
inline Grid carrier_phase(int width, int height, double period_px) {
  Grid out(width, height, 0.0, Unit::radians);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.at(x, y) = two_pi * x / period_px;
  }
  return out;
}

/// Absolute object phase: carrier plus height-induced offset.
inline Grid object_phase(const Grid& delta_phase, double period_px) {
  Grid out = carrier_phase(delta_phase.width(), delta_phase.height(), period_px);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta_phase[i];
  return out;
}

enum class Carrier { reference, object };

/// Renders I_n = A + B cos(carrier + dphi + n pi/2), n = 0..3. For the
/// reference carrier dphi is ignored. Pixels where dphi is NaN (no surface)
/// return only the ambient level A. Gaussian noise is drawn from a generator
/// seeded with params.rng_seed in frame-major, then row-major order.
inline FringeStack render_fringes(const Grid& delta_phase, const FringeParams& params, Carrier carrier) {
  params.validate();
  const int w = delta_phase.width();
  const int h = delta_phase.height();
  const double a = params.mean_intensity;
  const double b = params.modulation;

  FringeStack stack;
  stack.period_px = params.period_px;
  std::mt19937_64 rng(params.rng_seed);
  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0.0 ? params.noise_sigma : 1.0);

  for (int n = 0; n < FringeParams::n_shifts; ++n) {
    Grid frame(w, h, 0.0, Unit::intensity);
    const double shift = n * (pi / 2.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto i = frame.index(x, y);
        const double dphi = carrier == Carrier::reference ? 0.0 : delta_phase[i];
        double v = std::isnan(dphi) ? a : a + b * std::cos(two_pi * x / params.period_px + dphi + shift);
        if (params.noise_sigma > 0.0) v += noise(rng);
        if (params.quantize == Quantization::eight_bit) v = std::round(std::clamp(v, 0.0, 255.0));
        frame[i] = v;
      }
    }
    stack.frames[n] = std::move(frame);
  }
  return stack;
}

}  // namespace fpp
