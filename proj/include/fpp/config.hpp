#pragma once

// Experiment configuration and its JSON representation. Every key is
// optional when reading; missing keys keep their defaults.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fpp/demod.hpp"
#include "fpp/metrics.hpp"
#include "fpp/synth.hpp"

namespace fpp {

enum class Method { geometric, geometric_correct, dual_frequency };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::geometric: return "geometric";
    case Method::geometric_correct: return "geometric+correct";
    case Method::dual_frequency: return "dual-frequency";
  }
  return "unknown";
}

inline Method method_from_string(std::string_view s) {
  if (s == "geometric") return Method::geometric;
  if (s == "geometric+correct") return Method::geometric_correct;
  if (s == "dual-frequency") return Method::dual_frequency;
  throw std::invalid_argument("unknown method: " + std::string(s));
}

struct PipelineConfig {
  SceneSpec scene = SceneSpec::face_and_cup();
  DfpGeometry geometry;
  FringeParams fringe = [] {
    FringeParams p;
    p.quantize = Quantization::eight_bit;
    return p;
  }();
  Method method = Method::geometric;
  double low_frequency = 1.0;  // fringes per image, dual-frequency only
  double modulation_threshold = default_modulation_threshold;
  std::optional<Pixel> seed_pixel;
  std::string output_dir = "out";

  double high_frequency() const { return fringe.frequency(scene.width); }
  double low_period_px() const { return scene.width / low_frequency; }

  void validate() const {
    scene.validate();
    geometry.validate();
    fringe.validate();
    if (!(modulation_threshold >= 0.0)) throw std::invalid_argument("config: modulation threshold must be >= 0");
    if (method == Method::dual_frequency && !(low_frequency > 0.0 && low_frequency < high_frequency())) {
      throw std::invalid_argument("config: dual-frequency requires 0 < low_frequency < fringe frequency");
    }
  }
};

using nlohmann::json;

inline void to_json(json& j, const GaussianPeak& p) {
  j = {{"x", p.x}, {"y", p.y}, {"height_mm", p.height_mm}, {"sigma_px", p.sigma_px}};
}
inline void from_json(const json& j, GaussianPeak& p) {
  p.x = j.value("x", p.x);
  p.y = j.value("y", p.y);
  p.height_mm = j.value("height_mm", p.height_mm);
  p.sigma_px = j.value("sigma_px", p.sigma_px);
}

inline void to_json(json& j, const Hole& h) { j = {{"x", h.x}, {"y", h.y}, {"radius_px", h.radius_px}}; }
inline void from_json(const json& j, Hole& h) {
  h.x = j.value("x", h.x);
  h.y = j.value("y", h.y);
  h.radius_px = j.value("radius_px", h.radius_px);
}

inline void to_json(json& j, const SceneSpec& s) {
  j = {{"kind", std::string(to_string(s.kind))},
       {"width", s.width},
       {"height", s.height},
       {"height_offset_mm", s.height_offset_mm},
       {"peaks", s.peaks},
       {"holes", s.holes},
       {"plate_height_mm", s.plate_height_mm},
       {"step_height_mm", s.step_height_mm},
       {"step_column", s.step_column}};
}
inline void from_json(const json& j, SceneSpec& s) {
  if (j.contains("kind")) s.kind = scene_kind_from_string(j.at("kind").get<std::string>());
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.height_offset_mm = j.value("height_offset_mm", s.height_offset_mm);
  if (j.contains("peaks")) s.peaks = j.at("peaks").get<std::vector<GaussianPeak>>();
  if (j.contains("holes")) s.holes = j.at("holes").get<std::vector<Hole>>();
  s.plate_height_mm = j.value("plate_height_mm", s.plate_height_mm);
  s.step_height_mm = j.value("step_height_mm", s.step_height_mm);
  s.step_column = j.value("step_column", s.step_column);
}

inline void to_json(json& j, const DfpGeometry& g) {
  j = {{"standoff_mm", g.standoff_mm}, {"baseline_mm", g.baseline_mm}, {"fringe_density_per_mm", g.fringe_density}};
}
inline void from_json(const json& j, DfpGeometry& g) {
  g.standoff_mm = j.value("standoff_mm", g.standoff_mm);
  g.baseline_mm = j.value("baseline_mm", g.baseline_mm);
  g.fringe_density = j.value("fringe_density_per_mm", g.fringe_density);
}

inline void to_json(json& j, const FringeParams& p) {
  j = {{"period_px", p.period_px},
       {"mean_intensity", p.mean_intensity},
       {"modulation", p.modulation},
       {"n_shifts", FringeParams::n_shifts},
       {"noise_sigma", p.noise_sigma},
       {"quantize", p.quantize == Quantization::eight_bit ? "8-bit" : "none"},
       {"rng_seed", p.rng_seed}};
}
inline void from_json(const json& j, FringeParams& p) {
  p.period_px = j.value("period_px", p.period_px);
  p.mean_intensity = j.value("mean_intensity", p.mean_intensity);
  p.modulation = j.value("modulation", p.modulation);
  p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
  if (j.contains("quantize")) {
    const auto q = j.at("quantize").get<std::string>();
    if (q == "8-bit") {
      p.quantize = Quantization::eight_bit;
    } else if (q == "none") {
      p.quantize = Quantization::none;
    } else {
      throw std::invalid_argument("unknown quantize mode: " + q);
    }
  }
  p.rng_seed = j.value("rng_seed", p.rng_seed);
  if (j.contains("n_shifts") && j.at("n_shifts").get<int>() != FringeParams::n_shifts) {
    throw std::invalid_argument("only four-step phase shifting is supported");
  }
}

inline void to_json(json& j, const PipelineConfig& c) {
  j = {{"scene", c.scene},
       {"geometry", c.geometry},
       {"fringe", c.fringe},
       {"method", std::string(to_string(c.method))},
       {"low_frequency", c.low_frequency},
       {"modulation_threshold", c.modulation_threshold},
       {"output_dir", c.output_dir}};
  j["seed_pixel"] = c.seed_pixel ? json::array({c.seed_pixel->x, c.seed_pixel->y}) : json(nullptr);
}
inline void from_json(const json& j, PipelineConfig& c) {
  if (j.contains("scene")) j.at("scene").get_to(c.scene);
  if (j.contains("geometry")) j.at("geometry").get_to(c.geometry);
  if (j.contains("fringe")) j.at("fringe").get_to(c.fringe);
  if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
  c.low_frequency = j.value("low_frequency", c.low_frequency);
  c.modulation_threshold = j.value("modulation_threshold", c.modulation_threshold);
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("seed_pixel") && !j.at("seed_pixel").is_null()) {
    const auto& s = j.at("seed_pixel");
    c.seed_pixel = Pixel{s.at(0).get<int>(), s.at(1).get<int>()};
  }
}

inline void to_json(json& j, const EvalReport& r) {
  j = {{"rmse", r.rmse},
       {"max_abs_err", r.max_abs_err},
       {"order_error_count", r.order_error_count},
       {"order_error_rate", r.order_error_rate},
       {"piston_removed", r.piston_removed},
       {"piston_periods", r.piston_periods},
       {"valid_pixel_count", r.valid_pixel_count}};
}

}  // namespace fpp
