#pragma once

// End-to-end orchestration: simulate captures, run the reference-plane
// unwrapping pipeline, and sweep the dual-frequency baseline against it.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fpp/config.hpp"
#include "fpp/demod.hpp"
#include "fpp/io.hpp"
#include "fpp/metrics.hpp"
#include "fpp/spatial.hpp"
#include "fpp/synth.hpp"
#include "fpp/temporal.hpp"

namespace fpp {

/// Error raised by a pipeline stage; what() is prefixed with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

template <typename F>
auto run_stage(std::string_view name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(name), e.what());
  }
}

enum class Stream : std::uint32_t { object = 0, reference = 1, object_low = 2 };

/// Independent per-stack generator seed derived from the experiment seed.
inline std::uint64_t stream_seed(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t{out[0]} << 32) | out[1];
}

struct Simulation {
  HeightField scene;
  Grid delta_phase;       // height-induced phase at the high frequency
  FringeStack object;
  FringeStack reference;
  Grid truth_object;      // absolute object phase, NaN off-surface
  Grid truth_reference;   // reference carrier
  std::optional<FringeStack> object_low;
  std::optional<Grid> truth_object_low;
};

inline Mask finite_mask(const Grid& g) {
  Mask m(g.width(), g.height(), false);
  for (std::size_t i = 0; i < g.size(); ++i) m.set(i, std::isfinite(g[i]));
  return m;
}

/// Renders the object and reference-plane stacks; with_low adds an object
/// stack at cfg.low_frequency fringes per image for the dual-frequency baseline.
inline Simulation simulate(const PipelineConfig& cfg, bool with_low = false) {
  cfg.validate();
  Simulation sim;
  sim.scene = height_field(cfg.scene);
  sim.delta_phase = phase_from_height(sim.scene.height, cfg.geometry);

  FringeParams object_params = cfg.fringe;
  object_params.rng_seed = stream_seed(cfg.fringe.rng_seed, Stream::object);
  FringeParams reference_params = cfg.fringe;
  reference_params.rng_seed = stream_seed(cfg.fringe.rng_seed, Stream::reference);

  sim.object = render_fringes(sim.delta_phase, object_params, Carrier::object);
  sim.reference = render_fringes(sim.delta_phase, reference_params, Carrier::reference);
  sim.truth_object = object_phase(sim.delta_phase, cfg.fringe.period_px);
  sim.truth_reference = carrier_phase(cfg.scene.width, cfg.scene.height, cfg.fringe.period_px);

  if (with_low) {
    if (!(cfg.low_frequency > 0.0 && cfg.low_frequency < cfg.high_frequency())) {
      throw std::invalid_argument("simulate: low frequency must be in (0, fringe frequency)");
    }
    const double scale = cfg.low_frequency / cfg.high_frequency();
    const Grid low_delta = phase_from_height(sim.scene.height, cfg.geometry.scaled_frequency(scale));
    FringeParams low_params = cfg.fringe;
    low_params.period_px = cfg.low_period_px();
    low_params.rng_seed = stream_seed(cfg.fringe.rng_seed, Stream::object_low);
    sim.object_low = render_fringes(low_delta, low_params, Carrier::object);
    sim.truth_object_low = object_phase(low_delta, low_params.period_px);
  }
  return sim;
}

inline std::string stack_file(std::string_view prefix, int n) {
  return std::string(prefix) + "_" + std::to_string(n) + ".pgm";
}

inline std::vector<std::filesystem::path> write_stack(const FringeStack& stack, const std::filesystem::path& dir,
                                                      std::string_view prefix) {
  std::vector<std::filesystem::path> files;
  for (int n = 0; n < 4; ++n) {
    files.push_back(dir / stack_file(prefix, n));
    write_image(stack.frames[n], files.back());
  }
  return files;
}

inline FringeStack read_stack(const std::filesystem::path& dir, std::string_view prefix, double period_px) {
  FringeStack stack;
  stack.period_px = period_px;
  for (int n = 0; n < 4; ++n) stack.frames[n] = read_image(dir / stack_file(prefix, n));
  stack.validate();
  return stack;
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Writes object_{0..3}.pgm, reference_{0..3}.pgm, truth_object.fphm,
/// truth_reference.fphm and simulation.json (plus the object_low stack and
/// truth_object_low.fphm when present). Returns the paths written.
inline std::vector<std::filesystem::path> write_simulation(const Simulation& sim, const PipelineConfig& cfg,
                                                           const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("unwritable output directory: " + dir.string());
  }
  auto files = write_stack(sim.object, dir, "object");
  for (auto& f : write_stack(sim.reference, dir, "reference")) files.push_back(std::move(f));
  files.push_back(dir / "truth_object.fphm");
  write_phase_map(sim.truth_object, finite_mask(sim.truth_object), files.back());
  files.push_back(dir / "truth_reference.fphm");
  write_phase_map(sim.truth_reference, finite_mask(sim.truth_reference), files.back());
  if (sim.object_low) {
    for (auto& f : write_stack(*sim.object_low, dir, "object_low")) files.push_back(std::move(f));
    files.push_back(dir / "truth_object_low.fphm");
    write_phase_map(*sim.truth_object_low, finite_mask(*sim.truth_object_low), files.back());
  }

  nlohmann::json side;
  side["config"] = cfg;
  side["high_frequency"] = cfg.high_frequency();
  side["stack_seeds"] = {{"object", stream_seed(cfg.fringe.rng_seed, Stream::object)},
                         {"reference", stream_seed(cfg.fringe.rng_seed, Stream::reference)}};
  if (sim.object_low) {
    side["low_frequency"] = cfg.low_frequency;
    side["low_period_px"] = cfg.low_period_px();
    side["stack_seeds"]["object_low"] = stream_seed(cfg.fringe.rng_seed, Stream::object_low);
  }
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  side["files"] = names;
  files.push_back(dir / "simulation.json");
  write_json(side, files.back());
  return files;
}

struct PipelineInputs {
  FringeStack object;
  FringeStack reference;
  std::optional<FringeStack> object_low;
  std::optional<Grid> truth;  // absolute object phase; NaN marks pixels without truth
};

inline PipelineInputs inputs_from(const Simulation& sim) {
  return {sim.object, sim.reference, sim.object_low, sim.truth_object};
}

/// Reads a capture directory laid out like write_simulation's output. Fringe
/// periods come from simulation.json when present, otherwise from cfg.
inline PipelineInputs load_inputs(const std::filesystem::path& dir, const PipelineConfig& cfg) {
  double period = cfg.fringe.period_px;
  double low_period = cfg.low_period_px();
  if (std::filesystem::exists(dir / "simulation.json")) {
    std::ifstream in(dir / "simulation.json");
    const auto side = nlohmann::json::parse(in);
    if (side.contains("config")) period = side["config"]["fringe"].value("period_px", period);
    low_period = side.value("low_period_px", low_period);
  }
  PipelineInputs inputs;
  inputs.object = run_stage("load(object)", [&] { return read_stack(dir, "object", period); });
  inputs.reference = run_stage("load(reference)", [&] { return read_stack(dir, "reference", period); });
  if (std::filesystem::exists(dir / stack_file("object_low", 0))) {
    inputs.object_low = run_stage("load(object_low)", [&] { return read_stack(dir, "object_low", low_period); });
  }
  if (std::filesystem::exists(dir / "truth_object.fphm")) {
    inputs.truth = run_stage("load(truth)", [&] {
      auto t = read_phase_map(dir / "truth_object.fphm");
      return t.grid;
    });
  }
  return inputs;
}

struct PipelineResult {
  WrappedPhaseMap object;     // wrapped object phase
  WrappedPhaseMap reference;  // wrapped reference-plane phase
  UnwrappedPhaseMap phi_min;  // spatially unwrapped reference plane
  std::optional<UnwrappedPhaseMap> geometric;
  std::optional<UnwrappedPhaseMap> corrected;
  bool residual_wraps_detected = false;
  std::optional<WrappedPhaseMap> object_low;
  std::optional<UnwrappedPhaseMap> object_low_unwrapped;
  UnwrappedPhaseMap final_phase;
  std::optional<EvalReport> report;
  std::optional<EvalReport> geometric_report;  // before correction, when correction ran
};

inline PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg) {
  PipelineResult r;
  const double threshold = cfg.modulation_threshold;
  r.object = run_stage("demod(object)", [&] { return four_step_phase(in.object, threshold); });
  r.reference = run_stage("demod(reference)", [&] { return four_step_phase(in.reference, threshold); });
  if (!r.object.phase.same_shape(r.reference.phase)) {
    throw StageError("demod", "object and reference captures differ in size");
  }
  r.phi_min = run_stage("unwrap-spatial(reference)",
                        [&] { return quality_guided_unwrap(r.reference, cfg.seed_pixel); });

  if (cfg.method == Method::dual_frequency) {
    if (!in.object_low) throw StageError("unwrap-dual", "dual-frequency method needs a low-frequency stack");
    r.object_low = run_stage("demod(object_low)", [&] { return four_step_phase(*in.object_low, threshold); });
    r.object_low_unwrapped =
        run_stage("unwrap-spatial(object_low)", [&] { return quality_guided_unwrap(*r.object_low); });
    const int w = r.object.phase.width();
    const FrequencyPair freqs{w / in.object_low->period_px, w / in.object.period_px};
    r.final_phase = run_stage("unwrap-dual", [&] {
      return dual_frequency_unwrap(*r.object_low_unwrapped, r.object, freqs);
    });
  } else {
    r.geometric = run_stage("unwrap-geometric", [&] {
      return geometric_unwrap(r.object, MinPhaseMap::from(r.phi_min));
    });
    r.residual_wraps_detected = has_residual_wraps(*r.geometric);
    if (cfg.method == Method::geometric_correct || r.residual_wraps_detected) {
      r.corrected = run_stage("correct", [&] {
        return residual_correct(*r.geometric, anchor_column(r.object.modulation, r.object.mask));
      });
    }
    r.final_phase = r.corrected ? *r.corrected : *r.geometric;
  }

  if (in.truth) {
    const Mask truth_mask = finite_mask(*in.truth);
    r.report = run_stage("evaluate", [&] { return evaluate(r.final_phase, *in.truth, truth_mask, true); });
    if (r.corrected) {
      r.geometric_report = run_stage("evaluate", [&] { return evaluate(*r.geometric, *in.truth, truth_mask, true); });
    }
  }
  return r;
}

inline void write_phase(const UnwrappedPhaseMap& m, const std::filesystem::path& path) {
  write_phase_map(m.phase, m.mask, path);
}

/// Writes every intermediate as FPHM, plus report.json and abs_error.fphm
/// when ground truth was available. Returns the paths written.
inline std::vector<std::filesystem::path> write_pipeline(const PipelineResult& r, const PipelineInputs& in,
                                                         const PipelineConfig& cfg,
                                                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("unwritable output directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  auto put = [&](const Grid& g, const Mask& m, std::string_view name) {
    files.push_back(dir / name);
    write_phase_map(g, m, files.back());
  };
  put(r.object.phase, r.object.mask, "object_wrapped.fphm");
  put(r.object.modulation, r.object.mask, "object_modulation.fphm");
  put(r.reference.phase, r.reference.mask, "reference_wrapped.fphm");
  put(r.reference.modulation, r.reference.mask, "reference_modulation.fphm");
  put(r.phi_min.phase, r.phi_min.mask, "phi_min.fphm");
  if (r.geometric) put(r.geometric->phase, r.geometric->mask, "geometric.fphm");
  if (r.corrected) put(r.corrected->phase, r.corrected->mask, "corrected.fphm");
  if (r.object_low) put(r.object_low->phase, r.object_low->mask, "object_low_wrapped.fphm");
  if (r.object_low_unwrapped) put(r.object_low_unwrapped->phase, r.object_low_unwrapped->mask, "object_low_unwrapped.fphm");
  put(r.final_phase.phase, r.final_phase.mask, "final.fphm");

  nlohmann::json report;
  report["method"] = std::string(to_string(cfg.method));
  report["provenance"] = std::string(to_string(r.final_phase.provenance));
  report["residual_wraps_detected"] = r.residual_wraps_detected;
  report["correction_applied"] = r.corrected.has_value();
  report["valid_pixels"] = r.final_phase.mask.count();
  if (r.report) {
    report["evaluation"] = *r.report;
    const auto diff = abs_difference(r.final_phase, *in.truth, finite_mask(*in.truth), r.report->piston_removed);
    put(diff.abs_error, diff.mask, "abs_error.fphm");
  }
  if (r.geometric_report) report["evaluation_before_correction"] = *r.geometric_report;
  files.push_back(dir / "report.json");
  write_json(report, files.back());
  return files;
}

struct SweepCell {
  double ratio = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  EvalReport dual;
  EvalReport geometric;
};

/// One sweep cell: low frequency cfg.low_frequency, high frequency
/// ratio * low, both methods evaluated on the same high-frequency stacks.
/// The geometric column is the ceiling unwrap alone, without correction.
inline SweepCell run_sweep_cell(const PipelineConfig& base, double ratio, double noise_sigma, std::uint64_t seed) {
  if (!(ratio > 1.0)) throw std::invalid_argument("sweep: ratio must be > 1");
  PipelineConfig cfg = base;
  cfg.fringe.period_px = cfg.scene.width / (ratio * cfg.low_frequency);
  cfg.fringe.noise_sigma = noise_sigma;
  cfg.fringe.rng_seed = seed;
  const Simulation sim = simulate(cfg, true);
  const Mask truth_mask = finite_mask(sim.truth_object);

  const auto object = four_step_phase(sim.object, cfg.modulation_threshold);
  const auto reference = four_step_phase(sim.reference, cfg.modulation_threshold);
  const auto low = four_step_phase(*sim.object_low, cfg.modulation_threshold);

  const auto phi_min = quality_guided_unwrap(reference, cfg.seed_pixel);
  const auto geometric = geometric_unwrap(object, MinPhaseMap::from(phi_min));
  const auto low_unwrapped = quality_guided_unwrap(low);
  const auto dual = dual_frequency_unwrap(low_unwrapped, object, {cfg.low_frequency, cfg.high_frequency()});

  return {ratio, noise_sigma, seed, evaluate(dual, sim.truth_object, truth_mask, true),
          evaluate(geometric, sim.truth_object, truth_mask, true)};
}

inline std::vector<SweepCell> run_sweep(const PipelineConfig& base, const std::vector<double>& ratios,
                                        const std::vector<double>& noise_levels,
                                        const std::vector<std::uint64_t>& seeds) {
  if (ratios.empty() || noise_levels.empty() || seeds.empty()) {
    throw std::invalid_argument("sweep: ratios, noise levels and seeds must be non-empty");
  }
  std::vector<SweepCell> cells;
  for (double ratio : ratios) {
    for (double noise : noise_levels) {
      for (auto seed : seeds) {
        cells.push_back(run_stage("sweep(ratio=" + std::to_string(ratio) + ",seed=" + std::to_string(seed) + ")",
                                  [&] { return run_sweep_cell(base, ratio, noise, seed); }));
      }
    }
  }
  return cells;
}

inline void write_sweep_table(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "ratio\tnoise_sigma\tseed\tvalid_pixels\tdual_order_errors\tdual_error_rate\t"
         "geometric_order_errors\tgeometric_error_rate\n";
  for (const auto& c : cells) {
    out << c.ratio << '\t' << c.noise_sigma << '\t' << c.seed << '\t' << c.geometric.valid_pixel_count << '\t'
        << c.dual.order_error_count << '\t' << c.dual.order_error_rate << '\t' << c.geometric.order_error_count
        << '\t' << c.geometric.order_error_rate << '\n';
  }
}

}  // namespace fpp
