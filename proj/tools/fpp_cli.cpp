// fpp: fringe projection phase unwrapping toolkit.
//
//   fpp simulate          render object/reference four-step stacks + ground truth
//   fpp demod             four PGM frames -> wrapped phase + modulation
//   fpp unwrap-spatial    spatially unwrap a wrapped map (reference plane)
//   fpp unwrap-geometric  unwrap an object phase against a reference-plane phi_min
//   fpp unwrap-dual       conventional dual-frequency unwrap
//   fpp correct           residual-wrap correction of a geometric result
//   fpp evaluate          compare an unwrapped map against ground truth
//   fpp pipeline          the full reference-plane pipeline
//   fpp sweep             dual-frequency vs geometric order-error table

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fpp/fpp.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> period_px;
  std::optional<double> noise_sigma;
  std::optional<std::string> method;
  std::optional<double> ratio;
  std::optional<std::string> seed_pixel;
  std::optional<double> mod_threshold;
  std::optional<std::string> scene;
};

fpp::Pixel parse_pixel(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--seed-pixel expects X,Y");
  return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
}

void add_common(CLI::App* app, CommonOptions& o, bool experiment) {
  app->add_option("--out", o.out_dir, "Output directory");
  app->add_option("--seed-pixel", o.seed_pixel, "Spatial unwrapping seed as X,Y");
  app->add_option("--mod-threshold", o.mod_threshold, "Modulation threshold (intensity counts)");
  if (!experiment) return;
  app->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Noise RNG seed");
  app->add_option("--period-px", o.period_px, "Fringe period in pixels");
  app->add_option("--noise-sigma", o.noise_sigma, "Intensity noise standard deviation");
  app->add_option("--method", o.method, "geometric | geometric+correct | dual-frequency");
  app->add_option("--ratio", o.ratio, "High/low frequency ratio (dual-frequency)");
  app->add_option("--scene", o.scene, "flat-plane | gaussian-peaks | plate-with-holes | step");
}

/// Config file first, command-line flags override it.
fpp::PipelineConfig resolve_config(const CommonOptions& o) {
  fpp::PipelineConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    nlohmann::json::parse(in).get_to(cfg);
  }
  if (o.scene) {
    const auto kind = fpp::scene_kind_from_string(*o.scene);
    if (kind == fpp::SceneKind::plate_with_holes) {
      cfg.scene = fpp::SceneSpec::plate_with_two_holes();
    } else if (kind != cfg.scene.kind) {
      cfg.scene.kind = kind;
      if (kind == fpp::SceneKind::step && cfg.scene.step_height_mm == 0.0) {
        cfg.scene.step_height_mm = 10.0;
        cfg.scene.step_column = cfg.scene.width / 2;
      }
    }
  }
  if (o.seed) cfg.fringe.rng_seed = *o.seed;
  if (o.period_px) cfg.fringe.period_px = *o.period_px;
  if (o.noise_sigma) cfg.fringe.noise_sigma = *o.noise_sigma;
  if (o.method) cfg.method = fpp::method_from_string(*o.method);
  if (o.ratio) cfg.low_frequency = cfg.high_frequency() / *o.ratio;
  if (o.seed_pixel) cfg.seed_pixel = parse_pixel(*o.seed_pixel);
  if (o.mod_threshold) cfg.modulation_threshold = *o.mod_threshold;
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  cfg.validate();
  return cfg;
}

fs::path ensure_dir(const std::string& dir) {
  const fs::path p = dir.empty() ? fs::path("out") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw std::runtime_error("unwritable output directory: " + p.string());
  return p;
}

/// Wrapped map from FPHM phase (+ optional modulation). Without a modulation
/// file every valid pixel gets quality 1.
fpp::WrappedPhaseMap load_wrapped(const std::string& phase_path, const std::string& modulation_path) {
  auto phase = fpp::read_phase_map(phase_path);
  fpp::Grid modulation(phase.grid.width(), phase.grid.height(), 1.0, fpp::Unit::intensity);
  if (!modulation_path.empty()) {
    auto m = fpp::read_phase_map(modulation_path, fpp::Unit::intensity);
    if (!m.grid.same_shape(phase.grid)) throw std::invalid_argument("modulation map size differs from phase map");
    modulation = std::move(m.grid);
  }
  for (std::size_t i = 0; i < modulation.size(); ++i) {
    if (!phase.mask.valid(i)) modulation[i] = 0.0;
  }
  return {std::move(phase.grid), std::move(modulation), std::move(phase.mask)};
}

fpp::UnwrappedPhaseMap load_unwrapped(const std::string& path, fpp::Provenance provenance) {
  auto m = fpp::read_phase_map(path);
  return {std::move(m.grid), std::move(m.mask), provenance};
}

void print_files(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << f.string() << '\n';
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw std::invalid_argument("bad list element: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fringe projection phase unwrapping with a measured reference plane"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* simulate = app.add_subcommand("simulate", "Render object and reference fringe stacks");
  add_common(simulate, common, true);
  bool with_low = false;
  simulate->add_flag("--with-low", with_low, "Also render the low-frequency object stack");

  auto* demod = app.add_subcommand("demod", "Four-step demodulation of four PGM frames");
  add_common(demod, common, false);
  std::vector<std::string> frames;
  std::string demod_name = "wrapped";
  demod->add_option("frames", frames, "I0 I1 I2 I3 (PGM)")->required()->expected(4);
  demod->add_option("--name", demod_name, "Output file stem");

  auto* spatial = app.add_subcommand("unwrap-spatial", "Spatially unwrap a wrapped phase map");
  add_common(spatial, common, false);
  std::string spatial_in, spatial_mod, spatial_method = "quality-guided";
  spatial->add_option("wrapped", spatial_in, "Wrapped phase (FPHM)")->required()->check(CLI::ExistingFile);
  spatial->add_option("--modulation", spatial_mod, "Modulation map (FPHM) used as quality");
  spatial->add_option("--method", spatial_method, "quality-guided | itoh");

  auto* geometric = app.add_subcommand("unwrap-geometric", "Unwrap against a reference-plane phi_min");
  add_common(geometric, common, false);
  std::string geo_wrapped, geo_min;
  geometric->add_option("wrapped", geo_wrapped, "Wrapped object phase (FPHM)")->required()->check(CLI::ExistingFile);
  geometric->add_option("phi_min", geo_min, "Unwrapped reference phase (FPHM)")->required()->check(CLI::ExistingFile);

  auto* dual = app.add_subcommand("unwrap-dual", "Conventional dual-frequency unwrap");
  add_common(dual, common, false);
  std::string dual_low, dual_high;
  double dual_ratio = 0.0;
  dual->add_option("low", dual_low, "Unwrapped low-frequency phase (FPHM)")->required()->check(CLI::ExistingFile);
  dual->add_option("high", dual_high, "Wrapped high-frequency phase (FPHM)")->required()->check(CLI::ExistingFile);
  dual->add_option("--ratio", dual_ratio, "f_high / f_low")->required();

  auto* correct = app.add_subcommand("correct", "Residual-wrap correction");
  add_common(correct, common, false);
  std::string correct_in, correct_mod;
  correct->add_option("unwrapped", correct_in, "Geometric unwrap result (FPHM)")->required()->check(CLI::ExistingFile);
  correct->add_option("--modulation", correct_mod, "Modulation map used to pick the anchor column");

  auto* evaluate = app.add_subcommand("evaluate", "Compare an unwrapped map against ground truth");
  add_common(evaluate, common, false);
  std::string eval_est, eval_truth;
  bool no_piston = false;
  evaluate->add_option("estimate", eval_est, "Unwrapped estimate (FPHM)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("truth", eval_truth, "Ground-truth phase (FPHM)")->required()->check(CLI::ExistingFile);
  evaluate->add_flag("--no-piston", no_piston, "Do not remove the best-fit 2*pi*n piston");

  auto* pipeline = app.add_subcommand("pipeline", "Run the full reference-plane pipeline");
  add_common(pipeline, common, true);
  std::string input_dir;
  pipeline->add_option("--input", input_dir, "Capture directory (default: simulate from config)");

  auto* sweep = app.add_subcommand("sweep", "Order-error table: dual-frequency vs geometric");
  add_common(sweep, common, true);
  std::string ratios_text = "4,8,16,32", noise_text = "2", seeds_text = "1,2,3,4,5,6,7,8,9,10";
  sweep->add_option("--ratios", ratios_text, "Comma-separated frequency ratios");
  sweep->add_option("--noise-levels", noise_text, "Comma-separated intensity noise sigmas");
  sweep->add_option("--seeds", seeds_text, "Comma-separated RNG seeds");

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (simulate->parsed()) {
      auto cfg = resolve_config(common);
      const bool low = with_low || cfg.method == fpp::Method::dual_frequency;
      const auto sim = fpp::run_stage("simulate", [&] { return fpp::simulate(cfg, low); });
      print_files(fpp::run_stage("write", [&] { return fpp::write_simulation(sim, cfg, cfg.output_dir); }));
    } else if (demod->parsed()) {
      fpp::FringeStack stack;
      for (int n = 0; n < 4; ++n) {
        stack.frames[n] = fpp::run_stage("read(" + frames[n] + ")", [&] { return fpp::read_image(frames[n]); });
      }
      const double threshold = common.mod_threshold.value_or(fpp::default_modulation_threshold);
      const auto w = fpp::run_stage("demod", [&] { return fpp::four_step_phase(stack, threshold); });
      const auto dir = ensure_dir(common.out_dir);
      fpp::write_phase_map(w.phase, w.mask, dir / (demod_name + "_phase.fphm"));
      fpp::write_phase_map(w.modulation, w.mask, dir / (demod_name + "_modulation.fphm"));
      print_files({dir / (demod_name + "_phase.fphm"), dir / (demod_name + "_modulation.fphm")});
    } else if (spatial->parsed()) {
      const auto w = fpp::run_stage("read", [&] { return load_wrapped(spatial_in, spatial_mod); });
      std::optional<fpp::Pixel> seed;
      if (common.seed_pixel) seed = parse_pixel(*common.seed_pixel);
      const auto u = fpp::run_stage("unwrap-spatial", [&] {
        if (spatial_method == "itoh") return fpp::itoh_unwrap(w, seed);
        if (spatial_method == "quality-guided") return fpp::quality_guided_unwrap(w, seed);
        throw std::invalid_argument("unknown spatial method: " + spatial_method);
      });
      const auto path = ensure_dir(common.out_dir) / "unwrapped_spatial.fphm";
      fpp::write_phase(u, path);
      print_files({path});
    } else if (geometric->parsed()) {
      const auto w = fpp::run_stage("read", [&] { return load_wrapped(geo_wrapped, ""); });
      const auto m = fpp::run_stage("read", [&] { return fpp::read_phase_map(geo_min); });
      const auto u = fpp::run_stage("unwrap-geometric", [&] {
        return fpp::geometric_unwrap(w, fpp::MinPhaseMap{m.grid, m.mask});
      });
      const auto path = ensure_dir(common.out_dir) / "geometric.fphm";
      fpp::write_phase(u, path);
      std::cout << "residual_wraps_detected\t" << (fpp::has_residual_wraps(u) ? "yes" : "no") << '\n';
      print_files({path});
    } else if (dual->parsed()) {
      const auto low = fpp::run_stage("read", [&] { return load_unwrapped(dual_low, fpp::Provenance::spatial_quality_guided); });
      const auto high = fpp::run_stage("read", [&] { return load_wrapped(dual_high, ""); });
      const auto u = fpp::run_stage("unwrap-dual", [&] {
        return fpp::dual_frequency_unwrap(low, high, {1.0, dual_ratio});
      });
      const auto path = ensure_dir(common.out_dir) / "dual.fphm";
      fpp::write_phase(u, path);
      print_files({path});
    } else if (correct->parsed()) {
      const auto u = fpp::run_stage("read", [&] { return load_unwrapped(correct_in, fpp::Provenance::geometric); });
      std::optional<int> anchor;
      if (!correct_mod.empty()) {
        const auto m = fpp::run_stage("read", [&] { return fpp::read_phase_map(correct_mod, fpp::Unit::intensity); });
        anchor = fpp::anchor_column(m.grid, intersect(m.mask, u.mask));
      }
      const bool detected = fpp::has_residual_wraps(u);
      const auto c = fpp::run_stage("correct", [&] { return fpp::residual_correct(u, anchor); });
      const auto path = ensure_dir(common.out_dir) / "corrected.fphm";
      fpp::write_phase(c, path);
      std::cout << "residual_wraps_detected\t" << (detected ? "yes" : "no") << '\n';
      print_files({path});
    } else if (evaluate->parsed()) {
      const auto est = fpp::run_stage("read", [&] { return load_unwrapped(eval_est, fpp::Provenance::geometric); });
      const auto truth = fpp::run_stage("read", [&] { return fpp::read_phase_map(eval_truth); });
      const auto report = fpp::run_stage("evaluate", [&] { return fpp::evaluate(est, truth.grid, truth.mask, !no_piston); });
      const auto dir = ensure_dir(common.out_dir);
      const auto diff = fpp::abs_difference(est, truth.grid, truth.mask, report.piston_removed);
      fpp::write_phase_map(diff.abs_error, diff.mask, dir / "abs_error.fphm");
      const nlohmann::json j = report;
      fpp::write_json(j, dir / "report.json");
      std::cout << j.dump(2) << '\n';
    } else if (pipeline->parsed()) {
      auto cfg = resolve_config(common);
      fpp::PipelineInputs inputs;
      if (input_dir.empty()) {
        const auto sim = fpp::run_stage("simulate", [&] {
          return fpp::simulate(cfg, cfg.method == fpp::Method::dual_frequency);
        });
        fpp::run_stage("write", [&] { return fpp::write_simulation(sim, cfg, fs::path(cfg.output_dir) / "captures"); });
        inputs = fpp::inputs_from(sim);
      } else {
        inputs = fpp::load_inputs(input_dir, cfg);
      }
      const auto result = fpp::run_pipeline(inputs, cfg);
      print_files(fpp::run_stage("write", [&] { return fpp::write_pipeline(result, inputs, cfg, cfg.output_dir); }));
      if (result.report) std::cout << nlohmann::json(*result.report).dump(2) << '\n';
    } else if (sweep->parsed()) {
      auto cfg = resolve_config(common);
      const auto cells = fpp::run_sweep(cfg, parse_list<double>(ratios_text), parse_list<double>(noise_text),
                                        parse_list<std::uint64_t>(seeds_text));
      fpp::write_sweep_table(std::cout, cells);
      if (!common.out_dir.empty()) {
        std::ofstream out(ensure_dir(common.out_dir) / "sweep.tsv");
        fpp::write_sweep_table(out, cells);
      }
    }
  } catch (const fpp::StageError& e) {
    std::cerr << "error: " << stage << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
