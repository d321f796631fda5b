// stixels: generate, solve, evaluate, sweep and render stixel worlds.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage or validation error,
// 3 file I/O error, 4 malformed input document.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "stixels/formats.hpp"
#include "stixels/metrics.hpp"
#include "stixels/solver.hpp"
#include "stixels/synthetic.hpp"

namespace {

using namespace stixels;

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter file plus per-key flag overrides, e.g. --mc-cost 4.
struct ParamFlags {
  std::string file;
  std::map<std::string, std::optional<double>> overrides;

  void attach(CLI::App& app) {
    app.add_option("--params", file, "Parameter file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    for (const auto& key : param_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app.add_option(flag, overrides[key], "Override " + key);
    }
  }

  ModelParams resolve() const {
    ModelParams p = file.empty() ? ModelParams{} : read_params(std::filesystem::path(file));
    for (const auto& [key, value] : overrides) {
      if (value) *param_field(p, key) = *value;
    }
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    return p;
  }
};

Scan load_scan(const std::string& path) {
  Scan scan = read_scan(std::filesystem::path(path));
  const auto violations = validate_scan(scan);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << path << ": " << violations.size() << " invalid measurement(s); first: ";
    const auto& v = violations.front();
    if (v.column) msg << "column " << *v.column << ' ';
    if (v.row) msg << "row " << *v.row << ' ';
    msg << v.rule << ": " << v.detail;
    throw ValidationError(msg.str());
  }
  return scan;
}

// Writes `text` to `path`, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write '" + path + "'");
}

OutlierDenominator parse_denominator(const std::string& s) {
  if (s == "valid") return OutlierDenominator::ValidPoints;
  if (s == "all") return OutlierDenominator::AllPoints;
  throw ValidationError("--outlier-denominator must be 'valid' or 'all'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal stixel world segmentation of LiDAR scans"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "stixels 1.0.0");

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize a scan with ground truth");
  std::string gen_scene, gen_preset = "urban", gen_scan, gen_truth, gen_labels, gen_spec_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--scene", gen_scene, "Scene description file")->check(CLI::ExistingFile);
  gen->add_option("--preset", gen_preset, "Built-in scene when --scene is absent")
      ->check(CLI::IsMember({"urban", "noisy-urban"}));
  gen->add_option("--seed", gen_seed, "Noise seed");
  gen->add_option("--scan", gen_scan, "Output scan")->required();
  gen->add_option("--truth", gen_truth, "Output ground-truth world");
  gen->add_option("--labels", gen_labels, "Output per-point reference labels");
  gen->add_option("--write-scene", gen_spec_out, "Also write the scene description used");

  // solve
  auto* solve = app.add_subcommand("solve", "Compute the minimum-energy stixel world");
  std::string solve_scan_path, solve_out;
  unsigned solve_threads = 1;
  ParamFlags solve_params;
  solve->add_option("--scan", solve_scan_path, "Input scan")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", solve_out, "Output world")->required();
  solve->add_option("--threads", solve_threads, "Worker threads")->check(CLI::Range(1u, 256u));
  solve_params.attach(*solve);

  // eval
  auto* eval = app.add_subcommand("eval", "Outlier rate, IoU and compression rate");
  std::string eval_scan, eval_world, eval_labels, eval_out, eval_denominator = "valid";
  double eval_threshold = 0.05;
  ParamFlags eval_params;
  eval->add_option("--scan", eval_scan, "Input scan")->required()->check(CLI::ExistingFile);
  eval->add_option("--world", eval_world, "Stixel world")->required()->check(CLI::ExistingFile);
  eval->add_option("--labels", eval_labels, "Reference labels")->required()->check(CLI::ExistingFile);
  eval->add_option("--threshold", eval_threshold, "Relative range deviation for outliers");
  eval->add_option("--outlier-denominator", eval_denominator, "valid or all");
  eval->add_option("--out", eval_out, "Report path (stdout when omitted)");
  eval_params.attach(*eval);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate a grid of one parameter");
  std::string sweep_scan, sweep_labels, sweep_out, sweep_param, sweep_denominator = "valid";
  double sweep_min = 0.0, sweep_max = 5.0, sweep_threshold = 0.05;
  std::size_t sweep_steps = 6;
  unsigned sweep_threads = 1;
  ParamFlags sweep_params;
  sweep->add_option("--scan", sweep_scan, "Input scan")->required()->check(CLI::ExistingFile);
  sweep->add_option("--labels", sweep_labels, "Reference labels")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_param, "Parameter to vary")->required();
  sweep->add_option("--min", sweep_min, "First grid value");
  sweep->add_option("--max", sweep_max, "Last grid value");
  sweep->add_option("--steps", sweep_steps, "Grid size")->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  sweep->add_option("--threshold", sweep_threshold, "Relative range deviation for outliers");
  sweep->add_option("--outlier-denominator", sweep_denominator, "valid or all");
  sweep->add_option("--threads", sweep_threads, "Worker threads")->check(CLI::Range(1u, 256u));
  sweep->add_option("--out", sweep_out, "Table path (stdout when omitted)");
  sweep_params.attach(*sweep);

  // render
  auto* render = app.add_subcommand("render", "Draw a world as a PPM image");
  std::string render_world, render_scan, render_out;
  std::size_t render_sx = 1, render_sy = 1;
  render->add_option("--world", render_world, "Stixel world")->required()->check(CLI::ExistingFile);
  render->add_option("--scan", render_scan, "Scan the world was solved from")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output image")->required();
  render->add_option("--scale-x", render_sx, "Pixels per column")->check(CLI::Range(std::size_t{1}, std::size_t{64}));
  render->add_option("--scale-y", render_sy, "Pixels per row")->check(CLI::Range(std::size_t{1}, std::size_t{64}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) {
      SceneSpec spec;
      if (!gen_scene.empty()) {
        spec = read_scene(std::filesystem::path(gen_scene));
      } else if (gen_preset == "noisy-urban") {
        spec = noisy_urban_scene(0.03, 0.01, 0.05, 0.1, 0);
      } else {
        spec = urban_scene();
      }
      if (gen_seed) spec.seed = *gen_seed;
      const SyntheticScene scene = generate(spec);
      write_scan(scene.scan, std::filesystem::path(gen_scan));
      if (!gen_truth.empty()) write_world(scene.truth, std::filesystem::path(gen_truth));
      if (!gen_labels.empty()) write_labels(scene.labels, std::filesystem::path(gen_labels));
      if (!gen_spec_out.empty()) write_scene(spec, std::filesystem::path(gen_spec_out));
    } else if (*solve) {
      const ModelParams params = solve_params.resolve();
      const Scan scan = load_scan(solve_scan_path);
      const auto start = std::chrono::steady_clock::now();
      const StixelWorld world = solve_scan(scan, params, SolveOptions{solve_threads});
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      write_world(world, std::filesystem::path(solve_out));
      double energy = 0.0;
      for (double e : world.energies) energy += e;
      std::cout << "energy " << energy << '\n'
                << "stixels " << world.num_stixels() << '\n'
                << "seconds " << elapsed.count() << '\n'
                << "params_hash " << params_hash(params) << '\n';
    } else if (*eval) {
      const ModelParams params = eval_params.resolve();
      const Scan scan = load_scan(eval_scan);
      const StixelWorld world = read_world(std::filesystem::path(eval_world));
      const PointLabels labels = read_labels(std::filesystem::path(eval_labels));
      OutlierOptions opt{eval_threshold, parse_denominator(eval_denominator),
                         params.sensor_height_m};
      EvalReport report;
      try {
        report = evaluate(scan, world, labels, opt);
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
      std::ostringstream out;
      write_report(report, params_hash(params), out);
      emit(eval_out, out.str());
    } else if (*sweep) {
      ModelParams base = sweep_params.resolve();
      if (!param_field(base, sweep_param)) {
        throw ValidationError("unknown parameter '" + sweep_param + "'");
      }
      if (sweep_steps == 1 && sweep_min != sweep_max) {
        throw ValidationError("--steps 1 needs --min equal to --max");
      }
      const Scan scan = load_scan(sweep_scan);
      const PointLabels labels = read_labels(std::filesystem::path(sweep_labels));
      const OutlierOptions opt{sweep_threshold, parse_denominator(sweep_denominator),
                               base.sensor_height_m};
      std::vector<SweepRow> rows;
      for (std::size_t i = 0; i < sweep_steps; ++i) {
        const double value =
            sweep_steps == 1
                ? sweep_min
                : sweep_min + (sweep_max - sweep_min) * static_cast<double>(i) /
                                  static_cast<double>(sweep_steps - 1);
        ModelParams p = base;
        *param_field(p, sweep_param) = value;
        try {
          p.validate();
        } catch (const std::invalid_argument& e) {
          throw ValidationError("grid value " + std::to_string(value) + ": " + e.what());
        }
        const StixelWorld world = solve_scan(scan, p, SolveOptions{sweep_threads});
        rows.push_back({value, evaluate(scan, world, labels, opt)});
      }
      std::ostringstream out;
      write_sweep(sweep_param, rows, params_hash(base), out);
      emit(sweep_out, out.str());
    } else if (*render) {
      const StixelWorld world = read_world(std::filesystem::path(render_world));
      const Scan scan = read_scan(std::filesystem::path(render_scan));
      render_ppm(world, scan, default_palette(world.classes), std::filesystem::path(render_out),
                 RenderOptions{render_sx, render_sy});
    }
  } catch (const FormatError& e) {
    std::cerr << "stixels: parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const IoError& e) {
    std::cerr << "stixels: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "stixels: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "stixels: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "stixels: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
