// chdet: change detection between two co-registered grayscale images.
//
//   chdet run      --t1 A --t2 B [--truth T] [pipeline options]
//   chdet compare  --t1 A1 --t2 B1 --truth T1 [--t1 A2 ...] [--methods otsu,kmeans,fcm]
//   chdet synth    --out-dir D --id scene [--seed N --shapes K ...]
//   chdet dwt-roundtrip --input IMG [--levels N] [--dump pyramid.pgm]
//
// Any subcommand accepts --config FILE with key=value lines (keys are flag
// names without the dashes). Flags given on the command line win over the
// file, which wins over built-in defaults.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "chdet/pipeline.hpp"
#include "chdet/raster_io.hpp"
#include "chdet/synthgen.hpp"

namespace {

using chdet::Error;
using chdet::ErrorCode;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string flag_key(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) return {};
  return arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
}

// Splices key=value lines from --config into the argument list, skipping
// keys the command line already sets.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorCode::InvalidArgument, "--config needs a path");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "--config: cannot read " + config_path);

  std::set<std::string> given;
  for (const std::string& a : args) {
    if (const std::string key = flag_key(a); !key.empty()) given.insert(key);
  }

  std::vector<std::string> from_file;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument,
                  "--config: " + config_path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (given.count(key)) continue;
    from_file.push_back("--" + key);
    from_file.push_back(value);
  }

  const bool has_subcommand = !args.empty() && args[0].rfind('-', 0) != 0;
  args.insert(has_subcommand ? args.begin() + 1 : args.end(), from_file.begin(), from_file.end());
  return args;
}

struct PipelineOptions {
  std::string fusion = "dwt";
  std::string segmentor = "fcm";
  chdet::PipelineConfig cfg;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& o) {
  cmd->add_option("--fusion", o.fusion, "Difference map: minus, ratio, weighted or dwt")
      ->check(CLI::IsMember({"minus", "ratio", "weighted", "dwt"}))
      ->capture_default_str();
  cmd->add_option("--clusters", o.cfg.fcm.clusters, "Cluster count for fcm and kmeans")
      ->capture_default_str();
  cmd->add_option("--fuzziness", o.cfg.fcm.fuzziness, "FCM fuzziness exponent (> 1)")
      ->capture_default_str();
  cmd->add_option("--eps", o.cfg.fcm.eps, "FCM convergence tolerance on membership change")
      ->capture_default_str();
  cmd->add_option("--max-iter", o.cfg.fcm.max_iter, "Iteration cap for fcm and kmeans")
      ->capture_default_str();
  cmd->add_option("--levels", o.cfg.levels, "Wavelet decomposition depth (dwt fusion)")
      ->capture_default_str();
  cmd->add_option("--split", o.cfg.split.boundary, "Low-frequency band boundary in (0,1)")
      ->capture_default_str();
  cmd->add_option("--weight", o.cfg.weight, "Minus-map weight (weighted fusion)")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Seed for clustering initialisation")->capture_default_str();
  cmd->add_option("--out-dir", o.cfg.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--config", "key=value file; command-line flags take precedence");
}

int run_command(PipelineOptions& o, const std::string& t1, const std::string& t2,
                const std::string& truth, const std::string& dump) {
  chdet::PipelineConfig cfg = o.cfg;
  cfg.t1 = t1;
  cfg.t2 = t2;
  if (!truth.empty()) cfg.truth = truth;
  if (!dump.empty()) cfg.fcm_dump = dump;
  cfg.fusion = chdet::parse_fusion(o.fusion);
  cfg.segmentor = chdet::parse_segmentor(o.segmentor);

  const chdet::RunResult result = chdet::run(cfg);
  std::cout << "changed_fraction=" << result.change_map.changed_fraction() << '\n';
  if (result.report) {
    std::cout << chdet::csv_header() << '\n'
              << chdet::csv_row(std::string(chdet::method_name(cfg.segmentor)), cfg.test_id,
                                *result.report)
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const Error& e) {
    std::cerr << "chdet: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Change detection with wavelet-fused difference maps"};
  app.name("chdet");
  app.require_subcommand(1);

  // run
  PipelineOptions run_opts;
  std::string run_t1, run_t2, run_truth, run_dump;
  CLI::App* run_cmd = app.add_subcommand("run", "Detect changes between one image pair");
  run_cmd->add_option("--t1", run_t1, "Earlier image")->required();
  run_cmd->add_option("--t2", run_t2, "Later image")->required();
  run_cmd->add_option("--truth", run_truth, "Ground-truth change map; enables report.csv");
  run_cmd->add_option("--segmentor", run_opts.segmentor, "otsu, kmeans or fcm")
      ->check(CLI::IsMember({"otsu", "kmeans", "fcm"}))
      ->capture_default_str();
  run_cmd->add_option("--test-id", run_opts.cfg.test_id, "Test set label in report.csv")
      ->capture_default_str();
  run_cmd->add_option("--dump-fcm", run_dump, "Write FCM centers and memberships as text");
  add_pipeline_options(run_cmd, run_opts);

  // compare
  PipelineOptions cmp_opts;
  std::vector<std::string> cmp_t1, cmp_t2, cmp_truth, cmp_ids;
  std::vector<std::string> cmp_methods{"otsu", "kmeans", "fcm"};
  unsigned cmp_jobs = 1;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Score several segmentors over several test sets");
  cmp_cmd->add_option("--t1", cmp_t1, "Earlier image of each test set (repeatable)")->required();
  cmp_cmd->add_option("--t2", cmp_t2, "Later image of each test set (repeatable)")->required();
  cmp_cmd->add_option("--truth", cmp_truth, "Ground truth of each test set (repeatable)")
      ->required();
  cmp_cmd->add_option("--ids", cmp_ids, "Test set labels (default 1, 2, ...)");
  cmp_cmd->add_option("--methods", cmp_methods, "Segmentors to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"otsu", "kmeans", "fcm"}))
      ->capture_default_str();
  cmp_cmd->add_option("--jobs", cmp_jobs, "Test sets processed concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_pipeline_options(cmp_cmd, cmp_opts);

  // synth
  chdet::SceneSpec scene;
  std::string synth_dir = ".";
  std::string synth_id = "scene";
  double synth_salt = 0.0;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic pair with ground truth");
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->capture_default_str();
  synth_cmd->add_option("--id", synth_id, "File prefix")->capture_default_str();
  synth_cmd->add_option("--width", scene.width)->capture_default_str();
  synth_cmd->add_option("--height", scene.height)->capture_default_str();
  synth_cmd->add_option("--seed", scene.seed)->capture_default_str();
  synth_cmd->add_option("--shapes", scene.n_shapes, "Number of changed regions")
      ->capture_default_str();
  synth_cmd->add_option("--noise", scene.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  synth_cmd->add_option("--contrast", scene.contrast_delta, "Intensity shift inside regions")
      ->capture_default_str();
  synth_cmd->add_option("--salt", synth_salt, "Fraction of t2 pixels forced to 0 or 1")
      ->capture_default_str();
  synth_cmd->add_option("--config", "key=value file; command-line flags take precedence");

  // dwt-roundtrip
  std::string rt_input, rt_dump;
  std::size_t rt_levels = 1;
  CLI::App* rt_cmd =
      app.add_subcommand("dwt-roundtrip", "Check wavelet reconstruction on an image");
  rt_cmd->add_option("--input", rt_input, "Image to transform")->required();
  rt_cmd->add_option("--levels", rt_levels)->capture_default_str();
  rt_cmd->add_option("--dump", rt_dump, "Write the coefficient pyramid as a PGM");
  rt_cmd->add_option("--config", "key=value file; command-line flags take precedence");

  std::vector<const char*> cargv{argv[0]};
  for (const std::string& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "chdet: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*run_cmd) return run_command(run_opts, run_t1, run_t2, run_truth, run_dump);

    if (*cmp_cmd) {
      if (cmp_t1.size() != cmp_t2.size() || cmp_t1.size() != cmp_truth.size()) {
        throw Error(ErrorCode::InvalidArgument, "--t1, --t2 and --truth must be given equally often");
      }
      if (!cmp_ids.empty() && cmp_ids.size() != cmp_t1.size()) {
        throw Error(ErrorCode::InvalidArgument, "--ids must label every test set");
      }
      std::vector<chdet::TestSet> sets;
      for (std::size_t i = 0; i < cmp_t1.size(); ++i) {
        sets.push_back({cmp_ids.empty() ? std::to_string(i + 1) : cmp_ids[i], cmp_t1[i], cmp_t2[i],
                        cmp_truth[i]});
      }
      std::vector<chdet::Segmentor> methods;
      for (const std::string& m : cmp_methods) methods.push_back(chdet::parse_segmentor(m));
      chdet::PipelineConfig cfg = cmp_opts.cfg;
      cfg.fusion = chdet::parse_fusion(cmp_opts.fusion);
      std::cout << chdet::compare_csv(chdet::compare(sets, methods, cfg, cmp_jobs));
      return 0;
    }

    if (*synth_cmd) {
      chdet::SyntheticPair pair = chdet::generate_pair(scene);
      if (synth_salt > 0.0) pair.t2 = chdet::add_salt_noise(pair.t2, synth_salt, scene.seed + 1);
      std::filesystem::create_directories(synth_dir);
      chdet::write_pair(pair, synth_dir, synth_id);
      std::cout << "change_fraction=" << pair.change_fraction << '\n';
      return 0;
    }

    if (*rt_cmd) {
      const chdet::GrayRaster raster = chdet::load_raster(rt_input);
      const std::filesystem::path dump_path = rt_dump;
      const chdet::RoundTripStats stats =
          chdet::dwt_roundtrip(raster, rt_levels, rt_dump.empty() ? nullptr : &dump_path);
      std::cout << "side=" << stats.side << "\nlevels=" << stats.levels
                << "\nmax_abs_error=" << stats.max_abs_error << "\nenergy_in=" << stats.energy_in
                << "\nenergy_coeffs=" << stats.energy_coeffs << '\n';
      return stats.max_abs_error < 1e-9 ? 0 : 4;
    }
  } catch (const Error& e) {
    std::cerr << "chdet: " << e.what() << '\n';
    return chdet::exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "chdet: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "chdet: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
