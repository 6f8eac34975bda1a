#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sccn/harness.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const fs::path& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
                bool timings, std::optional<int> threads) {
  sccn::ScenarioConfig cfg = sccn::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (timings) cfg.csv_timings = true;
  if (!out_dir.empty()) {
    cfg.csv_path = fs::path(out_dir) / cfg.csv_path.filename();
    cfg.summary_path = fs::path(out_dir) / cfg.summary_path.filename();
  }
  cfg.validate();

  const sccn::ScenarioReport report = sccn::run_scenario(cfg);
  sccn::write_outputs(report, cfg);

  const auto& s = report.summary;
  std::printf("trials %d  successes %d  acc(ADD) %.3f  acc(ADD-S) %.3f", s.trials, s.successes, s.accuracy_add,
              s.accuracy_add_s);
  if (s.accuracy_add_s_prime) std::printf("  acc(ADD-S') %.3f", *s.accuracy_add_s_prime);
  std::printf("\nmean rot err %.4f deg  mean pnp %.3f ms\n", s.mean_rotation_error_deg, s.mean_pnp_ms);
  for (const auto& [reason, count] : s.failures) std::printf("  %s: %d\n", reason.c_str(), count);
  std::printf("wrote %s, %s\n", cfg.csv_path.c_str(), cfg.summary_path.c_str());
  return 0;
}

int bench_command(sccn::BenchConfig cfg, const std::string& out) {
  const auto rows = sccn::benchmark_pnp(cfg);
  const std::string csv = sccn::bench_csv(rows, cfg);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    const fs::path path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << csv;
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int debug_command(const fs::path& config_path, int trial, const std::string& out_dir) {
  const sccn::ScenarioConfig cfg = sccn::load_config(config_path);
  for (const auto& path : sccn::render_debug(cfg, trial, out_dir)) std::printf("%s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse color-code pose estimation experiments"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool timings = false;
  std::optional<int> threads;
  auto* run = app.add_subcommand("run", "Run a scenario and write per-trial CSV plus a JSON summary");
  run->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out-dir", out_dir, "Directory for the CSV and summary");
  run->add_option("--threads", threads, "Worker threads");
  run->add_flag("--timings", timings, "Fill the timing columns of the CSV");

  sccn::BenchConfig bench;
  std::string bench_out;
  auto* bp = app.add_subcommand("bench-pnp", "Time RANSAC PnP on synthetic correspondences");
  bp->add_option("--counts", bench.counts, "Correspondence counts")->delimiter(',');
  bp->add_option("--outliers", bench.outlier_ratio, "Outlier ratio");
  bp->add_option("--repeats", bench.repeats, "Repeats per count");
  bp->add_option("--seed", bench.seed, "Seed");
  bp->add_option("--noise", bench.pixel_noise, "Inlier pixel noise sigma");
  bp->add_option("--out", bench_out, "Output CSV (stdout when omitted)");

  std::string debug_config;
  int trial = 0;
  std::string debug_dir;
  auto* rd = app.add_subcommand("render-debug", "Dump one trial's intermediate images as PPM/PGM");
  rd->add_option("--config", debug_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  rd->add_option("--trial", trial, "Trial index");
  rd->add_option("--out-dir", debug_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config, seed, out_dir, timings, threads);
    if (*bp) return bench_command(bench, bench_out);
    if (*rd) return debug_command(debug_config, trial, debug_dir);
  } catch (const sccn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
