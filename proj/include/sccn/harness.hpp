#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sccn/colorcode.hpp"
#include "sccn/errors.hpp"
#include "sccn/geometry.hpp"
#include "sccn/mask_pipeline.hpp"
#include "sccn/metrics.hpp"
#include "sccn/pnp.hpp"
#include "sccn/renderer.hpp"
#include "sccn/sparse_select.hpp"

namespace sccn {

/// Corruption applied to the oracle render to stand in for an imperfect
/// network.
struct NoiseModel {
  std::array<double, 3> gaussian_sigma{0.0, 0.0, 0.0};
  double dropout_prob = 0.0;
  double outlier_prob = 0.0;

  void validate() const;
  bool is_noop() const noexcept;
};

/// Uniform rotation; the aabb centre is placed at a uniform depth along the
/// ray through a pixel jittered around the principal point by up to
/// `center_jitter` of the half image size.
struct PoseSampler {
  double distance_min = 0.45;
  double distance_max = 0.75;
  double center_jitter = 0.15;
};

struct MaskConfig {
  GrowMaskParams grow;
  double contour_threshold = kDefaultContourThreshold;
  int patch_size = kPatchSize;
  double prob_foreground = 0.95;
  double prob_background = 0.05;
  double blur_sigma = 2.0;  // pixels
};

enum class ReflectedTrials { None, Alternate };

struct ScenarioConfig {
  std::string mesh = "builtin:house";
  ColorCodeMode mode = ColorCodeMode::Anisotropic;
  std::optional<Aabb> aabb;  // defaults to the mesh aabb
  std::optional<int> symmetry_axis;
  std::optional<double> plane_offset;
  CameraIntrinsics camera{572.4, 573.6, 325.3, 242.0, 640, 480};
  int trials = 50;
  PoseSampler pose;
  NoiseModel noise;
  SamplingRate sampling_rate = SamplingRate::Quarter;
  std::size_t point_budget = 400;
  RansacParams ransac;  // rng_seed is replaced per trial
  MaskConfig mask;
  std::size_t eval_point_cap = 1000;
  bool resolve_symmetry_sign = true;
  ReflectedTrials reflected_trials = ReflectedTrials::None;
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path csv_path = "results.csv";
  std::filesystem::path summary_path = "summary.json";
  bool csv_timings = false;

  /// Throws ConfigInvalid.
  void validate() const;
};

/// Parses the JSON schema documented in docs/config.md; unknown keys and bad
/// values raise ConfigInvalid. Relative mesh paths resolve against
/// `base_dir`.
ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// "builtin:house", "builtin:house_skewed", "builtin:box", or an OBJ path.
/// Throws MeshLoadFailure.
TriangleMesh load_mesh(const std::string& spec);

struct TrialResult {
  int trial = 0;
  Pose sampled_pose;       // proper pose drawn by the sampler
  Placement ground_truth;  // what was rendered (mirrored on reflected trials)
  bool reflected = false;
  std::optional<Pose> estimate;
  std::optional<EvalRecord> eval;
  std::size_t n_corr = 0;
  double pnp_seconds = 0.0;
  double pipeline_seconds = 0.0;
  std::optional<ErrorCode> failure;
  double rotation_error_rad = 0.0;  // against sampled_pose
  double translation_error_m = 0.0;
};

struct ScenarioSummary {
  int trials = 0;
  int successes = 0;
  std::map<std::string, int> failures;
  double diameter = 0.0;
  double mean_add = 0.0;
  double mean_add_s = 0.0;
  std::optional<double> mean_add_s_prime;
  double accuracy_add = 0.0;  // failures count as misses
  double accuracy_add_s = 0.0;
  std::optional<double> accuracy_add_s_prime;
  double mean_rotation_error_deg = 0.0;
  double mean_translation_error_m = 0.0;
  double mean_n_corr = 0.0;
  double mean_pnp_ms = 0.0;
  double median_pnp_ms = 0.0;
  double mean_pipeline_ms = 0.0;
};

struct ScenarioReport {
  std::vector<TrialResult> trials;
  ScenarioSummary summary;
};

/// Intermediate layers of one trial, for debugging dumps.
struct TrialArtifacts {
  std::optional<RenderOutput> render;
  std::optional<RenderOutput> perturbed;
  std::optional<ProbabilityMap> probability;
  std::optional<GrowMaskResult> grown;
  std::optional<CropResult> crop;
  std::optional<ContourMask> contour;
  CorrespondenceSet correspondences;
};

/// Per foreground pixel, in row-major order from one seeded stream: with
/// dropout_prob the pixel leaves the foreground; otherwise with outlier_prob
/// its colour becomes an independent uniform colour; otherwise clamped
/// Gaussian noise is added per channel.
RenderOutput perturb_colorcode(const RenderOutput& render, const NoiseModel& noise, std::uint64_t seed);

/// Soft segmentation stand-in: foreground/background levels blurred with a
/// Gaussian of `sigma` pixels (replicated borders).
ProbabilityMap probability_from_mask(const ImageU8& mask, double foreground, double background,
                                     double sigma);

/// Everything run_scenario needs that does not change between trials.
struct Scene {
  TriangleMesh mesh;
  ColorCodeSpec spec;
  std::vector<Vec3> eval_points;
  std::optional<ReflectionPlane> reflection;
};

Scene make_scene(const ScenarioConfig& cfg);

/// One trial with its own derived seed; pipeline failures are recorded in
/// the result rather than thrown.
TrialResult run_trial(const Scene& scene, const ScenarioConfig& cfg, int trial,
                      TrialArtifacts* artifacts = nullptr);

/// Runs every trial (concurrently when cfg.threads > 1) and aggregates.
/// Results are ordered by trial id and independent of scheduling.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

ScenarioSummary summarize(const std::vector<TrialResult>& trials, double diameter, bool symmetric);

inline constexpr const char* kResultsCsvHeader =
    "trial,add,add_s,add_s_prime,pass_add,pass_add_s_prime,n_corr,pnp_ms,pipeline_ms,failure";

/// Timing columns are left empty unless `timings` is set, so that the file
/// is a pure function of config and seed.
std::string results_csv(const ScenarioReport& report, bool symmetric, bool timings);
std::string summary_json(const ScenarioSummary& summary);

/// Writes the CSV and summary JSON to the configured paths.
void write_outputs(const ScenarioReport& report, const ScenarioConfig& cfg);

/// Writes PPM/PGM dumps of one trial's intermediate layers into `out_dir`.
/// Returns the list of files written.
std::vector<std::filesystem::path> render_debug(const ScenarioConfig& cfg, int trial,
                                                const std::filesystem::path& out_dir);

struct BenchConfig {
  std::vector<std::size_t> counts{100, 400, 1600, 6400};
  double outlier_ratio = 0.3;
  int repeats = 9;
  std::uint64_t seed = 0;
  double pixel_noise = 0.0;  // Gaussian sigma on inlier pixels
  RansacParams ransac;
  CameraIntrinsics camera{572.4, 573.6, 325.3, 242.0, 640, 480};

  void validate() const;
};

struct BenchRow {
  std::size_t count = 0;
  double median_ms = 0.0;
  double mean_ms = 0.0;
  double median_rotation_error_rad = 0.0;
  double max_rotation_error_rad = 0.0;
  double median_translation_error_m = 0.0;
  int failures = 0;
};

/// Synthetic correspondences for a random pose: points in a 0.1 m cube,
/// projected, with `outlier_ratio` of pixels replaced by uniform draws over
/// the image.
struct SyntheticProblem {
  Pose pose;
  CorrespondenceSet corr;
  std::vector<bool> is_outlier;
};
SyntheticProblem make_synthetic_problem(std::size_t count, double outlier_ratio, double pixel_noise,
                                        const CameraIntrinsics& camera, Rng& rng);

/// Times ransac_pnp at each count. Throws ConfigInvalid.
std::vector<BenchRow> benchmark_pnp(const BenchConfig& cfg);
std::string bench_csv(const std::vector<BenchRow>& rows, const BenchConfig& cfg);

}  // namespace sccn
