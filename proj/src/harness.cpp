#include "sccn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "sccn/pnm.hpp"

namespace sccn {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) config_error("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + key + ": " + e.what());
  }
}

Vec3 get_vec3(const json& value, const std::string& where) {
  try {
    const auto v = value.get<std::vector<double>>();
    if (v.size() != 3) config_error(where + " must have three entries");
    return {v[0], v[1], v[2]};
  } catch (const json::exception& e) {
    config_error(where + ": " + e.what());
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string num(double v) { return fmt::format("{:.9g}", v); }

Pose sample_pose(const ScenarioConfig& cfg, const Vec3& model_center, Rng& rng) {
  const Mat3 rot = random_rotation(rng);
  const auto& ps = cfg.pose;
  const double depth = ps.distance_min + (ps.distance_max - ps.distance_min) * uniform_unit(rng);
  const double ju = (2.0 * uniform_unit(rng) - 1.0) * ps.center_jitter * 0.5 * cfg.camera.image_width;
  const double jv = (2.0 * uniform_unit(rng) - 1.0) * ps.center_jitter * 0.5 * cfg.camera.image_height;
  const Vec3 center_cam(depth * ju / cfg.camera.fx, depth * jv / cfg.camera.fy, depth);
  return Pose(rot, center_cam - rot * model_center);
}

ImageF labels_to_float(const ImageI8& labels) {
  ImageF out(labels.width(), labels.height(), labels.channels());
  for (std::size_t i = 0; i < labels.data().size(); ++i) out.data()[i] = labels.data()[i];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void NoiseModel::validate() const {
  for (double s : gaussian_sigma) {
    if (!(s >= 0.0)) config_error("gaussian_sigma must be non-negative");
  }
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) config_error("dropout_prob must lie in [0, 1]");
  if (!(outlier_prob >= 0.0 && outlier_prob <= 1.0)) config_error("outlier_prob must lie in [0, 1]");
}

bool NoiseModel::is_noop() const noexcept {
  return gaussian_sigma[0] == 0.0 && gaussian_sigma[1] == 0.0 && gaussian_sigma[2] == 0.0 &&
         dropout_prob == 0.0 && outlier_prob == 0.0;
}

void ScenarioConfig::validate() const {
  if (trials < 1) config_error("trials must be >= 1");
  if (!(pose.distance_min > 0.0 && pose.distance_max >= pose.distance_min)) {
    config_error("distance range must be positive and ordered");
  }
  if (!(pose.center_jitter >= 0.0 && pose.center_jitter <= 1.0)) config_error("center_jitter must lie in [0, 1]");
  noise.validate();
  if (point_budget < 1) config_error("point_budget must be >= 1");
  if (threads < 1) config_error("threads must be >= 1");
  if (mask.patch_size < 8) config_error("patch_size must be >= 8");
  if (mask.grow.pool_factor < 1) config_error("pool_factor must be >= 1");
  if (!(mask.blur_sigma >= 0.0)) config_error("blur_sigma must be non-negative");
  if (!(mask.contour_threshold >= 0.0 && mask.contour_threshold < 1.0)) {
    config_error("contour_threshold must lie in [0, 1)");
  }
  const auto& th = mask.grow.thresholds;
  if (!(th[0] <= th[1] && th[1] <= th[2])) config_error("mask thresholds must be ascending");
  if (reflected_trials != ReflectedTrials::None && mode != ColorCodeMode::SymmetricAnisotropic) {
    config_error("reflected trials require the symmetric_anisotropic color-code");
  }
  try {
    camera.validate();
    ransac.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
}

ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, {"mesh", "colorcode", "camera", "trials", "pose_sampler", "noise", "sampling_rate",
                    "point_budget", "ransac", "mask", "evaluation", "symmetry", "seed", "threads",
                    "output"},
             "config");

  ScenarioConfig cfg;
  if (root.contains("mesh")) {
    const auto mesh = get_or<std::string>(root, "mesh", "", "config");
    if (mesh.rfind("builtin:", 0) == 0 || base_dir.empty() || std::filesystem::path(mesh).is_absolute()) {
      cfg.mesh = mesh;
    } else {
      cfg.mesh = (base_dir / mesh).string();
    }
  }

  if (root.contains("colorcode")) {
    const json& cc = root["colorcode"];
    check_keys(cc, {"mode", "symmetry_axis", "plane_offset", "aabb"}, "colorcode");
    try {
      cfg.mode = parse_colorcode_mode(get_or<std::string>(cc, "mode", "anisotropic", "colorcode"));
    } catch (const Error& e) {
      config_error(e.what());
    }
    if (cc.contains("symmetry_axis")) cfg.symmetry_axis = get_or<int>(cc, "symmetry_axis", 0, "colorcode");
    if (cc.contains("plane_offset")) cfg.plane_offset = get_or<double>(cc, "plane_offset", 0.0, "colorcode");
    if (cc.contains("aabb")) {
      const json& box = cc["aabb"];
      check_keys(box, {"min", "max"}, "colorcode.aabb");
      if (!box.contains("min") || !box.contains("max")) config_error("colorcode.aabb needs min and max");
      cfg.aabb = Aabb{get_vec3(box["min"], "colorcode.aabb.min"), get_vec3(box["max"], "colorcode.aabb.max")};
    }
  }

  if (root.contains("camera")) {
    const json& cam = root["camera"];
    check_keys(cam, {"fx", "fy", "cx", "cy", "width", "height"}, "camera");
    cfg.camera.fx = get_or<double>(cam, "fx", cfg.camera.fx, "camera");
    cfg.camera.fy = get_or<double>(cam, "fy", cfg.camera.fy, "camera");
    cfg.camera.cx = get_or<double>(cam, "cx", cfg.camera.cx, "camera");
    cfg.camera.cy = get_or<double>(cam, "cy", cfg.camera.cy, "camera");
    cfg.camera.image_width = get_or<int>(cam, "width", cfg.camera.image_width, "camera");
    cfg.camera.image_height = get_or<int>(cam, "height", cfg.camera.image_height, "camera");
  }

  cfg.trials = get_or<int>(root, "trials", cfg.trials, "config");

  if (root.contains("pose_sampler")) {
    const json& ps = root["pose_sampler"];
    check_keys(ps, {"distance_min", "distance_max", "center_jitter"}, "pose_sampler");
    cfg.pose.distance_min = get_or<double>(ps, "distance_min", cfg.pose.distance_min, "pose_sampler");
    cfg.pose.distance_max = get_or<double>(ps, "distance_max", cfg.pose.distance_max, "pose_sampler");
    cfg.pose.center_jitter = get_or<double>(ps, "center_jitter", cfg.pose.center_jitter, "pose_sampler");
  }

  if (root.contains("noise")) {
    const json& nz = root["noise"];
    check_keys(nz, {"gaussian_sigma", "dropout_prob", "outlier_prob"}, "noise");
    if (nz.contains("gaussian_sigma")) {
      const json& sg = nz["gaussian_sigma"];
      if (sg.is_number()) {
        cfg.noise.gaussian_sigma.fill(sg.get<double>());
      } else {
        const Vec3 v = get_vec3(sg, "noise.gaussian_sigma");
        cfg.noise.gaussian_sigma = {v[0], v[1], v[2]};
      }
    }
    cfg.noise.dropout_prob = get_or<double>(nz, "dropout_prob", 0.0, "noise");
    cfg.noise.outlier_prob = get_or<double>(nz, "outlier_prob", 0.0, "noise");
  }

  if (root.contains("sampling_rate")) {
    try {
      cfg.sampling_rate = parse_sampling_rate(get_or<std::string>(root, "sampling_rate", "1/4", "config"));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  const auto budget = get_or<long long>(root, "point_budget", static_cast<long long>(cfg.point_budget), "config");
  if (budget < 1) config_error("point_budget must be >= 1");
  cfg.point_budget = static_cast<std::size_t>(budget);

  if (root.contains("ransac")) {
    const json& rs = root["ransac"];
    check_keys(rs, {"max_iterations", "inlier_threshold", "confidence"}, "ransac");
    cfg.ransac.max_iterations = get_or<int>(rs, "max_iterations", cfg.ransac.max_iterations, "ransac");
    cfg.ransac.inlier_threshold = get_or<double>(rs, "inlier_threshold", cfg.ransac.inlier_threshold, "ransac");
    cfg.ransac.confidence = get_or<double>(rs, "confidence", cfg.ransac.confidence, "ransac");
  }

  if (root.contains("mask")) {
    const json& mk = root["mask"];
    check_keys(mk, {"thresholds", "pool_factor", "contour_threshold", "patch_size", "blur_sigma",
                    "prob_foreground", "prob_background"},
               "mask");
    if (mk.contains("thresholds")) {
      const Vec3 t = get_vec3(mk["thresholds"], "mask.thresholds");
      cfg.mask.grow.thresholds = {t[0], t[1], t[2]};
    }
    cfg.mask.grow.pool_factor = get_or<int>(mk, "pool_factor", cfg.mask.grow.pool_factor, "mask");
    cfg.mask.contour_threshold = get_or<double>(mk, "contour_threshold", cfg.mask.contour_threshold, "mask");
    cfg.mask.patch_size = get_or<int>(mk, "patch_size", cfg.mask.patch_size, "mask");
    cfg.mask.blur_sigma = get_or<double>(mk, "blur_sigma", cfg.mask.blur_sigma, "mask");
    cfg.mask.prob_foreground = get_or<double>(mk, "prob_foreground", cfg.mask.prob_foreground, "mask");
    cfg.mask.prob_background = get_or<double>(mk, "prob_background", cfg.mask.prob_background, "mask");
  }

  if (root.contains("evaluation")) {
    const json& ev = root["evaluation"];
    check_keys(ev, {"point_cap"}, "evaluation");
    const auto cap = get_or<long long>(ev, "point_cap", 1000, "evaluation");
    if (cap < 1) config_error("evaluation.point_cap must be >= 1");
    cfg.eval_point_cap = static_cast<std::size_t>(cap);
  }

  if (root.contains("symmetry")) {
    const json& sy = root["symmetry"];
    check_keys(sy, {"resolve_sign", "reflected_trials"}, "symmetry");
    cfg.resolve_symmetry_sign = get_or<bool>(sy, "resolve_sign", true, "symmetry");
    const auto rt = get_or<std::string>(sy, "reflected_trials", "none", "symmetry");
    if (rt == "none") {
      cfg.reflected_trials = ReflectedTrials::None;
    } else if (rt == "alternate") {
      cfg.reflected_trials = ReflectedTrials::Alternate;
    } else {
      config_error("symmetry.reflected_trials must be 'none' or 'alternate'");
    }
  }

  if (root.contains("seed")) {
    try {
      cfg.seed = root["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
      config_error(std::string("seed: ") + e.what());
    }
  }
  cfg.threads = get_or<int>(root, "threads", cfg.threads, "config");

  if (root.contains("output")) {
    const json& out = root["output"];
    check_keys(out, {"csv", "summary", "timings"}, "output");
    if (out.contains("csv")) cfg.csv_path = get_or<std::string>(out, "csv", "", "output");
    if (out.contains("summary")) cfg.summary_path = get_or<std::string>(out, "summary", "", "output");
    cfg.csv_timings = get_or<bool>(out, "timings", false, "output");
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

TriangleMesh load_mesh(const std::string& spec) {
  if (spec == "builtin:house") return make_house_mesh(0.0);
  if (spec == "builtin:house_skewed") return make_house_mesh(0.02);
  if (spec == "builtin:box") return make_box_mesh({0.1, 0.07, 0.05});
  if (spec.rfind("builtin:", 0) == 0) throw Error(ErrorCode::MeshLoadFailure, "unknown builtin mesh " + spec);
  return load_obj(spec);
}

// ---------------------------------------------------------------------------
// Noise and segmentation stand-ins

RenderOutput perturb_colorcode(const RenderOutput& render, const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  RenderOutput out = render;
  if (noise.is_noop()) return out;

  Rng rng(seed);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!out.object_mask(x, y)) continue;
      if (noise.dropout_prob > 0.0 && uniform_unit(rng) < noise.dropout_prob) {
        out.object_mask(x, y) = 0;
        out.depth(x, y) = std::numeric_limits<double>::infinity();
        for (int c = 0; c < 3; ++c) {
          out.colorcode(x, y, c) = 0.0;
          out.symmetry_mask(x, y, c) = 0;
        }
        continue;
      }
      if (noise.outlier_prob > 0.0 && uniform_unit(rng) < noise.outlier_prob) {
        for (int c = 0; c < 3; ++c) out.colorcode(x, y, c) = uniform_unit(rng);
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        if (noise.gaussian_sigma[c] > 0.0) {
          const double v = out.colorcode(x, y, c) + noise.gaussian_sigma[c] * standard_normal(rng);
          out.colorcode(x, y, c) = std::clamp(v, 0.0, 1.0);
        }
      }
    }
  }
  return out;
}

ProbabilityMap probability_from_mask(const ImageU8& mask, double foreground, double background,
                                     double sigma) {
  ProbabilityMap prob(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) prob(x, y) = mask(x, y) ? foreground : background;
  }
  if (sigma <= 0.0) return prob;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& k : kernel) k /= total;

  ProbabilityMap tmp(prob.width(), prob.height(), 1);
  for (int y = 0; y < prob.height(); ++y) {
    for (int x = 0; x < prob.width(); ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * prob(std::clamp(x + k, 0, prob.width() - 1), y);
      }
      tmp(x, y) = acc;
    }
  }
  for (int y = 0; y < prob.height(); ++y) {
    for (int x = 0; x < prob.width(); ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp(x, std::clamp(y + k, 0, prob.height() - 1));
      }
      prob(x, y) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return prob;
}

// ---------------------------------------------------------------------------
// Scenario execution

Scene make_scene(const ScenarioConfig& cfg) {
  Scene scene;
  scene.mesh = load_mesh(cfg.mesh);
  try {
    scene.spec = ColorCodeSpec::make(cfg.mode, cfg.aabb.value_or(scene.mesh.aabb), cfg.symmetry_axis,
                                     cfg.plane_offset);
  } catch (const Error& e) {
    config_error(e.what());
  }
  const auto& box = scene.spec.aabb;
  for (const Vec3& v : scene.mesh.vertices) {
    if ((v.array() < box.min.array() - kBoundsTolerance).any() ||
        (v.array() > box.max.array() + kBoundsTolerance).any()) {
      config_error("mesh extends beyond the color-code aabb");
    }
  }
  scene.eval_points = sample_eval_points(scene.mesh.vertices, cfg.eval_point_cap);
  if (scene.spec.symmetric()) scene.reflection = scene.spec.reflection_plane();
  return scene;
}

TrialResult run_trial(const Scene& scene, const ScenarioConfig& cfg, int trial, TrialArtifacts* artifacts) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  Rng rng(trial_seed);

  TrialResult result;
  result.trial = trial;
  result.sampled_pose = sample_pose(cfg, scene.mesh.aabb.center(), rng);
  result.reflected = cfg.reflected_trials == ReflectedTrials::Alternate && trial % 2 == 1;
  result.ground_truth = result.reflected ? reflect_placement(result.sampled_pose, *scene.reflection)
                                         : Placement(result.sampled_pose);

  try {
    RenderOutput rendered = render(scene.mesh, result.ground_truth, cfg.camera, scene.spec);
    RenderOutput noisy = perturb_colorcode(rendered, cfg.noise, derive_seed(trial_seed, 1));
    if (noisy.foreground_count() < kMinCorrespondences) {
      if (artifacts) {
        artifacts->render = rendered;
        artifacts->perturbed = noisy;
      }
      throw Error(ErrorCode::InsufficientPoints, "predicted foreground too small for correspondences");
    }
    ProbabilityMap prob = probability_from_mask(noisy.object_mask, cfg.mask.prob_foreground,
                                                cfg.mask.prob_background, cfg.mask.blur_sigma);
    GrowMaskResult grown = grow_mask(prob, cfg.mask.grow);

    const ImageF labels = labels_to_float(noisy.symmetry_mask);
    CropResult crop = crop_pad_resize(
        {{&noisy.colorcode, Interpolation::Bilinear, &noisy.object_mask}, {&labels, Interpolation::Nearest, nullptr}},
        grown.bbox, cfg.mask.patch_size);
    ContourMask contour = sobel_contour(crop.patches[0], cfg.mask.contour_threshold);

    if (artifacts) {
      artifacts->render = rendered;
      artifacts->perturbed = noisy;
      artifacts->probability = prob;
      artifacts->grown = grown;
      artifacts->crop = crop;
      artifacts->contour = contour;
    }

    std::vector<bool> flips{false};
    if (scene.spec.symmetric() && cfg.resolve_symmetry_sign) flips.push_back(true);

    RansacParams ransac = cfg.ransac;
    ransac.rng_seed = derive_seed(trial_seed, 2);

    std::optional<PnPResult> best;
    CorrespondenceSet best_corr;
    std::optional<Error> first_error;
    for (bool flip : flips) {
      try {
        SelectParams sp{cfg.sampling_rate, cfg.point_budget, flip};
        CorrespondenceSet corr = select_correspondences(crop.patches[0], crop.patches[1], contour, sp,
                                                        crop.transform, scene.spec, cfg.camera.image_width,
                                                        cfg.camera.image_height);
        PnPResult pnp = ransac_pnp(corr, cfg.camera, ransac);
        result.pnp_seconds += pnp.elapsed_seconds;
        const bool wins = !best || pnp.inlier_indices.size() > best->inlier_indices.size() ||
                          (pnp.inlier_indices.size() == best->inlier_indices.size() &&
                           pnp.mean_reprojection_error < best->mean_reprojection_error);
        if (wins) {
          best = std::move(pnp);
          best_corr = std::move(corr);
        }
      } catch (const Error& e) {
        if (!first_error) first_error = e;
      }
    }
    if (!best) throw *first_error;

    result.n_corr = best_corr.size();
    result.estimate = best->pose;
    result.eval = evaluate_pose(result.ground_truth, best->pose, scene.eval_points, scene.mesh.diameter,
                                scene.reflection);
    result.rotation_error_rad = rotation_angle_between(result.sampled_pose.rotation(), best->pose.rotation());
    result.translation_error_m = (result.sampled_pose.translation() - best->pose.translation()).norm();
    if (artifacts) artifacts->correspondences = std::move(best_corr);
  } catch (const Error& e) {
    result.failure = e.code();
    result.estimate.reset();
    result.eval.reset();
  }

  result.pipeline_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ScenarioSummary summarize(const std::vector<TrialResult>& trials, double diameter, bool symmetric) {
  ScenarioSummary s;
  s.trials = static_cast<int>(trials.size());
  s.diameter = diameter;
  std::vector<double> add, add_s, add_sp, rot, trans, ncorr, pnp_ms, pipe_ms;
  int pass_add = 0, pass_add_s = 0, pass_add_sp = 0;
  for (const auto& t : trials) {
    pipe_ms.push_back(1e3 * t.pipeline_seconds);
    if (t.failure) {
      ++s.failures[std::string(to_string(*t.failure))];
      continue;
    }
    ++s.successes;
    add.push_back(t.eval->add);
    add_s.push_back(t.eval->add_s);
    pass_add += t.eval->pass_add;
    pass_add_s += t.eval->pass_add_s;
    if (t.eval->add_s_prime) {
      add_sp.push_back(*t.eval->add_s_prime);
      pass_add_sp += *t.eval->pass_add_s_prime;
    }
    rot.push_back(t.rotation_error_rad * 180.0 / M_PI);
    trans.push_back(t.translation_error_m);
    ncorr.push_back(static_cast<double>(t.n_corr));
    pnp_ms.push_back(1e3 * t.pnp_seconds);
  }
  const double n = trials.empty() ? 1.0 : static_cast<double>(trials.size());
  s.mean_add = mean(add);
  s.mean_add_s = mean(add_s);
  s.accuracy_add = pass_add / n;
  s.accuracy_add_s = pass_add_s / n;
  if (symmetric) {
    s.mean_add_s_prime = mean(add_sp);
    s.accuracy_add_s_prime = pass_add_sp / n;
  }
  s.mean_rotation_error_deg = mean(rot);
  s.mean_translation_error_m = mean(trans);
  s.mean_n_corr = mean(ncorr);
  s.mean_pnp_ms = mean(pnp_ms);
  s.median_pnp_ms = median(pnp_ms);
  s.mean_pipeline_ms = mean(pipe_ms);
  return s;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const Scene scene = make_scene(cfg);

  ScenarioReport report;
  report.trials.resize(static_cast<std::size_t>(cfg.trials));
  const int workers = std::min(cfg.threads, cfg.trials);
  if (workers <= 1) {
    for (int i = 0; i < cfg.trials; ++i) report.trials[i] = run_trial(scene, cfg, i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = next++; i < cfg.trials; i = next++) report.trials[i] = run_trial(scene, cfg, i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  report.summary = summarize(report.trials, scene.mesh.diameter, scene.spec.symmetric());
  return report;
}

std::string results_csv(const ScenarioReport& report, bool symmetric, bool timings) {
  std::string out = std::string(kResultsCsvHeader) + "\n";
  for (const auto& t : report.trials) {
    std::string add, add_s, add_sp, pass_sp;
    std::string pass_add = "0";
    if (t.eval) {
      add = num(t.eval->add);
      add_s = num(t.eval->add_s);
      pass_add = t.eval->pass_add ? "1" : "0";
      if (t.eval->add_s_prime) add_sp = num(*t.eval->add_s_prime);
      if (t.eval->pass_add_s_prime) pass_sp = *t.eval->pass_add_s_prime ? "1" : "0";
    } else if (symmetric) {
      pass_sp = "0";
    }
    const std::string pnp_ms = timings ? num(1e3 * t.pnp_seconds) : "";
    const std::string pipe_ms = timings ? num(1e3 * t.pipeline_seconds) : "";
    const std::string failure = t.failure ? std::string(to_string(*t.failure)) : "";
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", t.trial, add, add_s, add_sp, pass_add, pass_sp,
                       t.n_corr, pnp_ms, pipe_ms, failure);
  }
  return out;
}

std::string summary_json(const ScenarioSummary& s) {
  json j;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["failures"] = s.failures;
  j["diameter"] = s.diameter;
  j["mean_add"] = s.mean_add;
  j["mean_add_s"] = s.mean_add_s;
  j["accuracy_add"] = s.accuracy_add;
  j["accuracy_add_s"] = s.accuracy_add_s;
  if (s.mean_add_s_prime) j["mean_add_s_prime"] = *s.mean_add_s_prime;
  if (s.accuracy_add_s_prime) j["accuracy_add_s_prime"] = *s.accuracy_add_s_prime;
  j["mean_rotation_error_deg"] = s.mean_rotation_error_deg;
  j["mean_translation_error_m"] = s.mean_translation_error_m;
  j["mean_n_corr"] = s.mean_n_corr;
  j["mean_pnp_ms"] = s.mean_pnp_ms;
  j["median_pnp_ms"] = s.median_pnp_ms;
  j["mean_pipeline_ms"] = s.mean_pipeline_ms;
  return j.dump(2) + "\n";
}

void write_outputs(const ScenarioReport& report, const ScenarioConfig& cfg) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
    out << text;
  };
  write(cfg.csv_path, results_csv(report, cfg.mode == ColorCodeMode::SymmetricAnisotropic, cfg.csv_timings));
  write(cfg.summary_path, summary_json(report.summary));
}

std::vector<std::filesystem::path> render_debug(const ScenarioConfig& cfg, int trial,
                                                const std::filesystem::path& out_dir) {
  cfg.validate();
  if (trial < 0 || trial >= cfg.trials) config_error("trial index out of range");
  const Scene scene = make_scene(cfg);
  TrialArtifacts art;
  run_trial(scene, cfg, trial, &art);
  if (!art.render) throw Error(ErrorCode::NothingVisible, "trial produced no render");

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto dump = [&](const ImageU8& img, const std::string& name) {
    const auto path = out_dir / name;
    write_pnm(img, path);
    written.push_back(path);
  };

  auto labels_u8 = [](const ImageI8& labels) {
    ImageU8 out(labels.width(), labels.height(), labels.channels());
    for (std::size_t i = 0; i < labels.data().size(); ++i) {
      out.data()[i] = static_cast<std::uint8_t>(labels.data()[i] < 0 ? 0 : (labels.data()[i] > 0 ? 255 : 128));
    }
    return out;
  };
  auto mask_u8 = [](const ImageU8& m) {
    ImageU8 out(m.width(), m.height(), 1);
    for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = m.data()[i] ? 255 : 0;
    return out;
  };
  auto depth_u8 = [](const ImageF& depth) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double d : depth.data()) {
      if (std::isfinite(d)) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    ImageU8 out(depth.width(), depth.height(), 1, 0);
    for (std::size_t i = 0; i < depth.data().size(); ++i) {
      const double d = depth.data()[i];
      if (!std::isfinite(d)) continue;
      const double t = hi > lo ? (d - lo) / (hi - lo) : 0.0;
      out.data()[i] = static_cast<std::uint8_t>(255 - std::lround(t * 254.0));
    }
    return out;
  };

  dump(to_u8(art.render->colorcode), "colorcode.ppm");
  dump(labels_u8(art.render->symmetry_mask), "symmetry.ppm");
  dump(mask_u8(art.render->object_mask), "object_mask.pgm");
  dump(depth_u8(art.render->depth), "depth.pgm");
  dump(to_u8(art.perturbed->colorcode), "colorcode_perturbed.ppm");
  if (art.probability) dump(to_u8(*art.probability), "probability.pgm");
  if (art.crop) {
    dump(to_u8(art.crop->patches[0]), "patch_colorcode.ppm");
  }
  if (art.contour) dump(mask_u8(*art.contour), "patch_contour.pgm");
  return written;
}

// ---------------------------------------------------------------------------
// PnP benchmark

void BenchConfig::validate() const {
  if (counts.empty()) config_error("bench counts must not be empty");
  for (auto c : counts) {
    if (c < kMinCorrespondences) config_error("bench counts must be >= 6");
  }
  if (repeats < 3) config_error("repeats must be >= 3");
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) config_error("outlier ratio must lie in [0, 1)");
  if (!(pixel_noise >= 0.0)) config_error("pixel noise must be non-negative");
  try {
    ransac.validate();
    camera.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
}

SyntheticProblem make_synthetic_problem(std::size_t count, double outlier_ratio, double pixel_noise,
                                        const CameraIntrinsics& camera, Rng& rng) {
  SyntheticProblem prob;
  const double depth = 0.4 + 0.4 * uniform_unit(rng);
  const Vec3 center(0.1 * depth * (uniform_unit(rng) - 0.5), 0.1 * depth * (uniform_unit(rng) - 0.5), depth);
  prob.pose = Pose(random_rotation(rng), center);

  const auto n_out = static_cast<std::size_t>(std::llround(outlier_ratio * static_cast<double>(count)));
  prob.is_outlier.assign(count, false);
  for (std::size_t i = 0; i < n_out; ++i) prob.is_outlier[i] = true;
  for (std::size_t i = count; i > 1; --i) std::swap(prob.is_outlier[i - 1], prob.is_outlier[uniform_index(rng, i)]);

  prob.corr.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Correspondence c;
    c.model_point = Vec3(uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5) * 0.1;
    if (prob.is_outlier[i]) {
      c.pixel = Vec2(uniform_unit(rng) * camera.image_width, uniform_unit(rng) * camera.image_height);
    } else {
      c.pixel = project_point(camera, transform_point(prob.pose, c.model_point));
      if (pixel_noise > 0.0) c.pixel += pixel_noise * Vec2(standard_normal(rng), standard_normal(rng));
    }
    prob.corr.push_back(c);
  }
  return prob;
}

std::vector<BenchRow> benchmark_pnp(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchRow> rows;
  for (std::size_t ci = 0; ci < cfg.counts.size(); ++ci) {
    const std::size_t count = cfg.counts[ci];
    BenchRow row;
    row.count = count;
    std::vector<double> ms, rot, trans;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      Rng rng(derive_seed(derive_seed(cfg.seed, count), static_cast<std::uint64_t>(rep)));
      const SyntheticProblem prob = make_synthetic_problem(count, cfg.outlier_ratio, cfg.pixel_noise, cfg.camera, rng);
      RansacParams params = cfg.ransac;
      params.rng_seed = rng();
      try {
        const PnPResult res = ransac_pnp(prob.corr, cfg.camera, params);
        ms.push_back(1e3 * res.elapsed_seconds);
        rot.push_back(rotation_angle_between(prob.pose.rotation(), res.pose.rotation()));
        trans.push_back((prob.pose.translation() - res.pose.translation()).norm());
      } catch (const Error&) {
        ++row.failures;
      }
    }
    row.median_ms = median(ms);
    row.mean_ms = mean(ms);
    row.median_rotation_error_rad = median(rot);
    row.max_rotation_error_rad = rot.empty() ? 0.0 : *std::max_element(rot.begin(), rot.end());
    row.median_translation_error_m = median(trans);
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows, const BenchConfig& cfg) {
  std::string out =
      "count,outlier_ratio,repeats,median_ms,mean_ms,median_rot_err_rad,max_rot_err_rad,median_trans_err_m,failures\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.count, num(cfg.outlier_ratio), cfg.repeats, num(r.median_ms),
                       num(r.mean_ms), num(r.median_rotation_error_rad), num(r.max_rotation_error_rad),
                       num(r.median_translation_error_m), r.failures);
  }
  return out;
}

}  // namespace sccn
