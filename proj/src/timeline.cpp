#include "dpm/timeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "dpm/error.hpp"
#include "dpm/metrics.hpp"

namespace dpm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class ScriptedGroundTruth final : public GroundTruth {
 public:
  ScriptedGroundTruth(const Skeleton& skeleton, MotionScript script)
      : skeleton_(skeleton), script_(script) {}
  Pose at(double t) const override { return sample_ground_truth(skeleton_, script_, t); }
  double duration() const override { return script_.duration_s; }

 private:
  const Skeleton& skeleton_;
  MotionScript script_;
};

std::vector<Vec2> nan_points(std::size_t n) {
  return std::vector<Vec2>(n, Vec2(kNaN, kNaN));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kCameraFrame: return "CAMERA_FRAME";
    case EventKind::kLmcSample: return "LMC_SAMPLE";
    case EventKind::kDetectorDone: return "DETECTOR_DONE";
    case EventKind::kRenderTick: return "RENDER_TICK";
  }
  return "UNKNOWN";
}

bool EventQueue::Later::operator()(const SimEvent& a, const SimEvent& b) const {
  if (a.time != b.time) return a.time > b.time;
  if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
  return a.sequence > b.sequence;
}

void EventQueue::push(double time, EventKind kind, std::size_t payload) {
  if (!std::isfinite(time)) throw InvalidArgument("event time must be finite");
  heap_.push(SimEvent{time, kind, next_sequence_++, payload});
}

SimEvent EventQueue::pop() {
  if (heap_.empty()) throw InvalidArgument("pop from an empty event queue");
  SimEvent e = heap_.top();
  heap_.pop();
  return e;
}

void SimConfig::validate() const {
  if (width < 8 || height < 8) throw ConfigError("resolution must be at least 8x8");
  if (!(focal_scale > 0.0)) throw ConfigError("camera.focal_scale must be > 0");
  if (!projector_bias_px.allFinite()) throw ConfigError("projector bias must be finite");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("sim.duration_s must be > 0");
  }
  if (!(render_rate_hz > 0.0) || render_rate_hz > 1000.0) {
    throw ConfigError("sim.render_rate_hz must lie in (0, 1000]");
  }
  if (!(projector_latency_s >= 0.0)) throw ConfigError("sim.projector_latency_s must be >= 0");
  sensors.validate();
  if (!(sensors.detector_latency_s >= 1.0 / render_rate_hz)) {
    throw ConfigError("detector.latency_s must be at least one render tick");
  }
  if (!(grid_spacing_px >= 1.0)) throw ConfigError("mls.grid_spacing_px must be >= 1");
  if (!(mls_alpha > 0.0)) throw ConfigError("mls.alpha must be > 0");
  if (!(scenario.frequency_hz >= 0.0) || !std::isfinite(scenario.amplitude)) {
    throw ConfigError("scenario amplitude/frequency invalid");
  }
  if (mesh_vertices < 100) throw ConfigError("mesh.vertices must be >= 100");
  const KalmanNoise& k = filter.kalman;
  if (!(k.process > 0.0 && k.measurement > 0.0 && k.initial_velocity > 0.0)) {
    throw ConfigError("kalman noise parameters must be > 0");
  }
}

RecordedGroundTruth::RecordedGroundTruth(std::vector<Pose> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw InvalidArgument("recorded track needs at least two samples");
  for (std::size_t k = 1; k < samples_.size(); ++k) {
    if (!(samples_[k].timestamp > samples_[k - 1].timestamp)) {
      throw InvalidArgument("recorded track timestamps must increase");
    }
    if (samples_[k].joints.size() != samples_[0].joints.size()) {
      throw InvalidArgument("recorded track joint count varies");
    }
  }
  if (samples_.front().timestamp != 0.0) {
    throw InvalidArgument("recorded track must start at t = 0");
  }
}

RecordedGroundTruth RecordedGroundTruth::load(const std::filesystem::path& path,
                                              std::size_t joints) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open recorded track " + path.string());
  std::string line;
  int line_no = 0;
  std::vector<Pose> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (used != cell.size() && cell.find_first_not_of(" \t\r", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), line_no, cell),
                          line_no);
      }
    }
    if (v.size() != 9) {
      throw ConfigError(fmt::format("{}:{}: expected 9 columns, got {}", path.string(), line_no,
                                    v.size()),
                        line_no);
    }
    const double t = v[0];
    const auto joint = static_cast<std::size_t>(v[1]);
    if (samples.empty() || samples.back().timestamp != t) {
      if (!samples.empty() && samples.back().joints.size() != joints) {
        throw ConfigError(fmt::format("{}:{}: incomplete pose before t={}", path.string(),
                                      line_no, t),
                          line_no);
      }
      Pose p;
      p.timestamp = t;
      samples.push_back(std::move(p));
    }
    if (joint != samples.back().joints.size()) {
      throw ConfigError(fmt::format("{}:{}: joints must be listed in order", path.string(),
                                    line_no),
                        line_no);
    }
    RigidTransform tf;
    tf.translation = Vec3(v[2], v[3], v[4]);
    tf.rotation = Quat(v[5], v[6], v[7], v[8]).normalized();
    samples.back().joints.push_back(tf);
  }
  if (!samples.empty() && samples.back().joints.size() != joints) {
    throw ConfigError(path.string() + ": incomplete final pose", line_no);
  }
  try {
    return RecordedGroundTruth(std::move(samples));
  } catch (const InvalidArgument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Pose RecordedGroundTruth::at(double t) const {
  if (!(t >= 0.0 && t <= duration())) {
    throw InvalidArgument(fmt::format("t = {} outside recorded track [0, {}]", t, duration()));
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double x, const Pose& p) { return x < p.timestamp; });
  if (it == samples_.end()) {
    Pose p = samples_.back();
    p.timestamp = t;
    return p;
  }
  const Pose& b = *it;
  const Pose& a = *(it - 1);
  const double s = (t - a.timestamp) / (b.timestamp - a.timestamp);
  Pose out;
  out.timestamp = t;
  out.joints.resize(a.joints.size());
  for (std::size_t j = 0; j < a.joints.size(); ++j) {
    out.joints[j].translation =
        (1.0 - s) * a.joints[j].translation + s * b.joints[j].translation;
    out.joints[j].rotation = a.joints[j].rotation.slerp(s, b.joints[j].rotation).normalized();
  }
  return out;
}

void write_pose_track(const std::filesystem::path& path, std::span<const Pose> poses) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,joint,x,y,z,qw,qx,qy,qz\n";
  for (const auto& pose : poses) {
    for (std::size_t j = 0; j < pose.joints.size(); ++j) {
      const auto& tf = pose.joints[j];
      out << fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                         pose.timestamp, j, tf.translation.x(), tf.translation.y(),
                         tf.translation.z(), tf.rotation.w(), tf.rotation.x(), tf.rotation.y(),
                         tf.rotation.z());
    }
  }
}

Scene make_scene(const SimConfig& config) {
  Skeleton skeleton = Skeleton::hand();
  HandMesh mesh = generate_hand_mesh(skeleton, config.mesh_vertices, config.atlas);
  Pose rest = rest_pose(skeleton);
  CameraModel camera = CameraModel::centered(config.width, config.height, config.focal_scale);
  camera.validate();
  CameraModel projector = camera;
  projector.bias = config.projector_bias_px;
  return Scene{std::move(skeleton), std::move(mesh), std::move(rest), Texture::procedural(256),
               projector, camera};
}

std::unique_ptr<GroundTruth> make_ground_truth(const SimConfig& config,
                                               const Skeleton& skeleton) {
  const double horizon = config.duration_s + config.projector_latency_s;
  if (!config.recorded_track.empty()) {
    auto track = std::make_unique<RecordedGroundTruth>(
        RecordedGroundTruth::load(config.recorded_track, skeleton.size()));
    if (track->duration() < horizon) {
      throw ConfigError(fmt::format("recorded track covers {} s, run needs {} s",
                                    track->duration(), horizon));
    }
    return track;
  }
  MotionScript script = config.scenario;
  script.duration_s = horizon;
  return std::make_unique<ScriptedGroundTruth>(skeleton, script);
}

namespace {

struct Simulator {
  const SimConfig& cfg;
  const RunOptions& opt;
  Scene scene;
  std::unique_ptr<GroundTruth> gt;
  RngStream lmc_rng;
  RngStream det_rng;
  LandmarkFilter filter;
  SimResult result;

  std::vector<Pose> lmc_history;
  std::optional<std::size_t> newest_frame;
  std::optional<std::size_t> last_consumed;
  bool detector_busy = false;
  std::map<std::size_t, Mask> mask_cache;

  // Per-frame planes reused across ticks.
  FrameBuffers render_buffers;
  WarpWorkspace warp_ws;
  PbrWorkspace pbr_ws;

  Simulator(const SimConfig& c, const RunOptions& o)
      : cfg(c),
        opt(o),
        scene(make_scene(c)),
        gt(make_ground_truth(c, scene.skeleton)),
        lmc_rng(c.seed * 0x9E3779B97F4A7C15ULL + 1),
        det_rng(c.seed * 0xC2B2AE3D27D4EB4FULL + 2),
        filter(c.filter) {}

  double camera_capture(std::size_t k) const {
    return static_cast<double>(k) * cfg.sensors.camera_interval_s;
  }

  const Mask& camera_mask(std::size_t k) {
    auto it = mask_cache.find(k);
    if (it != mask_cache.end()) return it->second;
    // Only the newest frames are ever requested again.
    while (mask_cache.size() > 4) mask_cache.erase(mask_cache.begin());
    const Pose pose = gt->at(camera_capture(k));
    Mask m = render_camera_mask(pose, scene.rest, scene.mesh, scene.camera).mask;
    return mask_cache.emplace(k, std::move(m)).first->second;
  }

  LandmarkSet truth_landmarks(double t) {
    const Pose pose = gt->at(t);
    const auto positions = pose.positions();
    return project_landmarks(scene.camera, positions, t, LandmarkKind::kDetected);
  }

  void launch_detector(double now, EventQueue& queue) {
    const std::size_t k = *newest_frame;
    detector_busy = true;
    last_consumed = k;
    const double delivery = now + cfg.sensors.detector_latency_s;
    result.detector_jobs.push_back({now, camera_capture(k), delivery});
    queue.push(delivery, EventKind::kDetectorDone, result.detector_jobs.size() - 1);
  }

  void on_camera_frame(const SimEvent& e, EventQueue& queue) {
    newest_frame = e.payload;
    if (!detector_busy) launch_detector(e.time, queue);
  }

  void on_lmc_sample(const SimEvent& e) {
    const double capture = static_cast<double>(e.payload) / cfg.sensors.lmc_rate_hz;
    lmc_history.push_back(lmc_observe(gt->at(capture), cfg.sensors, lmc_rng));
  }

  void on_detector_done(const SimEvent& e, EventQueue& queue, bool detect) {
    const DetectorJob job = result.detector_jobs[e.payload];
    if (detect) {
      const std::size_t k = *last_consumed;
      std::optional<LandmarkSet> found;
      try {
        found = detect_landmarks(camera_mask(k), truth_landmarks(job.capture), cfg.sensors,
                                 det_rng);
      } catch (const BehindCameraError&) {
        found.reset();
      }
      if (found) {
        result.detections.push_back(std::move(*found));
        result.delivery_times.push_back(e.time);
      }
    }
    detector_busy = false;
    if (newest_frame && newest_frame != last_consumed) launch_detector(e.time, queue);
  }

  void on_render_tick(const SimEvent& e) {
    FrameLog log;
    log.tick = static_cast<int>(e.payload);
    log.render_time = e.time;
    log.present_time = e.time + cfg.projector_latency_s;
    const double T = log.present_time;
    const std::size_t n = scene.skeleton.size();
    log.counts = {};
    log.iou_render = log.iou_warped = log.iou_final = kNaN;
    log.fill_ratio = kNaN;
    if (!result.detections.empty()) log.q = result.detections.back();

    try {
      log.truth = truth_landmarks(T);
    } catch (const BehindCameraError&) {
      log.truth.points = nan_points(n);
    }

    if (lmc_history.empty()) {
      log.status = "no_pose";
      log.p.points = nan_points(n);
      log.p.timestamp = T;
      log.corrected = nan_points(n);
      finish_errors(log);
      result.frames.push_back(std::move(log));
      return;
    }

    const Pose pose = extrapolate_pose(lmc_history, T);
    try {
      log.p = project_landmarks(scene.projector, pose.positions(), T, LandmarkKind::kProjected);
    } catch (const BehindCameraError& err) {
      log.status = "behind_camera";
      log.p.points = nan_points(n);
      log.corrected = nan_points(n);
      finish_errors(log);
      result.frames.push_back(std::move(log));
      return;
    }
    result.projected.push_back(log.p);

    QEstimate est = filter.estimate(result.detections, result.projected, T, &log.truth);

    std::optional<DeformGrid> grid;
    if (auto* skip = std::get_if<SkipMls>(&est)) {
      log.status = "skip:" + skip->reason;
    } else if (cfg.mls_enabled) {
      log.q_hat = std::get<LandmarkSet>(est);
      auto t0 = Clock::now();
      try {
        grid = solve_grid(log.p, log.q_hat, cfg.width, cfg.height, cfg.grid_spacing_px,
                          cfg.mls_alpha, cfg.mls_variant);
        log.mls_applied = true;
      } catch (const Error& err) {
        log.status = "mls_failed";
      }
      if (opt.time_stages) result.stage_times.mls += seconds_since(t0);
    } else {
      log.q_hat = std::get<LandmarkSet>(est);
      log.status = "mls_off";
    }

    log.corrected.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      log.corrected[i] = grid ? grid->map(log.p.points[i]) : log.p.points[i];
    }
    finish_errors(log);

    if (cfg.render_images) render_images(log, pose, grid);
    result.frames.push_back(std::move(log));
  }

  void render_images(FrameLog& log, const Pose& pose, const std::optional<DeformGrid>& grid) {
    auto t0 = Clock::now();
    const auto posed = skin(scene.mesh, pose, scene.rest);
    if (opt.time_stages) result.stage_times.skin += seconds_since(t0);
    t0 = Clock::now();
    rasterize_into(render_buffers, posed, scene.mesh, scene.projector, scene.texture,
                   log.present_time);
    const FrameBuffers& render = render_buffers;
    if (opt.time_stages) result.stage_times.raster += seconds_since(t0);

    t0 = Clock::now();
    const FrameBuffers& warped = grid ? warp(render, *grid, warp_ws) : render;
    if (opt.time_stages) result.stage_times.mls += seconds_since(t0);

    const Mask empty(cfg.width, cfg.height);
    const Mask& cam = newest_frame ? camera_mask(*newest_frame) : empty;

    const PbrResult* pbr = nullptr;
    if (cfg.pbr_enabled) {
      t0 = Clock::now();
      pbr = &fill_boundary(warped, cam, scene.texture, pbr_ws);
      if (opt.time_stages) result.stage_times.pbr += seconds_since(t0);
      log.counts = pbr->counts;
      if (pbr->no_seed && log.status == "ok") log.status = "no_seed";
      log.fill_ratio = pbr->counts.c == 0 ? 1.0
                                          : static_cast<double>(pbr->filled) /
                                                static_cast<double>(pbr->counts.c);
    } else {
      log.counts = count_regions(partition(cam, warped.mask));
      log.fill_ratio = log.counts.c == 0 ? 1.0 : 0.0;
    }
    if (opt.time_stages) ++result.stage_times.frames;

    Mask truth(cfg.width, cfg.height);
    try {
      truth = render_camera_mask(gt->at(log.present_time), scene.rest, scene.mesh, scene.camera)
                  .mask;
    } catch (const BehindCameraError&) {
    }
    log.iou_render = mask_iou(render.mask, truth);
    log.iou_warped = mask_iou(warped.mask, truth);
    log.iou_final = mask_iou(pbr ? pbr->lit : warped.mask, truth);

    if (opt.on_frame) {
      opt.on_frame(log, FrameImages{render, warped, pbr, cam, truth});
    }
  }

  static void finish_errors(FrameLog& log) {
    const std::size_t n = log.corrected.size();
    log.errors.assign(n, kNaN);
    for (std::size_t i = 0; i < n && i < log.truth.size(); ++i) {
      log.errors[i] = (log.corrected[i] - log.truth.points[i]).norm();
    }
    if (n == 0) {
      log.mean_error = log.median_error = log.max_error = kNaN;
      return;
    }
    double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
    for (double e : log.errors) {
      sum += e;
      mx = std::max(mx, e);
    }
    log.mean_error = sum / static_cast<double>(n);
    std::vector<double> sorted = log.errors;
    std::sort(sorted.begin(), sorted.end());
    log.median_error = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    log.max_error = std::isnan(log.mean_error) ? kNaN : mx;
  }

  void seed_queue(EventQueue& queue) {
    const double d = cfg.duration_s;
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * cfg.sensors.camera_interval_s +
                       cfg.sensors.camera_latency_s;
      if (t >= d) break;
      queue.push(t, EventKind::kCameraFrame, k);
    }
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) / cfg.sensors.lmc_rate_hz +
                       cfg.sensors.lmc_latency_s;
      if (t >= d) break;
      queue.push(t, EventKind::kLmcSample, k);
    }
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) / cfg.render_rate_hz;
      if (t >= d) break;
      queue.push(t, EventKind::kRenderTick, k);
    }
  }

  void loop(bool full) {
    EventQueue queue;
    seed_queue(queue);
    while (!queue.empty()) {
      const SimEvent e = queue.pop();
      if (e.time >= cfg.duration_s) continue;
      ++result.event_counts[static_cast<std::size_t>(e.kind)];
      switch (e.kind) {
        case EventKind::kCameraFrame: on_camera_frame(e, queue); break;
        case EventKind::kLmcSample:
          if (full) on_lmc_sample(e);
          break;
        case EventKind::kDetectorDone: on_detector_done(e, queue, full); break;
        case EventKind::kRenderTick:
          if (full) on_render_tick(e);
          break;
      }
    }
    result.covariance_repairs = filter.covariance_repairs();
  }
};

}  // namespace

SimResult run(const SimConfig& config, const RunOptions& options) {
  config.validate();
  Simulator sim(config, options);
  sim.loop(true);
  return std::move(sim.result);
}

std::vector<DetectorJob> detector_scheduling_trace(const SimConfig& config) {
  config.validate();
  RunOptions options;
  Simulator sim(config, options);
  sim.loop(false);
  return std::move(sim.result.detector_jobs);
}

double mean_frame_error(std::span<const FrameLog> frames) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& f : frames) {
    if (std::isfinite(f.mean_error)) {
      sum += f.mean_error;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : kNaN;
}

namespace {

void write_points(std::ostream& out, const LandmarkSet& set, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (i < set.size()) {
      out << fmt::format(",{:.17g},{:.17g}", set.points[i].x(), set.points[i].y());
    } else {
      out << ",nan,nan";
    }
  }
}

}  // namespace

void write_frame_csv(std::ostream& out, std::span<const FrameLog> frames) {
  const std::size_t n = frames.empty() ? kHandJointCount : frames.front().errors.size();
  out << "tick,render_time,present_time,status,mls_applied,q_capture_time,mean_error,"
         "median_error,max_error,iou_render,iou_warped,iou_final,fill_ratio,"
         "count_a,count_b,count_c,count_d";
  for (std::size_t i = 0; i < n; ++i) out << ",err_" << i;
  for (const char* set : {"p", "q", "qhat", "corrected", "truth"}) {
    for (std::size_t i = 0; i < n; ++i) out << "," << set << "_x" << i << "," << set << "_y" << i;
  }
  out << "\n";
  for (const auto& f : frames) {
    out << fmt::format("{},{:.17g},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                       "{:.17g},{:.17g},{:.17g},{},{},{},{}",
                       f.tick, f.render_time, f.present_time, f.status, f.mls_applied ? 1 : 0,
                       f.q.size() ? f.q.timestamp : kNaN, f.mean_error, f.median_error,
                       f.max_error, f.iou_render, f.iou_warped, f.iou_final, f.fill_ratio,
                       f.counts.a, f.counts.b, f.counts.c, f.counts.d);
    for (std::size_t i = 0; i < n; ++i) {
      out << fmt::format(",{:.17g}", i < f.errors.size() ? f.errors[i] : kNaN);
    }
    write_points(out, f.p, n);
    write_points(out, f.q, n);
    write_points(out, f.q_hat, n);
    LandmarkSet corrected;
    corrected.points = f.corrected;
    write_points(out, corrected, n);
    write_points(out, f.truth, n);
    out << "\n";
  }
}

void write_frame_csv(const std::filesystem::path& path, std::span<const FrameLog> frames) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_frame_csv(out, frames);
}

}  // namespace dpm
