#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "dpm/deform.hpp"
#include "dpm/filters.hpp"
#include "dpm/hand_model.hpp"
#include "dpm/pbr.hpp"
#include "dpm/raster.hpp"
#include "dpm/sensors.hpp"

namespace dpm {

/// Declaration order is the tie-break priority for simultaneous events.
enum class EventKind : int { kCameraFrame = 0, kLmcSample = 1, kDetectorDone = 2, kRenderTick = 3 };

std::string to_string(EventKind kind);

struct SimEvent {
  double time = 0.0;
  EventKind kind = EventKind::kRenderTick;
  std::uint64_t sequence = 0;
  /// Index into the stream the event belongs to (sample, frame or job).
  std::size_t payload = 0;
};

/// Min-queue on (time, kind, insertion order).
class EventQueue {
 public:
  void push(double time, EventKind kind, std::size_t payload);
  SimEvent pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const;
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

struct SimConfig {
  int width = 256;
  int height = 192;
  double focal_scale = 1.0;
  /// Constant screen-space misalignment of the projector, px.
  Vec2 projector_bias_px = Vec2::Zero();

  double render_rate_hz = 360.0;
  double projector_latency_s = 0.003;

  SensorModels sensors;
  FilterStrategy filter;

  bool mls_enabled = true;
  MlsVariant mls_variant = MlsVariant::kAffine;
  double mls_alpha = 1.0;
  double grid_spacing_px = 16.0;

  bool pbr_enabled = true;
  /// When false only landmarks are simulated (no rasterisation, warp or PBR).
  bool render_images = true;

  MotionScript scenario;
  /// Recorded pose track (CSV); replaces the scripted motion when set.
  std::filesystem::path recorded_track;

  int mesh_vertices = 2000;
  UvAtlas atlas = UvAtlas::kSideSeams;

  std::uint64_t seed = 1;
  double duration_s = 3.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Ground-truth hand motion sampled by every sensor.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;
  virtual Pose at(double t) const = 0;
  virtual double duration() const = 0;
};

/// Recorded track: rows t,joint,x,y,z,qw,qx,qy,qz; poses are interpolated
/// (lerp translation, slerp rotation) between samples.
class RecordedGroundTruth final : public GroundTruth {
 public:
  RecordedGroundTruth(std::vector<Pose> samples);
  static RecordedGroundTruth load(const std::filesystem::path& path, std::size_t joints);

  Pose at(double t) const override;
  double duration() const override { return samples_.back().timestamp; }

 private:
  std::vector<Pose> samples_;
};

void write_pose_track(const std::filesystem::path& path, std::span<const Pose> poses);

/// Skeleton, mesh, texture and the two cameras shared by a run.
struct Scene {
  Skeleton skeleton;
  HandMesh mesh;
  Pose rest;
  Texture texture;
  CameraModel projector;
  CameraModel camera;
};

Scene make_scene(const SimConfig& config);

/// Scripted motion (extended past the run by the projector latency so every
/// presentation time is defined) or the recorded track.
std::unique_ptr<GroundTruth> make_ground_truth(const SimConfig& config, const Skeleton& skeleton);

struct FrameLog {
  int tick = 0;
  double render_time = 0.0;
  double present_time = 0.0;
  std::string status = "ok";
  bool mls_applied = false;

  LandmarkSet p;       // projected estimate at present_time
  LandmarkSet q;       // newest delivered detection (capture-stamped)
  LandmarkSet q_hat;   // filter output; empty when MLS was skipped
  LandmarkSet truth;   // ground truth at present_time, unbiased camera
  std::vector<Vec2> corrected;  // P after the deformation
  std::vector<double> errors;   // |corrected - truth| per landmark

  double mean_error = 0.0;
  double median_error = 0.0;
  double max_error = 0.0;

  RegionCounts counts;
  double iou_render = 0.0;
  double iou_warped = 0.0;
  double iou_final = 0.0;
  /// Filled Ω_C pixels over |Ω_C| (1 when Ω_C is empty).
  double fill_ratio = 1.0;
};

struct DetectorJob {
  double launch = 0.0;
  double capture = 0.0;
  double delivery = 0.0;
};

struct StageTimes {
  double skin = 0.0, raster = 0.0, mls = 0.0, pbr = 0.0;
  std::size_t frames = 0;
  double total() const { return skin + raster + mls + pbr; }
};

struct SimResult {
  std::vector<FrameLog> frames;
  std::vector<DetectorJob> detector_jobs;
  /// Detections in delivery order (capture-stamped) and their delivery times.
  std::vector<LandmarkSet> detections;
  std::vector<double> delivery_times;
  std::vector<LandmarkSet> projected;
  std::array<std::size_t, 4> event_counts{};
  StageTimes stage_times;
  std::size_t covariance_repairs = 0;
};

/// Planes of one render tick, valid only during the callback.
struct FrameImages {
  const FrameBuffers& render;
  const FrameBuffers& warped;
  const PbrResult* pbr;  // null when PBR is off or the tick failed
  const Mask& camera;
  const Mask& truth;
};

struct RunOptions {
  std::function<void(const FrameLog&, const FrameImages&)> on_frame;
  bool time_stages = false;
};

/// Deterministic event-driven simulation of the full pipeline.
SimResult run(const SimConfig& config, const RunOptions& options = {});

std::vector<DetectorJob> detector_scheduling_trace(const SimConfig& config);

/// Mean over finite per-frame mean errors (NaN when there is none).
double mean_frame_error(std::span<const FrameLog> frames);

void write_frame_csv(std::ostream& out, std::span<const FrameLog> frames);
void write_frame_csv(const std::filesystem::path& path, std::span<const FrameLog> frames);

}  // namespace dpm
