#pragma once

#include <limits>
#include <span>

#include "dpm/geometry.hpp"
#include "dpm/hand_model.hpp"
#include "dpm/image.hpp"
#include "dpm/landmarks.hpp"

namespace dpm {

/// Pinhole model shared by projector and camera (coaxial rig). The bias is
/// a constant screen-space offset modelling residual misalignment of the
/// projector; the camera itself uses `without_bias()`.
struct CameraModel {
  double fx = 256.0, fy = 256.0;
  double cx = 128.0, cy = 96.0;
  int width = 256, height = 192;
  RigidTransform world_to_camera;
  Vec2 bias = Vec2::Zero();

  static CameraModel centered(int width, int height, double focal_scale = 1.0);

  CameraModel without_bias() const {
    CameraModel c = *this;
    c.bias.setZero();
    return c;
  }

  /// Throws ConfigError if the intrinsics are inconsistent.
  void validate() const;
};

/// Pixel coordinates: pixel (i, j) covers [i, i+1) x [j, j+1), centre at +0.5.
/// Throws BehindCameraError for depth <= 0.
Vec2 project(const CameraModel& camera, const Vec3& point_mm);

LandmarkSet project_landmarks(const CameraModel& camera, std::span<const Vec3> points,
                              double timestamp, LandmarkKind kind);

/// RGB texture with clamp addressing and bilinear filtering.
class Texture {
 public:
  explicit Texture(Plane<Rgb> image);

  /// Colourful stripe-and-grid pattern; islands stay distinguishable.
  static Texture procedural(int size = 256);

  Rgb sample(double u, double v) const;
  const Plane<Rgb>& image() const { return image_; }

 private:
  Plane<Rgb> image_;
};

/// Render-side planes at projector resolution.
struct FrameBuffers {
  Mask mask;
  Plane<Uv> uv;
  Plane<Rgb> color;
  Plane<float> depth;
  double timestamp = 0.0;

  static FrameBuffers blank(int width, int height, double timestamp = 0.0);
  /// Same as blank() but reuses the existing storage.
  void reset(int width, int height, double timestamp = 0.0);

  int width() const { return mask.width(); }
  int height() const { return mask.height(); }

  /// True when the planes agree in shape and uv/depth are valid exactly on
  /// the mask.
  bool consistent() const;

  bool operator==(const FrameBuffers&) const = default;
};

inline constexpr float kFarDepth = std::numeric_limits<float>::infinity();

/// Z-buffered fill with perspective-correct UVs; colour is the texture at
/// the interpolated UV. Zero-area triangles and triangles touching the
/// near plane are skipped.
FrameBuffers rasterize(std::span<const Vec3> posed_vertices, const HandMesh& mesh,
                       const CameraModel& camera, const Texture& texture,
                       double timestamp = 0.0);

/// rasterize() into caller-owned buffers.
void rasterize_into(FrameBuffers& out, std::span<const Vec3> posed_vertices,
                    const HandMesh& mesh, const CameraModel& camera, const Texture& texture,
                    double timestamp = 0.0);

/// Coverage only (no depth, uv or colour).
Mask rasterize_mask(std::span<const Vec3> posed_vertices, const HandMesh& mesh,
                    const CameraModel& camera);

struct CameraFrame {
  Mask mask;
  double capture_time = 0.0;
};

/// Ground-truth silhouette seen by the unbiased camera at gt_pose.timestamp.
CameraFrame render_camera_mask(const Pose& gt_pose, const Pose& rest, const HandMesh& mesh,
                               const CameraModel& camera);

}  // namespace dpm
