#include "dpm/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dpm/error.hpp"
#include "triangle_scan.hpp"

namespace dpm {

namespace {
constexpr double kNearPlaneMm = 1.0;
}

CameraModel CameraModel::centered(int width, int height, double focal_scale) {
  CameraModel c;
  c.width = width;
  c.height = height;
  c.fx = c.fy = focal_scale * width;
  c.cx = 0.5 * width;
  c.cy = 0.5 * height;
  return c;
}

void CameraModel::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("camera resolution must be positive");
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("camera focal lengths must be > 0");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw ConfigError("camera principal point must lie inside the image");
  }
  if (!bias.allFinite()) throw ConfigError("camera bias must be finite");
}

Vec2 project(const CameraModel& camera, const Vec3& point_mm) {
  const Vec3 p = camera.world_to_camera.apply(point_mm);
  if (!(p.z() > 0.0)) {
    throw BehindCameraError(fmt::format("point at depth {} mm is behind the camera", p.z()));
  }
  return {camera.fx * p.x() / p.z() + camera.cx + camera.bias.x(),
          camera.fy * p.y() / p.z() + camera.cy + camera.bias.y()};
}

LandmarkSet project_landmarks(const CameraModel& camera, std::span<const Vec3> points,
                              double timestamp, LandmarkKind kind) {
  LandmarkSet out;
  out.timestamp = timestamp;
  out.kind = kind;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(project(camera, p));
  return out;
}

// ---------------------------------------------------------------------------

Texture::Texture(Plane<Rgb> image) : image_(std::move(image)) {
  if (image_.empty()) throw InvalidArgument("texture must be non-empty");
}

Texture Texture::procedural(int size) {
  Plane<Rgb> img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) / size;
      const double v = (y + 0.5) / size;
      // Hue sweeps with u + v; dark grid lines every 1/32 of the atlas.
      const double hue = std::fmod(3.0 * (u + 0.5 * v), 1.0) * 6.0;
      const double f = hue - std::floor(hue);
      const int sector = static_cast<int>(hue) % 6;
      const double q = 1.0 - f;
      double r = 0, g = 0, b = 0;
      switch (sector) {
        case 0: r = 1; g = f; b = 0; break;
        case 1: r = q; g = 1; b = 0; break;
        case 2: r = 0; g = 1; b = f; break;
        case 3: r = 0; g = q; b = 1; break;
        case 4: r = f; g = 0; b = 1; break;
        default: r = 1; g = 0; b = q; break;
      }
      const double gu = std::fmod(u * 32.0, 1.0);
      const double gv = std::fmod(v * 32.0, 1.0);
      const double line = (gu < 0.12 || gv < 0.12) ? 0.35 : 1.0;
      auto to8 = [line](double c) {
        return static_cast<std::uint8_t>(std::lround(255.0 * (0.15 + 0.85 * c) * line));
      };
      img(x, y) = {to8(r), to8(g), to8(b)};
    }
  }
  return Texture(std::move(img));
}

Rgb Texture::sample(double u, double v) const {
  const int w = image_.width();
  const int h = image_.height();
  const double fx = std::clamp(std::clamp(u, 0.0, 1.0) * w - 0.5, 0.0, w - 1.0);
  const double fy = std::clamp(std::clamp(v, 0.0, 1.0) * h - 0.5, 0.0, h - 1.0);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double ax = fx - x0;
  const double ay = fy - y0;
  const Rgb& c00 = image_(x0, y0);
  const Rgb& c10 = image_(x1, y0);
  const Rgb& c01 = image_(x0, y1);
  const Rgb& c11 = image_(x1, y1);
  auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    const double top = a + ax * (b - a);
    const double bottom = c + ax * (d - c);
    // Non-negative, so +0.5 and truncation round half away from zero.
    return static_cast<std::uint8_t>(top + ay * (bottom - top) + 0.5);
  };
  return {mix(c00.r, c10.r, c01.r, c11.r), mix(c00.g, c10.g, c01.g, c11.g),
          mix(c00.b, c10.b, c01.b, c11.b)};
}

// ---------------------------------------------------------------------------

FrameBuffers FrameBuffers::blank(int width, int height, double timestamp) {
  FrameBuffers fb;
  fb.mask = Mask(width, height, 0);
  fb.uv = Plane<Uv>(width, height, kInvalidUv);
  fb.color = Plane<Rgb>(width, height, Rgb{});
  fb.depth = Plane<float>(width, height, kFarDepth);
  fb.timestamp = timestamp;
  return fb;
}

void FrameBuffers::reset(int width, int height, double t) {
  mask.reset(width, height, 0);
  uv.reset(width, height, kInvalidUv);
  color.reset(width, height, Rgb{});
  depth.reset(width, height, kFarDepth);
  timestamp = t;
}

bool FrameBuffers::consistent() const {
  if (!mask.same_shape(uv) || !mask.same_shape(color) || !mask.same_shape(depth)) return false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const bool fg = mask[i] != 0;
    if (fg != uv[i].valid()) return false;
    if (fg && !std::isfinite(depth[i])) return false;
  }
  return true;
}

namespace {

struct ProjectedVertex {
  Vec2 screen;
  double depth;  // camera-space z; <= near marks "unusable"
};

std::vector<ProjectedVertex> project_vertices(std::span<const Vec3> posed,
                                              const CameraModel& camera) {
  std::vector<ProjectedVertex> out(posed.size());
  for (std::size_t i = 0; i < posed.size(); ++i) {
    const Vec3 p = camera.world_to_camera.apply(posed[i]);
    out[i].depth = p.z();
    if (p.z() > kNearPlaneMm) {
      out[i].screen = {camera.fx * p.x() / p.z() + camera.cx + camera.bias.x(),
                       camera.fy * p.y() / p.z() + camera.cy + camera.bias.y()};
    } else {
      out[i].screen = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

void check_mesh(std::span<const Vec3> posed, const HandMesh& mesh) {
  if (posed.size() != mesh.vertices.size()) {
    throw InvalidArgument("posed vertex count does not match the mesh");
  }
}

}  // namespace

FrameBuffers rasterize(std::span<const Vec3> posed_vertices, const HandMesh& mesh,
                       const CameraModel& camera, const Texture& texture, double timestamp) {
  FrameBuffers fb;
  rasterize_into(fb, posed_vertices, mesh, camera, texture, timestamp);
  return fb;
}

void rasterize_into(FrameBuffers& fb, std::span<const Vec3> posed_vertices,
                    const HandMesh& mesh, const CameraModel& camera, const Texture& texture,
                    double timestamp) {
  check_mesh(posed_vertices, mesh);
  fb.reset(camera.width, camera.height, timestamp);
  const auto verts = project_vertices(posed_vertices, camera);
  for (const auto& tri : mesh.triangles) {
    const auto& a = verts[static_cast<std::size_t>(tri[0])];
    const auto& b = verts[static_cast<std::size_t>(tri[1])];
    const auto& c = verts[static_cast<std::size_t>(tri[2])];
    if (a.depth <= kNearPlaneMm || b.depth <= kNearPlaneMm || c.depth <= kNearPlaneMm) continue;
    const double iz0 = 1.0 / a.depth, iz1 = 1.0 / b.depth, iz2 = 1.0 / c.depth;
    const Vec2& uv0 = mesh.uvs[static_cast<std::size_t>(tri[0])];
    const Vec2& uv1 = mesh.uvs[static_cast<std::size_t>(tri[1])];
    const Vec2& uv2 = mesh.uvs[static_cast<std::size_t>(tri[2])];
    detail::scan_triangle(a.screen, b.screen, c.screen, camera.width, camera.height,
                          [&](int x, int y, double l0, double l1, double l2) {
                            const double w0 = l0 * iz0, w1 = l1 * iz1, w2 = l2 * iz2;
                            const double inv = 1.0 / (w0 + w1 + w2);
                            const auto z = static_cast<float>(inv);
                            const std::size_t i = fb.mask.index(x, y);
                            if (!(z < fb.depth[i])) return;
                            fb.depth[i] = z;
                            fb.mask[i] = 1;
                            const double u = (w0 * uv0.x() + w1 * uv1.x() + w2 * uv2.x()) * inv;
                            const double v = (w0 * uv0.y() + w1 * uv1.y() + w2 * uv2.y()) * inv;
                            fb.uv[i] = {static_cast<float>(std::clamp(u, 0.0, 1.0)),
                                        static_cast<float>(std::clamp(v, 0.0, 1.0))};
                          });
  }
  for (std::size_t i = 0; i < fb.mask.size(); ++i) {
    if (fb.mask[i]) fb.color[i] = texture.sample(fb.uv[i].u, fb.uv[i].v);
  }
}

Mask rasterize_mask(std::span<const Vec3> posed_vertices, const HandMesh& mesh,
                    const CameraModel& camera) {
  check_mesh(posed_vertices, mesh);
  Mask mask(camera.width, camera.height, 0);
  const auto verts = project_vertices(posed_vertices, camera);
  for (const auto& tri : mesh.triangles) {
    const auto& a = verts[static_cast<std::size_t>(tri[0])];
    const auto& b = verts[static_cast<std::size_t>(tri[1])];
    const auto& c = verts[static_cast<std::size_t>(tri[2])];
    if (a.depth <= kNearPlaneMm || b.depth <= kNearPlaneMm || c.depth <= kNearPlaneMm) continue;
    detail::scan_triangle(a.screen, b.screen, c.screen, camera.width, camera.height,
                          [&](int x, int y, double, double, double) { mask(x, y) = 1; });
  }
  return mask;
}

CameraFrame render_camera_mask(const Pose& gt_pose, const Pose& rest, const HandMesh& mesh,
                               const CameraModel& camera) {
  const auto posed = skin(mesh, gt_pose, rest);
  return {rasterize_mask(posed, mesh, camera.without_bias()), gt_pose.timestamp};
}

}  // namespace dpm
