#include <gtest/gtest.h>

#include <queue>

#include "dpm/error.hpp"
#include "dpm/metrics.hpp"
#include "dpm/raster.hpp"
#include "oracles.hpp"

using namespace dpm;

namespace {

CameraModel unit_camera(int w, int h) {
  CameraModel c;
  c.width = w;
  c.height = h;
  c.fx = c.fy = 100.0;
  c.cx = c.cy = 0.0;
  return c;
}

/// Axis-aligned quad at depth z covering [x0,x1) x [y0,y1) on screen for
/// unit_camera; appended to `mesh` with a constant UV.
void add_quad(HandMesh& mesh, double x0, double y0, double x1, double y1, double z, double uv) {
  const int base = static_cast<int>(mesh.vertices.size());
  const double s = z / 100.0;
  for (const Vec2 c : {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}) {
    mesh.vertices.emplace_back(c.x() * s, c.y() * s, z);
    mesh.uvs.emplace_back(uv, uv);
    VertexWeights w;
    w.entries[0] = {0, 1.0};
    w.count = 1;
    mesh.weights.push_back(w);
  }
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
}

int components(const Mask& m) {
  Mask seen(m.width(), m.height(), 0);
  int count = 0;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || seen(x, y)) continue;
      ++count;
      std::queue<Pixel> open;
      open.push({x, y});
      seen(x, y) = 1;
      while (!open.empty()) {
        const Pixel p = open.front();
        open.pop();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (m.in_bounds(nx, ny) && m(nx, ny) && !seen(nx, ny)) {
              seen(nx, ny) = 1;
              open.push({nx, ny});
            }
          }
        }
      }
    }
  }
  return count;
}

struct HandScene {
  Skeleton skeleton = Skeleton::hand();
  HandMesh mesh = generate_hand_mesh(skeleton, 2045);
  Pose rest = rest_pose(skeleton);
};

}  // namespace

TEST(Projection, PinholeExamples) {
  CameraModel c;
  c.fx = c.fy = 500.0;
  c.cx = 512.0;
  c.cy = 384.0;
  c.width = 1024;
  c.height = 768;
  EXPECT_EQ(project(c, Vec3(0, 0, 500)), Vec2(512, 384));
  EXPECT_EQ(project(c, Vec3(100, 0, 500)), Vec2(612, 384));
  c.bias = Vec2(2, 0);
  EXPECT_EQ(project(c, Vec3(100, 0, 500)), Vec2(614, 384));
  EXPECT_THROW(project(c, Vec3(0, 0, 0)), BehindCameraError);
  EXPECT_THROW(project(c, Vec3(0, 0, -5)), BehindCameraError);
}

TEST(Rasterize, EmptyMeshGivesBlankFrame) {
  HandMesh mesh;
  const auto fb = rasterize({}, mesh, unit_camera(32, 24), Texture::procedural(16));
  EXPECT_EQ(count_set(fb.mask), 0u);
  EXPECT_TRUE(fb.consistent());
}

TEST(Rasterize, AxisAlignedQuadCoversRectangle) {
  const Texture tex = Texture::procedural(32);
  const double rects[][4] = {{3, 4, 17, 11}, {2.3, 1.7, 20.6, 9.2}, {-5, -3, 10.5, 8.5},
                             {10.5, 0.5, 40, 30}, {0.0, 0.0, 0.4, 0.4}};
  for (const auto& r : rects) {
    HandMesh mesh;
    add_quad(mesh, r[0], r[1], r[2], r[3], 100.0, 0.5);
    const auto fb = rasterize(mesh.vertices, mesh, unit_camera(32, 24), tex);
    EXPECT_EQ(count_set(fb.mask), oracle::rect_centre_count(r[0], r[1], r[2], r[3], 32, 24))
        << r[0] << "," << r[1] << " " << r[2] << "," << r[3];
    EXPECT_TRUE(fb.consistent());
  }
}

TEST(Rasterize, FrontTriangleWins) {
  HandMesh mesh;
  add_quad(mesh, 2, 2, 20, 16, 300.0, 0.9);  // back, drawn first
  add_quad(mesh, 8, 6, 28, 20, 100.0, 0.1);  // front
  HandMesh reversed;
  add_quad(reversed, 8, 6, 28, 20, 100.0, 0.1);
  add_quad(reversed, 2, 2, 20, 16, 300.0, 0.9);
  const Texture tex = Texture::procedural(32);
  for (const HandMesh* m : {&mesh, &reversed}) {
    const auto fb = rasterize(m->vertices, *m, unit_camera(32, 24), tex);
    for (int y = 6; y < 16; ++y) {
      for (int x = 8; x < 20; ++x) {
        ASSERT_TRUE(fb.mask(x, y));
        EXPECT_FLOAT_EQ(fb.uv(x, y).u, 0.1f);
      }
    }
    EXPECT_FLOAT_EQ(fb.uv(3, 3).u, 0.9f);
  }
}

TEST(Rasterize, ReusedBuffersMatchFreshOnes) {
  HandScene s;
  const Texture tex = Texture::procedural(256);
  const CameraModel cam = CameraModel::centered(256, 192);
  MotionScript script{MotionKind::kCombined, 40.0, 0.5, 3.0, 2};
  FrameBuffers reused;
  for (double t : {0.1, 1.3, 2.2}) {
    const auto v = skin(s.mesh, sample_ground_truth(s.skeleton, script, t), s.rest);
    rasterize_into(reused, v, s.mesh, cam, tex, t);
    const auto fresh = rasterize(v, s.mesh, cam, tex, t);
    EXPECT_TRUE(reused == fresh);
    EXPECT_TRUE(fresh.consistent());
  }
}

TEST(Rasterize, MaskMatchesFullRaster) {
  HandScene s;
  const CameraModel cam = CameraModel::centered(256, 192);
  const auto fb = rasterize(s.mesh.vertices, s.mesh, cam, Texture::procedural(64));
  EXPECT_TRUE(rasterize_mask(s.mesh.vertices, s.mesh, cam) == fb.mask);
}

TEST(Rasterize, ResolutionScalingOfCoverage) {
  HandScene s;
  const Texture tex = Texture::procedural(64);
  const auto lo = rasterize_mask(s.mesh.vertices, s.mesh, CameraModel::centered(256, 192));
  const auto hi = rasterize_mask(s.mesh.vertices, s.mesh, CameraModel::centered(512, 384));
  const double ratio = static_cast<double>(count_set(hi)) / static_cast<double>(count_set(lo));
  EXPECT_NEAR(ratio, 4.0, 0.08);
}

TEST(Rasterize, RestHandIsOneComponent) {
  HandScene s;
  for (int w : {256, 512, 1024}) {
    const auto m = rasterize_mask(s.mesh.vertices, s.mesh, CameraModel::centered(w, w * 3 / 4));
    EXPECT_EQ(components(m), 1) << w;
  }
}

TEST(CameraMask, SamePoseMatchesRender) {
  HandScene s;
  const CameraModel cam = CameraModel::centered(256, 192);
  MotionScript script{MotionKind::kArticulate, 30.0, 0.5, 3.0, 0};
  const Pose pose = sample_ground_truth(s.skeleton, script, 0.9);
  const auto frame = render_camera_mask(pose, s.rest, s.mesh, cam);
  const auto fb = rasterize(skin(s.mesh, pose, s.rest), s.mesh, cam, Texture::procedural(64));
  EXPECT_TRUE(frame.mask == fb.mask);
  EXPECT_DOUBLE_EQ(frame.capture_time, pose.timestamp);
}

TEST(CameraMask, BiasedProjectorDoesNotAffectCamera) {
  HandScene s;
  CameraModel cam = CameraModel::centered(256, 192);
  cam.bias = Vec2(7, -3);
  const auto biased = render_camera_mask(s.rest, s.rest, s.mesh, cam);
  const auto plain = render_camera_mask(s.rest, s.rest, s.mesh, cam.without_bias());
  EXPECT_TRUE(biased.mask == plain.mask);
}

TEST(CameraMask, OutsideFrustumIsEmpty) {
  HandScene s;
  Pose far = s.rest;
  for (auto& j : far.joints) j.translation += Vec3(5000, 0, 0);
  EXPECT_EQ(count_set(render_camera_mask(far, s.rest, s.mesh, CameraModel::centered(256, 192)).mask),
            0u);
  Pose behind = s.rest;
  for (auto& j : behind.joints) j.translation -= Vec3(0, 0, 2000);
  EXPECT_EQ(
      count_set(render_camera_mask(behind, s.rest, s.mesh, CameraModel::centered(256, 192)).mask),
      0u);
}

TEST(CameraMask, MotionSeparatesSilhouettes) {
  HandScene s;
  const CameraModel cam = CameraModel::centered(256, 192);
  MotionScript script{MotionKind::kTranslate, 50.0, 0.5, 3.0, 0};
  const auto early = render_camera_mask(sample_ground_truth(s.skeleton, script, 1.0), s.rest, s.mesh, cam);
  const auto late = render_camera_mask(sample_ground_truth(s.skeleton, script, 1.016), s.rest, s.mesh, cam);
  const double iou = mask_iou(early.mask, late.mask);
  EXPECT_LT(iou, 1.0);
  EXPECT_GT(iou, 0.8);
}

TEST(Texture, ClampAndBilinear) {
  Plane<Rgb> img(2, 1);
  img(0, 0) = {0, 0, 0};
  img(1, 0) = {200, 100, 50};
  const Texture tex(img);
  EXPECT_EQ(tex.sample(-3.0, 0.5), (Rgb{0, 0, 0}));
  EXPECT_EQ(tex.sample(4.0, 0.5), (Rgb{200, 100, 50}));
  EXPECT_EQ(tex.sample(0.5, 0.5), (Rgb{100, 50, 25}));
}
