#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "dpm/error.hpp"
#include "dpm/filters.hpp"

namespace dpm::oracle {

RegionCounts truth_table_counts(const Mask& camera, const Mask& render) {
  RegionCounts c;
  for (int y = 0; y < camera.height(); ++y) {
    for (int x = 0; x < camera.width(); ++x) {
      const bool cam = camera(x, y) != 0;
      const bool ren = render(x, y) != 0;
      if (!cam && !ren) ++c.a;
      if (!cam && ren) ++c.b;
      if (cam && !ren) ++c.c;
      if (cam && ren) ++c.d;
    }
  }
  return c;
}

Plane<std::int32_t> brute_force_nearest_dist2(const RegionMap& regions) {
  Plane<std::int32_t> out(regions.width(), regions.height(), -1);
  std::vector<std::pair<int, int>> seeds;
  for (int y = 0; y < regions.height(); ++y) {
    for (int x = 0; x < regions.width(); ++x) {
      if (regions(x, y) == Region::kD) seeds.emplace_back(x, y);
    }
  }
  if (seeds.empty()) return out;
  for (int y = 0; y < regions.height(); ++y) {
    for (int x = 0; x < regions.width(); ++x) {
      if (regions(x, y) != Region::kC) continue;
      std::int32_t best = std::numeric_limits<std::int32_t>::max();
      for (const auto& [sx, sy] : seeds) {
        const std::int32_t d = (sx - x) * (sx - x) + (sy - y) * (sy - y);
        best = std::min(best, d);
      }
      out(x, y) = best;
    }
  }
  return out;
}

SeedScene random_seed_scene(int width, int height, std::uint64_t seed, bool with_blob) {
  std::mt19937_64 rng(seed);
  SeedScene s{Mask(width, height, 1), Mask(width, height, 0)};
  std::uniform_int_distribution<int> count(1, 48);
  std::uniform_int_distribution<int> px(0, width - 1), py(0, height - 1);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) s.render(px(rng), py(rng)) = 1;
  if (with_blob) {
    const int cx = px(rng), cy = py(rng);
    const int r = std::uniform_int_distribution<int>(2, std::max(3, width / 8))(rng);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) s.render(x, y) = 1;
      }
    }
  }
  return s;
}

Vec2 dense_mls(std::span<const Vec2> p, std::span<const Vec2> q, const Vec2& v, double alpha,
               MlsVariant variant) {
  const std::size_t n = p.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::sqrt((p[i] - v).squaredNorm());
    if (d == 0.0) return q[i];
    w[i] = 1.0 / std::pow(d, 2.0 * alpha);
  }
  switch (variant) {
    case MlsVariant::kAffine: {
      // Unknowns (m00, m01, tx) for x and (m10, m11, ty) for y share the
      // design rows [px, py, 1].
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atx = Eigen::Vector3d::Zero(), aty = Eigen::Vector3d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d row(p[i].x(), p[i].y(), 1.0);
        ata += w[i] * row * row.transpose();
        atx += w[i] * row * q[i].x();
        aty += w[i] * row * q[i].y();
      }
      const auto lu = ata.fullPivLu();
      const Eigen::Vector3d cx = lu.solve(atx), cy = lu.solve(aty);
      const Eigen::Vector3d at(v.x(), v.y(), 1.0);
      return {cx.dot(at), cy.dot(at)};
    }
    case MlsVariant::kSimilarity: {
      // f(p) = [a -b; b a] p + t, unknowns (a, b, tx, ty).
      Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
      Eigen::Vector4d atb = Eigen::Vector4d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector4d rx(p[i].x(), -p[i].y(), 1.0, 0.0);
        const Eigen::Vector4d ry(p[i].y(), p[i].x(), 0.0, 1.0);
        ata += w[i] * (rx * rx.transpose() + ry * ry.transpose());
        atb += w[i] * (rx * q[i].x() + ry * q[i].y());
      }
      const Eigen::Vector4d c = ata.fullPivLu().solve(atb);
      return {c(0) * v.x() - c(1) * v.y() + c(2), c(1) * v.x() + c(0) * v.y() + c(3)};
    }
    case MlsVariant::kRigid: {
      double sw = 0.0;
      Vec2 pc = Vec2::Zero(), qc = Vec2::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        pc += w[i] * p[i];
        qc += w[i] * q[i];
      }
      pc /= sw;
      qc /= sw;
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (std::size_t i = 0; i < n; ++i) cov += w[i] * (q[i] - qc) * (p[i] - pc).transpose();
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
      if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(1, 1) = -1.0;
      const Eigen::Matrix2d r = svd.matrixU() * d * svd.matrixV().transpose();
      return r * (v - pc) + qc;
    }
  }
  throw InvalidArgument("unknown MLS variant");
}

namespace {

double edge_value(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Barycentrics of `c` in (a, b, d) when the centre is covered, using the
// top-left style ownership rule for centres exactly on an edge.
std::optional<Eigen::Vector3d> covered(Vec2 a, Vec2 b, Vec2 d, const Vec2& c) {
  double area = edge_value(a, b, d);
  if (area == 0.0 || !std::isfinite(area)) return std::nullopt;
  bool flipped = false;
  if (area < 0.0) {
    std::swap(b, d);
    area = -area;
    flipped = true;
  }
  auto owns = [](const Vec2& from, const Vec2& to) {
    const double dy = to.y() - from.y();
    return dy < 0.0 || (dy == 0.0 && to.x() - from.x() > 0.0);
  };
  const double e0 = edge_value(b, d, c);
  const double e1 = edge_value(d, a, c);
  const double e2 = edge_value(a, b, c);
  if (e0 < 0.0 || (e0 == 0.0 && !owns(b, d))) return std::nullopt;
  if (e1 < 0.0 || (e1 == 0.0 && !owns(d, a))) return std::nullopt;
  if (e2 < 0.0 || (e2 == 0.0 && !owns(a, b))) return std::nullopt;
  Eigen::Vector3d l(e0 / area, e1 / area, e2 / area);
  if (flipped) std::swap(l(1), l(2));
  return l;
}

}  // namespace

FrameBuffers inverse_map_warp(const FrameBuffers& source, const DeformGrid& grid) {
  const int w = source.width(), h = source.height();
  FrameBuffers out = FrameBuffers::blank(w, h, source.timestamp);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 c(x + 0.5, y + 0.5);
      for (int j = 0; j + 1 < grid.nodes_y(); ++j) {
        for (int i = 0; i + 1 < grid.nodes_x(); ++i) {
          const std::array<std::array<std::pair<int, int>, 3>, 2> tris{{
              {{{i, j}, {i + 1, j}, {i + 1, j + 1}}},
              {{{i, j}, {i + 1, j + 1}, {i, j + 1}}},
          }};
          for (const auto& t : tris) {
            const auto l = covered(grid.deformed(t[0].first, t[0].second),
                                   grid.deformed(t[1].first, t[1].second),
                                   grid.deformed(t[2].first, t[2].second), c);
            if (!l) continue;
            Vec2 src = Vec2::Zero();
            for (int k = 0; k < 3; ++k) src += (*l)(k) * grid.rest(t[k].first, t[k].second);
            const int sx = static_cast<int>(std::floor(src.x()));
            const int sy = static_cast<int>(std::floor(src.y()));
            if (sx < 0 || sy < 0 || sx >= w || sy >= h || !source.mask(sx, sy)) continue;
            if (!(source.depth(sx, sy) < out.depth(x, y))) continue;
            out.mask(x, y) = 1;
            out.depth(x, y) = source.depth(sx, sy);
            out.uv(x, y) = source.uv(sx, sy);
            out.color(x, y) = source.color(sx, sy);
          }
        }
      }
    }
  }
  return out;
}

ReferenceKalman::ReferenceKalman(const Vec2& z, double process, double measurement,
                                 double initial_velocity)
    : q_(process), r_(measurement) {
  x_ = {z.x(), 0.0, measurement, 0.0, initial_velocity};
  y_ = {z.y(), 0.0, measurement, 0.0, initial_velocity};
}

void ReferenceKalman::predict(AxisFilter& a, double dt) const {
  a.pos += a.vel * dt;
  // F P F^T with F = [1 dt; 0 1], plus the white-acceleration noise.
  const double p00 = a.p00 + 2.0 * dt * a.p01 + dt * dt * a.p11;
  const double p01 = a.p01 + dt * a.p11;
  a.p00 = p00 + q_ * dt * dt * dt / 3.0;
  a.p01 = p01 + q_ * dt * dt / 2.0;
  a.p11 = a.p11 + q_ * dt;
}

void ReferenceKalman::update(AxisFilter& a, double z) const {
  const double s = a.p00 + r_;
  const double k0 = a.p00 / s, k1 = a.p01 / s;
  const double innov = z - a.pos;
  a.pos += k0 * innov;
  a.vel += k1 * innov;
  const double p00 = (1.0 - k0) * a.p00;
  const double p01 = (1.0 - k0) * a.p01;
  const double p11 = a.p11 - k1 * a.p01;
  a.p00 = p00;
  a.p01 = p01;
  a.p11 = p11;
}

Vec2 ReferenceKalman::step(double dt, const std::optional<Vec2>& z) {
  predict(x_, dt);
  predict(y_, dt);
  if (z) {
    update(x_, z->x());
    update(y_, z->y());
  }
  return {x_.pos, y_.pos};
}

ScalarPbr scalar_pbr(const FrameBuffers& warped, const Mask& camera, const Texture& texture) {
  const int w = warped.width(), h = warped.height();
  ScalarPbr out{Plane<Rgb>(w, h, Rgb{}), Mask(w, h, 0)};
  auto in_d = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && camera(x, y) && warped.mask(x, y);
  };
  std::vector<std::pair<int, int>> seeds;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (in_d(x, y)) seeds.emplace_back(x, y);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (in_d(x, y)) {
        out.color(x, y) = warped.color(x, y);
        out.lit(x, y) = 1;
        continue;
      }
      if (!camera(x, y) || seeds.empty()) continue;
      long best = std::numeric_limits<long>::max();
      std::pair<int, int> s{-1, -1};
      for (const auto& [sx, sy] : seeds) {
        const long d = static_cast<long>(sx - x) * (sx - x) + static_cast<long>(sy - y) * (sy - y);
        if (d < best) {
          best = d;
          s = {sx, sy};
        }
      }
      const Uv at = warped.uv(s.first, s.second);
      double u = at.u, v = at.v;
      const int rx = 2 * s.first - x, ry = 2 * s.second - y;
      if (in_d(rx, ry)) {
        const Uv ref = warped.uv(rx, ry);
        u = 2.0 * at.u - ref.u;
        v = 2.0 * at.v - ref.v;
      }
      out.color(x, y) = texture.sample(u, v);
      out.lit(x, y) = 1;
    }
  }
  return out;
}

namespace {

Eigen::Matrix4d to_matrix(const RigidTransform& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = t.rotation.normalized().toRotationMatrix();
  m.topRightCorner<3, 1>() = t.translation;
  return m;
}

}  // namespace

std::vector<Vec3> reference_skin(const HandMesh& mesh, const Pose& pose, const Pose& rest) {
  std::vector<Eigen::Matrix4d> bone(pose.joints.size());
  for (std::size_t j = 0; j < bone.size(); ++j) {
    bone[j] = to_matrix(pose.joints[j]) * to_matrix(rest.joints[j]).inverse();
  }
  std::vector<Vec3> out(mesh.vertices.size());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const Eigen::Vector4d h(mesh.vertices[v].x(), mesh.vertices[v].y(), mesh.vertices[v].z(), 1.0);
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    const auto& wts = mesh.weights[v];
    for (int k = 0; k < wts.count; ++k) {
      const auto& e = wts.entries[static_cast<std::size_t>(k)];
      acc += e.weight * (bone[static_cast<std::size_t>(e.joint)] * h);
    }
    out[v] = acc.head<3>();
  }
  return out;
}

ReferenceSpline::ReferenceSpline(std::span<const double> t, std::span<const double> values,
                                 double t0, double t1, int knot_count) {
  const double h = (t1 - t0) / (knot_count - 1);
  const int m = knot_count + 2;
  for (int k = 0; k < m + 4; ++k) knots_.push_back(t0 + (k - 3) * h);
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(m);
  for (std::size_t r = 0; r < t.size(); ++r) {
    Eigen::VectorXd row(m);
    for (int i = 0; i < m; ++i) row(i) = basis(i, 3, t[r]);
    ata += row * row.transpose();
    atb += row * values[r];
  }
  coefficients_ = ata.ldlt().solve(atb);
}

double ReferenceSpline::basis(int i, int degree, double t) const {
  const auto& u = knots_;
  const auto ui = static_cast<std::size_t>(i);
  if (degree == 0) return (u[ui] <= t && t < u[ui + 1]) ? 1.0 : 0.0;
  const auto d = static_cast<std::size_t>(degree);
  double left = 0.0, right = 0.0;
  if (u[ui + d] != u[ui]) left = (t - u[ui]) / (u[ui + d] - u[ui]) * basis(i, degree - 1, t);
  if (u[ui + d + 1] != u[ui + 1]) {
    right = (u[ui + d + 1] - t) / (u[ui + d + 1] - u[ui + 1]) * basis(i + 1, degree - 1, t);
  }
  return left + right;
}

double ReferenceSpline::operator()(double t) const {
  double v = 0.0;
  for (int i = 0; i < coefficients_.size(); ++i) v += coefficients_(i) * basis(i, 3, t);
  return v;
}

double global_curve_distance(const SplineFit& fit, std::size_t landmark, const Vec2& point,
                             double samples_per_second) {
  const double t0 = fit.t0(), t1 = fit.t1();
  const auto n = static_cast<long>(std::ceil((t1 - t0) * samples_per_second));
  auto d2 = [&](double t) { return (fit.evaluate(landmark, t) - point).squaredNorm(); };
  double best_t = t0, best = d2(t0);
  for (long k = 1; k <= n; ++k) {
    const double t = std::min(t1, t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n));
    const double d = d2(t);
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  const double step = (t1 - t0) / static_cast<double>(n);
  double lo = std::max(t0, best_t - step), hi = std::min(t1, best_t + step);
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (d2(a) < d2(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::sqrt(std::min(best, d2(0.5 * (lo + hi))));
}

double refit_gap(std::span<const LandmarkSet> traces, const SplineFit& fit, int knot_factor) {
  std::vector<double> t;
  for (const auto& s : traces) t.push_back(s.timestamp);
  const double t0 = t.front(), t1 = t.back();
  const int knots = std::min(static_cast<int>(t.size()) - 2, fit.knot_count * knot_factor);
  double gap = 0.0;
  for (std::size_t l = 0; l < fit.landmark_count(); ++l) {
    std::vector<double> xs, ys;
    for (const auto& s : traces) {
      xs.push_back(s.points[l].x());
      ys.push_back(s.points[l].y());
    }
    const ReferenceSpline rx(t, xs, t0, t1, knots), ry(t, ys, t0, t1, knots);
    for (int k = 0; k <= 1000; ++k) {
      const double tk = t0 + (t1 - t0) * k / 1000.0;
      gap = std::max(gap, (fit.evaluate(l, tk) - Vec2(rx(tk), ry(tk))).norm());
    }
  }
  return gap;
}

std::size_t rect_centre_count(double x0, double y0, double x1, double y1, int width, int height) {
  // Centres c + 0.5 with x0 <= c + 0.5 < x1.
  auto span = [](double lo, double hi, int size) {
    const long first = std::max(0L, static_cast<long>(std::ceil(lo - 0.5)));
    const long last = std::min(static_cast<long>(size) - 1, static_cast<long>(std::ceil(hi - 0.5)) - 1);
    return last >= first ? static_cast<std::size_t>(last - first + 1) : std::size_t{0};
  };
  return span(x0, x1, width) * span(y0, y1, height);
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() { return {"jfa", "mls", "kalman"}; }

namespace {

std::vector<Check> jfa_suite(std::uint64_t seed) {
  std::vector<Check> checks;
  for (int c = 0; c < 20; ++c) {
    const auto scene = random_seed_scene(128, 128, seed * 1000 + static_cast<std::uint64_t>(c));
    const RegionMap regions = partition(scene.camera, scene.render);
    const NearestField field = jump_flood(regions);
    const auto truth = brute_force_nearest_dist2(regions);
    std::size_t total = 0, wrong = 0;
    double excess = 0.0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i] != Region::kC) continue;
      ++total;
      if (field.dist2[i] != truth[i]) {
        ++wrong;
        const double e = field.dist2[i] < 0
                             ? std::numeric_limits<double>::infinity()
                             : std::sqrt(static_cast<double>(field.dist2[i])) -
                                   std::sqrt(static_cast<double>(truth[i]));
        excess = std::max(excess, e);
      }
    }
    const double frac = total ? static_cast<double>(wrong) / static_cast<double>(total) : 0.0;
    checks.push_back({fmt::format("jfa case {:2d} mismatch fraction", c), frac <= 0.001, frac,
                      0.001});
    checks.push_back({fmt::format("jfa case {:2d} max excess px", c), excess <= 2.0, excess, 2.0});
  }
  return checks;
}

std::vector<Vec2> random_controls(std::mt19937_64& rng, std::size_t n, double w, double h) {
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
  std::vector<Vec2> p;
  while (p.size() < n) p.emplace_back(ux(rng), uy(rng));
  return p;
}

std::vector<Check> mls_suite(std::uint64_t seed) {
  std::vector<Check> checks;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 4.0);
  const int w = 96, h = 72;
  const double spacing = 8.0;
  for (MlsVariant variant : {MlsVariant::kAffine, MlsVariant::kSimilarity, MlsVariant::kRigid}) {
    double node_err = 0.0, control_err = 0.0;
    for (int c = 0; c < 10; ++c) {
      // Controls on grid nodes so the grid reproduces them exactly.
      std::uniform_int_distribution<int> ix(1, 12), iy(1, 9);
      std::vector<Vec2> p, q;
      while (p.size() < 21) {
        const Vec2 node(-spacing + ix(rng) * spacing, -spacing + iy(rng) * spacing);
        if (std::find(p.begin(), p.end(), node) != p.end()) continue;
        p.push_back(node);
        q.push_back(node + Vec2(jitter(rng), jitter(rng)));
      }
      const DeformGrid grid = solve_grid(p, q, w, h, spacing, 1.0, variant);
      for (int j = 0; j < grid.nodes_y(); ++j) {
        for (int i = 0; i < grid.nodes_x(); ++i) {
          const Vec2 ref = dense_mls(p, q, grid.rest(i, j), 1.0, variant);
          node_err = std::max(node_err, (grid.deformed(i, j) - ref).norm());
        }
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        const Vec2 ref = dense_mls(p, q, p[k], 1.0, variant);
        control_err = std::max(control_err, (grid.map(p[k]) - ref).norm());
      }
    }
    checks.push_back({"mls " + to_string(variant) + " grid nodes vs dense", node_err <= 1e-9,
                      node_err, 1e-9});
    checks.push_back({"mls " + to_string(variant) + " control points vs dense",
                      control_err <= 1e-9, control_err, 1e-9});
  }
  double affine_err = 0.0;
  std::uniform_real_distribution<double> coef(-1.5, 1.5), shift(-40.0, 40.0);
  for (int c = 0; c < 100; ++c) {
    Eigen::Matrix2d a;
    a << coef(rng), coef(rng), coef(rng), coef(rng);
    if (std::abs(a.determinant()) < 0.05) a += Eigen::Matrix2d::Identity();
    const Vec2 t(shift(rng), shift(rng));
    const auto p = random_controls(rng, 21, w, h);
    std::vector<Vec2> q;
    for (const auto& v : p) q.push_back(a * v + t);
    for (const auto& v : random_controls(rng, 20, w, h)) {
      affine_err = std::max(affine_err, (mls_map(p, q, v, 1.0, MlsVariant::kAffine) - (a * v + t)).norm());
    }
  }
  checks.push_back({"mls affine reproduction (100 pairs)", affine_err <= 1e-9, affine_err, 1e-9});
  return checks;
}

std::vector<Check> kalman_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dt_dist(0.0, 0.02), pos(-200.0, 200.0), coin(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  const KalmanNoise params;
  const Vec2 z0(pos(rng), pos(rng));
  KalmanState state = kalman_init(z0, 0.0, params);
  ReferenceKalman ref(z0, params.process, params.measurement, params.initial_velocity);
  double max_err = 0.0, min_eig = std::numeric_limits<double>::infinity();
  std::size_t repairs = 0;
  double t = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double dt = dt_dist(rng);
    t += dt;
    std::optional<Vec2> z;
    if (coin(rng) < 0.7) z = Vec2(100.0 * std::sin(3.0 * t) + noise(rng), 50.0 * std::cos(2.0 * t) + noise(rng));
    const auto r = kalman_step(state, dt, z, params);
    state = r.state;
    repairs += r.repaired ? 1 : 0;
    const Vec2 expect = ref.step(dt, z);
    max_err = std::max(max_err, (r.predicted - expect).norm());
    min_eig = std::min(min_eig, min_eigenvalue(state.cov));
  }
  return {
      {"kalman prediction vs reference (1e4 steps)", max_err <= 1e-9, max_err, 1e-9},
      {"kalman covariance negative eigenvalue", min_eig >= -1e-9, std::max(0.0, -min_eig), 1e-9},
      {"kalman covariance repairs", repairs == 0, static_cast<double>(repairs), 0.0},
  };
}

}  // namespace

std::vector<Check> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "jfa") return jfa_suite(seed);
  if (name == "mls") return mls_suite(seed);
  if (name == "kalman") return kalman_suite(seed);
  std::string valid;
  for (const auto& s : suite_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw InvalidArgument("unknown oracle suite '" + name + "' (valid: " + valid + ")");
}

}  // namespace dpm::oracle
