#include "dpm/deform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "dpm/error.hpp"
#include "triangle_scan.hpp"

namespace dpm {

std::string to_string(MlsVariant variant) {
  switch (variant) {
    case MlsVariant::kAffine: return "affine";
    case MlsVariant::kSimilarity: return "similarity";
    case MlsVariant::kRigid: return "rigid";
  }
  return "unknown";
}

MlsVariant parse_mls_variant(const std::string& name) {
  if (name == "affine") return MlsVariant::kAffine;
  if (name == "similarity") return MlsVariant::kSimilarity;
  if (name == "rigid") return MlsVariant::kRigid;
  throw InvalidArgument("unknown MLS variant '" + name + "' (expected affine, similarity, rigid)");
}

void check_control_points(std::span<const Vec2> p, std::span<const Vec2> q) {
  if (p.size() != q.size()) {
    throw InvalidArgument(fmt::format("MLS needs |P| == |Q| (got {} and {})", p.size(), q.size()));
  }
  if (p.size() < 3) throw InvalidArgument("MLS needs at least 3 control pairs");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p[i].allFinite() || !q[i].allFinite()) {
      throw InvalidArgument("MLS control points must be finite");
    }
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) throw SingularSystemError("duplicate MLS source points");
    }
  }
  Vec2 c = Vec2::Zero();
  for (const auto& v : p) c += v;
  c /= static_cast<double>(p.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& v : p) {
    const Vec2 d = v - c;
    sxx += d.x() * d.x();
    sxy += d.x() * d.y();
    syy += d.y() * d.y();
  }
  const double trace = sxx + syy;
  if (!(sxx * syy - sxy * sxy > 1e-12 * trace * trace)) {
    throw SingularSystemError("MLS source points are collinear");
  }
}

namespace {

// Assumes validated controls.
Vec2 mls_kernel(std::span<const Vec2> p, std::span<const Vec2> q, const Vec2& v, double alpha,
                MlsVariant variant) {
  const std::size_t n = p.size();
  double sw = 0.0;
  Vec2 ps = Vec2::Zero(), qs = Vec2::Zero();
  // Small fixed-size scratch; hand sets have 21 points.
  thread_local std::vector<double> w;
  w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = (p[i] - v).squaredNorm();
    if (d2 == 0.0) return q[i];
    w[i] = alpha == 1.0 ? 1.0 / d2 : 1.0 / std::pow(d2, alpha);
    sw += w[i];
    ps += w[i] * p[i];
    qs += w[i] * q[i];
  }
  ps /= sw;
  qs /= sw;
  const Vec2 d = v - ps;

  if (variant == MlsVariant::kAffine) {
    double a11 = 0, a12 = 0, a22 = 0, b11 = 0, b12 = 0, b21 = 0, b22 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 ph = p[i] - ps;
      const Vec2 qh = q[i] - qs;
      a11 += w[i] * ph.x() * ph.x();
      a12 += w[i] * ph.x() * ph.y();
      a22 += w[i] * ph.y() * ph.y();
      b11 += w[i] * ph.x() * qh.x();
      b12 += w[i] * ph.x() * qh.y();
      b21 += w[i] * ph.y() * qh.x();
      b22 += w[i] * ph.y() * qh.y();
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-14 * (a11 + a22) * (a11 + a22))) {
      throw SingularSystemError("MLS moment matrix is singular");
    }
    const double rx = (a22 * d.x() - a12 * d.y()) / det;
    const double ry = (-a12 * d.x() + a11 * d.y()) / det;
    return {rx * b11 + ry * b21 + qs.x(), rx * b12 + ry * b22 + qs.y()};
  }

  // Similarity / rigid: f = sum_i qh_i A_i (scaled), A_i built from ph_i and d.
  double mu = 0.0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 ph = p[i] - ps;
    const Vec2 qh = q[i] - qs;
    const double dot = ph.dot(d);
    const double cross = ph.x() * d.y() - ph.y() * d.x();
    acc.x() += w[i] * (qh.x() * dot - qh.y() * cross);
    acc.y() += w[i] * (qh.x() * cross + qh.y() * dot);
    mu += w[i] * ph.squaredNorm();
  }
  if (!(mu > 0.0)) throw SingularSystemError("MLS moment is zero");
  if (variant == MlsVariant::kSimilarity) return acc / mu + qs;
  const double len = acc.norm();
  if (len == 0.0) return qs;
  return d.norm() * acc / len + qs;
}

}  // namespace

Vec2 mls_map(std::span<const Vec2> p, std::span<const Vec2> q, const Vec2& v, double alpha,
             MlsVariant variant) {
  check_control_points(p, q);
  if (!(alpha > 0.0)) throw InvalidArgument("MLS alpha must be > 0");
  return mls_kernel(p, q, v, alpha, variant);
}

// ---------------------------------------------------------------------------

DeformGrid::DeformGrid(int width, int height, double spacing)
    : width_(width), height_(height), spacing_(spacing), origin_(-spacing) {
  if (width <= 0 || height <= 0) throw InvalidArgument("grid frame must be non-empty");
  if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be > 0");
  nx_ = static_cast<int>(std::ceil(width / spacing)) + 3;
  ny_ = static_cast<int>(std::ceil(height / spacing)) + 3;
  deformed_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) deformed_[index(i, j)] = rest(i, j);
  }
}

Vec2 DeformGrid::map(const Vec2& point) const {
  const double gx = (point.x() - origin_) / spacing_;
  const double gy = (point.y() - origin_) / spacing_;
  const int i = std::clamp(static_cast<int>(std::floor(gx)), 0, nx_ - 2);
  const int j = std::clamp(static_cast<int>(std::floor(gy)), 0, ny_ - 2);
  const double fx = gx - i;
  const double fy = gy - j;
  const Vec2& n00 = deformed(i, j);
  const Vec2& n10 = deformed(i + 1, j);
  const Vec2& n01 = deformed(i, j + 1);
  const Vec2& n11 = deformed(i + 1, j + 1);
  if (fx >= fy) return (1.0 - fx) * n00 + (fx - fy) * n10 + fy * n11;
  return (1.0 - fy) * n00 + fx * n11 + (fy - fx) * n01;
}

bool DeformGrid::covers(int width, int height) const {
  const Vec2 lo = rest(0, 0);
  const Vec2 hi = rest(nx_ - 1, ny_ - 1);
  return lo.x() <= 0.0 && lo.y() <= 0.0 && hi.x() >= width && hi.y() >= height;
}

bool DeformGrid::is_identity() const {
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      if (deformed(i, j) != rest(i, j)) return false;
    }
  }
  return true;
}

void DeformGrid::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << "i,j,rest_x,rest_y,deformed_x,deformed_y\n";
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const Vec2 r = rest(i, j);
      const Vec2& d = deformed(i, j);
      out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, j, r.x(), r.y(), d.x(),
                         d.y());
    }
  }
}

DeformGrid solve_grid(std::span<const Vec2> p, std::span<const Vec2> q, int width, int height,
                      double spacing, double alpha, MlsVariant variant) {
  check_control_points(p, q);
  if (!(alpha > 0.0)) throw InvalidArgument("MLS alpha must be > 0");
  DeformGrid grid(width, height, spacing);
  for (int j = 0; j < grid.nodes_y(); ++j) {
    for (int i = 0; i < grid.nodes_x(); ++i) {
      grid.deformed(i, j) = mls_kernel(p, q, grid.rest(i, j), alpha, variant);
    }
  }
  return grid;
}

FrameBuffers warp(const FrameBuffers& source, const DeformGrid& grid) {
  WarpWorkspace ws;
  warp(source, grid, ws);
  return std::move(ws.out);
}

const FrameBuffers& warp(const FrameBuffers& source, const DeformGrid& grid,
                         WarpWorkspace& workspace) {
  const int w = source.width();
  const int h = source.height();
  if (!grid.covers(w, h)) throw InvalidArgument("deformation grid does not cover the frame");
  FrameBuffers& out = workspace.out;
  out.reset(w, h, source.timestamp);

  // Summed-area table of the source mask so empty cells are skipped.
  std::vector<int>& sat = workspace.coverage_sat;
  sat.assign(static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1), 0);
  auto sat_at = [&](int x, int y) -> int& {
    return sat[static_cast<std::size_t>(y) * static_cast<std::size_t>(w + 1) +
               static_cast<std::size_t>(x)];
  };
  for (int y = 0; y < h; ++y) {
    int row = 0;
    for (int x = 0; x < w; ++x) {
      row += source.mask(x, y) ? 1 : 0;
      sat_at(x + 1, y + 1) = sat_at(x + 1, y) + row;
    }
  }
  auto any_foreground = [&](int x0, int y0, int x1, int y1) {
    x0 = std::clamp(x0, 0, w);
    x1 = std::clamp(x1, 0, w);
    y0 = std::clamp(y0, 0, h);
    y1 = std::clamp(y1, 0, h);
    if (x0 >= x1 || y0 >= y1) return false;
    return sat_at(x1, y1) - sat_at(x0, y1) - sat_at(x1, y0) + sat_at(x0, y0) > 0;
  };

  auto copy_from = [&](const Vec2& r0, const Vec2& r1, const Vec2& r2) {
    return [&, r0, r1, r2](int x, int y, double l0, double l1, double l2) {
      const double sx = l0 * r0.x() + l1 * r1.x() + l2 * r2.x();
      const double sy = l0 * r0.y() + l1 * r1.y() + l2 * r2.y();
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      if (!source.mask.in_bounds(ix, iy)) return;
      const std::size_t si = source.mask.index(ix, iy);
      if (!source.mask[si]) return;
      const std::size_t di = out.mask.index(x, y);
      if (!(source.depth[si] < out.depth[di])) return;
      out.mask[di] = source.mask[si];
      out.uv[di] = source.uv[si];
      out.color[di] = source.color[si];
      out.depth[di] = source.depth[si];
    };
  };

  for (int j = 0; j + 1 < grid.nodes_y(); ++j) {
    for (int i = 0; i + 1 < grid.nodes_x(); ++i) {
      const Vec2 r00 = grid.rest(i, j);
      const Vec2 r11 = grid.rest(i + 1, j + 1);
      if (!any_foreground(static_cast<int>(std::floor(r00.x())) - 1,
                          static_cast<int>(std::floor(r00.y())) - 1,
                          static_cast<int>(std::ceil(r11.x())) + 1,
                          static_cast<int>(std::ceil(r11.y())) + 1)) {
        continue;
      }
      const Vec2 r10 = grid.rest(i + 1, j);
      const Vec2 r01 = grid.rest(i, j + 1);
      detail::scan_triangle(grid.deformed(i, j), grid.deformed(i + 1, j),
                            grid.deformed(i + 1, j + 1), w, h, copy_from(r00, r10, r11));
      detail::scan_triangle(grid.deformed(i, j), grid.deformed(i + 1, j + 1),
                            grid.deformed(i, j + 1), w, h, copy_from(r00, r11, r01));
    }
  }
  return out;
}

}  // namespace dpm
