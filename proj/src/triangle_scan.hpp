#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dpm/geometry.hpp"

namespace dpm::detail {

inline double edge(const Vec2& a, const Vec2& b, double px, double py) {
  return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
}

// Top-left rule for pixel centres exactly on an edge, for positive-area
// triangles in y-down pixel space: top and left edges are owned, so of two
// triangles sharing an edge exactly one owns it.
inline bool owns_edge(const Vec2& a, const Vec2& b) {
  const double dy = b.y() - a.y();
  return dy < 0.0 || (dy == 0.0 && b.x() - a.x() > 0.0);
}

// Calls visit(x, y, l0, l1, l2) for every pixel whose centre lies in the
// triangle; l* are screen-space barycentrics in the caller's vertex order.
// Returns false for degenerate or non-finite triangles.
template <typename Visit>
bool scan_triangle(const Vec2& p0, const Vec2& p1, const Vec2& p2, int width, int height,
                   Visit&& visit) {
  if (!p0.allFinite() || !p1.allFinite() || !p2.allFinite()) return false;
  std::array<Vec2, 3> v{p0, p1, p2};
  std::array<int, 3> slot{0, 1, 2};
  double area = edge(v[0], v[1], v[2].x(), v[2].y());
  if (area == 0.0 || !std::isfinite(area)) return false;
  if (area < 0.0) {
    std::swap(v[1], v[2]);
    std::swap(slot[1], slot[2]);
    area = -area;
  }
  const double min_x = std::min({v[0].x(), v[1].x(), v[2].x()});
  const double max_x = std::max({v[0].x(), v[1].x(), v[2].x()});
  const double min_y = std::min({v[0].y(), v[1].y(), v[2].y()});
  const double max_y = std::max({v[0].y(), v[1].y(), v[2].y()});
  const int x0 = static_cast<int>(std::max(0.0, std::ceil(min_x - 0.5)));
  const int x1 = static_cast<int>(std::min(width - 1.0, std::floor(max_x - 0.5)));
  const int y0 = static_cast<int>(std::max(0.0, std::ceil(min_y - 0.5)));
  const int y1 = static_cast<int>(std::min(height - 1.0, std::floor(max_y - 0.5)));
  if (x0 > x1 || y0 > y1) return true;

  const bool own0 = owns_edge(v[1], v[2]);
  const bool own1 = owns_edge(v[2], v[0]);
  const bool own2 = owns_edge(v[0], v[1]);
  const double inv_area = 1.0 / area;
  std::array<double, 3> l{};
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    bool entered = false;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double w0 = edge(v[1], v[2], px, py);
      const double w1 = edge(v[2], v[0], px, py);
      const double w2 = edge(v[0], v[1], px, py);
      const bool inside = !(w0 < 0.0 || (w0 == 0.0 && !own0)) &&
                          !(w1 < 0.0 || (w1 == 0.0 && !own1)) &&
                          !(w2 < 0.0 || (w2 == 0.0 && !own2));
      if (!inside) {
        // Covered centres on a row are contiguous (intersection of half-planes).
        if (entered) break;
        continue;
      }
      entered = true;
      l[static_cast<std::size_t>(slot[0])] = w0 * inv_area;
      l[static_cast<std::size_t>(slot[1])] = w1 * inv_area;
      l[static_cast<std::size_t>(slot[2])] = w2 * inv_area;
      visit(x, y, l[0], l[1], l[2]);
    }
  }
  return true;
}

}  // namespace dpm::detail
