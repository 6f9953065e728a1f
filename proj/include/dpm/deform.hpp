#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpm/geometry.hpp"
#include "dpm/landmarks.hpp"
#include "dpm/raster.hpp"

namespace dpm {

enum class MlsVariant { kAffine, kSimilarity, kRigid };

std::string to_string(MlsVariant variant);
MlsVariant parse_mls_variant(const std::string& name);

/// Throws InvalidArgument on size mismatch / fewer than 3 pairs, and
/// SingularSystemError when P is collinear or has duplicates.
void check_control_points(std::span<const Vec2> p, std::span<const Vec2> q);

/// Moving least squares map of `v` for controls p -> q with weights
/// 1 / |p_i - v|^(2 alpha). Returns q_i exactly when v == p_i.
Vec2 mls_map(std::span<const Vec2> p, std::span<const Vec2> q, const Vec2& v,
             double alpha = 1.0, MlsVariant variant = MlsVariant::kAffine);

inline Vec2 mls_map(const LandmarkSet& p, const LandmarkSet& q, const Vec2& v,
                    double alpha = 1.0, MlsVariant variant = MlsVariant::kAffine) {
  return mls_map(p.points, q.points, v, alpha, variant);
}

/// Uniform lattice over a width x height frame with a one-cell margin on
/// every side. Each cell splits along its (0,0)-(1,1) diagonal; `map` and
/// `warp` share that triangulation.
class DeformGrid {
 public:
  DeformGrid(int width, int height, double spacing);

  double spacing() const { return spacing_; }
  int nodes_x() const { return nx_; }
  int nodes_y() const { return ny_; }
  int frame_width() const { return width_; }
  int frame_height() const { return height_; }

  Vec2 rest(int i, int j) const {
    return {origin_ + i * spacing_, origin_ + j * spacing_};
  }
  const Vec2& deformed(int i, int j) const { return deformed_[index(i, j)]; }
  Vec2& deformed(int i, int j) { return deformed_[index(i, j)]; }

  /// Piecewise-linear image of a frame point under the grid.
  Vec2 map(const Vec2& point) const;

  bool covers(int width, int height) const;
  bool is_identity() const;

  /// Columns i,j,rest_x,rest_y,deformed_x,deformed_y.
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }

  int width_, height_;
  double spacing_;
  double origin_;
  int nx_, ny_;
  std::vector<Vec2> deformed_;
};

/// Deformed node = mls_map(P, Q, rest node).
DeformGrid solve_grid(std::span<const Vec2> p, std::span<const Vec2> q, int width, int height,
                      double spacing, double alpha = 1.0,
                      MlsVariant variant = MlsVariant::kAffine);

inline DeformGrid solve_grid(const LandmarkSet& p, const LandmarkSet& q, int width, int height,
                             double spacing, double alpha = 1.0,
                             MlsVariant variant = MlsVariant::kAffine) {
  return solve_grid(p.points, q.points, width, height, spacing, alpha, variant);
}

/// Forward warp: each deformed cell triangle is rasterised in the output
/// and samples the source planes (nearest pixel) at the corresponding rest
/// position. Overlaps from folded cells resolve by source depth.
FrameBuffers warp(const FrameBuffers& source, const DeformGrid& grid);

/// Reusable storage for repeated warps of same-sized frames.
struct WarpWorkspace {
  FrameBuffers out;
  std::vector<int> coverage_sat;
};

/// warp() into `workspace.out`, which is returned.
const FrameBuffers& warp(const FrameBuffers& source, const DeformGrid& grid,
                         WarpWorkspace& workspace);

}  // namespace dpm
