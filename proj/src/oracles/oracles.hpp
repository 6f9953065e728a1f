#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpm/deform.hpp"
#include "dpm/hand_model.hpp"
#include "dpm/image.hpp"
#include "dpm/landmarks.hpp"
#include "dpm/metrics.hpp"
#include "dpm/pbr.hpp"
#include "dpm/raster.hpp"

// Slow, direct reference implementations used to check the production
// kernels. None of them calls the kernel it is meant to check.
namespace dpm::oracle {

// ---- regions and nearest neighbours ---------------------------------------

RegionCounts truth_table_counts(const Mask& camera, const Mask& render);

/// Exact squared distance from every Ω_C pixel to its nearest Ω_D pixel by
/// exhaustive search (-1 elsewhere, or everywhere when Ω_D is empty).
Plane<std::int32_t> brute_force_nearest_dist2(const RegionMap& regions);

/// Camera mask fully set, render mask = `seeds` random pixels (plus a
/// random blob when `with_blob`), so Ω_C is the complement of the seeds.
struct SeedScene {
  Mask camera;
  Mask render;
};
SeedScene random_seed_scene(int width, int height, std::uint64_t seed, bool with_blob = true);

// ---- MLS ------------------------------------------------------------------

/// Weighted least squares over the full transform class, solved from the
/// normal equations (affine, similarity) or by weighted Procrustes (rigid).
Vec2 dense_mls(std::span<const Vec2> p, std::span<const Vec2> q, const Vec2& v, double alpha,
               MlsVariant variant);

/// Output pixel by output pixel: find the deformed triangle containing the
/// centre by scanning every cell, invert to the rest position and sample.
FrameBuffers inverse_map_warp(const FrameBuffers& source, const DeformGrid& grid);

// ---- Kalman ---------------------------------------------------------------

/// Constant-velocity filter for one axis in scalars.
struct AxisFilter {
  double pos = 0.0, vel = 0.0;
  double p00 = 0.0, p01 = 0.0, p11 = 0.0;
};

class ReferenceKalman {
 public:
  ReferenceKalman(const Vec2& z, double process, double measurement, double initial_velocity);
  /// Predict by dt, then update with z when present; returns the position.
  Vec2 step(double dt, const std::optional<Vec2>& z);
  const AxisFilter& axis(int k) const { return k == 0 ? x_ : y_; }

 private:
  void predict(AxisFilter& a, double dt) const;
  void update(AxisFilter& a, double z) const;

  double q_, r_;
  AxisFilter x_, y_;
};

// ---- PBR ------------------------------------------------------------------

struct ScalarPbr {
  Plane<Rgb> color;
  Mask lit;
};

/// Per-pixel fill with exhaustive nearest-seed search (ties to the lowest
/// row-major index).
ScalarPbr scalar_pbr(const FrameBuffers& warped, const Mask& camera, const Texture& texture);

// ---- skinning -------------------------------------------------------------

/// v' = sum_j w_j * (M_j * M_j,rest^-1) * v with explicit 4x4 matrices.
std::vector<Vec3> reference_skin(const HandMesh& mesh, const Pose& pose, const Pose& rest);

// ---- curves ---------------------------------------------------------------

/// Cubic B-spline on the uniform extended knot vector, basis by the
/// Cox-de Boor recursion, fitted from the normal equations.
class ReferenceSpline {
 public:
  ReferenceSpline(std::span<const double> t, std::span<const double> values, double t0,
                  double t1, int knot_count);
  double operator()(double t) const;

 private:
  double basis(int i, int degree, double t) const;
  std::vector<double> knots_;
  Eigen::VectorXd coefficients_;
};

/// Nearest distance over the whole fitted range: dense sampling at
/// `samples_per_second`, then ternary refinement around the best sample.
double global_curve_distance(const SplineFit& fit, std::size_t landmark, const Vec2& point,
                             double samples_per_second = 20000.0);

/// Largest gap, over a dense time grid, between `fit` and a reference fit of
/// the same traces with `knot_factor` times as many knots.
double refit_gap(std::span<const LandmarkSet> traces, const SplineFit& fit, int knot_factor = 2);

// ---- raster ---------------------------------------------------------------

/// Pixel centres inside the half-open rectangle [x0, x1) x [y0, y1),
/// clipped to the frame.
std::size_t rect_centre_count(double x0, double y0, double x1, double y1, int width, int height);

// ---- suites ---------------------------------------------------------------

struct Check {
  std::string name;
  bool pass = false;
  /// Observed error (or failure fraction) and the allowed bound.
  double observed = 0.0;
  double tolerance = 0.0;
};

std::vector<std::string> suite_names();

/// Throws InvalidArgument naming the valid suites for an unknown name.
std::vector<Check> run_suite(const std::string& name, std::uint64_t seed);

}  // namespace dpm::oracle
