#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dpm/image.hpp"
#include "dpm/raster.hpp"

namespace dpm {

/// Camera/render foreground partition:
/// A neither, B render only, C camera only, D both.
enum class Region : std::uint8_t { kA = 0, kB = 1, kC = 2, kD = 3 };

using RegionMap = Plane<Region>;

struct RegionCounts {
  std::size_t a = 0, b = 0, c = 0, d = 0;
  std::size_t total() const { return a + b + c + d; }
};

/// Throws InvalidArgument on a shape mismatch.
RegionMap partition(const Mask& camera_mask, const Mask& render_mask);
void partition_into(RegionMap& out, const Mask& camera_mask, const Mask& render_mask);
RegionCounts count_regions(const RegionMap& regions);

/// Nearest Ω_D pixel per pixel. `seed.x < 0` and `dist2 < 0` mark pixels
/// the flood did not visit (Ω_A, Ω_B, or outside the C∪D bounding box).
struct NearestField {
  Plane<Pixel> seed;
  Plane<std::int32_t> dist2;
};

/// 1+JFA+2 restricted to Ω_C: steps 1, N/2, N/4, ..., 1 then 2, 1, where N is the
/// power of two covering the C∪D bounding box. Ω_D pixels are their own
/// seed. Ties go to the lower (y, x) seed so results do not depend on scan
/// order. Throws NoSeedError if Ω_C is non-empty and Ω_D is empty.
NearestField jump_flood(const RegionMap& regions);

/// Flood buffers kept between calls.
struct JfaScratch {
  std::vector<std::int32_t> current, next, pending;
};

void jump_flood(const RegionMap& regions, NearestField& out, JfaScratch& scratch);

/// f(p_D) + (f(p_D) - f(p'_D)), or f(p_D) when the reflection is not in Ω_D.
/// The result may leave [0,1]; sampling clamps.
Vec2 extrapolate_uv(const Uv& at_seed, const std::optional<Uv>& at_reflection);

struct PbrResult {
  Plane<Rgb> color;
  /// Pixels carrying projected content (Ω_C filled plus Ω_D).
  Mask lit;
  RegionMap regions;
  NearestField field;
  RegionCounts counts;
  std::size_t filled = 0;
  /// Ω_C was non-empty but Ω_D empty; output is the warped render with Ω_B
  /// removed.
  bool no_seed = false;
};

/// Ω_A and Ω_B black, Ω_D copied from the warped render, Ω_C sampled from
/// the texture at the UV extrapolated from the nearest Ω_D pixel.
PbrResult fill_boundary(const FrameBuffers& warped, const Mask& camera_mask,
                        const Texture& texture);

struct PbrWorkspace {
  PbrResult result;
  JfaScratch jfa;
};

/// fill_boundary() into `workspace.result`, which is returned.
const PbrResult& fill_boundary(const FrameBuffers& warped, const Mask& camera_mask,
                               const Texture& texture, PbrWorkspace& workspace);

/// Region map as a 4-colour image.
void write_region_ppm(const std::filesystem::path& path, const RegionMap& regions);
/// Nearest-seed distance scaled to 8 bits (unvisited pixels are 0).
void write_distance_pgm(const std::filesystem::path& path, const NearestField& field);

}  // namespace dpm
