#include "dpm/pbr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dpm/error.hpp"

namespace dpm {

RegionMap partition(const Mask& camera_mask, const Mask& render_mask) {
  RegionMap out;
  partition_into(out, camera_mask, render_mask);
  return out;
}

void partition_into(RegionMap& out, const Mask& camera_mask, const Mask& render_mask) {
  if (!camera_mask.same_shape(render_mask)) {
    throw InvalidArgument("partition: camera and render masks differ in size");
  }
  out.reset(camera_mask.width(), camera_mask.height(), Region::kA);
  const std::uint8_t* cam = camera_mask.pixels().data();
  const std::uint8_t* ren = render_mask.pixels().data();
  Region* dst = out.pixels().data();
  const auto n = static_cast<std::ptrdiff_t>(camera_mask.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const int code = (cam[i] ? 2 : 0) | (ren[i] ? 1 : 0);
    dst[i] = static_cast<Region>(code);
  }
}

RegionCounts count_regions(const RegionMap& regions) {
  std::size_t by_code[4] = {0, 0, 0, 0};
  for (Region r : regions.pixels()) ++by_code[static_cast<std::uint8_t>(r) & 3];
  return {by_code[0], by_code[1], by_code[2], by_code[3]};
}

namespace {

constexpr std::int32_t kNone = -1;

}  // namespace

NearestField jump_flood(const RegionMap& regions) {
  NearestField field;
  JfaScratch scratch;
  jump_flood(regions, field, scratch);
  return field;
}

void jump_flood(const RegionMap& regions, NearestField& field, JfaScratch& scratch) {
  const int w = regions.width();
  const int h = regions.height();
  field.seed.reset(w, h, Pixel{});
  field.dist2.reset(w, h, -1);

  int min_x = w, min_y = h, max_x = -1, max_y = -1;
  std::vector<std::int32_t>& todo = scratch.pending;
  todo.clear();
  // Seed index per pixel; Ω_D entries never change so both buffers share them.
  std::vector<std::int32_t>& cur = scratch.current;
  cur.assign(regions.size(), kNone);
  bool any_seed = false;
  for (int y = 0; y < h; ++y) {
    const Region* row = &regions(0, y);
    for (int x = 0; x < w; ++x) {
      const Region r = row[x];
      if (r != Region::kC && r != Region::kD) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
      const auto idx = static_cast<std::int32_t>(regions.index(x, y));
      if (r == Region::kC) {
        todo.push_back(idx);
      } else {
        any_seed = true;
        cur[static_cast<std::size_t>(idx)] = idx;
        field.seed(x, y) = {x, y};
        field.dist2(x, y) = 0;
      }
    }
  }
  if (todo.empty()) return;
  if (!any_seed) throw NoSeedError("jump_flood: Ω_C is non-empty but Ω_D has no pixels");
  std::vector<std::int32_t>& next = scratch.next;
  next = cur;

  const int extent = std::max(max_x - min_x + 1, max_y - min_y + 1);
  int n = 1;
  while (n < extent) n <<= 1;
  // 1+JFA+2: a leading unit step settles seeds' immediate neighbours
  // before the long jumps, which removes most sparse-seed misassignments.
  std::vector<int> steps{1};
  for (int k = n / 2; k >= 1; k /= 2) steps.push_back(k);
  steps.push_back(2);
  steps.push_back(1);

  const auto count = static_cast<std::ptrdiff_t>(todo.size());
  for (int step : steps) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      const std::int32_t idx = todo[static_cast<std::size_t>(t)];
      const int px = idx % w;
      const int py = idx / w;
      std::int32_t best = cur[static_cast<std::size_t>(idx)];
      std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
      if (best != kNone) {
        const std::int64_t dx = best % w - px, dy = best / w - py;
        best_d = dx * dx + dy * dy;
      }
      for (int oy = -1; oy <= 1; ++oy) {
        const int qy = py + oy * step;
        if (qy < min_y || qy > max_y) continue;
        for (int ox = -1; ox <= 1; ++ox) {
          const int qx = px + ox * step;
          if (qx < min_x || qx > max_x) continue;
          const std::int32_t s = cur[static_cast<std::size_t>(qy) * static_cast<std::size_t>(w) +
                                     static_cast<std::size_t>(qx)];
          if (s == kNone || s == best) continue;
          const std::int64_t dx = s % w - px, dy = s / w - py;
          const std::int64_t d = dx * dx + dy * dy;
          // Seed indices are row-major, so a smaller index is the lower (y, x).
          if (d < best_d || (d == best_d && s < best)) {
            best = s;
            best_d = d;
          }
        }
      }
      next[static_cast<std::size_t>(idx)] = best;
    }
    std::swap(cur, next);
  }

  for (std::int32_t idx : todo) {
    const std::int32_t s = cur[static_cast<std::size_t>(idx)];
    const auto i = static_cast<std::size_t>(idx);
    if (s == kNone) continue;
    const int sx = s % w, sy = s / w;
    const int dx = sx - idx % w, dy = sy - idx / w;
    field.seed[i] = {sx, sy};
    field.dist2[i] = dx * dx + dy * dy;
  }
}

Vec2 extrapolate_uv(const Uv& at_seed, const std::optional<Uv>& at_reflection) {
  const Vec2 f_seed(at_seed.u, at_seed.v);
  if (!at_reflection) return f_seed;
  const Vec2 f_reflect(at_reflection->u, at_reflection->v);
  return f_seed + (f_seed - f_reflect);
}

PbrResult fill_boundary(const FrameBuffers& warped, const Mask& camera_mask,
                        const Texture& texture) {
  PbrWorkspace ws;
  fill_boundary(warped, camera_mask, texture, ws);
  return std::move(ws.result);
}

const PbrResult& fill_boundary(const FrameBuffers& warped, const Mask& camera_mask,
                               const Texture& texture, PbrWorkspace& workspace) {
  PbrResult& r = workspace.result;
  partition_into(r.regions, camera_mask, warped.mask);
  r.counts = count_regions(r.regions);
  const int w = warped.width();
  const int h = warped.height();
  r.color.reset(w, h, Rgb{});
  r.lit.reset(w, h, 0);
  r.filled = 0;
  r.no_seed = false;

  {
    const Region* reg = r.regions.pixels().data();
    const Rgb* src = warped.color.pixels().data();
    Rgb* dst = r.color.pixels().data();
    std::uint8_t* lit = r.lit.pixels().data();
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
      if (reg[i] == Region::kD) {
        dst[i] = src[i];
        lit[i] = 1;
      }
    }
  }
  if (r.counts.c == 0) {
    r.field.seed.reset(w, h, Pixel{});
    r.field.dist2.reset(w, h, -1);
    return r;
  }
  try {
    jump_flood(r.regions, r.field, workspace.jfa);
  } catch (const NoSeedError&) {
    r.no_seed = true;
    r.field.seed.reset(w, h, Pixel{});
    r.field.dist2.reset(w, h, -1);
    return r;
  }

  std::size_t filled = 0;
  const auto n = static_cast<std::ptrdiff_t>(r.regions.size());
#pragma omp parallel for schedule(static) reduction(+ : filled)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (r.regions[i] != Region::kC) continue;
    const Pixel seed = r.field.seed[i];
    if (seed.x < 0) continue;
    const int px = static_cast<int>(i % static_cast<std::size_t>(w));
    const int py = static_cast<int>(i / static_cast<std::size_t>(w));
    const int rx = 2 * seed.x - px;
    const int ry = 2 * seed.y - py;
    std::optional<Uv> reflection;
    if (r.regions.in_bounds(rx, ry) && r.regions(rx, ry) == Region::kD) {
      reflection = warped.uv(rx, ry);
    }
    const Vec2 uv = extrapolate_uv(warped.uv(seed.x, seed.y), reflection);
    r.color[i] = texture.sample(uv.x(), uv.y());
    r.lit[i] = 1;
    ++filled;
  }
  r.filled = filled;
  return r;
}

void write_region_ppm(const std::filesystem::path& path, const RegionMap& regions) {
  static constexpr Rgb kPalette[4] = {{0, 0, 0}, {40, 90, 230}, {230, 60, 40}, {60, 200, 80}};
  Plane<Rgb> img(regions.width(), regions.height());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    img[i] = kPalette[static_cast<int>(regions[i])];
  }
  write_ppm(path, img);
}

void write_distance_pgm(const std::filesystem::path& path, const NearestField& field) {
  Plane<std::uint8_t> img(field.dist2.width(), field.dist2.height(), 0);
  double max_d = 0.0;
  for (auto d : field.dist2.pixels()) max_d = std::max(max_d, std::sqrt(std::max(0, d) * 1.0));
  for (std::size_t i = 0; i < img.size(); ++i) {
    const auto d = field.dist2[i];
    if (d <= 0 || max_d == 0.0) continue;
    img[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::sqrt(d * 1.0) / max_d));
  }
  write_pgm(path, img);
}

}  // namespace dpm
