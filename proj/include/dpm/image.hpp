#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpm/error.hpp"

namespace dpm {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Texture coordinate; negative components mark "no surface here".
struct Uv {
  float u = -1.0f, v = -1.0f;
  bool valid() const { return u >= 0.0f && v >= 0.0f; }
  bool operator==(const Uv&) const = default;
};

inline constexpr Uv kInvalidUv{};

/// Integer pixel location.
struct Pixel {
  int x = -1, y = -1;
  bool operator==(const Pixel&) const = default;
};

/// Dense row-major single-channel plane of T.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) throw InvalidArgument("negative plane size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  void fill(const T& value) { std::fill(data_.begin(), data_.end(), value); }

  /// Reshapes and fills, keeping the allocation when it is large enough.
  void reset(int width, int height, const T& value) {
    if (width < 0 || height < 0) throw InvalidArgument("negative plane size");
    width_ = width;
    height_ = height;
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value);
  }

  bool same_shape(const Plane& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  template <typename U>
  bool same_shape(const Plane<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Mask = Plane<std::uint8_t>;

std::size_t count_set(const Mask& mask);

/// Binary P6 colour image.
void write_ppm(const std::filesystem::path& path, const Plane<Rgb>& image);
Plane<Rgb> read_ppm(const std::filesystem::path& path);

/// Binary P5 grey image; masks are written as 0/255.
void write_pgm(const std::filesystem::path& path, const Plane<std::uint8_t>& image);
Plane<std::uint8_t> read_pgm(const std::filesystem::path& path);

/// Frame dump name carrying the timestamp in whole microseconds,
/// e.g. `render_000123456us.ppm`.
std::string frame_filename(const std::string& stem, double timestamp_s,
                           const std::string& extension);

}  // namespace dpm
