#include "dpm/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include <fmt/format.h>

namespace dpm {

std::size_t count_set(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.pixels().begin(), mask.pixels().end(),
                    [](std::uint8_t v) { return v != 0; }));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

struct NetpbmHeader {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
};

// Reads "P? w h maxval" with optional '#' comments, leaving the stream at
// the first byte of raster data.
NetpbmHeader read_header(std::istream& in) {
  NetpbmHeader h;
  auto next_token = [&in]() {
    std::string tok;
    while (in) {
      int c = in.peek();
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    in >> tok;
    return tok;
  };
  h.magic = next_token();
  h.width = std::stoi(next_token());
  h.height = std::stoi(next_token());
  h.maxval = std::stoi(next_token());
  in.get();
  if (h.maxval != 255) throw Error("only 8-bit netpbm images are supported");
  return h;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Plane<Rgb>& image) {
  auto out = open_out(path);
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(image.width()) * 3);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgb& c = image(x, y);
      row[3 * x] = static_cast<char>(c.r);
      row[3 * x + 1] = static_cast<char>(c.g);
      row[3 * x + 2] = static_cast<char>(c.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

Plane<Rgb> read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const auto h = read_header(in);
  if (h.magic != "P6") throw Error(path.string() + ": not a binary PPM");
  Plane<Rgb> image(h.width, h.height);
  std::vector<char> row(static_cast<std::size_t>(h.width) * 3);
  for (int y = 0; y < h.height; ++y) {
    in.read(row.data(), static_cast<std::streamsize>(row.size()));
    if (!in) throw Error(path.string() + ": truncated PPM");
    for (int x = 0; x < h.width; ++x) {
      image(x, y) = {static_cast<std::uint8_t>(row[3 * x]),
                     static_cast<std::uint8_t>(row[3 * x + 1]),
                     static_cast<std::uint8_t>(row[3 * x + 2])};
    }
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Plane<std::uint8_t>& image) {
  auto out = open_out(path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels().data()),
            static_cast<std::streamsize>(image.size()));
}

Plane<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const auto h = read_header(in);
  if (h.magic != "P5") throw Error(path.string() + ": not a binary PGM");
  Plane<std::uint8_t> image(h.width, h.height);
  in.read(reinterpret_cast<char*>(image.pixels().data()),
          static_cast<std::streamsize>(image.size()));
  if (!in) throw Error(path.string() + ": truncated PGM");
  return image;
}

std::string frame_filename(const std::string& stem, double timestamp_s,
                           const std::string& extension) {
  const auto us = static_cast<long long>(std::llround(timestamp_s * 1e6));
  return fmt::format("{}_{:09d}us.{}", stem, us, extension);
}

}  // namespace dpm
