#pragma once

// 8-bit grayscale images: the binned attribute-density plot (scatter
// backdrop for trait drawing) and probability-volume slices, plus PNG
// encoding through libpng.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "fiberuq/error.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/kernels.hpp"

namespace fiberuq {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// 2D count histogram of (a1, a2) pairs over their min/max ranges.
struct ScatterDensity {
  int bins = 0;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  std::vector<std::uint64_t> counts;  // index iy * bins + ix

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  std::size_t nonzero_bins() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  }
};

inline ScatterDensity scatter_density(const BivariateField& field, int bins) {
  if (bins < 1) throw InvalidArgument("scatter bins must be >= 1");
  ScatterDensity d;
  d.bins = bins;
  const auto [x0, x1] = std::minmax_element(field.a1.begin(), field.a1.end());
  const auto [y0, y1] = std::minmax_element(field.a2.begin(), field.a2.end());
  d.x_lo = *x0;
  d.x_hi = *x1;
  d.y_lo = *y0;
  d.y_hi = *y1;
  if (!(d.x_hi > d.x_lo)) {
    d.x_lo -= scale_floor(d.x_lo);
    d.x_hi += scale_floor(d.x_hi);
  }
  if (!(d.y_hi > d.y_lo)) {
    d.y_lo -= scale_floor(d.y_lo);
    d.y_hi += scale_floor(d.y_hi);
  }
  d.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  auto bin = [bins](double v, double lo, double hi) {
    const auto b = static_cast<long>(std::floor((v - lo) / (hi - lo) * bins));
    return static_cast<std::size_t>(std::clamp<long>(b, 0, bins - 1));
  };
  for (std::size_t v = 0; v < field.a1.size(); ++v) {
    d.counts[bin(field.a2[v], d.y_lo, d.y_hi) * bins + bin(field.a1[v], d.x_lo, d.x_hi)] += 1;
  }
  return d;
}

// Intensity proportional to count (or log1p(count)) relative to the maximum;
// a2 increases upward.
inline GrayImage scatter_image(const ScatterDensity& d, bool log_scale) {
  GrayImage img{d.bins, d.bins, std::vector<std::uint8_t>(d.counts.size(), 0)};
  const auto max_count = static_cast<double>(*std::max_element(d.counts.begin(), d.counts.end()));
  if (max_count <= 0.0) return img;
  const double denom = log_scale ? std::log1p(max_count) : max_count;
  for (int iy = 0; iy < d.bins; ++iy) {
    for (int ix = 0; ix < d.bins; ++ix) {
      const auto c = static_cast<double>(d.counts[static_cast<std::size_t>(iy) * d.bins + ix]);
      const double s = (log_scale ? std::log1p(c) : c) / denom;
      img.pixels[static_cast<std::size_t>(d.bins - 1 - iy) * d.bins + ix] =
          static_cast<std::uint8_t>(std::lround(255.0 * s));
    }
  }
  return img;
}

enum class Axis { kX = 0, kY = 1, kZ = 2 };

// Axis-orthogonal slice of a volume; values are window-mapped from
// [lo, hi] to [0, 255] and clamped. The in-plane axes are the remaining two
// in x, y, z order; the second one increases upward.
inline GrayImage volume_slice(const ProbabilityVolume& vol, Axis axis, int index, double lo = 0.0, double hi = 1.0) {
  const UniformGrid3& g = vol.grid();
  const int a = static_cast<int>(axis);
  if (index < 0 || index >= g.dims[a]) {
    throw InvalidArgument("slice index " + std::to_string(index) + " out of range [0, " + std::to_string(g.dims[a]) +
                          ")");
  }
  if (!(hi > lo)) throw InvalidArgument("slice window needs max > min");
  const int u = a == 0 ? 1 : 0;
  const int w = a == 2 ? 1 : 2;
  GrayImage img{g.dims[u], g.dims[w], {}};
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      std::array<int, 3> ijk{};
      ijk[a] = index;
      ijk[u] = c;
      ijk[w] = img.height - 1 - r;
      const double v = vol[g.index(ijk[0], ijk[1], ijk[2])];
      const double s = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(r) * img.width + c] = static_cast<std::uint8_t>(std::lround(255.0 * s));
    }
  }
  return img;
}

inline std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  if (img.width <= 0 || img.height <= 0) throw InvalidArgument("cannot encode an empty image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
        buf->insert(buf->end(), data, data + len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < img.height; ++r) {
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(r) * img.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

inline GrayImage decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) throw IoError("not a PNG image");
  image.format = PNG_FORMAT_GRAY;
  GrayImage img{static_cast<int>(image.width), static_cast<int>(image.height), {}};
  img.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("PNG decoding failed");
  }
  return img;
}

inline void save_png(const GrayImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fiberuq
