#include "stegseg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "stegseg/error.hpp"

namespace stegseg {

RasterImage::RasterImage(std::uint32_t w, std::uint32_t h, std::uint8_t c)
    : width(w), height(h), channels(c), pixels(std::size_t{w} * h * c, 0) {}

RasterImage::RasterImage(std::uint32_t w, std::uint32_t h, std::uint8_t c, std::vector<std::uint8_t> data)
    : width(w), height(h), channels(c), pixels(std::move(data)) {}

bool RasterImage::valid() const noexcept {
  return width >= 1 && height >= 1 && (channels == 1 || channels == 3 || channels == 4) &&
         pixels.size() == slot_count();
}

void RasterImage::validate() const {
  if (!valid()) throw Error(Errc::InvalidImage, "image must be >=1x1 with 1, 3 or 4 channels and a full buffer");
}

namespace {

void require_same_shape(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels || a.pixels.size() != b.pixels.size())
    throw Error(Errc::DimensionMismatch, "images differ in shape");
}

}  // namespace

double psnr(const RasterImage& a, const RasterImage& b) {
  require_same_shape(a, b);
  if (a.pixels.empty()) return std::numeric_limits<double>::infinity();
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / double(a.pixels.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

int max_abs_diff(const RasterImage& a, const RasterImage& b) {
  require_same_shape(a, b);
  int worst = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    worst = std::max(worst, std::abs(int(a.pixels[i]) - int(b.pixels[i])));
  return worst;
}

}  // namespace stegseg
