#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stegseg {

/// Lossless 8-bit raster, row-major, channel-interleaved.
struct RasterImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t channels = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(std::uint32_t w, std::uint32_t h, std::uint8_t c);
  RasterImage(std::uint32_t w, std::uint32_t h, std::uint8_t c, std::vector<std::uint8_t> data);

  std::size_t pixel_count() const noexcept { return std::size_t{width} * height; }
  std::size_t slot_count() const noexcept { return pixel_count() * channels; }

  bool valid() const noexcept;
  /// Throws InvalidImage unless valid().
  void validate() const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

/// Peak signal-to-noise ratio in dB; +inf for identical buffers.
double psnr(const RasterImage& a, const RasterImage& b);

/// Largest per-byte absolute difference.
int max_abs_diff(const RasterImage& a, const RasterImage& b);

}  // namespace stegseg
