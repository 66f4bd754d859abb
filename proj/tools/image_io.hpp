#pragma once

// Lossless image files: 8-bit PNG (gray, RGB, RGBA) and binary PNM
// (P6 RGB, P5 gray). Lossy formats are refused because they destroy the
// low-order bits that carry the payload.

#include <filesystem>

#include "stegseg/msgcodec.hpp"
#include "stegseg/raster.hpp"

namespace stegseg::io {

/// Throws FormatError for unsupported or lossy content.
RasterImage decode_image(ByteView bytes);

Bytes encode_png(const RasterImage& image);
/// P6 for 3 channels, P5 for 1; throws FormatError otherwise.
Bytes encode_pnm(const RasterImage& image);

/// Format chosen by extension (.png, .ppm/.pnm/.pgm). Throws FormatError, IoError.
RasterImage load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const RasterImage& image);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView bytes);

}  // namespace stegseg::io
