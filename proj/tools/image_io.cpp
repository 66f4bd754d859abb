#include "image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "stegseg/error.hpp"

namespace fs = std::filesystem;

namespace stegseg::io {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

// libpng reports errors by longjmp; everything that owns memory lives in
// these structs, outside the setjmp frames below.
struct PngSource {
  ByteView bytes;
  std::size_t pos = 0;
};

struct PngDecoded {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  char message[128] = {};
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->bytes.size() - src->pos < n) png_error(png, "truncated PNG stream");
  std::memcpy(out, src->bytes.data() + src->pos, n);
  src->pos += n;
}

void png_error_cb(png_structp png, png_const_charp msg) {
  auto* dst = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(dst, 128, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

// 0 ok, 1 libpng error, 2 unsupported layout.
int decode_png_raw(PngSource* src, PngDecoded* out) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, out->message, png_error_cb, png_warning_cb);
  if (!png) return 1;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return 1;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return 1;
  }
  png_set_read_fn(png, src, png_read_cb);
  png_read_info(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->bit_depth = png_get_bit_depth(png, info);
  out->color_type = png_get_color_type(png, info);
  const bool supported = out->bit_depth == 8 && (out->color_type == PNG_COLOR_TYPE_GRAY ||
                                                 out->color_type == PNG_COLOR_TYPE_RGB ||
                                                 out->color_type == PNG_COLOR_TYPE_RGBA);
  if (!supported || out->width == 0 || out->height == 0 || out->width > (1U << 15) || out->height > (1U << 15)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return 2;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out->pixels.resize(stride * out->height);
  out->rows.resize(out->height);
  for (std::uint32_t y = 0; y < out->height; ++y) out->rows[y] = out->pixels.data() + stride * y;
  png_read_image(png, out->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return 0;
}

struct PngEncoded {
  Bytes bytes;
  std::vector<png_bytep> rows;
  char message[128] = {};
};

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<PngEncoded*>(png_get_io_ptr(png));
  out->bytes.insert(out->bytes.end(), data, data + n);
}

void png_flush_cb(png_structp) {}

int encode_png_raw(const RasterImage* image, PngEncoded* out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, out->message, png_error_cb, png_warning_cb);
  if (!png) return 1;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return 1;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return 1;
  }
  const int color = image->channels == 1 ? PNG_COLOR_TYPE_GRAY
                    : image->channels == 3 ? PNG_COLOR_TYPE_RGB
                                           : PNG_COLOR_TYPE_RGBA;
  png_set_write_fn(png, out, png_write_cb, png_flush_cb);
  png_set_IHDR(png, info, image->width, image->height, 8, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, out->rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return 0;
}

// PNM header token reader; skips whitespace and # comments.
class PnmHeader {
 public:
  explicit PnmHeader(ByteView bytes) : bytes_(bytes) {}

  unsigned long number() {
    skip();
    unsigned long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) throw Error(Errc::FormatError, "PNM header number too large");
    }
    if (digits == 0) throw Error(Errc::FormatError, "malformed PNM header");
    return v;
  }
  std::size_t finish() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw Error(Errc::FormatError, "malformed PNM header");
    return pos_ + 1;
  }
  void seek(std::size_t p) { pos_ = p; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  ByteView bytes_;
  std::size_t pos_ = 0;
};

RasterImage decode_pnm(ByteView bytes) {
  const std::uint8_t channels = bytes[1] == '6' ? 3 : 1;
  PnmHeader h(bytes);
  h.seek(2);
  const auto w = h.number();
  const auto hgt = h.number();
  const auto maxval = h.number();
  const std::size_t data = h.finish();
  if (w == 0 || hgt == 0 || w > (1UL << 15) || hgt > (1UL << 15))
    throw Error(Errc::FormatError, "unsupported PNM dimensions");
  if (maxval != 255) throw Error(Errc::FormatError, "only 8-bit PNM (maxval 255) is supported");
  const std::size_t need = std::size_t{w} * hgt * channels;
  if (bytes.size() - data < need) throw Error(Errc::FormatError, "truncated PNM pixel data");
  return RasterImage(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(hgt), channels,
                     std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(data),
                                               bytes.begin() + static_cast<std::ptrdiff_t>(data + need)));
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

}  // namespace

RasterImage decode_image(ByteView bytes) {
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
    PngSource src{bytes, 0};
    PngDecoded dec;
    const int rc = decode_png_raw(&src, &dec);
    if (rc == 1) throw Error(Errc::FormatError, std::string("PNG decode failed: ") + dec.message);
    if (rc == 2) throw Error(Errc::FormatError, "PNG must be 8-bit gray, RGB or RGBA");
    const std::uint8_t channels = dec.color_type == PNG_COLOR_TYPE_GRAY ? 1 : dec.color_type == PNG_COLOR_TYPE_RGB ? 3 : 4;
    RasterImage img(dec.width, dec.height, channels, std::move(dec.pixels));
    img.validate();
    return img;
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) return decode_pnm(bytes);
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8)
    throw Error(Errc::FormatError, "JPEG is lossy and would destroy the embedded bits");
  throw Error(Errc::FormatError, "unrecognized image format (expected PNG or binary PPM/PGM)");
}

Bytes encode_png(const RasterImage& image) {
  image.validate();
  PngEncoded enc;
  const std::size_t stride = std::size_t{image.width} * image.channels;
  enc.rows.resize(image.height);
  for (std::uint32_t y = 0; y < image.height; ++y)
    enc.rows[y] = const_cast<png_bytep>(image.pixels.data() + stride * y);
  if (encode_png_raw(&image, &enc) != 0) throw Error(Errc::FormatError, std::string("PNG encode failed: ") + enc.message);
  return std::move(enc.bytes);
}

Bytes encode_pnm(const RasterImage& image) {
  image.validate();
  if (image.channels == 4) throw Error(Errc::FormatError, "PNM cannot store an alpha channel; use .png");
  const std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" + std::to_string(image.width) +
                             " " + std::to_string(image.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, ByteView bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

RasterImage load_image(const fs::path& path) { return decode_image(read_file(path)); }

void save_image(const fs::path& path, const RasterImage& image) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_file(path, encode_png(image));
  } else if (ext == ".ppm" || ext == ".pnm" || ext == ".pgm") {
    if (ext == ".pgm" && image.channels != 1) throw Error(Errc::FormatError, ".pgm holds grayscale only");
    if (ext == ".ppm" && image.channels != 3) throw Error(Errc::FormatError, ".ppm holds RGB only");
    write_file(path, encode_pnm(image));
  } else {
    throw Error(Errc::FormatError, "output must be .png, .ppm, .pgm or .pnm (lossless)");
  }
}

}  // namespace stegseg::io
