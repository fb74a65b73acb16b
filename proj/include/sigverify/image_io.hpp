#pragma once

// PNG (via libpng) and PGM reading/writing. Color input is reduced to
// luminance with the BT.601 weights Y = 0.299 R + 0.587 G + 0.114 B, rounded
// to nearest; pixels with alpha are composited over white first. A pure red
// pixel (255,0,0) therefore becomes 76.

#include <png.h>

#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/imaging.hpp"

namespace sigverify {

inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return std::uint8_t(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void skip_pnm_space(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_pnm_int(std::istream& in, const std::string& path) {
  skip_pnm_space(in);
  int v = -1;
  if (!(in >> v) || v < 0) throw FormatError("malformed PGM header: " + path);
  return v;
}

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5" && magic != "P2") throw FormatError("not a PGM file: " + path);
  const int w = read_pnm_int(in, path);
  const int h = read_pnm_int(in, path);
  const int maxval = read_pnm_int(in, path);
  if (w == 0 || h == 0) throw FormatError("zero-dimension image: " + path);
  if (maxval == 0 || maxval > 65535) throw FormatError("bad PGM maxval: " + path);
  GrayImage img(w, h);
  auto scale = [maxval](int v) {
    return std::uint8_t(std::lround(255.0 * std::min(v, maxval) / maxval));
  };
  if (magic == "P2") {
    for (auto& px : img) px = scale(read_pnm_int(in, path));
    return img;
  }
  in.get();  // single whitespace after maxval
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(img.size() * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (std::size_t(in.gcount()) != raw.size()) throw FormatError("truncated PGM data: " + path);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const int v = bytes_per == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    img.values()[i] = scale(v);
  }
  return img;
}

inline GrayImage read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  // Everything modified after setjmp lives behind an unchanged pointer.
  struct Decoded {
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
  };
  const auto buf = std::make_unique<Decoded>();
  auto& pixels = buf->pixels;
  auto& rows = buf->rows;
  auto& w = buf->w;
  auto& h = buf->h;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("cannot decode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (!(color & PNG_COLOR_MASK_ALPHA) && !png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
  }
  png_read_update_info(png, info);
  if (w > 0 && h > 0) {
    pixels.resize(std::size_t(w) * h * 4);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + std::size_t(y) * w * 4;
    png_read_image(png, rows.data());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (w == 0 || h == 0) throw FormatError("zero-dimension image: " + path);

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < img.size(); ++i) {
    const png_byte* px = pixels.data() + 4 * i;
    const double a = px[3] / 255.0;
    auto over_white = [a](png_byte c) {
      return std::uint8_t(std::lround(c * a + 255.0 * (1.0 - a)));
    };
    const bool gray = px[0] == px[1] && px[1] == px[2];
    img.values()[i] = gray ? over_white(px[0])
                           : luminance(over_white(px[0]), over_white(px[1]), over_white(px[2]));
  }
  return img;
}

}  // namespace detail

/// Loads a PNG or PGM (binary or ASCII) as 8-bit grayscale; the format is
/// detected from the file signature.
inline GrayImage load_grayscale(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open " + path);
  std::array<unsigned char, 8> sig{};
  probe.read(reinterpret_cast<char*>(sig.data()), 8);
  const auto got = std::size_t(probe.gcount());
  probe.close();
  if (got >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return detail::read_png(path);
  if (got >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '2')) return detail::read_pgm(path);
  throw FormatError("unsupported image format: " + path);
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.values().data()), std::streamsize(img.size()));
  if (!out) throw IoError("write failed: " + path);
}

/// Skeleton/binary rasters are written as PGM with ink black.
inline void write_pgm(const std::string& path, const BinaryImage& img) {
  GrayImage g(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.ink(x, y)) g(x, y) = 0;
  write_pgm(path, g);
}

/// Writes 8-bit PNG with 1 (gray), 3 (RGB) or 4 (RGBA) interleaved channels.
inline void write_png(const std::string& path, int width, int height, int channels,
                      const std::vector<std::uint8_t>& data) {
  if (channels != 1 && channels != 3 && channels != 4) throw ParameterError("bad channel count");
  if (data.size() != std::size_t(width) * height * channels) throw ParameterError("bad PNG buffer");
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + path);
  }
  png_init_io(png, fp.get());
  const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY
                    : channels == 3 ? PNG_COLOR_TYPE_RGB
                                    : PNG_COLOR_TYPE_RGBA;
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data.data() + std::size_t(y) * width * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline void write_png(const std::string& path, const GrayImage& img) {
  write_png(path, img.width(), img.height(), 1, img.values());
}

}  // namespace sigverify
