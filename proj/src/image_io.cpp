// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#include "crackdet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace crackdet {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayFrame planes_to_gray(int width, int height, int channels, int bit_depth,
                         const std::vector<std::uint16_t>& samples) {
  const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
  if (channels == 1) {
    RealField out(width, height);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = samples[i] / maxval;
    return GrayFrame(std::move(out));
  }
  RealField r(width, height), g(width, height), b(width, height);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.data()[i] = samples[i * 3 + 0] / maxval;
    g.data()[i] = samples[i * 3 + 1] / maxval;
    b.data()[i] = samples[i * 3 + 2] / maxval;
  }
  return to_grayscale(r, g, b);
}

GrayFrame load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_byte> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int bit_depth_in = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth_in < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int bit_depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG channel count in " + path.string());
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = raw.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<std::uint16_t> samples(static_cast<std::size_t>(width) * height * channels);
  if (bit_depth == 16) {
    // libpng emits 16-bit samples big-endian.
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<std::uint16_t>((raw[i * 2] << 8) | raw[i * 2 + 1]);
    }
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = raw[i];
  }
  return planes_to_gray(width, height, channels, bit_depth, samples);
}

void save_png(const std::filesystem::path& path, const RealField& frame, int bit_depth) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_byte> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, frame.width(), frame.height(), bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
  const std::size_t stride = static_cast<std::size_t>(frame.width()) * (bit_depth / 8);
  raw.resize(stride * frame.height());
  rows.resize(frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    rows[y] = raw.data() + stride * y;
    for (int x = 0; x < frame.width(); ++x) {
      const double v = std::clamp(frame.at(x, y), 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * maxval));
      if (bit_depth == 16) {
        rows[y][x * 2] = static_cast<png_byte>(q >> 8);
        rows[y][x * 2 + 1] = static_cast<png_byte>(q & 0xff);
      } else {
        rows[y][x] = static_cast<png_byte>(q);
      }
    }
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

int read_pnm_token(std::istream& is) {
  // Skips whitespace and '#' comments.
  while (is) {
    const int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
  }
  int value = -1;
  is >> value;
  return value;
}

GrayFrame load_pnm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char p, kind;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '5' && kind != '6')) {
    throw IoError("unsupported PNM format in " + path.string() + " (binary P5/P6 only)");
  }
  const int width = read_pnm_token(is);
  const int height = read_pnm_token(is);
  const int maxval = read_pnm_token(is);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw IoError("corrupt PNM header in " + path.string());
  }
  is.get();  // single whitespace after maxval

  const int channels = kind == '6' ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<std::uint16_t> samples(count);
  if (maxval > 255) {
    std::vector<unsigned char> buf(count * 2);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!is) throw IoError("truncated PNM payload in " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
      samples[i] = static_cast<std::uint16_t>((buf[i * 2] << 8) | buf[i * 2 + 1]);
    }
  } else {
    std::vector<unsigned char> buf(count);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!is) throw IoError("truncated PNM payload in " + path.string());
    for (std::size_t i = 0; i < count; ++i) samples[i] = buf[i];
  }

  const double scale = static_cast<double>(maxval);
  if (channels == 1) {
    RealField out(width, height);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = samples[i] / scale;
    return GrayFrame(std::move(out));
  }
  RealField r(width, height), g(width, height), b(width, height);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.data()[i] = samples[i * 3 + 0] / scale;
    g.data()[i] = samples[i * 3 + 1] / scale;
    b.data()[i] = samples[i * 3 + 2] / scale;
  }
  return to_grayscale(r, g, b);
}

bool has_png_magic(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  unsigned char magic[8] = {0};
  is.read(reinterpret_cast<char*>(magic), 8);
  static const unsigned char png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return is && std::memcmp(magic, png_magic, 8) == 0;
}

}  // namespace

GrayFrame load_gray(const std::filesystem::path& path) {
  if (has_png_magic(path)) return load_png(path);
  return load_pnm(path);
}

void save_gray_png8(const std::filesystem::path& path, const RealField& frame) {
  save_png(path, frame, 8);
}

void save_gray_png16(const std::filesystem::path& path, const RealField& frame) {
  save_png(path, frame, 16);
}

void save_gray_pgm(const std::filesystem::path& path, const RealField& frame) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double v = std::clamp(frame.at(x, y), 0.0, 1.0);
      os.put(static_cast<char>(std::lround(v * 255.0)));
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace crackdet
