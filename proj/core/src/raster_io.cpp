// Copyright 2026 The fsband Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "fsband/error.hpp"
#include "fsband/image.hpp"

namespace fsband {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

double luma(double r, double g, double b) {
  return std::clamp(kLumaR * r + kLumaG * g + kLumaB * b, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// PGM / PPM

class PnmReader {
 public:
  PnmReader(const std::vector<unsigned char>& bytes, std::string path)
      : bytes_(bytes), path_(std::move(path)) {}

  Image read() {
    const bool color = bytes_[1] == '6';
    pos_ = 2;
    const long width = next_int();
    const long height = next_int();
    const long maxval = next_int();
    if (width < 1 || height < 1 || width > (1L << 20) || height > (1L << 20)) {
      throw Error(ErrorCode::kCorruptData, "bad PNM dimensions", path_);
    }
    if (maxval < 1 || maxval > 65535) {
      throw Error(ErrorCode::kUnsupportedFormat, "PNM maxval out of range",
                  path_);
    }
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptData, "PNM header not terminated", path_);
    }
    ++pos_;
    const std::size_t channels = color ? 3 : 1;
    const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    if (bytes_.size() - pos_ < pixels * channels * sample_bytes) {
      throw Error(ErrorCode::kCorruptData, "PNM pixel data truncated", path_);
    }
    const double scale = 1.0 / static_cast<double>(maxval);
    std::vector<double> data(pixels);
    auto sample = [&]() {
      unsigned v = bytes_[pos_++];
      if (sample_bytes == 2) v = (v << 8) | bytes_[pos_++];
      return std::min(static_cast<double>(v) * scale, 1.0);
    };
    for (std::size_t i = 0; i < pixels; ++i) {
      if (color) {
        const double r = sample();
        const double g = sample();
        const double b = sample();
        data[i] = luma(r, g, b);
      } else {
        data[i] = sample();
      }
    }
    return Image(static_cast<int>(width), static_cast<int>(height),
                 std::move(data));
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kCorruptData, "malformed PNM header", path_);
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1L << 30)) {
        throw Error(ErrorCode::kCorruptData, "PNM header value overflow",
                    path_);
      }
    }
    return v;
  }

  const std::vector<unsigned char>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// PNG

void png_silent_warning(png_structp, png_const_charp) {}

Image read_png(const std::filesystem::path& path) {
  const std::string spath = path.string();
  FilePtr file(std::fopen(spath.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::kIo, "cannot open file", spath);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, png_silent_warning);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng init failed", spath);
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::kIo, "libpng init failed", spath);
  }

  std::vector<unsigned char> buffer;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kCorruptData, "invalid or truncated PNG", spath);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  bit_depth = png_get_bit_depth(png, info);
  channels = png_get_channels(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kUnsupportedFormat, "unsupported PNG channel layout",
                spath);
  }
  const double scale = bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  const std::size_t step = bit_depth == 16 ? 2 : 1;
  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (png_uint_32 r = 0; r < height; ++r) {
    const unsigned char* src = rows[r];
    for (png_uint_32 c = 0; c < width; ++c) {
      double s[3] = {0.0, 0.0, 0.0};
      for (int ch = 0; ch < channels; ++ch) {
        const unsigned char* p = src + (c * channels + ch) * step;
        const unsigned v = step == 2 ? (unsigned{p[0]} << 8) | p[1] : p[0];
        s[ch] = static_cast<double>(v) * scale;
      }
      data[static_cast<std::size_t>(r) * width + c] =
          channels == 1 ? std::min(s[0], 1.0) : luma(s[0], s[1], s[2]);
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height),
               std::move(data));
}

unsigned quantize(double v, int maxval) {
  return static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const std::string spath = path.string();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such file", spath);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", spath);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  static constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G',
                                                 '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return read_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '6')) {
    return PnmReader(bytes, spath).read();
  }
  throw Error(ErrorCode::kUnsupportedFormat,
              "not a PNG or binary PGM/PPM raster", spath);
}

void save_pgm(const std::filesystem::path& path, const Image& image,
              int maxval) {
  if (maxval != 255 && maxval != 65535) {
    throw Error(ErrorCode::kInvalidArgument, "PGM maxval must be 255 or 65535");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << '\n'
      << maxval << '\n';
  std::vector<unsigned char> bytes;
  bytes.reserve(image.pixels().size() * (maxval > 255 ? 2 : 1));
  for (double v : image.pixels()) {
    const unsigned q = quantize(v, maxval);
    if (maxval > 255) bytes.push_back(static_cast<unsigned char>(q >> 8));
    bytes.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write", path.string());
}

void save_png(const std::filesystem::path& path, const Image& image,
              int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::kInvalidArgument, "PNG bit depth must be 8 or 16");
  }
  const std::string spath = path.string();
  FilePtr file(std::fopen(spath.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::kIo, "cannot write file", spath);

  const int maxval = bit_depth == 16 ? 65535 : 255;
  const std::size_t step = bit_depth == 16 ? 2 : 1;
  const std::size_t w = static_cast<std::size_t>(image.width());
  std::vector<unsigned char> buffer(w * image.height() * step);
  for (std::size_t i = 0; i < image.pixels().size(); ++i) {
    const unsigned q = quantize(image.pixels()[i], maxval);
    if (step == 2) {
      buffer[2 * i] = static_cast<unsigned char>(q >> 8);
      buffer[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    } else {
      buffer[i] = static_cast<unsigned char>(q);
    }
  }
  std::vector<png_bytep> rows(image.height());
  for (int r = 0; r < image.height(); ++r) rows[r] = buffer.data() + r * w * step;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, png_silent_warning);
  if (png == nullptr) throw Error(ErrorCode::kIo, "libpng init failed", spath);
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::kIo, "libpng init failed", spath);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "PNG encoding failed", spath);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width(), image.height(), bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace fsband
