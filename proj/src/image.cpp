/*
 * Copyright 2026 The ordcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ordcal/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ordcal/errors.hpp"

namespace ordcal {

ImageBuffer::ImageBuffer(int width, int height, int channels,
                         std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || channels < 1 || channels > 4) {
    throw ArgumentError("invalid image dimensions");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

void sample_bilinear(const ImageBuffer& img, double x, double y,
                     const Background& bg, std::span<std::uint8_t> out) {
  const int w = img.width();
  const int h = img.height();
  const int chans = img.channels();
  if (!(x >= 0.0 && x <= w && y >= 0.0 && y <= h)) {
    for (int c = 0; c < chans; ++c) out[c] = bg.value[c];
    return;
  }
  const double u = std::clamp(x - 0.5, 0.0, static_cast<double>(w - 1));
  const double v = std::clamp(y - 0.5, 0.0, static_cast<double>(h - 1));
  const int i0 = static_cast<int>(u);
  const int j0 = static_cast<int>(v);
  const int i1 = std::min(i0 + 1, w - 1);
  const int j1 = std::min(j0 + 1, h - 1);
  const double fx = u - i0;
  const double fy = v - j0;
  for (int c = 0; c < chans; ++c) {
    const double top = (1.0 - fx) * img.at(i0, j0, c) + fx * img.at(i1, j0, c);
    const double bottom =
        (1.0 - fx) * img.at(i0, j1, c) + fx * img.at(i1, j1, c);
    const double value = (1.0 - fy) * top + fy * bottom;
    out[c] = static_cast<std::uint8_t>(
        std::clamp<long>(std::lround(value), 0L, 255L));
  }
}

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width() ||
      y0 + h > img.height()) {
    throw ArgumentError("crop rectangle outside the image");
  }
  ImageBuffer out(w, h, img.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
      }
    }
  }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

int color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3: return PNG_COLOR_TYPE_RGB;
    default: return PNG_COLOR_TYPE_RGB_ALPHA;
  }
}

// Shared writer for 8- and 16-bit rows. Rows must already be big-endian for
// 16-bit depth.
void write_png_rows(const std::filesystem::path& path, int width, int height,
                    int bit_depth, int color_type,
                    const std::vector<png_const_bytep>& rows) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot open for writing", path.string());
  std::string message;
  png_structp png = png_create_write_struct(
      PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  if (!png) throw IoError("libpng init failed", path.string());
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed", path.string());
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed (" + message + ")", path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, rows[y]);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    throw IoError("write failed", path.string());
  }
}

}  // namespace

ImageBuffer load_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open for reading", path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError("not a PNG file", path.string());
  }
  std::string message;
  png_structp png = png_create_read_struct(
      PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  if (!png) throw IoError("libpng init failed", path.string());
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed", path.string());
  }
  ImageBuffer img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode failed (" + message + ")", path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  img = ImageBuffer(width, height, channels);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = img.data().data() +
              static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const ImageBuffer& img, const std::filesystem::path& path) {
  if (img.empty()) throw ArgumentError("cannot save an empty image");
  std::vector<png_const_bytep> rows(img.height());
  const std::size_t stride =
      static_cast<std::size_t>(img.width()) * img.channels();
  for (int y = 0; y < img.height(); ++y) {
    rows[y] = img.data().data() + y * stride;
  }
  write_png_rows(path, img.width(), img.height(), 8,
                 color_type_for(img.channels()), rows);
}

void save_png16(int width, int height, std::span<const std::uint16_t> values,
                const std::filesystem::path& path) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw ArgumentError("16-bit buffer size does not match dimensions");
  }
  std::vector<std::uint8_t> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bytes[2 * i] = static_cast<std::uint8_t>(values[i] >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(values[i] & 0xff);
  }
  std::vector<png_const_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = bytes.data() + static_cast<std::size_t>(y) * width * 2;
  }
  write_png_rows(path, width, height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

}  // namespace ordcal
