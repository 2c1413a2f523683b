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
#ifndef ORDCAL_IMAGE_HPP_
#define ORDCAL_IMAGE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ordcal {

/// Interleaved 8-bit raster. Pixel (i, j) covers [i, i+1) x [j, j+1) and its
/// center sits at (i + 0.5, j + 0.5) in continuous pixel coordinates.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int ch) {
    return data_[index(x, y, ch)];
  }
  std::uint8_t at(int x, int y, int ch) const {
    return data_[index(x, y, ch)];
  }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const ImageBuffer& other) const = default;

 private:
  std::size_t index(int x, int y, int ch) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + ch;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Background used where a sample falls outside the source raster.
struct Background {
  std::array<std::uint8_t, 4> value{0, 0, 0, 0};
};

/// Bilinear sample of `img` at continuous coordinate (x, y), written to
/// out[0..channels). Points outside [0, W] x [0, H] receive the background;
/// inside, the half-pixel border clamps to the edge pixels.
void sample_bilinear(const ImageBuffer& img, double x, double y,
                     const Background& bg, std::span<std::uint8_t> out);

/// Sub-image [x0, x0 + w) x [y0, y0 + h).
ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int w, int h);

ImageBuffer load_png(const std::filesystem::path& path);

/// Writes 8-bit gray/RGB/RGBA PNG with fixed encoder settings, so identical
/// buffers produce identical files.
void save_png(const ImageBuffer& img, const std::filesystem::path& path);

/// 16-bit grayscale PNG, row-major values.
void save_png16(int width, int height, std::span<const std::uint16_t> values,
                const std::filesystem::path& path);

}  // namespace ordcal

#endif  // ORDCAL_IMAGE_HPP_
