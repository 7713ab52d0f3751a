// Copyright 2026 The CIC Authors. All Rights Reserved.
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

#ifndef CIC_IMAGE_H_
#define CIC_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cic {

struct PixelIndex {
  size_t row = 0;
  size_t col = 0;
  size_t channel = 0;
};

// Real-valued W x H x C pixel tensor, row-major and channel-interleaved.
// Values live in the nominal [0,255] display domain but are not clamped:
// loop iterates may leave that range. All samples are finite.
class Image {
 public:
  Image() = default;
  // Zero-filled image. Throws kInvalidArgument if any dimension is zero or
  // channels is not 1 or 3.
  Image(size_t width, size_t height, size_t channels);
  // Takes ownership of `data`; requires data.size() == W*H*C and finite
  // samples.
  Image(size_t width, size_t height, size_t channels, std::vector<double> data);

  static Image Filled(size_t width, size_t height, size_t channels,
                      double value);

  size_t width() const { return width_; }
  size_t height() const { return height_; }
  size_t channels() const { return channels_; }
  // D = W * H * C.
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }

  size_t Offset(size_t row, size_t col, size_t channel) const {
    return (row * width_ + col) * channels_ + channel;
  }
  size_t Offset(const PixelIndex& p) const {
    return Offset(p.row, p.col, p.channel);
  }
  double at(size_t row, size_t col, size_t channel) const {
    return data_[Offset(row, col, channel)];
  }
  double& at(size_t row, size_t col, size_t channel) {
    return data_[Offset(row, col, channel)];
  }

  bool SameShape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  // Copy of the rectangle [x0, x0+w) x [y0, y0+h).
  Image Crop(size_t x0, size_t y0, size_t w, size_t h) const;
  // Writes `patch` into this image with its top-left corner at (x0, y0).
  void Paste(const Image& patch, size_t x0, size_t y0);

  friend bool operator==(const Image&, const Image&) = default;

 private:
  size_t width_ = 0;
  size_t height_ = 0;
  size_t channels_ = 0;
  std::vector<double> data_;
};

// Flattening to the D-dimensional vector the loop equations operate on.
std::vector<double> Flatten(const Image& img);
// Throws kDimensionMismatch when v.size() != W*H*C.
Image Unflatten(std::span<const double> v, size_t width, size_t height,
                size_t channels);

// clamp(round(x), 0, 255), rounding half away from zero.
uint8_t ToByte(double x);
// Image whose samples are ToByte() of the input, promoted back to reals.
Image ClampRound(const Image& img);

// Reads an 8-bit PNG (gray or RGB) or binary PPM (P6).
Image LoadImage(const std::filesystem::path& path);
// Writes an 8-bit file; format chosen by extension (.png, .ppm).
void SaveImage(const Image& img, const std::filesystem::path& path);

}  // namespace cic

#endif  // CIC_IMAGE_H_
