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

#include "cic/image.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "cic/error.h"

namespace cic {

namespace {

void CheckShape(size_t width, size_t height, size_t channels) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be > 0");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "channel count must be 1 or 3, got " + std::to_string(channels));
  }
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

// Minimal P6 reader: magic, width, height, maxval separated by whitespace
// (with '#' comments), one whitespace byte, then raw RGB bytes.
Image DecodePpm(const std::vector<uint8_t>& bytes, const std::string& name) {
  size_t pos = 2;
  auto malformed = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedImage, name + ": " + why);
  };
  auto next_number = [&]() -> size_t {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw malformed("truncated or invalid header");
    }
    size_t value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (1u << 24)) throw malformed("header value out of range");
      ++pos;
    }
    return value;
  };
  const size_t width = next_number();
  const size_t height = next_number();
  const size_t maxval = next_number();
  if (width == 0 || height == 0) throw malformed("zero dimension");
  if (maxval != 255) {
    throw malformed("unsupported bit depth (maxval " + std::to_string(maxval) +
                    ")");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw malformed("truncated header");
  }
  ++pos;
  const size_t count = width * height * 3;
  if (bytes.size() - pos < count) throw malformed("truncated pixel data");
  std::vector<double> data(count);
  for (size_t i = 0; i < count; ++i) data[i] = bytes[pos + i];
  return Image(width, height, 3, std::move(data));
}

Image DecodePng(const std::vector<uint8_t>& bytes, const std::string& name) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kMalformedImage, name + ": " + msg);
  }
  if (png.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&png);
    throw Error(ErrorCode::kMalformedImage, name + ": alpha not supported");
  }
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw Error(ErrorCode::kMalformedImage,
                name + ": unsupported bit depth (16-bit)");
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const size_t channels = color ? 3 : 1;
  std::vector<uint8_t> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::kMalformedImage, name + ": " + msg);
  }
  std::vector<double> data(buffer.begin(), buffer.end());
  return Image(png.width, png.height, channels, std::move(data));
}

std::vector<uint8_t> ToBytes(const Image& img) {
  std::vector<uint8_t> bytes(img.size());
  const auto src = img.data();
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = ToByte(src[i]);
  return bytes;
}

}  // namespace

Image::Image(size_t width, size_t height, size_t channels)
    : width_(width), height_(height), channels_(channels) {
  CheckShape(width, height, channels);
  data_.assign(width * height * channels, 0.0);
}

Image::Image(size_t width, size_t height, size_t channels,
             std::vector<double> data)
    : width_(width), height_(height), channels_(channels),
      data_(std::move(data)) {
  CheckShape(width, height, channels);
  if (data_.size() != width * height * channels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data length " + std::to_string(data_.size()) +
                    " != W*H*C = " + std::to_string(width * height * channels));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite pixel value");
    }
  }
}

Image Image::Filled(size_t width, size_t height, size_t channels,
                    double value) {
  return Image(width, height, channels,
               std::vector<double>(width * height * channels, value));
}

Image Image::Crop(size_t x0, size_t y0, size_t w, size_t h) const {
  if (x0 + w > width_ || y0 + h > height_) {
    throw Error(ErrorCode::kDimensionMismatch, "crop outside image");
  }
  Image out(w, h, channels_);
  for (size_t y = 0; y < h; ++y) {
    const double* src = &data_[Offset(y0 + y, x0, 0)];
    std::copy(src, src + w * channels_, &out.data_[out.Offset(y, 0, 0)]);
  }
  return out;
}

void Image::Paste(const Image& patch, size_t x0, size_t y0) {
  if (patch.channels_ != channels_ || x0 + patch.width_ > width_ ||
      y0 + patch.height_ > height_) {
    throw Error(ErrorCode::kDimensionMismatch, "paste outside image");
  }
  for (size_t y = 0; y < patch.height_; ++y) {
    const double* src = &patch.data_[patch.Offset(y, 0, 0)];
    std::copy(src, src + patch.width_ * channels_,
              &data_[Offset(y0 + y, x0, 0)]);
  }
}

std::vector<double> Flatten(const Image& img) {
  return std::vector<double>(img.data().begin(), img.data().end());
}

Image Unflatten(std::span<const double> v, size_t width, size_t height,
                size_t channels) {
  if (v.size() != width * height * channels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector length " + std::to_string(v.size()) +
                    " != W*H*C = " + std::to_string(width * height * channels));
  }
  return Image(width, height, channels, std::vector<double>(v.begin(), v.end()));
}

uint8_t ToByte(double x) {
  // std::round rounds half away from zero.
  const double r = std::round(x);
  if (!(r > 0.0)) return 0;
  if (r >= 255.0) return 255;
  return static_cast<uint8_t>(r);
}

Image ClampRound(const Image& img) {
  std::vector<double> out(img.size());
  const auto src = img.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = ToByte(src[i]);
  return Image(img.width(), img.height(), img.channels(), std::move(out));
}

Image LoadImage(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  const std::string name = path.string();
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return DecodePpm(bytes, name);
  }
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
    return DecodePng(bytes, name);
  }
  throw Error(ErrorCode::kMalformedImage, name + ": not a PNG or P6 PPM file");
}

void SaveImage(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw Error(ErrorCode::kInvalidArgument, "empty image");
  const std::string ext = Lower(path.extension().string());
  const std::vector<uint8_t> bytes = ToBytes(img);
  if (ext == ".png") {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0,
                                 nullptr)) {
      std::string msg = png.message;
      png_image_free(&png);
      throw Error(ErrorCode::kIoFailure, path.string() + ": " + msg);
    }
    return;
  }
  if (ext == ".ppm") {
    if (img.channels() != 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "PPM output requires 3 channels: " + path.string());
    }
    std::ofstream out(path, std::ios::binary);
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoFailure, path.string());
    return;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unsupported image extension: " + path.string());
}

}  // namespace cic
