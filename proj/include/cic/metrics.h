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

// Quality and rate metrics. PSNR and SSIM clamp-round both arguments to
// 8 bits on entry. SSIM is the single-window (whole image) form with
// population statistics and constants (0.01*255)^2, (0.03*255)^2.

#ifndef CIC_METRICS_H_
#define CIC_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include "cic/image.h"

namespace cic {

inline constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);
inline constexpr uint32_t kDefaultSubpixelBits = 8;

struct Psnr {
  double db = 0.0;
  bool infinite = false;  // zero MSE

  // "inf" or the value with six decimals.
  std::string ToString() const;
};

struct Bpsp {
  double bpsp = 0.0;      // B / (S * W * H * C)
  double bpsp_raw = 0.0;  // B / (W * H * C)
};

struct MetricsReport {
  Psnr psnr;
  double ssim = 0.0;
  Bpsp rate;
  uint64_t bits = 0;
  uint32_t subpixel_bits = kDefaultSubpixelBits;
};

struct DifferenceImages {
  Image abs_img;    // single channel, max |f_t - f_r| across channels
  Image logic_img;  // single channel, 1 where abs_img > threshold else 0
  double threshold = 0.0;
};

// Throws kDimensionMismatch.
Psnr ComputePsnr(const Image& f, const Image& f0);
double ComputeSsim(const Image& f, const Image& f0);
// Throws kInvalidArgument if any argument is zero.
Bpsp ComputeBpsp(uint64_t bits, uint32_t subpixel_bits, size_t width,
                 size_t height, size_t channels);
MetricsReport ComputeMetrics(const Image& f, const Image& f0, uint64_t bits,
                             uint32_t subpixel_bits = kDefaultSubpixelBits);

// Absolute and thresholded ("logic") difference maps; strict > threshold.
DifferenceImages ComputeDifferenceImages(const Image& test,
                                         const Image& reference,
                                         double threshold);
// logic_img scaled to {0, 255} for export.
Image LogicForDisplay(const Image& logic_img);

}  // namespace cic

#endif  // CIC_METRICS_H_
