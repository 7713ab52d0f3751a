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

#include "cic/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cic/error.h"

namespace cic {

namespace {

void CheckSameShape(const Image& a, const Image& b) {
  if (!a.SameShape(b) || a.empty()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "images differ in shape: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + "x" +
                    std::to_string(a.channels()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + "x" +
                    std::to_string(b.channels()));
  }
}

}  // namespace

std::string Psnr::ToString() const {
  if (infinite) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", db);
  return buf;
}

Psnr ComputePsnr(const Image& f, const Image& f0) {
  CheckSameShape(f, f0);
  const auto a = f.data();
  const auto b = f0.data();
  double sse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(ToByte(a[i])) - ToByte(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) return {0.0, true};
  const double mse = sse / static_cast<double>(a.size());
  return {10.0 * std::log10(255.0 * 255.0 / mse), false};
}

double ComputeSsim(const Image& f, const Image& f0) {
  CheckSameShape(f, f0);
  const auto a = f.data();
  const auto b = f0.data();
  const double n = static_cast<double>(a.size());
  double sum_a = 0.0, sum_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum_a += ToByte(a[i]);
    sum_b += ToByte(b[i]);
  }
  const double mean_a = sum_a / n;
  const double mean_b = sum_b / n;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = ToByte(a[i]) - mean_a;
    const double db = ToByte(b[i]) - mean_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= n;
  var_b /= n;
  cov /= n;
  return ((2 * mean_a * mean_b + kSsimC1) * (2 * cov + kSsimC2)) /
         ((mean_a * mean_a + mean_b * mean_b + kSsimC1) *
          (var_a + var_b + kSsimC2));
}

Bpsp ComputeBpsp(uint64_t bits, uint32_t subpixel_bits, size_t width,
                 size_t height, size_t channels) {
  if (bits == 0 || subpixel_bits == 0 || width == 0 || height == 0 ||
      channels == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "bpsp needs positive bits, depth and dimensions");
  }
  const double samples = static_cast<double>(width) * height * channels;
  const double raw = static_cast<double>(bits) / samples;
  return {raw / subpixel_bits, raw};
}

MetricsReport ComputeMetrics(const Image& f, const Image& f0, uint64_t bits,
                             uint32_t subpixel_bits) {
  MetricsReport report;
  report.psnr = ComputePsnr(f, f0);
  report.ssim = ComputeSsim(f, f0);
  report.bits = bits;
  report.subpixel_bits = subpixel_bits;
  report.rate =
      ComputeBpsp(bits, subpixel_bits, f0.width(), f0.height(), f0.channels());
  return report;
}

DifferenceImages ComputeDifferenceImages(const Image& test,
                                         const Image& reference,
                                         double threshold) {
  CheckSameShape(test, reference);
  DifferenceImages out;
  out.threshold = threshold;
  out.abs_img = Image(test.width(), test.height(), 1);
  out.logic_img = Image(test.width(), test.height(), 1);
  for (size_t y = 0; y < test.height(); ++y) {
    for (size_t x = 0; x < test.width(); ++x) {
      double diff = 0.0;
      for (size_t c = 0; c < test.channels(); ++c) {
        diff = std::max(diff, std::abs(test.at(y, x, c) - reference.at(y, x, c)));
      }
      out.abs_img.at(y, x, 0) = diff;
      out.logic_img.at(y, x, 0) = diff > threshold ? 1.0 : 0.0;
    }
  }
  return out;
}

Image LogicForDisplay(const Image& logic_img) {
  Image out = logic_img;
  for (double& v : out.mutable_data()) v = v > 0 ? 255.0 : 0.0;
  return out;
}

}  // namespace cic
