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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cic/synthetic.h"
#include "test_util.h"

namespace cic {
namespace {

// Brute-force references in long double over clamp-rounded samples.
long double Byte(double v) {
  return std::clamp(std::round(static_cast<long double>(v)), 0.0L, 255.0L);
}

long double OraclePsnr(const Image& a, const Image& b) {
  long double sse = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const long double d = Byte(a.data()[i]) - Byte(b.data()[i]);
    sse += d * d;
  }
  const long double mse = sse / a.size();
  return 10 * std::log10(65025.0L / mse);
}

long double OracleSsim(const Image& a, const Image& b) {
  const long double n = a.size();
  long double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += Byte(a.data()[i]);
    mb += Byte(b.data()[i]);
  }
  ma /= n;
  mb /= n;
  long double va = 0, vb = 0, c = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const long double x = Byte(a.data()[i]) - ma, y = Byte(b.data()[i]) - mb;
    va += x * x;
    vb += y * y;
    c += x * y;
  }
  va /= n;
  vb /= n;
  c /= n;
  const long double c1 = 6.5025L, c2 = 58.5225L;
  return (2 * ma * mb + c1) * (2 * c + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
}

void ExpectRel(double got, long double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::max<long double>(1, std::abs(want)))
      << got << " vs " << static_cast<double>(want);
}

// Pair sharing structure so SSIM spans a useful range; includes values
// outside [0, 255] and fractional samples to exercise clamp-rounding.
std::pair<Image, Image> RandomPair(uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<size_t> dim(1, 24);
  const size_t w = dim(gen), h = dim(gen), c = (gen() % 2) ? 3 : 1;
  std::uniform_real_distribution<double> base(-20, 275), noise(-40, 40);
  Image a(w, h, c), b(w, h, c);
  for (size_t i = 0; i < a.size(); ++i) {
    a.mutable_data()[i] = base(gen);
    b.mutable_data()[i] = a.data()[i] + noise(gen);
  }
  return {a, b};
}

TEST(PsnrTest, WorkedValues) {
  const Image a = Image::Filled(2, 2, 1, 100);
  const Image b = Image::Filled(2, 2, 1, 116);
  const Psnr p = ComputePsnr(a, b);
  EXPECT_FALSE(p.infinite);
  EXPECT_NEAR(p.db, 24.0484, 5e-5);
  ExpectRel(p.db, 10 * std::log10(65025.0L / 256), 1e-12);
  EXPECT_EQ(p.ToString(), "24.048404");

  const Psnr zero = ComputePsnr(Image::Filled(3, 2, 3, 0), Image::Filled(3, 2, 3, 255));
  EXPECT_EQ(zero.db, 0.0);
  EXPECT_FALSE(zero.infinite);
}

TEST(PsnrTest, IdenticalIsInfinite) {
  const Image f = RandomImage(7, 5, 3, 3);
  const Psnr p = ComputePsnr(f, f);
  EXPECT_TRUE(p.infinite);
  EXPECT_EQ(p.ToString(), "inf");
  // Differences that vanish after clamp-rounding count as identical.
  EXPECT_TRUE(ComputePsnr(Image::Filled(2, 2, 1, 300), Image::Filled(2, 2, 1, 255.2)).infinite);
}

TEST(PsnrTest, ShapeMismatch) {
  EXPECT_CIC_ERROR(ComputePsnr(Image(2, 2, 1), Image(2, 2, 3)), ErrorCode::kDimensionMismatch);
  EXPECT_CIC_ERROR(ComputeSsim(Image(2, 3, 1), Image(3, 2, 1)), ErrorCode::kDimensionMismatch);
  EXPECT_CIC_ERROR(ComputeDifferenceImages(Image(2, 2, 1), Image(2, 1, 1), 1),
                   ErrorCode::kDimensionMismatch);
}

TEST(SsimTest, WorkedValues) {
  const double s = ComputeSsim(Image::Filled(4, 4, 3, 100), Image::Filled(4, 4, 3, 110));
  // Exact ratio is 0.99547644...; the six-place figure 0.995477 is within 1e-6.
  EXPECT_NEAR(s, 0.995477, 1e-6);
  ExpectRel(s, 22006.5025L / 22106.5025L, 1e-12);
  EXPECT_EQ(ComputeSsim(Image(3, 3, 1), Image(3, 3, 1)), 1.0);
  const Image f = RandomImage(9, 9, 3, 4);
  EXPECT_DOUBLE_EQ(ComputeSsim(f, f), 1.0);
}

TEST(MetricsOracleTest, FiftySeededPairs) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto [a, b] = RandomPair(seed);
    const Psnr p = ComputePsnr(a, b);
    ASSERT_FALSE(p.infinite);
    ExpectRel(p.db, OraclePsnr(a, b), 1e-9);
    ExpectRel(ComputeSsim(a, b), OracleSsim(a, b), 1e-9);
  }
}

TEST(MetricsOracleTest, Symmetry) {
  for (uint64_t seed = 100; seed < 120; ++seed) {
    const auto [a, b] = RandomPair(seed);
    EXPECT_EQ(ComputePsnr(a, b).db, ComputePsnr(b, a).db);
    EXPECT_NEAR(ComputeSsim(a, b), ComputeSsim(b, a), 1e-15);
  }
}

TEST(MetricsOracleTest, PsnrShiftInvariance) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(seed);
    Image a(6, 6, 3), b(6, 6, 3), a2(6, 6, 3), b2(6, 6, 3);
    for (size_t i = 0; i < a.size(); ++i) {
      a.mutable_data()[i] = 20 + static_cast<double>(gen() % 180);
      b.mutable_data()[i] = 20 + static_cast<double>(gen() % 180);
      a2.mutable_data()[i] = a.data()[i] + 35;
      b2.mutable_data()[i] = b.data()[i] + 35;
    }
    EXPECT_EQ(ComputePsnr(a, b).db, ComputePsnr(a2, b2).db);
  }
}

TEST(SsimTest, RangeAndIdentity) {
  for (uint64_t seed = 200; seed < 240; ++seed) {
    const auto [a, b] = RandomPair(seed);
    const double s = ComputeSsim(a, b);
    EXPECT_GT(s, -1.0);
    EXPECT_LT(s, 1.0);
  }
  // Anti-correlated content stays above -1.
  Image a(8, 1, 1), b(8, 1, 1);
  for (size_t x = 0; x < 8; ++x) {
    a.at(0, x, 0) = x % 2 ? 255 : 0;
    b.at(0, x, 0) = x % 2 ? 0 : 255;
  }
  EXPECT_GT(ComputeSsim(a, b), -1.0);
  EXPECT_LT(ComputeSsim(a, b), 0.0);
}

TEST(BpspTest, Values) {
  const Bpsp r = ComputeBpsp(786432, 8, 256, 256, 3);
  EXPECT_EQ(r.bpsp, 0.5);
  EXPECT_EQ(r.bpsp_raw, 4.0);
  EXPECT_EQ(ComputeBpsp(8 * 5 * 7 * 3, 8, 5, 7, 3).bpsp, 1.0);
  for (uint64_t bits : {1ull, 97ull, 123457ull}) {
    const Bpsp b = ComputeBpsp(bits, 8, 13, 11, 3);
    EXPECT_EQ(b.bpsp_raw, 8 * b.bpsp);
    ExpectRel(b.bpsp, static_cast<long double>(bits) / (8.0L * 13 * 11 * 3), 1e-15);
  }
  EXPECT_CIC_ERROR(ComputeBpsp(0, 8, 2, 2, 1), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(ComputeBpsp(8, 0, 2, 2, 1), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(ComputeBpsp(8, 8, 0, 2, 1), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(ComputeBpsp(8, 8, 2, 0, 1), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(ComputeBpsp(8, 8, 2, 2, 0), ErrorCode::kInvalidArgument);
}

TEST(MetricsReportTest, CombinesParts) {
  const auto [a, b] = RandomPair(5);
  const MetricsReport m = ComputeMetrics(a, b, 1000, 10);
  EXPECT_EQ(m.psnr.db, ComputePsnr(a, b).db);
  EXPECT_EQ(m.ssim, ComputeSsim(a, b));
  EXPECT_EQ(m.bits, 1000u);
  EXPECT_EQ(m.subpixel_bits, 10u);
  EXPECT_EQ(m.rate.bpsp_raw, 1000.0 / static_cast<double>(a.size()));
}

TEST(DifferenceImagesTest, Identical) {
  const Image f = RandomImage(5, 4, 3, 1);
  for (double t : {0.0, 3.0, 100.0}) {
    const DifferenceImages d = ComputeDifferenceImages(f, f, t);
    EXPECT_EQ(d.abs_img, Image(5, 4, 1));
    EXPECT_EQ(d.logic_img, Image(5, 4, 1));
  }
}

TEST(DifferenceImagesTest, StrictThreshold) {
  const DifferenceImages d =
      ComputeDifferenceImages(Image(2, 1, 1, {106, 105}), Image(2, 1, 1, {100, 100}), 5);
  EXPECT_EQ(d.abs_img, Image(2, 1, 1, {6, 5}));
  EXPECT_EQ(d.logic_img, Image(2, 1, 1, {1, 0}));
  EXPECT_EQ(LogicForDisplay(d.logic_img), Image(2, 1, 1, {255, 0}));
}

TEST(DifferenceImagesTest, ChannelMaximum) {
  const Image t(1, 1, 3, {10, 50, 20});
  const Image r(1, 1, 3, {12, 44, 30});
  const DifferenceImages d = ComputeDifferenceImages(t, r, 9);
  EXPECT_EQ(d.abs_img.at(0, 0, 0), 10);
  EXPECT_EQ(d.logic_img.at(0, 0, 0), 1);
}

TEST(DifferenceImagesTest, RandomPairsMatchPerPixelOracle) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    const size_t c = seed % 2 ? 3 : 1;
    Image a(4, 4, c), b(4, 4, c);
    for (size_t i = 0; i < a.size(); ++i) {
      a.mutable_data()[i] = static_cast<double>(gen() % 10);
      b.mutable_data()[i] = static_cast<double>(gen() % 10);
    }
    const DifferenceImages d = ComputeDifferenceImages(a, b, 3);
    for (size_t y = 0; y < 4; ++y) {
      for (size_t x = 0; x < 4; ++x) {
        double m = 0;
        for (size_t k = 0; k < c; ++k) {
          const double diff = a.at(y, x, k) - b.at(y, x, k);
          if (diff > m) m = diff;
          if (-diff > m) m = -diff;
        }
        EXPECT_EQ(d.abs_img.at(y, x, 0), m);
        EXPECT_EQ(d.logic_img.at(y, x, 0), m > 3 ? 1.0 : 0.0);
        // Logic recomputed from the abs map agrees.
        EXPECT_EQ(d.logic_img.at(y, x, 0), d.abs_img.at(y, x, 0) > 3 ? 1.0 : 0.0);
      }
    }
  }
}

}  // namespace
}  // namespace cic
