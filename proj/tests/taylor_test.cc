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

#include "cic/taylor.h"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "cic/random.h"
#include "cic/synthetic.h"
#include "test_util.h"

namespace cic {
namespace {

// Steps from -M to +M at `edge`; the central difference across it overflows.
class CliffCodec final : public Codec {
 public:
  CodecDescriptor Descriptor() const override { return {"cliff", true, 0, {}}; }
  Bitstream Encode(const Image&) const override { return {}; }
  Image Decode(const Bitstream&) const override { return Image(1, 1, 1); }
  Image Roundtrip(const Image& img) const override {
    std::vector<double> out(img.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = img.data()[i] > 100 ? 1.7e308 : -1.7e308;
    return Image(img.width(), img.height(), img.channels(), out);
  }
};

TaylorEstimate Uniform(double mu, size_t k) {
  TaylorEstimate e;
  e.mu = mu;
  e.sample_count = k;
  for (size_t i = 0; i < k; ++i) e.samples.push_back({i, mu});
  return e;
}

TEST(RngTest, EngineMatchesStandardReferenceValue) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(std::mt19937_64::default_seed);
  uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.Next();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(RngTest, RangesHold) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.Below(7), 7u);
  }
}

TEST(SampleDistinctIndicesTest, DistinctSortedInRange) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto idx = SampleDistinctIndices(100, 30, seed);
    ASSERT_EQ(idx.size(), 30u);
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(std::set<size_t>(idx.begin(), idx.end()).size(), 30u);
    EXPECT_LT(idx.back(), 100u);
  }
  const auto all = SampleDistinctIndices(10, 10, 1);
  for (size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  EXPECT_CIC_ERROR(SampleDistinctIndices(3, 4, 0), ErrorCode::kInvalidArgument);
}

TEST(SampleDistinctIndicesTest, DeterministicAndSeedSensitive) {
  EXPECT_EQ(SampleDistinctIndices(1000, 64, 7), SampleDistinctIndices(1000, 64, 7));
  EXPECT_NE(SampleDistinctIndices(1000, 64, 7), SampleDistinctIndices(1000, 64, 8));
}

TEST(SampleDistinctIndicesTest, RoughlyUniform) {
  std::vector<int> hits(20, 0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    for (size_t i : SampleDistinctIndices(20, 5, s)) ++hits[i];
  }
  // Each index is chosen with probability 1/4.
  for (int h : hits) EXPECT_NEAR(h, trials / 4.0, trials * 0.02);
}

TEST(FrobeniusIntervalTest, Examples) {
  EtaInterval iv = FrobeniusEtaInterval(1, 1, 4);
  EXPECT_EQ(iv.lo, 0.5);
  EXPECT_EQ(iv.hi, 1.5);
  iv = FrobeniusEtaInterval(1, 1, 1);
  EXPECT_EQ(iv.lo, 0.0);
  EXPECT_EQ(iv.hi, 2.0);
  iv = FrobeniusEtaInterval(-1, 1, 4);
  EXPECT_EQ(iv.lo, -1.5);
  EXPECT_EQ(iv.hi, -0.5);
  iv = FrobeniusEtaInterval(0.5, 1, 4);
  EXPECT_EQ(iv.lo, 1.0);
  EXPECT_EQ(iv.hi, 3.0);
}

TEST(FrobeniusIntervalTest, Errors) {
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(0, 1, 4), ErrorCode::kMuZero);
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(5e-7, 1, 4), ErrorCode::kMuZero);
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(-5e-7, 1, 4), ErrorCode::kMuZero);
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(1, 0, 4), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(1, 1, 0), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(SpectralEtaInterval(0, 1), ErrorCode::kMuZero);
}

TEST(FrobeniusIntervalTest, EndpointsAreExcluded) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> mu_dist(0.05, 3.0), dt_dist(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = (trial % 2 ? 1 : -1) * mu_dist(gen);
    const double dt = dt_dist(gen);
    const size_t d = 1 + gen() % 100000;
    const EtaInterval iv = FrobeniusEtaInterval(mu, dt, d);
    EXPECT_LT(iv.lo, iv.hi);
    const TaylorEstimate est = Uniform(mu, 4);
    for (double eta : {iv.lo, iv.hi}) {
      EXPECT_NEAR(MakeContractionReport(est, eta, dt, d).frobenius_gap, 1.0, 1e-12);
    }
    const double mid = 0.5 * (iv.lo + iv.hi);
    EXPECT_TRUE(MakeContractionReport(est, mid, dt, d).frobenius_ok);
  }
}

TEST(SpectralIntervalTest, Values) {
  EtaInterval iv = SpectralEtaInterval(0.5, 1);
  EXPECT_EQ(iv.lo, 0.0);
  EXPECT_EQ(iv.hi, 4.0);
  iv = SpectralEtaInterval(-2, 0.5);
  EXPECT_EQ(iv.lo, -2.0);
  EXPECT_EQ(iv.hi, 0.0);
}

TEST(ContractionReportTest, Examples) {
  ContractionReport r = MakeContractionReport(Uniform(1, 4), 1, 1, 4);
  EXPECT_EQ(r.frobenius_gap, 0.0);
  EXPECT_TRUE(r.frobenius_ok);

  r = MakeContractionReport(Uniform(0.5, 4), 1, 1, 4);
  EXPECT_EQ(r.frobenius_gap, 1.0);
  EXPECT_FALSE(r.frobenius_ok);
  EXPECT_EQ(r.spectral_gap, 0.5);
  EXPECT_TRUE(r.spectral_ok);
  ASSERT_TRUE(r.eta_interval.has_value());
  EXPECT_EQ(r.eta_interval->lo, 1.0);
  EXPECT_EQ(r.eta_interval->hi, 3.0);

  r = MakeContractionReport(Uniform(0.5, 4), 5, 1, 4);
  EXPECT_EQ(r.spectral_gap, 1.5);
  EXPECT_FALSE(r.spectral_ok);
}

TEST(ContractionReportTest, SpectralGapUsesEverySample) {
  TaylorEstimate e;
  e.samples = {{0, 0.2}, {1, 1.0}, {2, 1.9}};
  e.mu = (0.2 + 1.0 + 1.9) / 3;
  const ContractionReport r = MakeContractionReport(e, 1, 1, 9);
  EXPECT_DOUBLE_EQ(r.spectral_gap, 0.9);
  EXPECT_DOUBLE_EQ(r.frobenius_gap, std::abs(1 - e.mu) * 3);
}

TEST(ContractionReportTest, NoIntervalWhenMuVanishes) {
  const ContractionReport r = MakeContractionReport(Uniform(0, 3), 1, 1, 9);
  EXPECT_FALSE(r.eta_interval.has_value());
  EXPECT_EQ(r.spectral_gap, 1.0);
  EXPECT_FALSE(r.spectral_ok);
}

TEST(ContractionReportTest, FrobeniusBoundImpliesSpectralForScalarSlopes) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> mu_dist(-2, 2), eta_dist(-3, 3), dt_dist(0.1, 2);
  size_t frob = 0, spectral_only = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const double mu = mu_dist(gen);
    const size_t d = 1 + gen() % 16;
    const ContractionReport r =
        MakeContractionReport(Uniform(mu, 5), eta_dist(gen), dt_dist(gen), d);
    EXPECT_EQ(r.frobenius_ok, r.frobenius_gap < 1);
    EXPECT_EQ(r.spectral_ok, r.spectral_gap < 1);
    if (r.frobenius_ok) {
      ++frob;
      EXPECT_TRUE(r.spectral_ok);
    }
    if (r.spectral_ok && !r.frobenius_ok) ++spectral_only;
  }
  EXPECT_GT(frob, 0u);
  EXPECT_GT(spectral_only, 0u);
}

TEST(EstimateMuTest, AffineSlopeIsExact) {
  const Image f0 = RandomImage(8, 8, 3, 2);
  for (double a : {0.25, 0.5, 1.0}) {
    for (double eps : {0.5, 2.0, 8.0}) {
      const TaylorEstimate e = EstimateMu(AffineCodec(a, 10), f0, eps, 64, 3);
      EXPECT_NEAR(e.mu, a, 1e-9);
      ASSERT_EQ(e.samples.size(), 64u);
      for (const auto& s : e.samples) EXPECT_NEAR(s.slope, a, 1e-9);
      EXPECT_EQ(e.sample_count, 64u);
      EXPECT_EQ(e.probe_step, eps);
      EXPECT_EQ(e.seed, 3u);
    }
  }
}

TEST(EstimateMuTest, IdentityAtMidGray) {
  const Image f0 = Image::Filled(6, 6, 3, 128);
  EXPECT_EQ(EstimateMu(IdentityCodec(), f0, 2.0, 32, 0).mu, 1.0);
}

TEST(EstimateMuTest, QuantizerInsideOneBin) {
  // q*round(x/16) at 98 and 102 is 96 both times.
  const Image f0 = Image::Filled(5, 5, 3, 100);
  const TaylorEstimate e = EstimateMu(UniformQuantCodec(16), f0, 2.0, 64, 1);
  EXPECT_EQ(e.mu, 0.0);
  for (const auto& s : e.samples) EXPECT_EQ(s.slope, 0.0);
  EXPECT_CIC_ERROR(FrobeniusEtaInterval(e.mu, 1, f0.size()), ErrorCode::kMuZero);
}

TEST(EstimateMuTest, MeanOfSamplesAndDistinctCoordinates) {
  const Image f0 = RandomImage(16, 16, 3, 5);
  const TaylorEstimate e = EstimateMu(DownUpCodec(2), f0, 2.0, 40, 11);
  double sum = 0;
  std::set<size_t> seen;
  for (const auto& s : e.samples) {
    sum += s.slope;
    seen.insert(s.index);
  }
  EXPECT_DOUBLE_EQ(e.mu, sum / 40);
  EXPECT_EQ(seen.size(), 40u);
  EXPECT_EQ(e.samples.front().index, *seen.begin());
}

TEST(EstimateMuTest, DeterministicGivenSeed) {
  const Image f0 = RandomImage(10, 10, 3, 1);
  const TaylorEstimate a = EstimateMu(BlockDctCodec(50), f0, 2.0, 16, 4);
  const TaylorEstimate b = EstimateMu(BlockDctCodec(50), f0, 2.0, 16, 4);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].index, b.samples[i].index);
    EXPECT_EQ(a.samples[i].slope, b.samples[i].slope);
  }
  EXPECT_EQ(a.mu, b.mu);
}

TEST(EstimateMuTest, ProbeCostIsTwoRoundtripsPerSample) {
  const IdentityCodec inner;
  testing::CountingCodec codec(inner);
  EstimateMu(codec, Image::Filled(4, 4, 3, 50), 2.0, 10, 0);
  EXPECT_EQ(codec.roundtrips, 20u);
}

TEST(EstimateMuTest, InvalidArguments) {
  const Image f0 = Image::Filled(2, 2, 1, 50);
  EXPECT_CIC_ERROR(EstimateMu(IdentityCodec(), f0, 0.0, 2, 0), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(EstimateMu(IdentityCodec(), f0, 2.0, 0, 0), ErrorCode::kInvalidArgument);
  EXPECT_CIC_ERROR(EstimateMu(IdentityCodec(), f0, 2.0, 5, 0), ErrorCode::kInvalidArgument);
}

TEST(EstimateMuTest, NonFiniteSlope) {
  EXPECT_CIC_ERROR(EstimateMu(CliffCodec(), Image::Filled(2, 2, 1, 100), 1.0, 1, 0),
                   ErrorCode::kNonFiniteProbe);
}

}  // namespace
}  // namespace cic
