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

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cic/error.h"
#include "cic/random.h"

namespace cic {

std::vector<size_t> SampleDistinctIndices(size_t n, size_t k, uint64_t seed) {
  if (k > n) throw Error(ErrorCode::kInvalidArgument, "k > n");
  // Floyd's algorithm: k draws, no O(n) state.
  Rng rng(seed);
  std::set<size_t> chosen;
  for (size_t j = n - k; j < n; ++j) {
    const size_t t = static_cast<size_t>(rng.Below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return std::vector<size_t>(chosen.begin(), chosen.end());
}

TaylorEstimate EstimateMu(const Codec& codec, const Image& f0,
                          double probe_step, size_t sample_count,
                          uint64_t seed) {
  if (!(probe_step > 0) || !std::isfinite(probe_step)) {
    throw Error(ErrorCode::kInvalidArgument, "probe step must be > 0");
  }
  if (sample_count == 0 || sample_count > f0.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample count must be in [1, D], got " +
                    std::to_string(sample_count));
  }
  TaylorEstimate est;
  est.probe_step = probe_step;
  est.sample_count = sample_count;
  est.seed = seed;
  est.samples.reserve(sample_count);

  Image probe = f0;
  double sum = 0.0;
  for (size_t index : SampleDistinctIndices(f0.size(), sample_count, seed)) {
    const double base = f0.data()[index];
    probe.mutable_data()[index] = base + probe_step;
    const double up = codec.Roundtrip(probe).data()[index];
    probe.mutable_data()[index] = base - probe_step;
    const double down = codec.Roundtrip(probe).data()[index];
    probe.mutable_data()[index] = base;
    const double slope = (up - down) / (2.0 * probe_step);
    if (!std::isfinite(slope)) {
      throw Error(ErrorCode::kNonFiniteProbe,
                  "non-finite slope at coordinate " + std::to_string(index));
    }
    est.samples.push_back({index, slope});
    sum += slope;
  }
  est.mu = sum / static_cast<double>(sample_count);
  return est;
}

EtaInterval FrobeniusEtaInterval(double mu, double dt, size_t dimension) {
  if (!(dt > 0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  if (dimension == 0) throw Error(ErrorCode::kInvalidArgument, "D must be >= 1");
  if (!(std::abs(mu) >= kMuZeroThreshold)) {
    throw Error(ErrorCode::kMuZero, "mean slope is ~0; no gain interval");
  }
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dimension));
  const double a = (1.0 - inv_sqrt_d) / (dt * mu);
  const double b = (1.0 + inv_sqrt_d) / (dt * mu);
  return mu > 0 ? EtaInterval{a, b} : EtaInterval{b, a};
}

EtaInterval SpectralEtaInterval(double mu, double dt) {
  if (!(dt > 0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  if (!(std::abs(mu) >= kMuZeroThreshold)) {
    throw Error(ErrorCode::kMuZero, "mean slope is ~0; no gain interval");
  }
  const double edge = 2.0 / (dt * mu);
  return mu > 0 ? EtaInterval{0.0, edge} : EtaInterval{edge, 0.0};
}

ContractionReport MakeContractionReport(const TaylorEstimate& estimate,
                                        double eta, double dt,
                                        size_t dimension) {
  if (!(dt > 0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  if (dimension == 0) throw Error(ErrorCode::kInvalidArgument, "D must be >= 1");
  ContractionReport report;
  report.frobenius_gap = std::abs(1.0 - dt * estimate.mu * eta) *
                         std::sqrt(static_cast<double>(dimension));
  report.frobenius_ok = report.frobenius_gap < 1.0;
  if (estimate.samples.empty()) {
    report.spectral_gap = std::abs(1.0 - dt * eta * estimate.mu);
  } else {
    for (const auto& s : estimate.samples) {
      report.spectral_gap =
          std::max(report.spectral_gap, std::abs(1.0 - dt * eta * s.slope));
    }
  }
  report.spectral_ok = report.spectral_gap < 1.0;
  if (std::abs(estimate.mu) >= kMuZeroThreshold) {
    report.eta_interval = FrobeniusEtaInterval(estimate.mu, dt, dimension);
  }
  return report;
}

}  // namespace cic
