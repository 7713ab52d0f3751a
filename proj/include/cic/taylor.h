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

// First-order linearization of a black-box codec roundtrip and the
// contraction conditions that bound the feedback gain.
//
// Around an image f0 the roundtrip NF is approximated by its diagonal
// Jacobian U = diag(U_ii), U_ii = dNF_i/df_i. Replacing U by mu*I (mu the
// mean diagonal slope) and the gain matrix by eta*I, the loop error obeys
//
//   r(t + dt) = (1 - dt*eta*mu) r(t)
//
// and the Frobenius-norm bound |1 - dt*mu*eta| * sqrt(D) < 1 guarantees a
// strictly shrinking error. The per-coordinate (spectral) condition
// max_i |1 - dt*eta*U_ii| < 1 is weaker and is reported alongside.

#ifndef CIC_TAYLOR_H_
#define CIC_TAYLOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cic/codec.h"
#include "cic/image.h"

namespace cic {

inline constexpr double kDefaultProbeStep = 2.0;
inline constexpr size_t kDefaultProbeCount = 64;
// |mu| below this is treated as zero: no gain interval is derived.
inline constexpr double kMuZeroThreshold = 1e-6;

struct SlopeSample {
  size_t index = 0;  // coordinate in the flattened image
  double slope = 0.0;
};

struct TaylorEstimate {
  std::vector<SlopeSample> samples;  // in ascending coordinate order
  double mu = 0.0;
  double probe_step = kDefaultProbeStep;
  size_t sample_count = 0;
  uint64_t seed = 0;
};

// Open interval (lo, hi).
struct EtaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ContractionReport {
  double frobenius_gap = 0.0;  // |1 - dt*mu*eta| * sqrt(D)
  bool frobenius_ok = false;  // frobenius_gap < 1
  double spectral_gap = 0.0;   // max_i |1 - dt*eta*U_ii| over samples
  bool spectral_ok = false;    // spectral_gap < 1
  std::optional<EtaInterval> eta_interval;  // nullopt when |mu| ~ 0
};

// Central-difference estimate of K diagonal slopes at K distinct coordinates
// drawn without replacement (seeded), each costing two roundtrips:
//   U_ii ~ (NF_i(f0 + eps e_i) - NF_i(f0 - eps e_i)) / (2 eps).
// Throws kInvalidArgument for eps <= 0, K == 0 or K > D; kNonFiniteProbe if
// the codec returns a non-finite slope. Codec errors propagate.
TaylorEstimate EstimateMu(const Codec& codec, const Image& f0,
                          double probe_step = kDefaultProbeStep,
                          size_t sample_count = kDefaultProbeCount,
                          uint64_t seed = 0);

// Gains eta with |1 - dt*mu*eta| * sqrt(D) < 1. Throws kMuZero when
// |mu| < kMuZeroThreshold, kInvalidArgument for dt <= 0 or D == 0.
EtaInterval FrobeniusEtaInterval(double mu, double dt, size_t dimension);

// Gains eta with |1 - dt*mu*eta| < 1, i.e. (0, 2/(dt*mu)) for mu > 0.
EtaInterval SpectralEtaInterval(double mu, double dt);

ContractionReport MakeContractionReport(const TaylorEstimate& estimate,
                                        double eta, double dt,
                                        size_t dimension);

// K distinct indices in [0, n), sorted ascending, from a portable seeded
// generator (identical across standard libraries).
std::vector<size_t> SampleDistinctIndices(size_t n, size_t k, uint64_t seed);

}  // namespace cic

#endif  // CIC_TAYLOR_H_
