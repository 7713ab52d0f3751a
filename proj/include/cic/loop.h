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

// Serial (open-loop) compression and the closed-loop refinement around it.
//
// The serial leg is f_d0 = DE(EN(f0)). The closed loop only observes f_d0
// and drives an iterate f toward a fixed point of the roundtrip NF:
//
//   f_d(n) = NF(f(n))
//   f_r(n) = f_d0 - f_d(n)            residual
//   f_c(n) = eta * f_r(n)             control
//   f(n+1) = f(n) + dt * f_c(n)       explicit Euler step
//
// Each iteration costs exactly one roundtrip.

#ifndef CIC_LOOP_H_
#define CIC_LOOP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cic/codec.h"
#include "cic/image.h"
#include "cic/taylor.h"

namespace cic {

enum class InitMode { kZero, kRandom, kDecoded };
enum class EtaMode { kManual, kAutoFromBound };
enum class SelectMode { kFinal, kBestResidual, kBestOracle };
enum class Termination { kMaxIters, kConverged, kDiverged, kCodecError };
enum class EtaSource { kManual, kAuto, kBoundUnavailable };

std::string_view ToString(InitMode m);
std::string_view ToString(EtaMode m);
std::string_view ToString(SelectMode m);
std::string_view ToString(Termination t);
std::string_view ToString(EtaSource s);
// Inverse of ToString; throws kConfigInvalid on unknown names.
InitMode ParseInitMode(std::string_view s);
EtaMode ParseEtaMode(std::string_view s);
SelectMode ParseSelectMode(std::string_view s);

struct LoopConfig {
  double eta = 1.0;
  double dt = 1.0;
  size_t max_iters = 10;
  InitMode init_mode = InitMode::kDecoded;
  // Seeds the random initial iterate and the slope probes.
  uint64_t seed = 0;
  // Tile edge in pixels; unset runs on the whole image.
  std::optional<size_t> tile;
  EtaMode eta_mode = EtaMode::kManual;
  double stop_tol = 0.0;
  // Consecutive residual increases that end the run as kDiverged; 0 never
  // stops on increases.
  size_t divergence_patience = 3;
  SelectMode select_mode = SelectMode::kBestResidual;
  // Also encode the selected output and report its bitstream.
  bool reencode = false;
  double probe_step = kDefaultProbeStep;
  size_t probe_count = kDefaultProbeCount;
};

// Throws kConfigInvalid.
void ValidateConfig(const LoopConfig& config);

// Snapshot handed to an observer once per iteration, after the roundtrip.
struct LoopState {
  size_t n;  // 1-based iteration
  const Image& f;
  const Image& f_d;
  const Image& f_r;
  const Image& f_c;
  double residual_norm;
};
using LoopObserver = std::function<void(const LoopState&)>;

struct LoopResult {
  Image output;
  size_t iterations_run = 0;
  Termination termination = Termination::kMaxIters;
  // residual_trace[k] = ||f_d0 - NF(f(k))||_2 for iterate k = 0, 1, ...
  std::vector<double> residual_trace;
  // Index k of the selected iterate f(k).
  size_t selected_iteration = 0;
  std::optional<Bitstream> sic_bitstream;
  std::optional<Bitstream> reencoded_bitstream;

  double eta_used = 0.0;
  EtaSource eta_source = EtaSource::kManual;
  std::optional<TaylorEstimate> estimate;
  // Roundtrips spent inside the loop (probes excluded).
  size_t roundtrip_calls = 0;
  std::string error;  // codec failure message, when termination is kCodecError
  // Per-tile selections for tiled runs, in tile raster order.
  std::vector<size_t> tile_selected_iterations;
};

struct SicResult {
  Image decoded;
  Bitstream bitstream;
};

// f_d0 = DE(EN(f0)) together with the transmitted bitstream EN(f0).
SicResult RunSic(const Codec& codec, const Image& f0);

// Closed-loop refinement of `f_d0`. Codec failures inside the loop do not
// throw: they end the run with kCodecError and keep the partial trace.
// Throws kConfigInvalid for a bad config or a missing/mismatched oracle in
// kBestOracle mode.
LoopResult RunCic(const Codec& codec, const Image& f_d0,
                  const LoopConfig& config,
                  const Image* oracle_f0 = nullptr,
                  const LoopObserver& observer = {});

struct TileRect {
  size_t x = 0;
  size_t y = 0;
  size_t width = 0;
  size_t height = 0;
};

// Raster-order partition into edge x edge tiles; the last row/column take
// the remainder.
std::vector<TileRect> PartitionTiles(size_t width, size_t height, size_t edge);

// Runs RunCic independently on every tile of f_d0 and stitches the outputs.
// residual_trace is the per-iteration root-sum-square over tiles (a tile
// that stopped early contributes its last residual); the run is kDiverged
// if any tile diverged. Requires config.tile >= 8.
LoopResult RunCicTiled(const Codec& codec, const Image& f_d0,
                       const LoopConfig& config,
                       const Image* oracle_f0 = nullptr);

// SIC followed by CIC (tiled when config.tile is set). The result carries
// the SIC bitstream; f0 serves as the oracle in kBestOracle mode. The
// observer only fires for untiled runs.
LoopResult RunPipeline(const Codec& codec, const Image& f0,
                       const LoopConfig& config, SicResult* sic = nullptr,
                       const LoopObserver& observer = {});

}  // namespace cic

#endif  // CIC_LOOP_H_
