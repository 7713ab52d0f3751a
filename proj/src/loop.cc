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

#include "cic/loop.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cic/error.h"
#include "cic/random.h"

namespace cic {

namespace {

double L2Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double L2Distance(const Image& a, const Image& b) {
  double s = 0.0;
  const auto pa = a.data();
  const auto pb = b.data();
  for (size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Image InitialIterate(const Image& f_d0, const LoopConfig& config) {
  switch (config.init_mode) {
    case InitMode::kZero:
      return Image(f_d0.width(), f_d0.height(), f_d0.channels());
    case InitMode::kRandom: {
      Rng rng(config.seed);
      std::vector<double> data(f_d0.size());
      for (auto& v : data) v = rng.Uniform(0.0, 255.0);
      return Image(f_d0.width(), f_d0.height(), f_d0.channels(),
                   std::move(data));
    }
    case InitMode::kDecoded:
      return f_d0;
  }
  return f_d0;
}

// Picks the gain, estimating the mean slope at f_d0 in auto mode.
void ResolveEta(const Codec& codec, const Image& f_d0, const LoopConfig& config,
                LoopResult* result) {
  result->eta_used = config.eta;
  result->eta_source = EtaSource::kManual;
  if (config.eta_mode != EtaMode::kAutoFromBound) return;
  const size_t k = std::min(config.probe_count, f_d0.size());
  result->estimate =
      EstimateMu(codec, f_d0, config.probe_step, k, config.seed);
  const double mu = result->estimate->mu;
  if (!(std::abs(mu) >= kMuZeroThreshold)) {
    result->eta_source = EtaSource::kBoundUnavailable;
    return;
  }
  const EtaInterval spectral = SpectralEtaInterval(mu, config.dt);
  result->eta_used = std::clamp(0.5 * (spectral.lo + spectral.hi), -1.0, 1.0);
  result->eta_source = EtaSource::kAuto;
}

}  // namespace

std::string_view ToString(InitMode m) {
  switch (m) {
    case InitMode::kZero: return "zero";
    case InitMode::kRandom: return "random";
    case InitMode::kDecoded: return "decoded";
  }
  return "?";
}

std::string_view ToString(EtaMode m) {
  return m == EtaMode::kManual ? "manual" : "auto";
}

std::string_view ToString(SelectMode m) {
  switch (m) {
    case SelectMode::kFinal: return "final";
    case SelectMode::kBestResidual: return "best_residual";
    case SelectMode::kBestOracle: return "best_oracle";
  }
  return "?";
}

std::string_view ToString(Termination t) {
  switch (t) {
    case Termination::kMaxIters: return "max_iters";
    case Termination::kConverged: return "converged";
    case Termination::kDiverged: return "diverged";
    case Termination::kCodecError: return "codec_error";
  }
  return "?";
}

std::string_view ToString(EtaSource s) {
  switch (s) {
    case EtaSource::kManual: return "manual";
    case EtaSource::kAuto: return "auto";
    case EtaSource::kBoundUnavailable: return "bound-unavailable";
  }
  return "?";
}

InitMode ParseInitMode(std::string_view s) {
  for (InitMode m : {InitMode::kZero, InitMode::kRandom, InitMode::kDecoded}) {
    if (ToString(m) == s) return m;
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown init mode: " + std::string(s));
}

EtaMode ParseEtaMode(std::string_view s) {
  if (s == "manual") return EtaMode::kManual;
  if (s == "auto" || s == "auto_from_bound") return EtaMode::kAutoFromBound;
  throw Error(ErrorCode::kConfigInvalid, "unknown eta mode: " + std::string(s));
}

SelectMode ParseSelectMode(std::string_view s) {
  for (SelectMode m : {SelectMode::kFinal, SelectMode::kBestResidual,
                       SelectMode::kBestOracle}) {
    if (ToString(m) == s) return m;
  }
  throw Error(ErrorCode::kConfigInvalid,
              "unknown select mode: " + std::string(s));
}

void ValidateConfig(const LoopConfig& c) {
  auto bad = [](const std::string& what) {
    return Error(ErrorCode::kConfigInvalid, what);
  };
  if (c.max_iters < 1) throw bad("max iterations must be >= 1");
  if (!(c.dt > 0) || !std::isfinite(c.dt)) throw bad("dt must be > 0");
  if (!std::isfinite(c.eta)) throw bad("eta must be finite");
  if (!(c.stop_tol >= 0)) throw bad("stop tolerance must be >= 0");
  if (c.tile && *c.tile < 8) throw bad("tile edge must be >= 8");
  if (!(c.probe_step > 0)) throw bad("probe step must be > 0");
  if (c.probe_count < 1) throw bad("probe count must be >= 1");
}

SicResult RunSic(const Codec& codec, const Image& f0) {
  SicResult sic;
  sic.bitstream = codec.Encode(f0);
  sic.decoded = codec.Decode(sic.bitstream);
  if (!sic.decoded.SameShape(f0)) {
    throw Error(ErrorCode::kCodecFailure,
                "decoded image dimensions differ from input");
  }
  return sic;
}

LoopResult RunCic(const Codec& codec, const Image& f_d0,
                  const LoopConfig& config, const Image* oracle_f0,
                  const LoopObserver& observer) {
  ValidateConfig(config);
  if (config.select_mode == SelectMode::kBestOracle &&
      (oracle_f0 == nullptr || !oracle_f0->SameShape(f_d0))) {
    throw Error(ErrorCode::kConfigInvalid,
                "best_oracle selection needs an oracle of matching shape");
  }

  LoopResult result;
  try {
    ResolveEta(codec, f_d0, config, &result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw;
    result.termination = Termination::kCodecError;
    result.error = e.what();
    result.output = f_d0;
    return result;
  }
  const double gain = result.eta_used * config.dt;

  Image f = InitialIterate(f_d0, config);
  const size_t dim = f.size();
  const auto target = f_d0.data();

  // Best candidate so far: (score, iterate index, image).
  double best_score = std::numeric_limits<double>::infinity();
  size_t best_index = 0;
  Image best = f;
  auto consider = [&](double score, size_t index, const Image& candidate) {
    if (score < best_score) {
      best_score = score;
      best_index = index;
      best = candidate;
    }
  };

  std::optional<Termination> stop;
  size_t increases = 0;
  size_t iterate_index = 0;  // k of the current iterate f(k)
  for (size_t n = 1; n <= config.max_iters; ++n) {
    Image f_d;
    try {
      ++result.roundtrip_calls;
      f_d = codec.Roundtrip(f);
      if (!f_d.SameShape(f)) {
        throw Error(ErrorCode::kCodecFailure,
                    "roundtrip changed image dimensions");
      }
    } catch (const Error& e) {
      stop = Termination::kCodecError;
      result.error = e.what();
      break;
    } catch (const std::exception& e) {
      stop = Termination::kCodecError;
      result.error = e.what();
      break;
    }
    ++result.iterations_run;

    std::vector<double> residual(dim), control(dim);
    const auto fd = f_d.data();
    for (size_t i = 0; i < dim; ++i) {
      residual[i] = target[i] - fd[i];
      control[i] = result.eta_used * residual[i];
    }
    const double norm = L2Norm(residual);
    result.residual_trace.push_back(norm);
    if (!std::isfinite(norm)) {
      stop = Termination::kDiverged;
      break;
    }

    if (observer) {
      const Image f_r(f.width(), f.height(), f.channels(), residual);
      const Image f_c(f.width(), f.height(), f.channels(), control);
      observer(LoopState{n, f, f_d, f_r, f_c, norm});
    }

    if (config.select_mode == SelectMode::kBestResidual) {
      consider(norm, iterate_index, f);
    } else if (config.select_mode == SelectMode::kBestOracle) {
      consider(L2Distance(f, *oracle_f0), iterate_index, f);
    }

    if (norm <= config.stop_tol) {
      stop = Termination::kConverged;
      break;
    }
    const size_t count = result.residual_trace.size();
    if (count >= 2 && norm > result.residual_trace[count - 2]) {
      if (++increases >= config.divergence_patience &&
          config.divergence_patience > 0) {
        stop = Termination::kDiverged;
        break;
      }
    } else {
      increases = 0;
    }

    std::vector<double> next(dim);
    const auto cur = f.data();
    bool finite = true;
    for (size_t i = 0; i < dim; ++i) {
      next[i] = cur[i] + gain * residual[i];
      finite = finite && std::isfinite(next[i]);
    }
    if (!finite) {
      stop = Termination::kDiverged;
      break;
    }
    f = Image(f.width(), f.height(), f.channels(), std::move(next));
    ++iterate_index;
  }
  result.termination = stop.value_or(Termination::kMaxIters);

  switch (config.select_mode) {
    case SelectMode::kFinal:
      result.output = f;
      result.selected_iteration = iterate_index;
      break;
    case SelectMode::kBestOracle:
      // The last iterate has no residual yet but its oracle distance is free.
      consider(L2Distance(f, *oracle_f0), iterate_index, f);
      [[fallthrough]];
    case SelectMode::kBestResidual:
      if (best_score == std::numeric_limits<double>::infinity()) {
        result.output = f;
        result.selected_iteration = iterate_index;
      } else {
        result.output = std::move(best);
        result.selected_iteration = best_index;
      }
      break;
  }

  if (config.reencode && result.termination != Termination::kCodecError) {
    try {
      result.reencoded_bitstream = codec.Encode(result.output);
    } catch (const std::exception& e) {
      result.termination = Termination::kCodecError;
      result.error = e.what();
    }
  }
  return result;
}

std::vector<TileRect> PartitionTiles(size_t width, size_t height, size_t edge) {
  if (edge == 0) throw Error(ErrorCode::kConfigInvalid, "tile edge must be > 0");
  std::vector<TileRect> tiles;
  for (size_t y = 0; y < height; y += edge) {
    for (size_t x = 0; x < width; x += edge) {
      tiles.push_back({x, y, std::min(edge, width - x),
                       std::min(edge, height - y)});
    }
  }
  return tiles;
}

LoopResult RunCicTiled(const Codec& codec, const Image& f_d0,
                       const LoopConfig& config, const Image* oracle_f0) {
  ValidateConfig(config);
  if (!config.tile) {
    throw Error(ErrorCode::kConfigInvalid, "tiled run needs a tile edge");
  }
  if (config.select_mode == SelectMode::kBestOracle &&
      (oracle_f0 == nullptr || !oracle_f0->SameShape(f_d0))) {
    throw Error(ErrorCode::kConfigInvalid,
                "best_oracle selection needs an oracle of matching shape");
  }
  const std::vector<TileRect> tiles =
      PartitionTiles(f_d0.width(), f_d0.height(), *config.tile);

  LoopConfig tile_config = config;
  tile_config.tile.reset();
  tile_config.reencode = false;

  std::vector<LoopResult> parts;
  parts.reserve(tiles.size());
  for (size_t t = 0; t < tiles.size(); ++t) {
    const TileRect& r = tiles[t];
    tile_config.seed = config.seed + t;
    const Image region = f_d0.Crop(r.x, r.y, r.width, r.height);
    std::optional<Image> oracle_region;
    if (oracle_f0 != nullptr) {
      oracle_region = oracle_f0->Crop(r.x, r.y, r.width, r.height);
    }
    parts.push_back(RunCic(codec, region, tile_config,
                           oracle_region ? &*oracle_region : nullptr));
  }

  if (parts.size() == 1) {
    LoopResult single = std::move(parts.front());
    single.tile_selected_iterations = {single.selected_iteration};
    if (config.reencode && single.termination != Termination::kCodecError) {
      try {
        single.reencoded_bitstream = codec.Encode(single.output);
      } catch (const std::exception& e) {
        single.termination = Termination::kCodecError;
        single.error = e.what();
      }
    }
    return single;
  }

  LoopResult result;
  result.output = f_d0;
  bool any_error = false, any_diverged = false, all_converged = true;
  double eta_sum = 0.0;
  bool any_auto = false, any_unavailable = false;
  for (size_t t = 0; t < tiles.size(); ++t) {
    const LoopResult& part = parts[t];
    result.output.Paste(part.output, tiles[t].x, tiles[t].y);
    result.iterations_run = std::max(result.iterations_run, part.iterations_run);
    result.selected_iteration =
        std::max(result.selected_iteration, part.selected_iteration);
    result.tile_selected_iterations.push_back(part.selected_iteration);
    result.roundtrip_calls += part.roundtrip_calls;
    any_error = any_error || part.termination == Termination::kCodecError;
    any_diverged = any_diverged || part.termination == Termination::kDiverged;
    all_converged = all_converged && part.termination == Termination::kConverged;
    if (part.termination == Termination::kCodecError && result.error.empty()) {
      result.error = part.error;
    }
    eta_sum += part.eta_used;
    any_auto = any_auto || part.eta_source == EtaSource::kAuto;
    any_unavailable =
        any_unavailable || part.eta_source == EtaSource::kBoundUnavailable;
  }
  result.eta_used = eta_sum / static_cast<double>(tiles.size());
  result.eta_source = any_auto ? EtaSource::kAuto
                      : any_unavailable ? EtaSource::kBoundUnavailable
                                        : EtaSource::kManual;
  if (any_error) {
    result.termination = Termination::kCodecError;
  } else if (any_diverged) {
    result.termination = Termination::kDiverged;
  } else if (all_converged) {
    result.termination = Termination::kConverged;
  } else {
    result.termination = Termination::kMaxIters;
  }

  for (size_t k = 0; k < result.iterations_run; ++k) {
    double sum = 0.0;
    for (const LoopResult& part : parts) {
      if (part.residual_trace.empty()) continue;
      const double r =
          part.residual_trace[std::min(k, part.residual_trace.size() - 1)];
      sum += r * r;
    }
    result.residual_trace.push_back(std::sqrt(sum));
  }

  if (config.reencode && !any_error) {
    try {
      result.reencoded_bitstream = codec.Encode(result.output);
    } catch (const std::exception& e) {
      result.termination = Termination::kCodecError;
      result.error = e.what();
    }
  }
  return result;
}

LoopResult RunPipeline(const Codec& codec, const Image& f0,
                       const LoopConfig& config, SicResult* sic_out,
                       const LoopObserver& observer) {
  SicResult sic = RunSic(codec, f0);
  const Image* oracle =
      config.select_mode == SelectMode::kBestOracle ? &f0 : nullptr;
  LoopResult result = config.tile
                          ? RunCicTiled(codec, sic.decoded, config, oracle)
                          : RunCic(codec, sic.decoded, config, oracle, observer);
  result.sic_bitstream = sic.bitstream;
  if (sic_out != nullptr) *sic_out = std::move(sic);
  return result;
}

}  // namespace cic
