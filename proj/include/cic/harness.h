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

// Experiment runner behind the `cic` command line: SIC vs CIC over image
// directories, gain/iteration sweeps, bound analysis and difference images.
//
// Codec specs:
//   builtin:identity
//   builtin:affine?a=0.5&b=10
//   builtin:uniform?step=16
//   builtin:blockdct?quality=50
//   builtin:downup?factor=2
//   bridge:<executable> [args...]      (whitespace separated)

#ifndef CIC_HARNESS_H_
#define CIC_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cic/codec.h"
#include "cic/image.h"
#include "cic/loop.h"
#include "cic/metrics.h"
#include "cic/taylor.h"

namespace cic {

struct CodecSpec {
  enum class Kind { kBuiltin, kBridge };
  Kind kind = Kind::kBuiltin;
  std::string name;                          // builtin name
  std::map<std::string, std::string> params;  // builtin k=v pairs
  std::vector<std::string> argv;             // bridge command line
};

// Throws kConfigInvalid on grammar errors or unknown builtins/params.
CodecSpec ParseCodecSpec(std::string_view spec);
// Bridge codecs spawn their adapter here; `bridge_timeout_seconds` bounds
// the handshake and every request.
std::unique_ptr<Codec> MakeCodec(const CodecSpec& spec,
                                 double bridge_timeout_seconds = 30.0);
std::unique_ptr<Codec> MakeCodec(std::string_view spec,
                                 double bridge_timeout_seconds = 30.0);

struct ExperimentConfig {
  std::filesystem::path dataset_dir;
  std::string codec_spec = "builtin:identity";
  LoopConfig loop;
  double threshold = 5.0;  // difference-image T
  uint32_t subpixel_bits = kDefaultSubpixelBits;
  std::filesystem::path output_dir;  // empty: nothing written
  uint64_t seed = 0;                 // copied into loop.seed
  double bridge_timeout_seconds = 30.0;
  bool write_trajectories = true;
  bool save_images = false;  // sic_<stem>.png / cic_<stem>.png
};

// Reads a JSON object whose keys mirror the command-line flags (dataset,
// codec, eta, dt, iters, init, tile, eta_mode, reencode, threshold,
// subpixel_bits, seed, out, stop_tol, patience, select, probe_step,
// probe_count, timeout). Throws kConfigInvalid.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
ExperimentConfig ExperimentConfigFromJson(std::string_view json_text);

// *.png / *.ppm files in lexicographic filename order. Throws kEmptyDataset
// when there are none and kFileNotFound for a missing directory.
std::vector<std::filesystem::path> DiscoverImages(
    const std::filesystem::path& dir);

struct ReportRow {
  std::string image;
  double psnr_sic = 0.0;  // +inf for a lossless leg
  double psnr_cic = 0.0;
  double delta_psnr = 0.0;  // cic - sic
  double ssim_sic = 0.0;
  double ssim_cic = 0.0;
  double delta_ssim = 0.0;  // cic - sic
  double bpsp_sic = 0.0;
  double bpsp_cic = 0.0;    // re-encoded rate, or the SIC rate otherwise
  double delta_bpsp = 0.0;  // sic - cic
  size_t iterations = 0;
  std::string termination;
  double bpsp_raw_sic = 0.0;
  double bpsp_raw_cic = 0.0;
  double eta = 0.0;
  std::string error;  // non-empty for a failed image; metrics are then 0
  bool ok() const { return error.empty(); }
};

struct MetricSummary {
  double sic_mean = 0.0;
  double cic_mean = 0.0;
  double delta_mean = 0.0;  // "Delta"
  double delta_max = 0.0;   // "Delta_m"
};

struct RunSummary {
  size_t images = 0;
  size_t succeeded = 0;
  MetricSummary psnr;
  MetricSummary ssim;
  MetricSummary bpsp;
};

struct RunReport {
  std::vector<ReportRow> rows;
  RunSummary summary;  // over successful rows only
};

// Per-iteration trace of one image.
struct TrajectoryPoint {
  size_t n = 0;  // iterate index k
  double residual_norm = 0.0;
  std::optional<double> psnr_vs_oracle;  // absent for tiled runs
};

struct ImageOutcome {
  ReportRow row;
  std::vector<TrajectoryPoint> trajectory;
  std::optional<Image> sic;
  std::optional<Image> cic;
};

// SIC vs CIC on a single image. Codec failures are captured in row.error.
ImageOutcome EvaluateImage(const Codec& codec, const Image& f0,
                           const std::string& id,
                           const ExperimentConfig& config);

RunSummary Summarize(const std::vector<ReportRow>& rows);

// Runs the dataset and, when output_dir is set, writes rows.csv,
// summary.csv, report.json and traj_<stem>.csv files.
RunReport RunExperiment(const ExperimentConfig& config, const Codec& codec);
RunReport RunExperiment(const ExperimentConfig& config);

std::string FormatReal(double v);  // "%.6f", "inf", "-inf", "nan"
std::string RowsCsv(const std::vector<ReportRow>& rows);
std::string SummaryCsv(const RunSummary& summary);
std::string ReportJson(const RunReport& report);

struct SweepRow {
  std::string image;
  double eta = 0.0;
  size_t iters = 0;
  ReportRow row;
};

// One row per (image, eta, N), image-major then eta then N. Throws
// kConfigInvalid for empty grids, N == 0 or N > 10000.
std::vector<SweepRow> RunSweep(const ExperimentConfig& config,
                               const Codec& codec,
                               const std::vector<double>& eta_grid,
                               const std::vector<size_t>& iters_grid);
std::string SweepCsv(const std::vector<SweepRow>& rows);

struct AnalysisReport {
  TaylorEstimate estimate;
  size_t dimension = 0;
  double eta = 0.0;
  double dt = 0.0;
  std::optional<EtaInterval> frobenius_interval;  // nullopt: bound-unavailable
  std::optional<EtaInterval> spectral_interval;
  ContractionReport contraction;
};

AnalysisReport Analyze(const Codec& codec, const Image& f0,
                       const LoopConfig& loop);
std::string AnalysisJson(const AnalysisReport& report);

// Writes abs.png (clamped) and logic.png (0/255) into `out_dir`.
DifferenceImages WriteDifferenceImages(const Image& a, const Image& b,
                                       double threshold,
                                       const std::filesystem::path& out_dir);

// Writes `text` to `path`, creating parent directories.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace cic

#endif  // CIC_HARNESS_H_
