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

// cic: closed-loop refinement experiments around any image codec.
//
// Exit status: 0 success, 2 invalid configuration or usage, 1 other errors.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cic/error.h"
#include "cic/harness.h"
#include "cic/image.h"
#include "cic/metrics.h"
#include "cic/synthetic.h"
#include "json.hpp"

namespace {

using cic::Error;
using cic::ErrorCode;
using cic::ExperimentConfig;

// Flags shared by run, sweep and analyze. Values only override the config
// file when given on the command line.
struct CommonFlags {
  std::string config_path;
  std::string dataset, codec, out, init, eta_mode, select;
  double eta = 0, dt = 0, threshold = 0, stop_tol = 0, probe_step = 0;
  double timeout = 0;
  size_t iters = 0, tile = 0, patience = 0, probe_count = 0;
  uint32_t subpixel_bits = 0;
  uint64_t seed = 0;
  bool reencode = false, save_images = false;
  std::vector<CLI::Option*> given;
  CLI::App* app = nullptr;

  void Register(CLI::App* sub) {
    app = sub;
    sub->add_option("--config", config_path, "JSON config; flags override it");
    sub->add_option("--dataset", dataset, "directory of .png/.ppm images");
    sub->add_option("--codec", codec,
                    "builtin:<name>?k=v&... or bridge:<executable> [args]");
    sub->add_option("--eta", eta, "feedback gain");
    sub->add_option("--dt", dt, "Euler step");
    sub->add_option("--iters", iters, "iteration count N");
    sub->add_option("--init", init, "zero|random|decoded");
    sub->add_option("--tile", tile, "tile edge in pixels (>= 8)");
    sub->add_option("--eta-mode", eta_mode, "manual|auto");
    sub->add_flag("--reencode", reencode, "re-encode the CIC output");
    sub->add_option("--threshold", threshold, "difference threshold T");
    sub->add_option("--subpixel-bits", subpixel_bits, "bits per sub-pixel S");
    sub->add_option("--seed", seed, "seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--stop-tol", stop_tol, "residual norm stop tolerance");
    sub->add_option("--patience", patience,
                    "residual increases before divergence (0 disables)");
    sub->add_option("--select", select, "final|best_residual|best_oracle");
    sub->add_option("--probe-step", probe_step, "slope probe step");
    sub->add_option("--probe-count", probe_count, "slope probe count");
    sub->add_option("--timeout", timeout, "bridge timeout in seconds");
    sub->add_flag("--save-images", save_images, "write SIC/CIC outputs");
  }

  bool Has(const char* name) const { return app->count(name) > 0; }

  ExperimentConfig Build() const {
    ExperimentConfig c;
    if (!config_path.empty()) c = cic::LoadExperimentConfig(config_path);
    if (Has("--dataset")) c.dataset_dir = dataset;
    if (Has("--codec")) c.codec_spec = codec;
    if (Has("--eta")) c.loop.eta = eta;
    if (Has("--dt")) c.loop.dt = dt;
    if (Has("--iters")) c.loop.max_iters = iters;
    if (Has("--init")) c.loop.init_mode = cic::ParseInitMode(init);
    if (Has("--tile")) c.loop.tile = tile;
    if (Has("--eta-mode")) c.loop.eta_mode = cic::ParseEtaMode(eta_mode);
    if (Has("--reencode")) c.loop.reencode = reencode;
    if (Has("--threshold")) c.threshold = threshold;
    if (Has("--subpixel-bits")) c.subpixel_bits = subpixel_bits;
    if (Has("--seed")) c.seed = seed;
    if (Has("--out")) c.output_dir = out;
    if (Has("--stop-tol")) c.loop.stop_tol = stop_tol;
    if (Has("--patience")) c.loop.divergence_patience = patience;
    if (Has("--select")) c.loop.select_mode = cic::ParseSelectMode(select);
    if (Has("--probe-step")) c.loop.probe_step = probe_step;
    if (Has("--probe-count")) c.loop.probe_count = probe_count;
    if (Has("--timeout")) c.bridge_timeout_seconds = timeout;
    if (Has("--save-images")) c.save_images = save_images;
    c.loop.seed = c.seed;
    if (c.subpixel_bits == 0) {
      throw Error(ErrorCode::kConfigInvalid, "subpixel bits must be >= 1");
    }
    return c;
  }
};

void PrintSummary(const cic::RunReport& report) {
  const auto& s = report.summary;
  std::printf("images %zu, succeeded %zu\n", s.images, s.succeeded);
  std::printf("%-6s %12s %12s %12s %12s\n", "metric", "sic", "cic", "delta",
              "delta_m");
  auto line = [](const char* name, const cic::MetricSummary& m) {
    std::printf("%-6s %12s %12s %12s %12s\n", name,
                cic::FormatReal(m.sic_mean).c_str(),
                cic::FormatReal(m.cic_mean).c_str(),
                cic::FormatReal(m.delta_mean).c_str(),
                cic::FormatReal(m.delta_max).c_str());
  };
  line("psnr", s.psnr);
  line("ssim", s.ssim);
  line("bpsp", s.bpsp);
  for (const auto& r : report.rows) {
    if (!r.ok()) std::fprintf(stderr, "%s: %s\n", r.image.c_str(), r.error.c_str());
  }
}

int Run(const CommonFlags& flags) {
  const ExperimentConfig c = flags.Build();
  const cic::RunReport report = cic::RunExperiment(c);
  PrintSummary(report);
  return 0;
}

int Sweep(const CommonFlags& flags, const std::vector<double>& etas,
          const std::vector<size_t>& iters) {
  const ExperimentConfig c = flags.Build();
  cic::ValidateConfig(c.loop);
  cic::DiscoverImages(c.dataset_dir);
  auto codec = cic::MakeCodec(c.codec_spec, c.bridge_timeout_seconds);
  const auto rows = cic::RunSweep(c, *codec, etas, iters);
  const std::string csv = cic::SweepCsv(rows);
  if (c.output_dir.empty()) {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    cic::WriteTextFile(c.output_dir / "sweep.csv", csv);
    std::printf("%zu rows -> %s\n", rows.size(),
                (c.output_dir / "sweep.csv").string().c_str());
  }
  return 0;
}

int Analyze(const CommonFlags& flags, const std::string& image_path) {
  const ExperimentConfig c = flags.Build();
  std::string path = image_path;
  if (path.empty()) {
    if (c.dataset_dir.empty()) {
      throw Error(ErrorCode::kConfigInvalid, "analyze needs --image or --dataset");
    }
    path = cic::DiscoverImages(c.dataset_dir).front().string();
  }
  const cic::Image f0 = cic::LoadImage(path);
  auto codec = cic::MakeCodec(c.codec_spec, c.bridge_timeout_seconds);
  const std::string text = cic::AnalysisJson(cic::Analyze(*codec, f0, c.loop));
  std::fwrite(text.data(), 1, text.size(), stdout);
  if (!c.output_dir.empty()) cic::WriteTextFile(c.output_dir / "analysis.json", text);
  return 0;
}

int Diff(const std::string& a, const std::string& b, double threshold,
         const std::string& out) {
  const cic::Image fa = cic::LoadImage(a);
  const cic::Image fb = cic::LoadImage(b);
  const auto d = cic::WriteDifferenceImages(fa, fb, threshold, out);
  size_t flagged = 0;
  for (double v : d.logic_img.data()) flagged += v > 0;
  std::printf("flagged %zu of %zu pixels (T = %s)\n", flagged, d.logic_img.size(),
              cic::FormatReal(threshold).c_str());
  return 0;
}

int Metrics(const std::string& test, const std::string& reference,
            uint64_t bits, uint32_t subpixel_bits, double threshold) {
  const cic::Image f = cic::LoadImage(test);
  const cic::Image f0 = cic::LoadImage(reference);
  nlohmann::ordered_json j;
  const cic::Psnr psnr = cic::ComputePsnr(f, f0);
  j["psnr"] = psnr.ToString();
  j["psnr_infinite"] = psnr.infinite;
  j["ssim"] = cic::FormatReal(cic::ComputeSsim(f, f0));
  if (bits > 0) {
    const cic::Bpsp rate = cic::ComputeBpsp(bits, subpixel_bits, f0.width(),
                                            f0.height(), f0.channels());
    j["bpsp"] = cic::FormatReal(rate.bpsp);
    j["bpsp_raw"] = cic::FormatReal(rate.bpsp_raw);
  }
  const auto d = cic::ComputeDifferenceImages(f, f0, threshold);
  size_t flagged = 0;
  for (double v : d.logic_img.data()) flagged += v > 0;
  j["threshold"] = cic::FormatReal(threshold);
  j["flagged_pixels"] = flagged;
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop image compression refinement"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, analyze_flags;
  auto* run = app.add_subcommand("run", "SIC vs CIC over a dataset");
  run_flags.Register(run);

  auto* sweep = app.add_subcommand("sweep", "grid over eta and N");
  sweep_flags.Register(sweep);
  std::vector<double> eta_grid;
  std::vector<size_t> iters_grid;
  sweep->add_option("--eta-grid", eta_grid, "gains, comma separated")
      ->delimiter(',');
  sweep->add_option("--iters-grid", iters_grid, "iteration counts, comma separated")
      ->delimiter(',');

  auto* analyze = app.add_subcommand("analyze", "slope estimate and gain bounds");
  analyze_flags.Register(analyze);
  std::string analyze_image;
  analyze->add_option("--image", analyze_image, "image to linearize at");

  auto* diff = app.add_subcommand("diff", "absolute and logic difference images");
  std::string diff_a, diff_b, diff_out = ".";
  double diff_t = 5.0;
  diff->add_option("a", diff_a, "test image")->required();
  diff->add_option("b", diff_b, "reference image")->required();
  diff->add_option("--threshold", diff_t, "threshold T");
  diff->add_option("--out", diff_out, "output directory");

  auto* metrics = app.add_subcommand("metrics", "PSNR, SSIM and BPSP of two images");
  std::string m_test, m_ref;
  uint64_t m_bits = 0;
  uint32_t m_s = cic::kDefaultSubpixelBits;
  double m_t = 5.0;
  metrics->add_option("test", m_test, "test image")->required();
  metrics->add_option("reference", m_ref, "reference image")->required();
  metrics->add_option("--bits", m_bits, "bitstream length B");
  metrics->add_option("--subpixel-bits", m_s, "bits per sub-pixel S");
  metrics->add_option("--threshold", m_t, "difference threshold T");

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic corpus");
  std::string s_out;
  size_t s_count = 20, s_size = 64;
  uint64_t s_seed = 0;
  synth->add_option("--out", s_out, "output directory")->required();
  synth->add_option("--count", s_count, "number of images");
  synth->add_option("--size", s_size, "edge length in pixels");
  synth->add_option("--seed", s_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return Run(run_flags);
    if (*sweep) return Sweep(sweep_flags, eta_grid, iters_grid);
    if (*analyze) return Analyze(analyze_flags, analyze_image);
    if (*diff) return Diff(diff_a, diff_b, diff_t, diff_out);
    if (*metrics) return Metrics(m_test, m_ref, m_bits, m_s, m_t);
    if (*synth) {
      if (s_count == 0 || s_size == 0) {
        throw Error(ErrorCode::kConfigInvalid, "count and size must be >= 1");
      }
      const auto paths = cic::WriteSyntheticCorpus(s_out, s_count, s_size, s_size, s_seed);
      std::printf("wrote %zu images to %s\n", paths.size(), s_out.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kConfigInvalid ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
