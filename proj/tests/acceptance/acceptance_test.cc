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

// Acceptance checks, one PASS/FAIL line per criterion. Exits non-zero if
// any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cic/codec.h"
#include "cic/harness.h"
#include "cic/image.h"
#include "cic/loop.h"
#include "cic/metrics.h"
#include "cic/synthetic.h"
#include "cic/taylor.h"

namespace {

namespace fs = std::filesystem;
using namespace cic;

struct Outcome {
  bool pass = true;
  std::string detail;
  void Check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double L2(const Image& a, const Image& b) {
  long double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a.data()[i]) - b.data()[i];
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s));
}

double LInf(const Image& a, const Image& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("cic_accept_" + std::to_string(::getpid()) + "_" + tag);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class CountingCodec final : public Codec {
 public:
  explicit CountingCodec(const Codec& inner) : inner_(inner) {}
  CodecDescriptor Descriptor() const override { return inner_.Descriptor(); }
  Bitstream Encode(const Image& img) const override {
    ++calls;
    return inner_.Encode(img);
  }
  Image Decode(const Bitstream& bs) const override {
    ++calls;
    return inner_.Decode(bs);
  }
  Image Roundtrip(const Image& img) const override {
    ++calls;
    return inner_.Roundtrip(img);
  }
  mutable size_t calls = 0;

 private:
  const Codec& inner_;
};

// Affine contraction law.
Outcome Criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const Image f0 = RandomImage(32, 32, 3, 2026);
  const AffineCodec codec(0.5, 10);
  const Image f_d0 = RunSic(codec, f0).decoded;
  LoopConfig c;
  c.eta = 1;
  c.dt = 1;
  c.max_iters = 40;
  c.init_mode = InitMode::kDecoded;
  c.select_mode = SelectMode::kFinal;
  std::vector<double> errors;
  const LoopResult r = RunCic(codec, f_d0, c, nullptr,
                              [&](const LoopState& s) { errors.push_back(L2(s.f, f0)); });
  errors.push_back(L2(r.output, f0));
  o.Check(errors.size() == 41, "expected 41 iterates");
  double worst = 0;
  for (size_t k = 1; k < errors.size(); ++k) {
    worst = std::max(worst, std::abs(errors[k] / errors[k - 1] - 0.5) / 0.5);
  }
  o.Check(worst <= 1e-9, "ratio deviates by " + std::to_string(worst));
  const double linf = LInf(r.output, f0);
  o.Check(linf < 1e-4, "||f_N - f0||inf = " + std::to_string(linf));
  const double t = Seconds(start);
  o.Check(t < 1.0, "runtime " + std::to_string(t) + " s");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max ratio deviation %.3g, ||f_40 - f0||inf = %.3g, %.3f s",
                  worst, linf, t);
    o.detail = buf;
  }
  return o;
}

// Divergence beyond the spectral bound.
Outcome Criterion2() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const Image f0 = RandomImage(32, 32, 3, 2026);
  const AffineCodec codec(0.5, 10);
  LoopConfig c;
  c.eta = 5;
  c.max_iters = 40;
  const LoopResult r = RunCic(codec, RunSic(codec, f0).decoded, c);
  size_t increases = 0;
  for (size_t k = 1; k < r.residual_trace.size(); ++k) {
    increases += r.residual_trace[k] > r.residual_trace[k - 1];
  }
  o.Check(r.termination == Termination::kDiverged,
          "termination " + std::string(ToString(r.termination)));
  o.Check(increases <= 3, std::to_string(increases) + " increases recorded");
  const double t = Seconds(start);
  o.Check(t < 1.0, "runtime " + std::to_string(t) + " s");
  if (o.pass) {
    o.detail = "diverged after " + std::to_string(r.iterations_run) + " evaluations, " +
               std::to_string(increases) + " increases";
  }
  return o;
}

// Gain interval endpoints are exact and excluded.
Outcome Criterion3() {
  Outcome o;
  const EtaInterval iv = FrobeniusEtaInterval(1.0, 1.0, 4);
  o.Check(iv.lo == 0.5 && iv.hi == 1.5, "interval (" + std::to_string(iv.lo) + ", " +
                                            std::to_string(iv.hi) + ")");
  TaylorEstimate est;
  est.mu = 1.0;
  est.samples = {{0, 1.0}};
  est.sample_count = 1;
  for (double eta : {iv.lo, iv.hi}) {
    const ContractionReport r = MakeContractionReport(est, eta, 1.0, 4);
    o.Check(std::abs(r.frobenius_gap - 1.0) <= 1e-12,
            "gap " + std::to_string(r.frobenius_gap) + " at " + std::to_string(eta));
    o.Check(!r.frobenius_ok, "endpoint accepted");
  }
  if (o.pass) o.detail = "(0.5, 1.5), gap 1 at both endpoints";
  return o;
}

// Slope estimation.
Outcome Criterion4() {
  Outcome o;
  const Image f0 = RandomImage(16, 16, 3, 4);
  for (double a : {0.25, 0.5, 1.0}) {
    for (double eps : {0.5, 2.0}) {
      const TaylorEstimate e = EstimateMu(AffineCodec(a, 10), f0, eps, 32, 4);
      o.Check(std::abs(e.mu - a) <= 1e-9,
              "mu " + std::to_string(e.mu) + " for a " + std::to_string(a));
    }
  }
  const UniformQuantCodec quant(16);
  const Image flat = Image::Filled(8, 8, 3, 96);  // bin [88, 104)
  const TaylorEstimate e = EstimateMu(quant, flat, 2.0, 32, 4);
  o.Check(e.mu == 0.0, "quantizer mu " + std::to_string(e.mu));
  LoopConfig c;
  c.eta_mode = EtaMode::kAutoFromBound;
  c.max_iters = 2;
  const LoopResult r = RunCic(quant, flat, c);
  o.Check(r.eta_source == EtaSource::kBoundUnavailable, "fallback not taken");
  if (o.pass) o.detail = "affine slopes exact; quantizer mu = 0, bound-unavailable";
  return o;
}

// Direction of effect on the synthetic corpus.
Outcome Criterion5() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  TempDir dir("c5");
  WriteSyntheticCorpus(dir.path(), 20, 64, 64, 7);
  ExperimentConfig c;
  c.dataset_dir = dir.path();
  c.codec_spec = "builtin:downup?factor=2";
  c.loop.eta_mode = EtaMode::kAutoFromBound;
  c.loop.max_iters = 10;
  const RunReport r = RunExperiment(c);
  size_t improved = 0;
  for (const ReportRow& row : r.rows) improved += row.ok() && row.psnr_cic >= row.psnr_sic;
  o.Check(r.rows.size() == 20 && r.summary.succeeded == 20, "not all images ran");
  o.Check(improved * 10 >= r.rows.size() * 8,
          std::to_string(improved) + "/" + std::to_string(r.rows.size()) + " improved");
  o.Check(r.summary.psnr.delta_mean > 0,
          "mean delta psnr " + std::to_string(r.summary.psnr.delta_mean));
  const double t = Seconds(start);
  o.Check(t < 30.0, "runtime " + std::to_string(t) + " s");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%zu/20 improved, mean delta psnr %+.4f dB, %.2f s",
                  improved, r.summary.psnr.delta_mean, t);
    o.detail = buf;
  }
  return o;
}

long double Byte(double v) { return std::clamp(std::round(static_cast<long double>(v)), 0.0L, 255.0L); }

// Metric oracles.
Outcome Criterion6() {
  Outcome o;
  auto rel = [](double got, long double want) {
    return std::abs(got - want) / std::max<long double>(1, std::abs(want));
  };
  for (uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 gen(seed);
    const size_t w = 1 + gen() % 24, h = 1 + gen() % 24, ch = gen() % 2 ? 3 : 1;
    std::uniform_real_distribution<double> base(-20, 275), noise(-40, 40);
    Image a(w, h, ch), b(w, h, ch);
    for (size_t i = 0; i < a.size(); ++i) {
      a.mutable_data()[i] = base(gen);
      b.mutable_data()[i] = a.data()[i] + noise(gen);
    }
    const long double n = a.size();
    long double sse = 0, ma = 0, mb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      const long double x = Byte(a.data()[i]), y = Byte(b.data()[i]);
      sse += (x - y) * (x - y);
      ma += x;
      mb += y;
    }
    ma /= n;
    mb /= n;
    long double va = 0, vb = 0, cov = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      const long double x = Byte(a.data()[i]) - ma, y = Byte(b.data()[i]) - mb;
      va += x * x;
      vb += y * y;
      cov += x * y;
    }
    va /= n;
    vb /= n;
    cov /= n;
    const long double c1 = 6.5025L, c2 = 58.5225L;
    const long double ssim =
        (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    const Psnr p = ComputePsnr(a, b);
    if (sse == 0) {
      o.Check(p.infinite, "missing infinite flag");
    } else {
      o.Check(rel(p.db, 10 * std::log10(65025.0L * n / sse)) <= 1e-9,
              "psnr mismatch at seed " + std::to_string(seed));
    }
    o.Check(rel(ComputeSsim(a, b), ssim) <= 1e-9, "ssim mismatch at seed " + std::to_string(seed));
    const uint64_t bits = 1 + gen() % 100000;
    const Bpsp rate = ComputeBpsp(bits, 8, w, h, ch);
    o.Check(rel(rate.bpsp, bits / (8.0L * n)) <= 1e-9 && rel(rate.bpsp_raw, bits / n) <= 1e-9,
            "bpsp mismatch at seed " + std::to_string(seed));

    // Difference images against a per-pixel loop.
    const double threshold = static_cast<double>(gen() % 40);
    const DifferenceImages d = ComputeDifferenceImages(a, b, threshold);
    for (size_t y = 0; y < h; ++y) {
      for (size_t x = 0; x < w; ++x) {
        double m = 0;
        for (size_t k = 0; k < ch; ++k) m = std::max(m, std::abs(a.at(y, x, k) - b.at(y, x, k)));
        o.Check(d.abs_img.at(y, x, 0) == m, "abs map mismatch");
        o.Check(d.logic_img.at(y, x, 0) == (m > threshold ? 1.0 : 0.0), "logic map mismatch");
      }
    }
  }
  const Psnr worked = ComputePsnr(Image::Filled(2, 2, 1, 0), Image::Filled(2, 2, 1, 16));
  o.Check(std::abs(worked.db - 24.0484) < 5e-5, "worked psnr " + worked.ToString());
  const double ssim = ComputeSsim(Image::Filled(2, 2, 1, 100), Image::Filled(2, 2, 1, 110));
  // Exact ratio 0.99547644...; 0.995477 is the six-place figure.
  o.Check(std::abs(ssim - 0.995477) < 1e-6, "worked ssim " + std::to_string(ssim));
  const Image f = RandomImage(8, 8, 3, 1);
  o.Check(ComputePsnr(f, f).infinite, "psnr(f, f) not infinite");
  const DifferenceImages edge =
      ComputeDifferenceImages(Image(2, 1, 1, {106, 105}), Image(2, 1, 1, {100, 100}), 5);
  o.Check(edge.logic_img == Image(2, 1, 1, {1, 0}), "threshold not strict");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "50 pairs match; psnr %s dB, ssim %.6f", worked.ToString().c_str(),
                  ssim);
    o.detail = buf;
  }
  return o;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(CIC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Evaluation count and run determinism.
Outcome Criterion7() {
  Outcome o;
  const AffineCodec inner(0.5, 10);
  const Image f_d0 = RunSic(inner, RandomImage(16, 16, 3, 3)).decoded;
  for (size_t n : {1, 5, 10, 40}) {
    CountingCodec codec(inner);
    LoopConfig c;
    c.eta = 0.1;
    c.max_iters = n;
    c.stop_tol = 0;
    c.divergence_patience = 0;
    const LoopResult r = RunCic(codec, f_d0, c);
    o.Check(codec.calls == n && r.iterations_run == n,
            std::to_string(codec.calls) + " evaluations for N = " + std::to_string(n));
  }

  TempDir data("c7data"), out_a("c7a"), out_b("c7b");
  WriteSyntheticCorpus(data.path(), 4, 32, 32, 11);
  const std::string common = " --dataset " + data.path().string() +
                             " --codec 'builtin:blockdct?quality=30' --init random"
                             " --eta-mode auto --reencode --save-images --seed 99 --out ";
  o.Check(RunCli("run" + common + out_a.path().string()) == 0, "first run failed");
  o.Check(RunCli("run" + common + out_b.path().string()) == 0, "second run failed");
  size_t files = 0;
  for (const auto& e : fs::directory_iterator(out_a.path())) {
    ++files;
    o.Check(ReadFile(e.path()) == ReadFile(out_b.path() / e.path().filename()),
            e.path().filename().string() + " differs");
  }
  size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(out_b.path())) ++files_b;
  o.Check(files > 0 && files == files_b, "output file sets differ");
  if (o.pass) {
    o.detail = "N evaluations for N in {1,5,10,40}; " + std::to_string(files) +
               " output files byte-identical";
  }
  return o;
}

bool SameResult(const LoopResult& a, const LoopResult& b) {
  return a.output == b.output && a.iterations_run == b.iterations_run &&
         a.termination == b.termination && a.residual_trace == b.residual_trace &&
         a.selected_iteration == b.selected_iteration && a.eta_used == b.eta_used;
}

// Tiling degeneracy.
Outcome Criterion8() {
  Outcome o;
  const Image f0 = RandomImage(48, 40, 3, 8);
  for (const char* spec : {"builtin:downup?factor=2", "builtin:blockdct?quality=50",
                           "builtin:affine?a=0.5&b=10"}) {
    const auto codec = MakeCodec(std::string(spec));
    const Image f_d0 = RunSic(*codec, f0).decoded;
    LoopConfig c;
    c.init_mode = InitMode::kRandom;
    c.eta_mode = EtaMode::kAutoFromBound;
    c.seed = 3;
    const LoopResult untiled = RunCic(*codec, f_d0, c);
    c.tile = 48;
    o.Check(SameResult(RunCicTiled(*codec, f_d0, c), untiled),
            std::string(spec) + ": single tile differs");
  }
  const AffineCodec affine(0.5, 10);
  const Image f_d0 = RunSic(affine, f0).decoded;
  LoopConfig c;
  c.max_iters = 12;
  const LoopResult untiled = RunCic(affine, f_d0, c);
  for (size_t tile : {8, 16, 24}) {
    c.tile = tile;
    const LoopResult tiled = RunCicTiled(affine, f_d0, c);
    o.Check(tiled.output == untiled.output, "affine tile " + std::to_string(tile) + " differs");
  }
  if (o.pass) o.detail = "single tile bit-identical; affine tiles 8/16/24 identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"affine contraction law", Criterion1},
      {"divergence beyond the spectral bound", Criterion2},
      {"gain interval endpoints", Criterion3},
      {"slope estimation", Criterion4},
      {"direction of effect on synthetic corpus", Criterion5},
      {"metric oracles", Criterion6},
      {"evaluation count and determinism", Criterion7},
      {"tiling degeneracy", Criterion8},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
