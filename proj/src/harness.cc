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

#include "cic/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cic/bridge.h"
#include "cic/error.h"
#include "json.hpp"

namespace cic {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

Error ConfigError(const std::string& what) {
  return Error(ErrorCode::kConfigInvalid, what);
}

double ParseReal(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("parameter " + key + " is not a finite number: " + text);
  }
  return v;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double PsnrValue(const Psnr& p) {
  return p.infinite ? std::numeric_limits<double>::infinity() : p.db;
}

// a - b where both may be +inf (equal infinities give 0).
double Delta(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
  return a - b;
}

// JSON number at the CSV precision; non-finite values become strings.
json JsonReal(double v) {
  if (!std::isfinite(v)) return FormatReal(v);
  return std::stod(FormatReal(v));
}

std::string StemOf(const std::string& id) { return fs::path(id).stem().string(); }

}  // namespace

CodecSpec ParseCodecSpec(std::string_view spec) {
  CodecSpec out;
  constexpr std::string_view kBuiltin = "builtin:";
  constexpr std::string_view kBridge = "bridge:";
  if (spec.starts_with(kBridge)) {
    out.kind = CodecSpec::Kind::kBridge;
    out.argv = SplitWhitespace(spec.substr(kBridge.size()));
    if (out.argv.empty()) throw ConfigError("bridge spec has no executable");
    return out;
  }
  if (!spec.starts_with(kBuiltin)) {
    throw ConfigError("codec spec must start with builtin: or bridge: (" +
                      std::string(spec) + ")");
  }
  std::string_view rest = spec.substr(kBuiltin.size());
  const size_t q = rest.find('?');
  out.kind = CodecSpec::Kind::kBuiltin;
  out.name = std::string(rest.substr(0, q));
  if (q != std::string_view::npos) {
    std::string_view query = rest.substr(q + 1);
    while (!query.empty()) {
      const size_t amp = query.find('&');
      const std::string_view pair = query.substr(0, amp);
      const size_t eq = pair.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == pair.size()) {
        throw ConfigError("malformed codec parameter: " + std::string(pair));
      }
      const std::string key(pair.substr(0, eq));
      if (out.params.count(key)) throw ConfigError("duplicate parameter " + key);
      out.params[key] = std::string(pair.substr(eq + 1));
      if (amp == std::string_view::npos) break;
      query = query.substr(amp + 1);
      if (query.empty()) throw ConfigError("trailing '&' in codec spec");
    }
  }

  static const std::map<std::string, std::vector<std::string>> kKnown = {
      {"identity", {}},
      {"affine", {"a", "b"}},
      {"uniform", {"step"}},
      {"blockdct", {"quality"}},
      {"downup", {"factor"}},
  };
  auto it = kKnown.find(out.name);
  if (it == kKnown.end()) throw ConfigError("unknown builtin codec: " + out.name);
  for (const auto& [key, value] : out.params) {
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
      throw ConfigError("codec " + out.name + " has no parameter " + key);
    }
  }
  return out;
}

std::unique_ptr<Codec> MakeCodec(const CodecSpec& spec,
                                 double bridge_timeout_seconds) {
  if (spec.kind == CodecSpec::Kind::kBridge) {
    return std::make_unique<bridge::BridgeCodec>(
        bridge::BridgeSession::Open(spec.argv, bridge_timeout_seconds));
  }
  auto real = [&](const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : ParseReal(key, it->second);
  };
  try {
    if (spec.name == "identity") return std::make_unique<IdentityCodec>();
    if (spec.name == "affine") {
      return std::make_unique<AffineCodec>(real("a", 0.5), real("b", 0.0));
    }
    if (spec.name == "uniform") {
      return std::make_unique<UniformQuantCodec>(real("step", 16.0));
    }
    if (spec.name == "blockdct") {
      return std::make_unique<BlockDctCodec>(real("quality", 50.0));
    }
    if (spec.name == "downup") {
      const double f = real("factor", 2.0);
      if (f < 1 || f > 64 || f != std::floor(f)) {
        throw ConfigError("downup factor must be an integer in [1, 64]");
      }
      return std::make_unique<DownUpCodec>(static_cast<uint32_t>(f));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown builtin codec: " + spec.name);
}

std::unique_ptr<Codec> MakeCodec(std::string_view spec,
                                 double bridge_timeout_seconds) {
  return MakeCodec(ParseCodecSpec(spec), bridge_timeout_seconds);
}

ExperimentConfig ExperimentConfigFromJson(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  // Counts must be non-negative integer literals; get<size_t>() would wrap -1.
  auto count = [](const json& v, const std::string& key) -> uint64_t {
    if (!v.is_number_unsigned()) {
      throw ConfigError(key + " must be a non-negative integer");
    }
    return v.get<uint64_t>();
  };

  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dataset") c.dataset_dir = v.get<std::string>();
      else if (key == "codec") c.codec_spec = v.get<std::string>();
      else if (key == "eta") c.loop.eta = v.get<double>();
      else if (key == "dt") c.loop.dt = v.get<double>();
      else if (key == "iters") c.loop.max_iters = count(v, key);
      else if (key == "init") c.loop.init_mode = ParseInitMode(v.get<std::string>());
      else if (key == "tile") {
        if (v.is_null()) c.loop.tile.reset();
        else c.loop.tile = count(v, key);
      }
      else if (key == "eta_mode") c.loop.eta_mode = ParseEtaMode(v.get<std::string>());
      else if (key == "reencode") c.loop.reencode = v.get<bool>();
      else if (key == "threshold") c.threshold = v.get<double>();
      else if (key == "subpixel_bits") {
        const uint64_t bits = count(v, key);
        if (bits == 0 || bits > 32) throw ConfigError("subpixel_bits must be in [1, 32]");
        c.subpixel_bits = static_cast<uint32_t>(bits);
      }
      else if (key == "seed") c.seed = count(v, key);
      else if (key == "out") c.output_dir = v.get<std::string>();
      else if (key == "stop_tol") c.loop.stop_tol = v.get<double>();
      else if (key == "patience") c.loop.divergence_patience = count(v, key);
      else if (key == "select") c.loop.select_mode = ParseSelectMode(v.get<std::string>());
      else if (key == "probe_step") c.loop.probe_step = v.get<double>();
      else if (key == "probe_count") c.loop.probe_count = count(v, key);
      else if (key == "timeout") c.bridge_timeout_seconds = v.get<double>();
      else if (key == "save_images") c.save_images = v.get<bool>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  c.loop.seed = c.seed;
  return c;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ExperimentConfigFromJson(ss.str());
}

std::vector<fs::path> DiscoverImages(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kFileNotFound, "no such dataset directory: " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png" || ext == ".ppm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no .png or .ppm images in " + dir.string());
  }
  return out;
}

ImageOutcome EvaluateImage(const Codec& codec, const Image& f0,
                           const std::string& id,
                           const ExperimentConfig& config) {
  ImageOutcome out;
  ReportRow& row = out.row;
  row.image = id;
  LoopConfig loop = config.loop;
  loop.seed = config.seed;

  auto observer = [&](const LoopState& s) {
    out.trajectory.push_back(
        {s.n - 1, s.residual_norm, PsnrValue(ComputePsnr(s.f, f0))});
  };
  try {
    SicResult sic;
    LoopResult r = RunPipeline(codec, f0, loop, &sic, observer);
    if (loop.tile) {
      for (size_t k = 0; k < r.residual_trace.size(); ++k) {
        out.trajectory.push_back({k, r.residual_trace[k], std::nullopt});
      }
    }
    const MetricsReport m_sic = ComputeMetrics(
        sic.decoded, f0, sic.bitstream.bit_length, config.subpixel_bits);
    const uint64_t bits_cic = r.reencoded_bitstream
                                  ? r.reencoded_bitstream->bit_length
                                  : sic.bitstream.bit_length;
    const MetricsReport m_cic =
        ComputeMetrics(r.output, f0, bits_cic, config.subpixel_bits);

    row.psnr_sic = PsnrValue(m_sic.psnr);
    row.psnr_cic = PsnrValue(m_cic.psnr);
    row.delta_psnr = Delta(row.psnr_cic, row.psnr_sic);
    row.ssim_sic = m_sic.ssim;
    row.ssim_cic = m_cic.ssim;
    row.delta_ssim = row.ssim_cic - row.ssim_sic;
    row.bpsp_sic = m_sic.rate.bpsp;
    row.bpsp_cic = m_cic.rate.bpsp;
    row.delta_bpsp = row.bpsp_sic - row.bpsp_cic;
    row.bpsp_raw_sic = m_sic.rate.bpsp_raw;
    row.bpsp_raw_cic = m_cic.rate.bpsp_raw;
    row.iterations = r.iterations_run;
    row.termination = std::string(ToString(r.termination));
    row.eta = r.eta_used;
    if (r.termination == Termination::kCodecError) {
      row.error = r.error.empty() ? "codec failure" : r.error;
    }
    out.sic = std::move(sic.decoded);
    out.cic = std::move(r.output);
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    row = ReportRow{};
    row.image = id;
    row.termination = "failed";
    row.error = msg.empty() ? "failed" : msg;
  }
  return out;
}

RunSummary Summarize(const std::vector<ReportRow>& rows) {
  RunSummary s;
  s.images = rows.size();
  struct Acc {
    double sic = 0, cic = 0, delta = 0;
    double max = -std::numeric_limits<double>::infinity();
  };
  Acc psnr, ssim, bpsp;
  auto add = [](Acc& a, double sic, double cic, double delta) {
    a.sic += sic;
    a.cic += cic;
    a.delta += delta;
    a.max = std::max(a.max, delta);
  };
  for (const ReportRow& r : rows) {
    if (!r.ok()) continue;
    ++s.succeeded;
    add(psnr, r.psnr_sic, r.psnr_cic, r.delta_psnr);
    add(ssim, r.ssim_sic, r.ssim_cic, r.delta_ssim);
    add(bpsp, r.bpsp_sic, r.bpsp_cic, r.delta_bpsp);
  }
  auto finish = [&](const Acc& a) {
    MetricSummary m;
    if (s.succeeded == 0) return m;
    const double n = static_cast<double>(s.succeeded);
    m.sic_mean = a.sic / n;
    m.cic_mean = a.cic / n;
    m.delta_mean = a.delta / n;
    m.delta_max = a.max;
    return m;
  };
  s.psnr = finish(psnr);
  s.ssim = finish(ssim);
  s.bpsp = finish(bpsp);
  return s;
}

std::string FormatReal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

namespace {

const char* const kRowColumns =
    "image,psnr_sic,psnr_cic,delta_psnr,ssim_sic,ssim_cic,delta_ssim,"
    "bpsp_sic,bpsp_cic,delta_bpsp,iterations,termination,bpsp_raw_sic,"
    "bpsp_raw_cic,eta,error";

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string RowFields(const ReportRow& r) {
  std::string s = FormatReal(r.psnr_sic) + "," + FormatReal(r.psnr_cic) + "," +
                  FormatReal(r.delta_psnr) + "," + FormatReal(r.ssim_sic) + "," +
                  FormatReal(r.ssim_cic) + "," + FormatReal(r.delta_ssim) + "," +
                  FormatReal(r.bpsp_sic) + "," + FormatReal(r.bpsp_cic) + "," +
                  FormatReal(r.delta_bpsp) + "," + std::to_string(r.iterations) +
                  "," + r.termination + "," + FormatReal(r.bpsp_raw_sic) + "," +
                  FormatReal(r.bpsp_raw_cic) + "," + FormatReal(r.eta) + "," +
                  CsvField(r.error);
  return s;
}

json RowJson(const ReportRow& r) {
  json j;
  j["image"] = r.image;
  j["psnr_sic"] = JsonReal(r.psnr_sic);
  j["psnr_cic"] = JsonReal(r.psnr_cic);
  j["delta_psnr"] = JsonReal(r.delta_psnr);
  j["ssim_sic"] = JsonReal(r.ssim_sic);
  j["ssim_cic"] = JsonReal(r.ssim_cic);
  j["delta_ssim"] = JsonReal(r.delta_ssim);
  j["bpsp_sic"] = JsonReal(r.bpsp_sic);
  j["bpsp_cic"] = JsonReal(r.bpsp_cic);
  j["delta_bpsp"] = JsonReal(r.delta_bpsp);
  j["iterations"] = r.iterations;
  j["termination"] = r.termination;
  j["bpsp_raw_sic"] = JsonReal(r.bpsp_raw_sic);
  j["bpsp_raw_cic"] = JsonReal(r.bpsp_raw_cic);
  j["eta"] = JsonReal(r.eta);
  j["error"] = r.error;
  return j;
}

}  // namespace

std::string RowsCsv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kRowColumns) + "\n";
  for (const ReportRow& r : rows) out += CsvField(r.image) + "," + RowFields(r) + "\n";
  return out;
}

std::string SummaryCsv(const RunSummary& s) {
  std::string out = "metric,sic_mean,cic_mean,delta,delta_m,images,succeeded\n";
  auto line = [&](const char* name, const MetricSummary& m) {
    out += std::string(name) + "," + FormatReal(m.sic_mean) + "," +
           FormatReal(m.cic_mean) + "," + FormatReal(m.delta_mean) + "," +
           FormatReal(m.delta_max) + "," + std::to_string(s.images) + "," +
           std::to_string(s.succeeded) + "\n";
  };
  line("psnr", s.psnr);
  line("ssim", s.ssim);
  line("bpsp", s.bpsp);
  return out;
}

std::string ReportJson(const RunReport& report) {
  json j;
  j["rows"] = json::array();
  for (const ReportRow& r : report.rows) j["rows"].push_back(RowJson(r));
  json s;
  s["images"] = report.summary.images;
  s["succeeded"] = report.summary.succeeded;
  auto metric = [](const MetricSummary& m) {
    json o;
    o["sic_mean"] = JsonReal(m.sic_mean);
    o["cic_mean"] = JsonReal(m.cic_mean);
    o["delta"] = JsonReal(m.delta_mean);
    o["delta_m"] = JsonReal(m.delta_max);
    return o;
  };
  s["psnr"] = metric(report.summary.psnr);
  s["ssim"] = metric(report.summary.ssim);
  s["bpsp"] = metric(report.summary.bpsp);
  j["summary"] = s;
  return j.dump(2) + "\n";
}

void WriteTextFile(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
}

RunReport RunExperiment(const ExperimentConfig& config, const Codec& codec) {
  ValidateConfig(config.loop);
  const auto paths = DiscoverImages(config.dataset_dir);
  RunReport report;
  for (const fs::path& path : paths) {
    const std::string id = path.filename().string();
    ImageOutcome outcome;
    try {
      const Image f0 = LoadImage(path);
      outcome = EvaluateImage(codec, f0, id, config);
    } catch (const std::exception& e) {
      outcome.row.image = id;
      outcome.row.termination = "failed";
      outcome.row.error = e.what();
    }
    if (!config.output_dir.empty()) {
      const std::string stem = StemOf(id);
      if (config.write_trajectories && !outcome.trajectory.empty()) {
        std::string csv = "n,residual_norm,psnr_vs_oracle\n";
        for (const auto& p : outcome.trajectory) {
          csv += std::to_string(p.n) + "," + FormatReal(p.residual_norm) + "," +
                 (p.psnr_vs_oracle ? FormatReal(*p.psnr_vs_oracle) : "") + "\n";
        }
        WriteTextFile(config.output_dir / ("traj_" + stem + ".csv"), csv);
      }
      if (config.save_images && outcome.sic && outcome.cic) {
        SaveImage(ClampRound(*outcome.sic), config.output_dir / ("sic_" + stem + ".png"));
        SaveImage(ClampRound(*outcome.cic), config.output_dir / ("cic_" + stem + ".png"));
      }
    }
    report.rows.push_back(std::move(outcome.row));
  }
  report.summary = Summarize(report.rows);
  if (!config.output_dir.empty()) {
    WriteTextFile(config.output_dir / "rows.csv", RowsCsv(report.rows));
    WriteTextFile(config.output_dir / "summary.csv", SummaryCsv(report.summary));
    WriteTextFile(config.output_dir / "report.json", ReportJson(report));
  }
  return report;
}

RunReport RunExperiment(const ExperimentConfig& config) {
  ValidateConfig(config.loop);
  DiscoverImages(config.dataset_dir);  // fail fast before spawning anything
  auto codec = MakeCodec(config.codec_spec, config.bridge_timeout_seconds);
  return RunExperiment(config, *codec);
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& config,
                               const Codec& codec,
                               const std::vector<double>& eta_grid,
                               const std::vector<size_t>& iters_grid) {
  if (eta_grid.empty() || iters_grid.empty()) {
    throw ConfigError("sweep grids must be non-empty");
  }
  for (double eta : eta_grid) {
    if (!std::isfinite(eta)) throw ConfigError("sweep eta must be finite");
  }
  for (size_t n : iters_grid) {
    if (n == 0 || n > 10000) throw ConfigError("sweep N must be in [1, 10000]");
  }
  ValidateConfig(config.loop);
  const auto paths = DiscoverImages(config.dataset_dir);

  std::vector<SweepRow> rows;
  for (const fs::path& path : paths) {
    const std::string id = path.filename().string();
    std::optional<Image> f0;
    std::string load_error;
    try {
      f0 = LoadImage(path);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (double eta : eta_grid) {
      for (size_t n : iters_grid) {
        SweepRow s{id, eta, n, {}};
        if (f0) {
          ExperimentConfig c = config;
          c.loop.eta = eta;
          c.loop.eta_mode = EtaMode::kManual;
          c.loop.max_iters = n;
          s.row = EvaluateImage(codec, *f0, id, c).row;
        } else {
          s.row.image = id;
          s.row.termination = "failed";
          s.row.error = load_error;
        }
        rows.push_back(std::move(s));
      }
    }
  }
  return rows;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "image,eta_grid,iters_grid," +
                    std::string(kRowColumns).substr(std::string("image,").size()) +
                    "\n";
  for (const SweepRow& s : rows) {
    out += CsvField(s.image) + "," + FormatReal(s.eta) + "," +
           std::to_string(s.iters) + "," + RowFields(s.row) + "\n";
  }
  return out;
}

AnalysisReport Analyze(const Codec& codec, const Image& f0,
                       const LoopConfig& loop) {
  ValidateConfig(loop);
  AnalysisReport r;
  r.dimension = f0.size();
  r.eta = loop.eta;
  r.dt = loop.dt;
  const size_t k = std::min(loop.probe_count, f0.size());
  r.estimate = EstimateMu(codec, f0, loop.probe_step, k, loop.seed);
  try {
    r.frobenius_interval = FrobeniusEtaInterval(r.estimate.mu, loop.dt, r.dimension);
    r.spectral_interval = SpectralEtaInterval(r.estimate.mu, loop.dt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMuZero) throw;
  }
  r.contraction = MakeContractionReport(r.estimate, loop.eta, loop.dt, r.dimension);
  return r;
}

std::string AnalysisJson(const AnalysisReport& r) {
  // Full precision here: these are analytic quantities, not table entries.
  json j;
  j["mu"] = r.estimate.mu;
  j["probe_step"] = r.estimate.probe_step;
  j["sample_count"] = r.estimate.sample_count;
  j["seed"] = r.estimate.seed;
  j["dimension"] = r.dimension;
  j["eta"] = r.eta;
  j["dt"] = r.dt;
  auto interval = [](const std::optional<EtaInterval>& iv) -> json {
    if (!iv) return "bound-unavailable";
    return json::array({iv->lo, iv->hi});
  };
  j["eta_interval"] = interval(r.frobenius_interval);
  j["spectral_interval"] = interval(r.spectral_interval);
  json c;
  c["frobenius_gap"] = r.contraction.frobenius_gap;
  c["frobenius_ok"] = r.contraction.frobenius_ok;
  c["spectral_gap"] = r.contraction.spectral_gap;
  c["spectral_ok"] = r.contraction.spectral_ok;
  j["contraction"] = c;
  json samples = json::array();
  for (const auto& s : r.estimate.samples) samples.push_back({s.index, s.slope});
  j["samples"] = samples;
  return j.dump(2) + "\n";
}

DifferenceImages WriteDifferenceImages(const Image& a, const Image& b,
                                       double threshold,
                                       const fs::path& out_dir) {
  DifferenceImages d = ComputeDifferenceImages(a, b, threshold);
  fs::create_directories(out_dir);
  SaveImage(ClampRound(d.abs_img), out_dir / "abs.png");
  SaveImage(LogicForDisplay(d.logic_img), out_dir / "logic.png");
  return d;
}

}  // namespace cic
