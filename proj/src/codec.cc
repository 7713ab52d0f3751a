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

#include "cic/codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "cic/byte_io.h"
#include "cic/error.h"

namespace cic {

namespace {

constexpr std::array<double, 64> kLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

ContainerHeader MakeHeader(BuiltinCodecId id, const Image& img) {
  if (img.width() > UINT32_MAX || img.height() > UINT32_MAX) {
    throw Error(ErrorCode::kUnsupportedDimensions, "image too large");
  }
  ContainerHeader h;
  h.codec_id = id;
  h.width = static_cast<uint32_t>(img.width());
  h.height = static_cast<uint32_t>(img.height());
  h.channels = static_cast<uint8_t>(img.channels());
  return h;
}

std::array<uint8_t, 8> DoubleParam(double v) {
  std::vector<uint8_t> bytes;
  ByteWriter(&bytes).F64BE(v);
  std::array<uint8_t, 8> out{};
  std::copy(bytes.begin(), bytes.end(), out.begin());
  return out;
}

double ReadDoubleParam(const std::array<uint8_t, 8>& params) {
  return *ByteReader(params).F64BE();
}

ContainerHeader ParseFor(BuiltinCodecId expected, const Bitstream& bs,
                         std::span<const uint8_t>* body) {
  ContainerHeader h = ReadContainer(bs.payload, body);
  if (h.codec_id != expected) {
    throw Error(ErrorCode::kMalformedBitstream,
                "bitstream codec id " +
                    std::to_string(static_cast<int>(h.codec_id)) +
                    " does not match decoder " +
                    std::to_string(static_cast<int>(expected)));
  }
  return h;
}

size_t SampleCount(const ContainerHeader& h) {
  return size_t{h.width} * h.height * h.channels;
}

std::vector<int64_t> ReadSymbols(std::span<const uint8_t> body, size_t count) {
  // Every varint occupies at least one byte.
  if (body.size() < count) {
    throw Error(ErrorCode::kMalformedBitstream, "truncated symbols");
  }
  ByteReader reader(body);
  std::vector<int64_t> symbols(count);
  for (auto& s : symbols) {
    auto v = reader.SignedVarint();
    if (!v) throw Error(ErrorCode::kMalformedBitstream, "truncated symbols");
    s = *v;
  }
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::kMalformedBitstream, "trailing bytes after symbols");
  }
  return symbols;
}

std::vector<uint8_t> WriteSymbols(std::span<const int64_t> symbols) {
  std::vector<uint8_t> body;
  ByteWriter w(&body);
  for (int64_t s : symbols) w.SignedVarint(s);
  return body;
}

// Orthonormal 8-point DCT-II basis, basis[u][x].
const std::array<std::array<double, 8>, 8>& DctBasis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> m{};
    for (int u = 0; u < 8; ++u) {
      const double scale = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        m[u][x] = scale * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return m;
  }();
  return basis;
}

using Block = std::array<double, 64>;

Block ForwardDct(const Block& in) {
  const auto& m = DctBasis();
  Block tmp{}, out{};
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int y = 0; y < 8; ++y) s += m[u][y] * in[y * 8 + x];
      tmp[u * 8 + x] = s;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int x = 0; x < 8; ++x) s += tmp[u * 8 + x] * m[v][x];
      out[u * 8 + v] = s;
    }
  return out;
}

Block InverseDct(const Block& in) {
  const auto& m = DctBasis();
  Block tmp{}, out{};
  for (int y = 0; y < 8; ++y)
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int u = 0; u < 8; ++u) s += m[u][y] * in[u * 8 + v];
      tmp[y * 8 + v] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v) s += tmp[y * 8 + v] * m[v][x];
      out[y * 8 + x] = s;
    }
  return out;
}

size_t RoundUp(size_t v, size_t multiple) {
  return (v + multiple - 1) / multiple * multiple;
}

// Bilinear sample of channel c at real coordinates, clamped to the border.
double SampleBilinear(const Image& img, double x, double y, size_t c) {
  const double max_x = static_cast<double>(img.width() - 1);
  const double max_y = static_cast<double>(img.height() - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const size_t x0 = static_cast<size_t>(std::floor(x));
  const size_t y0 = static_cast<size_t>(std::floor(y));
  const size_t x1 = std::min(x0 + 1, img.width() - 1);
  const size_t y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
  const double bottom = (1 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
  return (1 - fy) * top + fy * bottom;
}

}  // namespace

std::vector<uint8_t> WriteContainer(const ContainerHeader& header,
                                    std::span<const uint8_t> body) {
  std::vector<uint8_t> out;
  out.reserve(kContainerHeaderBytes + body.size());
  ByteWriter w(&out);
  w.Bytes(kContainerMagic);
  w.U8(static_cast<uint8_t>(header.codec_id));
  w.U32BE(header.width);
  w.U32BE(header.height);
  w.U8(header.channels);
  w.Bytes(header.params);
  w.Bytes(body);
  return out;
}

ContainerHeader ReadContainer(std::span<const uint8_t> bytes,
                              std::span<const uint8_t>* body) {
  ByteReader r(bytes);
  auto magic = r.Bytes(4);
  if (!magic || !std::equal(magic->begin(), magic->end(),
                            kContainerMagic.begin())) {
    throw Error(ErrorCode::kMalformedBitstream, "bad container magic");
  }
  ContainerHeader h;
  auto id = r.U8();
  auto width = r.U32BE();
  auto height = r.U32BE();
  auto channels = r.U8();
  auto params = r.Bytes(8);
  if (!id || !width || !height || !channels || !params) {
    throw Error(ErrorCode::kMalformedBitstream, "truncated container header");
  }
  if (*id < 1 || *id > 5) {
    throw Error(ErrorCode::kMalformedBitstream,
                "unknown codec id " + std::to_string(*id));
  }
  if (*width == 0 || *height == 0 || (*channels != 1 && *channels != 3)) {
    throw Error(ErrorCode::kMalformedBitstream, "invalid image dimensions");
  }
  if (uint64_t{*width} * *height > (uint64_t{1} << 36)) {
    throw Error(ErrorCode::kMalformedBitstream, "image dimensions too large");
  }
  h.codec_id = static_cast<BuiltinCodecId>(*id);
  h.width = *width;
  h.height = *height;
  h.channels = *channels;
  std::copy(params->begin(), params->end(), h.params.begin());
  if (body != nullptr) *body = bytes.subspan(r.position());
  return h;
}

uint64_t EmpiricalEntropyBits(std::span<const int64_t> symbols) {
  if (symbols.empty()) return 0;
  std::map<int64_t, uint64_t> histogram;
  for (int64_t s : symbols) ++histogram[s];
  const double n = static_cast<double>(symbols.size());
  double bits = 0.0;
  for (const auto& [symbol, count] : histogram) {
    const double c = static_cast<double>(count);
    bits += c * std::log2(n / c);
  }
  // Relative slack absorbs summation rounding when n*H is an exact integer.
  const double rounded = std::ceil(bits * (1.0 - 1e-12));
  return rounded > 0 ? static_cast<uint64_t>(rounded) : 0;
}

Image PadReplicate(const Image& img, size_t width, size_t height) {
  if (width < img.width() || height < img.height()) {
    throw Error(ErrorCode::kInvalidArgument, "padding cannot shrink");
  }
  if (width == img.width() && height == img.height()) return img;
  Image out(width, height, img.channels());
  for (size_t y = 0; y < height; ++y) {
    const size_t sy = std::min(y, img.height() - 1);
    for (size_t x = 0; x < width; ++x) {
      const size_t sx = std::min(x, img.width() - 1);
      for (size_t c = 0; c < img.channels(); ++c) {
        out.at(y, x, c) = img.at(sy, sx, c);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- Identity

CodecDescriptor IdentityCodec::Descriptor() const {
  return {"identity", true, 0.0, std::nullopt};
}

Bitstream IdentityCodec::Encode(const Image& img) const {
  std::vector<uint8_t> body(img.size());
  const auto src = img.data();
  for (size_t i = 0; i < body.size(); ++i) body[i] = ToByte(src[i]);
  return {WriteContainer(MakeHeader(BuiltinCodecId::kIdentity, img), body),
          8 * uint64_t{img.size()}};
}

Image IdentityCodec::Decode(const Bitstream& bs) const {
  std::span<const uint8_t> body;
  const ContainerHeader h = ParseFor(BuiltinCodecId::kIdentity, bs, &body);
  if (body.size() != SampleCount(h)) {
    throw Error(ErrorCode::kMalformedBitstream, "identity body size mismatch");
  }
  return Image(h.width, h.height, h.channels,
               std::vector<double>(body.begin(), body.end()));
}

// ------------------------------------------------------------------ Affine

AffineCodec::AffineCodec(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidArgument, "affine parameters must be finite");
  }
}

CodecDescriptor AffineCodec::Descriptor() const {
  return {"affine", true, a_, std::nullopt};
}

Image AffineCodec::Roundtrip(const Image& img) const {
  std::vector<double> out(img.size());
  const auto src = img.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = a_ * src[i] + b_;
  return Image(img.width(), img.height(), img.channels(), std::move(out));
}

Bitstream AffineCodec::Encode(const Image& img) const {
  const Image mapped = Roundtrip(img);
  std::vector<uint8_t> body;
  body.reserve(8 * mapped.size());
  ByteWriter w(&body);
  for (double v : mapped.data()) w.F64BE(v);
  ContainerHeader h = MakeHeader(BuiltinCodecId::kAffine, img);
  std::vector<uint8_t> params;
  ByteWriter pw(&params);
  // Informational only: decoding reads NF(f) from the body.
  pw.U32BE(std::bit_cast<uint32_t>(static_cast<float>(a_)));
  pw.U32BE(std::bit_cast<uint32_t>(static_cast<float>(b_)));
  std::copy(params.begin(), params.end(), h.params.begin());
  return {WriteContainer(h, body), 64 * uint64_t{img.size()}};
}

Image AffineCodec::Decode(const Bitstream& bs) const {
  std::span<const uint8_t> body;
  const ContainerHeader h = ParseFor(BuiltinCodecId::kAffine, bs, &body);
  const size_t n = SampleCount(h);
  if (body.size() != 8 * n) {
    throw Error(ErrorCode::kMalformedBitstream, "affine body size mismatch");
  }
  ByteReader r(body);
  std::vector<double> data(n);
  for (auto& v : data) {
    v = *r.F64BE();
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kMalformedBitstream, "non-finite sample");
    }
  }
  return Image(h.width, h.height, h.channels, std::move(data));
}

// ----------------------------------------------------------- UniformQuant

UniformQuantCodec::UniformQuantCodec(double step) : step_(step) {
  if (!(step > 0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kInvalidArgument, "quantizer step must be > 0");
  }
}

CodecDescriptor UniformQuantCodec::Descriptor() const {
  return {"uniform", true, step_, std::nullopt};
}

Bitstream UniformQuantCodec::Encode(const Image& img) const {
  std::vector<int64_t> symbols(img.size());
  const auto src = img.data();
  for (size_t i = 0; i < symbols.size(); ++i) {
    symbols[i] = static_cast<int64_t>(std::round(ToByte(src[i]) / step_));
  }
  ContainerHeader h = MakeHeader(BuiltinCodecId::kUniformQuant, img);
  h.params = DoubleParam(step_);
  return {WriteContainer(h, WriteSymbols(symbols)),
          kModelHeaderBits + EmpiricalEntropyBits(symbols)};
}

Image UniformQuantCodec::Decode(const Bitstream& bs) const {
  std::span<const uint8_t> body;
  const ContainerHeader h = ParseFor(BuiltinCodecId::kUniformQuant, bs, &body);
  const double step = ReadDoubleParam(h.params);
  if (!(step > 0) || !std::isfinite(step)) {
    throw Error(ErrorCode::kMalformedBitstream, "invalid quantizer step");
  }
  const std::vector<int64_t> symbols = ReadSymbols(body, SampleCount(h));
  std::vector<double> data(symbols.size());
  for (size_t i = 0; i < data.size(); ++i) {
    data[i] = step * static_cast<double>(symbols[i]);
  }
  return Image(h.width, h.height, h.channels, std::move(data));
}

// ---------------------------------------------------------------- BlockDct

std::array<double, 64> ScaledLuminanceTable(double quality) {
  if (!(quality > 0) || quality > 100) {
    throw Error(ErrorCode::kInvalidArgument, "quality must be in (0, 100]");
  }
  const double scale = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
  std::array<double, 64> table{};
  for (size_t i = 0; i < 64; ++i) {
    table[i] = std::clamp(std::floor((kLuminanceTable[i] * scale + 50) / 100),
                          1.0, 255.0);
  }
  return table;
}

BlockDctCodec::BlockDctCodec(double quality)
    : quality_(quality), table_(ScaledLuminanceTable(quality)) {}

CodecDescriptor BlockDctCodec::Descriptor() const {
  return {"blockdct", true, quality_, std::nullopt};
}

Bitstream BlockDctCodec::Encode(const Image& img) const {
  const size_t pw = RoundUp(img.width(), kBlock);
  const size_t ph = RoundUp(img.height(), kBlock);
  const Image padded = PadReplicate(img, pw, ph);
  std::vector<int64_t> symbols;
  symbols.reserve(padded.size());
  for (size_t c = 0; c < img.channels(); ++c) {
    for (size_t by = 0; by < ph; by += kBlock) {
      for (size_t bx = 0; bx < pw; bx += kBlock) {
        Block block{};
        for (size_t y = 0; y < kBlock; ++y)
          for (size_t x = 0; x < kBlock; ++x)
            block[y * kBlock + x] = padded.at(by + y, bx + x, c);
        const Block coeffs = ForwardDct(block);
        for (size_t k = 0; k < 64; ++k) {
          symbols.push_back(
              static_cast<int64_t>(std::round(coeffs[k] / table_[k])));
        }
      }
    }
  }
  ContainerHeader h = MakeHeader(BuiltinCodecId::kBlockDct, img);
  h.params = DoubleParam(quality_);
  return {WriteContainer(h, WriteSymbols(symbols)),
          kModelHeaderBits + EmpiricalEntropyBits(symbols)};
}

Image BlockDctCodec::Decode(const Bitstream& bs) const {
  std::span<const uint8_t> body;
  const ContainerHeader h = ParseFor(BuiltinCodecId::kBlockDct, bs, &body);
  const double quality = ReadDoubleParam(h.params);
  if (!(quality > 0) || !(quality <= 100)) {
    throw Error(ErrorCode::kMalformedBitstream, "invalid quality parameter");
  }
  const auto table = ScaledLuminanceTable(quality);
  const size_t pw = RoundUp(h.width, kBlock);
  const size_t ph = RoundUp(h.height, kBlock);
  const std::vector<int64_t> symbols = ReadSymbols(body, pw * ph * h.channels);
  Image padded(pw, ph, h.channels);
  size_t next = 0;
  for (size_t c = 0; c < h.channels; ++c) {
    for (size_t by = 0; by < ph; by += kBlock) {
      for (size_t bx = 0; bx < pw; bx += kBlock) {
        Block coeffs{};
        for (size_t k = 0; k < 64; ++k) {
          coeffs[k] = static_cast<double>(symbols[next++]) * table[k];
        }
        const Block pixels = InverseDct(coeffs);
        for (size_t y = 0; y < kBlock; ++y)
          for (size_t x = 0; x < kBlock; ++x)
            padded.at(by + y, bx + x, c) = pixels[y * kBlock + x];
      }
    }
  }
  return padded.Crop(0, 0, h.width, h.height);
}

// ------------------------------------------------------------------ DownUp

DownUpCodec::DownUpCodec(uint32_t factor) : factor_(factor) {
  if (factor == 0) {
    throw Error(ErrorCode::kInvalidArgument, "resampling factor must be >= 1");
  }
}

CodecDescriptor DownUpCodec::Descriptor() const {
  return {"downup", true, static_cast<double>(factor_), std::nullopt};
}

Bitstream DownUpCodec::Encode(const Image& img) const {
  const Image src = ClampRound(img);
  const size_t pw = RoundUp(src.width(), factor_);
  const size_t ph = RoundUp(src.height(), factor_);
  const Image padded = PadReplicate(src, pw, ph);
  const size_t lw = pw / factor_;
  const size_t lh = ph / factor_;
  const double f = factor_;
  std::vector<uint8_t> body;
  body.reserve(lw * lh * src.channels());
  for (size_t y = 0; y < lh; ++y) {
    const double sy = (y + 0.5) * f - 0.5;
    for (size_t x = 0; x < lw; ++x) {
      const double sx = (x + 0.5) * f - 0.5;
      for (size_t c = 0; c < src.channels(); ++c) {
        body.push_back(ToByte(SampleBilinear(padded, sx, sy, c)));
      }
    }
  }
  ContainerHeader h = MakeHeader(BuiltinCodecId::kDownUp, img);
  std::vector<uint8_t> params;
  ByteWriter(&params).U32BE(factor_);
  std::copy(params.begin(), params.end(), h.params.begin());
  return {WriteContainer(h, body), 8 * uint64_t{body.size()}};
}

Image DownUpCodec::Decode(const Bitstream& bs) const {
  std::span<const uint8_t> body;
  const ContainerHeader h = ParseFor(BuiltinCodecId::kDownUp, bs, &body);
  const uint32_t factor = *ByteReader(h.params).U32BE();
  if (factor == 0) {
    throw Error(ErrorCode::kMalformedBitstream, "zero resampling factor");
  }
  const size_t lw = RoundUp(h.width, factor) / factor;
  const size_t lh = RoundUp(h.height, factor) / factor;
  if (body.size() != lw * lh * h.channels) {
    throw Error(ErrorCode::kMalformedBitstream, "downup body size mismatch");
  }
  const Image low(lw, lh, h.channels,
                  std::vector<double>(body.begin(), body.end()));
  const double f = factor;
  Image out(h.width, h.height, h.channels);
  for (size_t y = 0; y < h.height; ++y) {
    const double sy = (y + 0.5) / f - 0.5;
    for (size_t x = 0; x < h.width; ++x) {
      const double sx = (x + 0.5) / f - 0.5;
      for (size_t c = 0; c < h.channels; ++c) {
        out.at(y, x, c) = SampleBilinear(low, sx, sy, c);
      }
    }
  }
  return out;
}

}  // namespace cic
