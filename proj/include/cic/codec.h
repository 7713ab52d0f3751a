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

#ifndef CIC_CODEC_H_
#define CIC_CODEC_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cic/image.h"

namespace cic {

// Opaque encoded payload plus the exact number of meaningful bits B used
// for rate accounting. Invariant: bit_length <= 8 * payload.size().
struct Bitstream {
  std::vector<uint8_t> payload;
  uint64_t bit_length = 0;

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

struct CodecDescriptor {
  std::string name;
  bool deterministic = true;
  double quality_param = 0.0;
  // Latent dimension d; nullopt when the codec does not expose it.
  std::optional<uint64_t> latent_dim;
};

// Encoder/decoder pair. Roundtrip() is the nonlinear map NF = DE(EN(.))
// that the refinement loop treats as a black box.
class Codec {
 public:
  virtual ~Codec() = default;

  virtual CodecDescriptor Descriptor() const = 0;
  virtual Bitstream Encode(const Image& img) const = 0;
  virtual Image Decode(const Bitstream& bs) const = 0;
  virtual Image Roundtrip(const Image& img) const { return Decode(Encode(img)); }
  // True when concurrent calls from several threads are allowed.
  virtual bool ThreadSafe() const { return true; }
};

// Container layout shared by all built-ins (bit-exact):
//   "CICS" | codec id u8 | W u32 BE | H u32 BE | C u8 | params[8] | body
inline constexpr std::array<uint8_t, 4> kContainerMagic = {'C', 'I', 'C', 'S'};
inline constexpr size_t kContainerHeaderBytes = 22;
// Fixed header cost charged by the entropy-sized codecs.
inline constexpr uint64_t kModelHeaderBits = 128;

enum class BuiltinCodecId : uint8_t {
  kIdentity = 1,
  kAffine = 2,
  kUniformQuant = 3,
  kBlockDct = 4,
  kDownUp = 5,
};

struct ContainerHeader {
  BuiltinCodecId codec_id = BuiltinCodecId::kIdentity;
  uint32_t width = 0;
  uint32_t height = 0;
  uint8_t channels = 0;
  std::array<uint8_t, 8> params{};
};

std::vector<uint8_t> WriteContainer(const ContainerHeader& header,
                                    std::span<const uint8_t> body);
// Parses and validates the header; `body` receives the bytes that follow.
// Throws kMalformedBitstream.
ContainerHeader ReadContainer(std::span<const uint8_t> bytes,
                              std::span<const uint8_t>* body);

// ceil(n * H) where H is the Shannon entropy (bits/symbol) of the empirical
// symbol histogram and n the symbol count. Zero for constant streams.
uint64_t EmpiricalEntropyBits(std::span<const int64_t> symbols);

// NF = identity on the clamp-rounded input; body = raw 8-bit samples,
// B = 8 * W * H * C.
class IdentityCodec final : public Codec {
 public:
  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;
};

// NF(f) = a * f + b elementwise on the unclamped real input; body = NF(f)
// as 64-bit floats, B = 64 * W * H * C. Exactly linear, so it is the
// analysis instrument for the contraction math.
class AffineCodec final : public Codec {
 public:
  AffineCodec(double a, double b);
  double a() const { return a_; }
  double b() const { return b_; }

  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;
  Image Roundtrip(const Image& img) const override;

 private:
  double a_;
  double b_;
};

// NF(f) = q * round(f / q) on the clamp-rounded input; body = varint
// symbols, B = 128 + EmpiricalEntropyBits(symbols).
class UniformQuantCodec final : public Codec {
 public:
  explicit UniformQuantCodec(double step);
  double step() const { return step_; }

  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;

 private:
  double step_;
};

// Toy JPEG-like transform codec: per channel, edge-replicate to a multiple
// of 8, orthonormal 8x8 DCT-II, divide by the quality-scaled standard
// luminance table, round, dequantize, inverse DCT, crop.
// B = 128 + EmpiricalEntropyBits(quantized coefficients).
class BlockDctCodec final : public Codec {
 public:
  static constexpr size_t kBlock = 8;

  explicit BlockDctCodec(double quality);
  double quality() const { return quality_; }
  const std::array<double, 64>& table() const { return table_; }

  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;

 private:
  double quality_;
  std::array<double, 64> table_;
};

// Quality-scaled standard luminance table, row-major, entries in [1,255].
std::array<double, 64> ScaledLuminanceTable(double quality);

// Bilinear downsample by an integer factor, 8-bit rounding of the low
// resolution samples (the body), bilinear upsample back to W x H.
// B = 8 * (W'/factor) * (H'/factor) * C where W', H' are padded sizes.
class DownUpCodec final : public Codec {
 public:
  explicit DownUpCodec(uint32_t factor);
  uint32_t factor() const { return factor_; }

  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;

 private:
  uint32_t factor_;
};

// Edge-replicates `img` to `width` x `height` (both >= the source size).
Image PadReplicate(const Image& img, size_t width, size_t height);

}  // namespace cic

#endif  // CIC_CODEC_H_
