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

// Big/little-endian field packing shared by the bitstream container and the
// bridge wire format.

#ifndef CIC_BYTE_IO_H_
#define CIC_BYTE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <vector>

namespace cic {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<uint8_t>* out) : out_(out) {}

  void U8(uint8_t v) { out_->push_back(v); }
  void U32BE(uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_->push_back(v >> shift);
  }
  void U64BE(uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_->push_back(v >> shift);
  }
  void F64BE(double v) { U64BE(std::bit_cast<uint64_t>(v)); }
  void F32LE(float v) {
    const uint32_t bits = std::bit_cast<uint32_t>(v);
    for (int shift = 0; shift < 32; shift += 8) out_->push_back(bits >> shift);
  }
  // Zigzag-mapped LEB128 varint.
  void SignedVarint(int64_t v) {
    uint64_t u = (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
    while (u >= 0x80) {
      out_->push_back(static_cast<uint8_t>(u | 0x80));
      u >>= 7;
    }
    out_->push_back(static_cast<uint8_t>(u));
  }
  void Bytes(std::span<const uint8_t> bytes) {
    if (bytes.empty()) return;
    const size_t at = out_->size();
    out_->resize(at + bytes.size());
    std::memcpy(out_->data() + at, bytes.data(), bytes.size());
  }

 private:
  std::vector<uint8_t>* out_;
};

// Bounds-checked reader; every accessor returns nullopt past the end.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  size_t remaining() const { return in_.size() - pos_; }
  size_t position() const { return pos_; }

  std::optional<uint8_t> U8() {
    if (remaining() < 1) return std::nullopt;
    return in_[pos_++];
  }
  std::optional<uint32_t> U32BE() {
    if (remaining() < 4) return std::nullopt;
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::optional<uint64_t> U64BE() {
    if (remaining() < 8) return std::nullopt;
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }
  std::optional<double> F64BE() {
    auto bits = U64BE();
    if (!bits) return std::nullopt;
    return std::bit_cast<double>(*bits);
  }
  std::optional<float> F32LE() {
    if (remaining() < 4) return std::nullopt;
    uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) bits |= uint32_t{in_[pos_++]} << (8 * i);
    return std::bit_cast<float>(bits);
  }
  std::optional<int64_t> SignedVarint() {
    uint64_t u = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (remaining() < 1) return std::nullopt;
      const uint8_t b = in_[pos_++];
      u |= uint64_t{b & 0x7fu} << shift;
      if ((b & 0x80) == 0) {
        return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
      }
    }
    return std::nullopt;
  }
  std::optional<std::span<const uint8_t>> Bytes(size_t n) {
    if (remaining() < n) return std::nullopt;
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace cic

#endif  // CIC_BYTE_IO_H_
