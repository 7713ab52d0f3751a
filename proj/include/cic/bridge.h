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

// Client side of the framed codec protocol spoken with a child process over
// its stdin/stdout. Every frame is
//
//   "CICB" | version u8 | msg_type u8 | payload_len u32 BE | payload
//
// Image payloads: W u32 BE | H u32 BE | C u8 | dtype u8 (1 = f32 LE) |
// samples, row-major channel-interleaved. ENCODED/DECODE payloads:
// bit_length u64 BE | opaque bytes. HELLO_ACK carries the codec descriptor
// as a UTF-8 JSON object; ERROR carries a UTF-8 message.

#ifndef CIC_BRIDGE_H_
#define CIC_BRIDGE_H_

#include <sys/types.h>

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cic/codec.h"
#include "cic/error.h"
#include "cic/image.h"

namespace cic::bridge {

inline constexpr std::array<uint8_t, 4> kFrameMagic = {'C', 'I', 'C', 'B'};
inline constexpr uint8_t kProtocolVersion = 1;
inline constexpr size_t kFrameHeaderBytes = 10;
// Frames above this size are rejected rather than buffered.
inline constexpr uint32_t kMaxPayloadBytes = 1u << 28;
inline constexpr uint8_t kDtypeFloat32 = 1;

enum class MessageType : uint8_t {
  kHello = 1,
  kHelloAck = 2,
  kEncode = 3,
  kEncoded = 4,
  kDecode = 5,
  kDecoded = 6,
  kRoundtrip = 7,
  kRoundtripped = 8,
  kError = 9,
  kShutdown = 10,
};

struct FrameHeader {
  uint8_t version = kProtocolVersion;
  MessageType type = MessageType::kHello;
  uint32_t payload_len = 0;
};

struct Frame {
  uint8_t version = kProtocolVersion;
  MessageType type = MessageType::kHello;
  std::vector<uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<uint8_t> SerializeFrame(const Frame& frame);
// Validates magic, message type and length bound of a 10-byte header. The
// version is returned unchecked so the handshake can report a mismatch.
// Throws kProtocolViolation.
FrameHeader ParseFrameHeader(std::span<const uint8_t> header);
// Parses one complete frame that spans all of `bytes`, including the
// version check. Throws kProtocolViolation.
Frame ParseFrame(std::span<const uint8_t> bytes);

std::vector<uint8_t> EncodeImagePayload(const Image& img);
Image DecodeImagePayload(std::span<const uint8_t> payload);
std::vector<uint8_t> EncodeBitstreamPayload(const Bitstream& bs);
Bitstream DecodeBitstreamPayload(std::span<const uint8_t> payload);
std::vector<uint8_t> EncodeDescriptorPayload(const CodecDescriptor& d);
CodecDescriptor DecodeDescriptorPayload(std::span<const uint8_t> payload);

// One child process speaking the protocol. Exactly one request is in
// flight at a time; a protocol violation, timeout or child exit leaves the
// session unusable. Not thread-safe: callers serialize access.
class BridgeSession {
 public:
  // Spawns argv[0] (PATH lookup) with argv, sends HELLO and waits up to
  // `timeout_seconds` for HELLO_ACK. Throws kSpawnFailure,
  // kHandshakeTimeout, kVersionMismatch, kChildExited or kProtocolViolation.
  static std::unique_ptr<BridgeSession> Open(
      const std::vector<std::string>& argv, double timeout_seconds);

  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;
  ~BridgeSession();

  const CodecDescriptor& descriptor() const { return descriptor_; }
  bool healthy() const { return healthy_; }
  pid_t pid() const { return pid_; }

  Bitstream RemoteEncode(const Image& img);
  Image RemoteDecode(const Bitstream& bs);
  // The reply must have the request's W, H, C.
  Image RemoteRoundtrip(const Image& img);

  // Sends SHUTDOWN and reaps the child. Returns true if it exited on its
  // own within the timeout; otherwise it is killed and false is returned.
  bool Shutdown();

 private:
  BridgeSession(pid_t pid, int to_child, int from_child, double timeout);

  Frame Exchange(MessageType request, std::vector<uint8_t> payload,
                 MessageType expected_reply);
  void WriteFrame(const Frame& frame, ErrorCode timeout_code);
  Frame ReadFrame(ErrorCode timeout_code, bool handshake);
  void ReadExactly(uint8_t* dst, size_t n, ErrorCode timeout_code);
  [[noreturn]] void Fail(ErrorCode code, const std::string& message);
  void Reap(bool force);

  pid_t pid_;
  int to_child_;
  int from_child_;
  double timeout_;
  bool healthy_ = true;
  bool reaped_ = false;
  CodecDescriptor descriptor_;
};

// Codec backed by a bridge session. Calls are serialized on the session.
class BridgeCodec final : public Codec {
 public:
  explicit BridgeCodec(std::unique_ptr<BridgeSession> session);

  CodecDescriptor Descriptor() const override;
  Bitstream Encode(const Image& img) const override;
  Image Decode(const Bitstream& bs) const override;
  Image Roundtrip(const Image& img) const override;
  bool ThreadSafe() const override { return false; }

  BridgeSession& session() { return *session_; }

 private:
  std::unique_ptr<BridgeSession> session_;
  mutable std::mutex mu_;
};

}  // namespace cic::bridge

#endif  // CIC_BRIDGE_H_
