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

#include "cic/bridge.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "cic/byte_io.h"
#include "cic/error.h"
#include "json.hpp"

namespace cic::bridge {

namespace {

using Clock = std::chrono::steady_clock;

Error Violation(const std::string& what) {
  return Error(ErrorCode::kProtocolViolation, what);
}

int RemainingMs(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return static_cast<int>(std::max<int64_t>(0, left.count()));
}

Clock::time_point DeadlineAfter(double seconds) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(seconds));
}

void CloseFd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

// ------------------------------------------------------------------ Frames

std::vector<uint8_t> SerializeFrame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayloadBytes) {
    throw Violation("payload exceeds frame size limit");
  }
  std::vector<uint8_t> out;
  out.reserve(kFrameHeaderBytes + frame.payload.size());
  ByteWriter w(&out);
  w.Bytes(kFrameMagic);
  w.U8(frame.version);
  w.U8(static_cast<uint8_t>(frame.type));
  w.U32BE(static_cast<uint32_t>(frame.payload.size()));
  w.Bytes(frame.payload);
  return out;
}

FrameHeader ParseFrameHeader(std::span<const uint8_t> header) {
  if (header.size() < kFrameHeaderBytes) throw Violation("truncated header");
  if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), header.begin())) {
    throw Violation("bad frame magic");
  }
  ByteReader r(header.subspan(4, 6));
  FrameHeader h;
  h.version = *r.U8();
  const uint8_t type = *r.U8();
  if (type < 1 || type > 10) {
    throw Violation("unknown message type " + std::to_string(type));
  }
  h.type = static_cast<MessageType>(type);
  h.payload_len = *r.U32BE();
  if (h.payload_len > kMaxPayloadBytes) {
    throw Violation("payload length exceeds limit");
  }
  return h;
}

Frame ParseFrame(std::span<const uint8_t> bytes) {
  const FrameHeader h = ParseFrameHeader(bytes);
  if (h.version != kProtocolVersion) {
    throw Violation("unsupported protocol version " +
                    std::to_string(h.version));
  }
  if (bytes.size() - kFrameHeaderBytes != h.payload_len) {
    throw Violation("payload length does not match frame size");
  }
  Frame f;
  f.version = h.version;
  f.type = h.type;
  f.payload.assign(bytes.begin() + kFrameHeaderBytes, bytes.end());
  return f;
}

// ---------------------------------------------------------------- Payloads

std::vector<uint8_t> EncodeImagePayload(const Image& img) {
  std::vector<uint8_t> out;
  out.reserve(10 + 4 * img.size());
  ByteWriter w(&out);
  w.U32BE(static_cast<uint32_t>(img.width()));
  w.U32BE(static_cast<uint32_t>(img.height()));
  w.U8(static_cast<uint8_t>(img.channels()));
  w.U8(kDtypeFloat32);
  for (double v : img.data()) w.F32LE(static_cast<float>(v));
  return out;
}

Image DecodeImagePayload(std::span<const uint8_t> payload) {
  ByteReader r(payload);
  auto width = r.U32BE();
  auto height = r.U32BE();
  auto channels = r.U8();
  auto dtype = r.U8();
  if (!width || !height || !channels || !dtype) {
    throw Violation("truncated image payload");
  }
  if (*width == 0 || *height == 0 || (*channels != 1 && *channels != 3)) {
    throw Violation("invalid image dimensions in payload");
  }
  if (*dtype != kDtypeFloat32) {
    throw Violation("unsupported sample dtype " + std::to_string(*dtype));
  }
  const uint64_t count = uint64_t{*width} * *height * *channels;
  if (r.remaining() % 4 != 0 || count != r.remaining() / 4) {
    throw Violation("image payload length does not match dimensions");
  }
  std::vector<double> data(count);
  for (auto& v : data) {
    v = *r.F32LE();
    if (!std::isfinite(v)) throw Violation("non-finite sample in payload");
  }
  return Image(*width, *height, *channels, std::move(data));
}

std::vector<uint8_t> EncodeBitstreamPayload(const Bitstream& bs) {
  std::vector<uint8_t> out;
  out.reserve(8 + bs.payload.size());
  ByteWriter w(&out);
  w.U64BE(bs.bit_length);
  w.Bytes(bs.payload);
  return out;
}

Bitstream DecodeBitstreamPayload(std::span<const uint8_t> payload) {
  ByteReader r(payload);
  auto bits = r.U64BE();
  if (!bits) throw Violation("truncated bitstream payload");
  Bitstream bs;
  bs.bit_length = *bits;
  bs.payload.assign(payload.begin() + 8, payload.end());
  if (bs.bit_length > 8 * uint64_t{bs.payload.size()}) {
    throw Violation("bit_length exceeds payload capacity");
  }
  return bs;
}

std::vector<uint8_t> EncodeDescriptorPayload(const CodecDescriptor& d) {
  nlohmann::json j = {{"name", d.name},
                      {"deterministic", d.deterministic},
                      {"quality_param", d.quality_param}};
  j["latent_dim"] = d.latent_dim ? nlohmann::json(*d.latent_dim) : nullptr;
  const std::string text = j.dump();
  return std::vector<uint8_t>(text.begin(), text.end());
}

CodecDescriptor DecodeDescriptorPayload(std::span<const uint8_t> payload) {
  const auto j = nlohmann::json::parse(payload.begin(), payload.end(), nullptr,
                                       /*allow_exceptions=*/false);
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
    throw Violation("HELLO_ACK descriptor is not a JSON object with a name");
  }
  CodecDescriptor d;
  d.name = j["name"].get<std::string>();
  if (j.contains("deterministic")) {
    if (!j["deterministic"].is_boolean()) throw Violation("bad deterministic");
    d.deterministic = j["deterministic"].get<bool>();
  }
  if (j.contains("quality_param") && !j["quality_param"].is_null()) {
    if (!j["quality_param"].is_number()) throw Violation("bad quality_param");
    d.quality_param = j["quality_param"].get<double>();
  }
  if (j.contains("latent_dim") && !j["latent_dim"].is_null()) {
    if (!j["latent_dim"].is_number_unsigned()) throw Violation("bad latent_dim");
    d.latent_dim = j["latent_dim"].get<uint64_t>();
  }
  return d;
}

// ----------------------------------------------------------------- Session

BridgeSession::BridgeSession(pid_t pid, int to_child, int from_child,
                             double timeout)
    : pid_(pid), to_child_(to_child), from_child_(from_child),
      timeout_(timeout) {}

std::unique_ptr<BridgeSession> BridgeSession::Open(
    const std::vector<std::string>& argv, double timeout_seconds) {
  if (argv.empty() || argv[0].empty()) {
    throw Error(ErrorCode::kSpawnFailure, "empty adapter command");
  }
  if (!(timeout_seconds > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout must be > 0");
  }
  // Writes to a dead child must surface as EPIPE, not kill the process.
  ::signal(SIGPIPE, SIG_IGN);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  int in_pipe[2], out_pipe[2], exec_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }
  if (::pipe2(exec_pipe, O_CLOEXEC) != 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }

  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   exec_pipe[0], exec_pipe[1]}) {
      ::close(fd);
    }
    throw Error(ErrorCode::kSpawnFailure, std::strerror(errno));
  }
  if (pid == 0) {
    // Child: only async-signal-safe calls from here on.
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(cargv[0], cargv.data());
    const int err = errno;
    [[maybe_unused]] ssize_t n = ::write(exec_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(exec_pipe[1]);
  int exec_errno = 0;
  ssize_t n;
  do {
    n = ::read(exec_pipe[0], &exec_errno, sizeof(exec_errno));
  } while (n < 0 && errno == EINTR);
  ::close(exec_pipe[0]);
  if (n > 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::kSpawnFailure,
                argv[0] + ": " + std::strerror(exec_errno));
  }

  std::unique_ptr<BridgeSession> session(
      new BridgeSession(pid, in_pipe[1], out_pipe[0], timeout_seconds));
  session->WriteFrame({kProtocolVersion, MessageType::kHello, {}},
                      ErrorCode::kHandshakeTimeout);
  Frame ack = session->ReadFrame(ErrorCode::kHandshakeTimeout,
                                 /*handshake=*/true);
  if (ack.type == MessageType::kError) {
    session->Fail(ErrorCode::kRemoteError,
                  std::string(ack.payload.begin(), ack.payload.end()));
  }
  if (ack.type != MessageType::kHelloAck) {
    session->Fail(ErrorCode::kProtocolViolation, "expected HELLO_ACK");
  }
  try {
    session->descriptor_ = DecodeDescriptorPayload(ack.payload);
  } catch (const Error& e) {
    session->Fail(e.code(), e.what());
  }
  return session;
}

BridgeSession::~BridgeSession() {
  if (!reaped_) {
    try {
      Shutdown();
    } catch (...) {
      Reap(/*force=*/true);
    }
  }
  CloseFd(to_child_);
  CloseFd(from_child_);
}

void BridgeSession::Fail(ErrorCode code, const std::string& message) {
  healthy_ = false;
  throw Error(code, message);
}

void BridgeSession::WriteFrame(const Frame& frame, ErrorCode timeout_code) {
  const std::vector<uint8_t> bytes = SerializeFrame(frame);
  const auto deadline = DeadlineAfter(timeout_);
  size_t done = 0;
  while (done < bytes.size()) {
    pollfd pfd{to_child_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, RemainingMs(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) Fail(timeout_code, "timed out writing request");
    if (pfd.revents & (POLLERR | POLLHUP)) {
      Fail(ErrorCode::kChildExited, "adapter closed its input");
    }
    const ssize_t n = ::write(to_child_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      Fail(ErrorCode::kChildExited, std::string("write: ") + std::strerror(errno));
    }
    done += static_cast<size_t>(n);
  }
}

void BridgeSession::ReadExactly(uint8_t* dst, size_t n, ErrorCode timeout_code) {
  const auto deadline = DeadlineAfter(timeout_);
  size_t done = 0;
  while (done < n) {
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, RemainingMs(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) Fail(timeout_code, "timed out waiting for adapter reply");
    const ssize_t got = ::read(from_child_, dst + done, n - done);
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      Fail(ErrorCode::kChildExited, std::string("read: ") + std::strerror(errno));
    }
    if (got == 0) Fail(ErrorCode::kChildExited, "adapter closed its output");
    done += static_cast<size_t>(got);
  }
}

Frame BridgeSession::ReadFrame(ErrorCode timeout_code, bool handshake) {
  std::array<uint8_t, kFrameHeaderBytes> header{};
  ReadExactly(header.data(), header.size(), timeout_code);
  FrameHeader h;
  try {
    h = ParseFrameHeader(header);
  } catch (const Error& e) {
    Fail(e.code(), e.what());
  }
  if (h.version != kProtocolVersion) {
    Fail(handshake ? ErrorCode::kVersionMismatch : ErrorCode::kProtocolViolation,
         "adapter speaks protocol version " + std::to_string(h.version));
  }
  Frame f;
  f.version = h.version;
  f.type = h.type;
  f.payload.resize(h.payload_len);
  ReadExactly(f.payload.data(), f.payload.size(), timeout_code);
  return f;
}

Frame BridgeSession::Exchange(MessageType request, std::vector<uint8_t> payload,
                              MessageType expected_reply) {
  if (!healthy_) {
    throw Error(ErrorCode::kProtocolViolation, "session is no longer usable");
  }
  WriteFrame({kProtocolVersion, request, std::move(payload)},
             ErrorCode::kRequestTimeout);
  Frame reply = ReadFrame(ErrorCode::kRequestTimeout, /*handshake=*/false);
  if (reply.type == MessageType::kError) {
    throw Error(ErrorCode::kRemoteError,
                std::string(reply.payload.begin(), reply.payload.end()));
  }
  if (reply.type != expected_reply) {
    Fail(ErrorCode::kProtocolViolation,
         "unexpected reply type " +
             std::to_string(static_cast<int>(reply.type)));
  }
  return reply;
}

Bitstream BridgeSession::RemoteEncode(const Image& img) {
  Frame reply = Exchange(MessageType::kEncode, EncodeImagePayload(img),
                         MessageType::kEncoded);
  try {
    return DecodeBitstreamPayload(reply.payload);
  } catch (const Error& e) {
    Fail(e.code(), e.what());
  }
}

Image BridgeSession::RemoteDecode(const Bitstream& bs) {
  Frame reply = Exchange(MessageType::kDecode, EncodeBitstreamPayload(bs),
                         MessageType::kDecoded);
  try {
    return DecodeImagePayload(reply.payload);
  } catch (const Error& e) {
    Fail(e.code(), e.what());
  }
}

Image BridgeSession::RemoteRoundtrip(const Image& img) {
  Frame reply = Exchange(MessageType::kRoundtrip, EncodeImagePayload(img),
                         MessageType::kRoundtripped);
  Image out;
  try {
    out = DecodeImagePayload(reply.payload);
  } catch (const Error& e) {
    Fail(e.code(), e.what());
  }
  if (!out.SameShape(img)) {
    Fail(ErrorCode::kProtocolViolation,
         "ROUNDTRIPPED image dimensions differ from request");
  }
  return out;
}

void BridgeSession::Reap(bool force) {
  if (reaped_) return;
  if (force) ::kill(pid_, SIGKILL);
  while (::waitpid(pid_, nullptr, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
}

bool BridgeSession::Shutdown() {
  if (reaped_) return true;
  try {
    if (healthy_) {
      WriteFrame({kProtocolVersion, MessageType::kShutdown, {}},
                 ErrorCode::kRequestTimeout);
    }
  } catch (const Error&) {
    // The child may already be gone; reaping below settles it either way.
  }
  healthy_ = false;
  CloseFd(to_child_);
  const auto deadline = DeadlineAfter(timeout_);
  while (Clock::now() < deadline) {
    const pid_t r = ::waitpid(pid_, nullptr, WNOHANG);
    if (r == pid_ || (r < 0 && errno == ECHILD)) {
      reaped_ = true;
      return true;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  Reap(/*force=*/true);
  return false;
}

// ------------------------------------------------------------------- Codec

BridgeCodec::BridgeCodec(std::unique_ptr<BridgeSession> session)
    : session_(std::move(session)) {
  if (!session_) throw Error(ErrorCode::kInvalidArgument, "null session");
}

CodecDescriptor BridgeCodec::Descriptor() const {
  return session_->descriptor();
}

Bitstream BridgeCodec::Encode(const Image& img) const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_->RemoteEncode(img);
}

Image BridgeCodec::Decode(const Bitstream& bs) const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_->RemoteDecode(bs);
}

Image BridgeCodec::Roundtrip(const Image& img) const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_->RemoteRoundtrip(img);
}

}  // namespace cic::bridge
