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

#include "cic/error.h"

namespace cic {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "file-not-found";
    case ErrorCode::kMalformedImage: return "malformed-image";
    case ErrorCode::kIoFailure: return "io-failure";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kUnsupportedDimensions: return "unsupported-dimensions";
    case ErrorCode::kMalformedBitstream: return "malformed-bitstream";
    case ErrorCode::kCodecFailure: return "codec-failure";
    case ErrorCode::kNonFiniteProbe: return "non-finite-probe";
    case ErrorCode::kMuZero: return "mu-zero";
    case ErrorCode::kConfigInvalid: return "config-invalid";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kSpawnFailure: return "spawn-failure";
    case ErrorCode::kHandshakeTimeout: return "handshake-timeout";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kProtocolViolation: return "protocol-violation";
    case ErrorCode::kChildExited: return "child-exited";
    case ErrorCode::kRequestTimeout: return "request-timeout";
    case ErrorCode::kRemoteError: return "remote-error";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace cic
