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

#ifndef CIC_ERROR_H_
#define CIC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cic {

// Every failure the library reports carries one of these codes so callers
// (and tests) can branch on the kind without parsing messages.
enum class ErrorCode {
  kFileNotFound,
  kMalformedImage,
  kIoFailure,
  kDimensionMismatch,
  kUnsupportedDimensions,
  kMalformedBitstream,
  kCodecFailure,
  kNonFiniteProbe,
  kMuZero,
  kConfigInvalid,
  kEmptyDataset,
  kSpawnFailure,
  kHandshakeTimeout,
  kVersionMismatch,
  kProtocolViolation,
  kChildExited,
  kRequestTimeout,
  kRemoteError,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cic

#endif  // CIC_ERROR_H_
