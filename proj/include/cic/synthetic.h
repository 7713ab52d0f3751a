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

#ifndef CIC_SYNTHETIC_H_
#define CIC_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cic/image.h"

namespace cic {

// Seeded 8-bit-valued RGB test images cycling through smooth gradients,
// high-contrast checkerboards, Gaussian blobs on a dark background and
// sharp-edged rectangles.
std::vector<Image> MakeSyntheticCorpus(size_t count, size_t width,
                                       size_t height, uint64_t seed);

// Uniform random 8-bit-valued image.
Image RandomImage(size_t width, size_t height, size_t channels, uint64_t seed);

// Writes the corpus as img_000.png, img_001.png, ... and returns the paths.
std::vector<std::filesystem::path> WriteSyntheticCorpus(
    const std::filesystem::path& dir, size_t count, size_t width,
    size_t height, uint64_t seed);

}  // namespace cic

#endif  // CIC_SYNTHETIC_H_
