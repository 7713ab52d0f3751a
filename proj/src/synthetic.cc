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

#include "cic/synthetic.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cic/random.h"

namespace cic {

namespace {

Image Gradient(size_t w, size_t h, Rng& rng) {
  const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double dx = std::cos(angle), dy = std::sin(angle);
  double lo[3], hi[3];
  for (int c = 0; c < 3; ++c) {
    lo[c] = rng.Uniform(0.0, 80.0);
    hi[c] = rng.Uniform(160.0, 255.0);
  }
  const double span = std::abs(dx) * (w - 1) + std::abs(dy) * (h - 1) + 1e-9;
  const double offset = std::min(0.0, dx * (w - 1)) + std::min(0.0, dy * (h - 1));
  Image img(w, h, 3);
  for (size_t y = 0; y < h; ++y)
    for (size_t x = 0; x < w; ++x) {
      const double t = (dx * x + dy * y - offset) / span;
      for (size_t c = 0; c < 3; ++c) {
        img.at(y, x, c) = std::round(lo[c] + t * (hi[c] - lo[c]));
      }
    }
  return img;
}

Image Checkerboard(size_t w, size_t h, Rng& rng) {
  const size_t cell = 2 + rng.Below(7);
  const double dark = rng.Uniform(0.0, 30.0);
  const double bright = rng.Uniform(200.0, 255.0);
  Image img(w, h, 3);
  for (size_t y = 0; y < h; ++y)
    for (size_t x = 0; x < w; ++x) {
      const bool on = ((x / cell) + (y / cell)) % 2 == 1;
      for (size_t c = 0; c < 3; ++c) img.at(y, x, c) = std::round(on ? bright : dark);
    }
  return img;
}

Image Blobs(size_t w, size_t h, Rng& rng) {
  const size_t count = 2 + rng.Below(4);
  Image img = Image::Filled(w, h, 3, std::round(rng.Uniform(0.0, 20.0)));
  for (size_t b = 0; b < count; ++b) {
    const double cx = rng.Uniform(0.0, w), cy = rng.Uniform(0.0, h);
    const double sigma = rng.Uniform(1.5, w / 6.0 + 1.5);
    double amp[3];
    for (double& a : amp) a = rng.Uniform(120.0, 235.0);
    for (size_t y = 0; y < h; ++y)
      for (size_t x = 0; x < w; ++x) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double g = std::exp(-r2 / (2 * sigma * sigma));
        for (size_t c = 0; c < 3; ++c) img.at(y, x, c) += amp[c] * g;
      }
  }
  return ClampRound(img);
}

Image Rectangles(size_t w, size_t h, Rng& rng) {
  Image img = Image::Filled(w, h, 3, std::round(rng.Uniform(0.0, 25.0)));
  const size_t count = 3 + rng.Below(4);
  for (size_t r = 0; r < count; ++r) {
    const size_t x0 = rng.Below(w), y0 = rng.Below(h);
    const size_t x1 = std::min(w, x0 + 1 + rng.Below(w / 2 + 1));
    const size_t y1 = std::min(h, y0 + 1 + rng.Below(h / 2 + 1));
    double color[3];
    for (double& v : color) v = std::round(rng.Uniform(60.0, 255.0));
    for (size_t y = y0; y < y1; ++y)
      for (size_t x = x0; x < x1; ++x)
        for (size_t c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
  }
  return img;
}

}  // namespace

std::vector<Image> MakeSyntheticCorpus(size_t count, size_t width,
                                       size_t height, uint64_t seed) {
  Rng rng(seed);
  std::vector<Image> corpus;
  corpus.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    switch (i % 4) {
      case 0: corpus.push_back(Gradient(width, height, rng)); break;
      case 1: corpus.push_back(Checkerboard(width, height, rng)); break;
      case 2: corpus.push_back(Blobs(width, height, rng)); break;
      default: corpus.push_back(Rectangles(width, height, rng)); break;
    }
  }
  return corpus;
}

Image RandomImage(size_t width, size_t height, size_t channels, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> data(width * height * channels);
  for (auto& v : data) v = static_cast<double>(rng.Below(256));
  return Image(width, height, channels, std::move(data));
}

std::vector<std::filesystem::path> WriteSyntheticCorpus(
    const std::filesystem::path& dir, size_t count, size_t width,
    size_t height, uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  const auto corpus = MakeSyntheticCorpus(count, width, height, seed);
  for (size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03zu.png", i);
    paths.push_back(dir / name);
    SaveImage(corpus[i], paths.back());
  }
  return paths;
}

}  // namespace cic
