// Copyright 2026 The SAU Toolkit Authors
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

#include "sau/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sau/error.hpp"

namespace sau {

LatentTensor batch_mean(std::span<const LatentTensor> items) {
  if (items.empty()) {
    throw ValidationError("empty batch");
  }
  const Shape shape = items.front().shape();
  for (const auto& item : items) {
    if (item.shape() != shape) {
      throw ValidationError("inhomogeneous batch");
    }
  }

  std::vector<double> acc(shape.size(), 0.0);
  for (const auto& item : items) {
    const auto data = item.data();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += data[i];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(items.size());
  std::vector<float> mean(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    mean[i] = static_cast<float>(acc[i] * inv_n);
  }
  return LatentTensor(shape, std::move(mean));
}

LatentTensor batch_mean(const LatentBatch& batch) { return batch_mean(batch.items()); }

SpatialMap channel_l2_map(const LatentTensor& t) {
  const Shape& s = t.shape();
  SpatialMap out(s.height, s.width);
  for (std::size_t y = 0; y < s.height; ++y) {
    for (std::size_t x = 0; x < s.width; ++x) {
      double sq = 0.0;
      for (std::size_t c = 0; c < s.channels; ++c) {
        const double v = t(c, y, x);
        sq += v * v;
      }
      out(y, x) = static_cast<float>(std::sqrt(sq));
    }
  }
  return out;
}

SpatialMap cosine_map(const LatentTensor& a, const LatentTensor& b) {
  if (a.shape() != b.shape()) {
    throw ValidationError("cosine map: shape mismatch");
  }
  const Shape& s = a.shape();
  SpatialMap out(s.height, s.width);
  for (std::size_t y = 0; y < s.height; ++y) {
    for (std::size_t x = 0; x < s.width; ++x) {
      double dot = 0.0;
      double na = 0.0;
      double nb = 0.0;
      for (std::size_t c = 0; c < s.channels; ++c) {
        const double va = a(c, y, x);
        const double vb = b(c, y, x);
        dot += va * vb;
        na += va * va;
        nb += vb * vb;
      }
      na = std::sqrt(na);
      nb = std::sqrt(nb);
      if (na < kDegenerateNorm || nb < kDegenerateNorm) {
        out(y, x) = 0.0F;
      } else {
        out(y, x) = static_cast<float>(std::clamp(dot / (na * nb), -1.0, 1.0));
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("gaussian blur: sigma must be positive, got " + std::to_string(sigma));
  }
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double kd = static_cast<double>(k);
    const double w = std::exp(-(kd * kd) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(k + radius)] = w;
    total += w;
  }
  for (auto& w : taps) {
    w /= total;
  }
  return taps;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) {
    return 0;
  }
  // Mirror-without-repeat has period 2(n - 1): ... 2 1 [0 1 .. n-1] n-2 ...
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t m = i % period;
  if (m < 0) {
    m += period;
  }
  const auto last = static_cast<std::ptrdiff_t>(n - 1);
  return static_cast<std::size_t>(m <= last ? m : period - m);
}

void gaussian_blur_plane(std::span<const float> src, std::size_t height, std::size_t width,
                         double sigma, std::span<float> dst) {
  if (src.size() != height * width || dst.size() != height * width) {
    throw ValidationError("gaussian blur: plane size mismatch");
  }
  const std::vector<double> taps = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);

  std::vector<double> rows(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t base = y * width;
    for (std::size_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::size_t xx = reflect_index(static_cast<std::ptrdiff_t>(x) + k, width);
        acc += taps[static_cast<std::size_t>(k + radius)] * src[base + xx];
      }
      rows[base + x] = acc;
    }
  }
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::size_t yy = reflect_index(static_cast<std::ptrdiff_t>(y) + k, height);
        acc += taps[static_cast<std::size_t>(k + radius)] * rows[yy * width + x];
      }
      dst[y * width + x] = static_cast<float>(acc);
    }
  }
}

SpatialMap gaussian_blur_map(const SpatialMap& m, double sigma) {
  SpatialMap out(m.height(), m.width());
  gaussian_blur_plane(m.values(), m.height(), m.width(), sigma, out.values());
  return out;
}

double shifted_sigmoid(double value, double beta) {
  return 1.0 / (1.0 + std::exp(-(value - 0.5) * beta));
}

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("sigmoid: beta must be positive");
  }
}

}  // namespace

SpatialMap sigmoid_smooth(const SpatialMap& m, double beta) {
  require_beta(beta);
  SpatialMap out(m.height(), m.width());
  const auto in = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    dst[i] = static_cast<float>(shifted_sigmoid(in[i], beta));
  }
  return out;
}

SpatialMap sigmoid_smooth(const BinaryMask& m, double beta) {
  require_beta(beta);
  // Binary input only ever takes these two values.
  const auto off = static_cast<float>(shifted_sigmoid(0.0, beta));
  const auto on = static_cast<float>(shifted_sigmoid(1.0, beta));
  SpatialMap out(m.height(), m.width());
  const auto in = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    dst[i] = in[i] != 0 ? on : off;
  }
  return out;
}

BinaryMask threshold_map(const SpatialMap& m, double tau) {
  std::vector<std::uint8_t> bits(m.size());
  const auto in = m.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    bits[i] = static_cast<double>(in[i]) > tau ? 1 : 0;
  }
  return BinaryMask(m.height(), m.width(), std::move(bits));
}

}  // namespace sau
