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

#include "sau/attack_sim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sau/error.hpp"
#include "sau/kernels.hpp"

namespace sau::sim {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterStream::CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t channel)
    : key_(splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(tag) << 32) | channel))) {}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
  return splitmix64(key_ ^ splitmix64(counter));
}

double CounterStream::uniform(std::uint64_t counter) const {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * kScale;
}

double CounterStream::normal(std::uint64_t index) const {
  const std::uint64_t pair = index / 2;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

std::string_view to_string(AttackKind kind) {
  return kind == AttackKind::kPixel ? "pixel" : "style";
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "pixel") {
    return AttackKind::kPixel;
  }
  if (name == "style") {
    return AttackKind::kStyle;
  }
  throw ValidationError("unknown attack kind \"" + std::string(name) + "\" (expected pixel or style)");
}

AttackSpec AttackSpec::default_pixel(const Shape& shape) {
  return AttackSpec{AttackKind::kPixel, Rect{2, 2, 12, 12},
                    3.0 * std::sqrt(static_cast<double>(shape.channels))};
}

AttackSpec AttackSpec::default_style() { return AttackSpec{AttackKind::kStyle, Rect{2, 2, 12, 12}, 0.9}; }

SyntheticGenerator::SyntheticGenerator(GeneratorOptions options) : options_(std::move(options)) {
  const auto& o = options_;
  if (!o.shape.valid()) {
    throw ValidationError("generator: shape dimensions must be positive");
  }
  if (!(o.smoothness > 0.0) || !std::isfinite(o.smoothness)) {
    throw ValidationError("generator: smoothness must be positive");
  }
  if (!(o.noise_std >= 0.0) || !std::isfinite(o.noise_std)) {
    throw ValidationError("generator: noise_std must be >= 0");
  }
  if (!std::isfinite(o.channel_bias)) {
    throw ValidationError("generator: channel_bias must be finite");
  }
  if (!o.attack.patch.fits_within(o.shape.height, o.shape.width)) {
    throw ValidationError("generator: attack patch does not fit within the latent extent");
  }
  if (!(o.attack.amplitude > 0.0) || !std::isfinite(o.attack.amplitude)) {
    throw ValidationError("generator: attack amplitude must be positive");
  }
  if (o.attack.kind == AttackKind::kStyle && o.attack.amplitude > 1.0) {
    throw ValidationError("generator: style amplitude must lie in (0, 1]");
  }
}

std::vector<double> SyntheticGenerator::channel_offsets() const {
  const std::size_t n = options_.shape.channels;
  std::vector<double> offsets(n, 0.0);
  if (n == 1) {
    return offsets;
  }
  for (std::size_t c = 0; c < n; ++c) {
    const double t = static_cast<double>(c) / static_cast<double>(n - 1);
    offsets[c] = options_.channel_bias * (2.0 * t - 1.0);
  }
  return offsets;
}

std::vector<double> SyntheticGenerator::patch_direction() const {
  const std::size_t n = options_.shape.channels;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> dir(n);
  for (std::size_t c = 0; c < n; ++c) {
    dir[c] = (c % 2 == 0 ? 1.0 : -1.0) * norm;
  }
  return dir;
}

LatentTensor SyntheticGenerator::pixel_payload() const {
  LatentTensor payload(options_.shape);
  if (options_.attack.kind != AttackKind::kPixel) {
    return payload;
  }
  const Rect& r = options_.attack.patch;
  const auto dir = patch_direction();
  for (std::size_t c = 0; c < options_.shape.channels; ++c) {
    const auto v = static_cast<float>(options_.attack.amplitude * dir[c]);
    for (std::size_t y = r.row; y < r.row + r.height; ++y) {
      for (std::size_t x = r.col; x < r.col + r.width; ++x) {
        payload(c, y, x) = v;
      }
    }
  }
  return payload;
}

LatentTensor SyntheticGenerator::generate(const PromptSpec& prompt) const {
  const Shape& s = options_.shape;
  const std::size_t plane = s.plane_size();

  // Blurring unit white noise with normalized taps w leaves variance
  // (sum w_k^2)^2 in the interior; rescale back to unit variance.
  const auto taps = gaussian_kernel(options_.smoothness);
  double energy = 0.0;
  for (double w : taps) {
    energy += w * w;
  }
  const double rescale = 1.0 / energy;
  const auto offsets = channel_offsets();

  LatentTensor out(s);
  std::vector<float> noise(plane);
  for (std::size_t c = 0; c < s.channels; ++c) {
    const CounterStream base(prompt.seed, StreamTag::kBaseField, c);
    for (std::size_t i = 0; i < plane; ++i) {
      noise[i] = static_cast<float>(base.normal(i));
    }
    auto dst = out.plane(c);
    gaussian_blur_plane(noise, s.height, s.width, options_.smoothness, dst);
    for (auto& v : dst) {
      v = static_cast<float>(offsets[c] + rescale * v);
    }
    if (options_.noise_std > 0.0) {
      const CounterStream jitter(prompt.seed,
                                 prompt.trigger_present ? StreamTag::kJitterPoisoned : StreamTag::kJitterClean, c);
      for (std::size_t i = 0; i < plane; ++i) {
        dst[i] = static_cast<float>(dst[i] + options_.noise_std * jitter.normal(i));
      }
    }
  }

  if (!prompt.trigger_present) {
    return out;
  }
  if (options_.attack.kind == AttackKind::kStyle) {
    apply_style(out, options_.attack.amplitude);
    return out;
  }
  const Rect& r = options_.attack.patch;
  const auto dir = patch_direction();
  for (std::size_t c = 0; c < s.channels; ++c) {
    const auto v = static_cast<float>(options_.attack.amplitude * dir[c]);
    for (std::size_t y = r.row; y < r.row + r.height; ++y) {
      for (std::size_t x = r.col; x < r.col + r.width; ++x) {
        out(c, y, x) += v;
      }
    }
  }
  return out;
}

void apply_style(LatentTensor& latent, double strength) {
  const Shape& s = latent.shape();
  const double keep = 1.0 - strength;
  for (std::size_t y = 0; y < s.height; ++y) {
    for (std::size_t x = 0; x < s.width; ++x) {
      double mean = 0.0;
      for (std::size_t c = 0; c < s.channels; ++c) {
        mean += latent(c, y, x);
      }
      mean /= static_cast<double>(s.channels);
      for (std::size_t c = 0; c < s.channels; ++c) {
        latent(c, y, x) = static_cast<float>(keep * latent(c, y, x) + strength * mean);
      }
    }
  }
}

std::pair<LatentBatch, LatentBatch> make_paired_batches(const SyntheticGenerator& gen,
                                                        std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) {
    throw ValidationError("paired batches: seed list is empty");
  }
  std::vector<LatentTensor> clean;
  std::vector<LatentTensor> poisoned;
  clean.reserve(seeds.size());
  poisoned.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    clean.push_back(gen.generate(PromptSpec{seed, false}));
    poisoned.push_back(gen.generate(PromptSpec{seed, true}));
  }
  return {LatentBatch(std::move(clean)), LatentBatch(std::move(poisoned))};
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) {
    seeds[i] = first + i;
  }
  return seeds;
}

}  // namespace sau::sim
