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

#ifndef SAU_ATTACK_SIM_HPP_
#define SAU_ATTACK_SIM_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sau/latent.hpp"

namespace sau::sim {

// ---------------------------------------------------------------------------
// Counter-based random streams
//
// Every draw is a pure function of (key, counter), so latents can be
// regenerated bit-exactly in any order and from any language:
//
//   splitmix64(z):  z += 0x9E3779B97F4A7C15
//                   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                   return z ^ (z >> 31)
//   stream key:     splitmix64(seed ^ splitmix64((tag << 32) | channel))
//   raw bits:       splitmix64(key ^ splitmix64(counter))
//   uniform:        ((bits >> 11) + 0.5) * 2^-53, in (0, 1)
//   normal(2j+b):   Box-Muller on uniforms (2j, 2j+1); b = 0 cos, b = 1 sin
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t z);

enum class StreamTag : std::uint64_t {
  kBaseField = 1,
  kJitterClean = 2,
  kJitterPoisoned = 3,
};

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamTag tag, std::uint64_t channel);

  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;
  double normal(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// ---------------------------------------------------------------------------
// Threat model
// ---------------------------------------------------------------------------

enum class AttackKind { kPixel, kStyle };

std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(std::string_view name);

/// Stand-in for a prompt: the seed plays the role of the prompt text and
/// `trigger_present` marks that the trigger token was appended.
struct PromptSpec {
  std::uint64_t seed = 0;
  bool trigger_present = false;
};

/// Pixel: adds amplitude * P inside `patch`, where P is a unit channel
/// vector at every patch location. Style: pulls each channel vector toward
/// its channel mean with strength `amplitude` in (0, 1].
struct AttackSpec {
  AttackKind kind = AttackKind::kPixel;
  Rect patch{2, 2, 12, 12};
  double amplitude = 6.0;

  /// 12x12 patch at (2, 2), amplitude 3 base standard deviations per element.
  static AttackSpec default_pixel(const Shape& shape);
  static AttackSpec default_style();
};

struct GeneratorOptions {
  Shape shape{4, 64, 64};
  double smoothness = 2.5;    // blur sigma of the base noise field
  double channel_bias = 2.0;  // per-channel offsets span [-bias, +bias]
  double noise_std = 0.0;     // per-sample jitter, drawn separately for clean and triggered runs
  AttackSpec attack = AttackSpec::default_pixel(Shape{4, 64, 64});
};

/// Deterministic synthetic generator playing the backdoored model.
///
/// A clean latent is a per-channel offset plus unit-variance blurred white
/// noise keyed by (seed, channel), plus optional jitter. With the trigger
/// present the attack is applied on top of that latent.
class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(GeneratorOptions options);

  const GeneratorOptions& options() const { return options_; }
  const Shape& shape() const { return options_.shape; }

  LatentTensor generate(const PromptSpec& prompt) const;

  /// The exact tensor the pixel attack adds (zero for the style attack).
  LatentTensor pixel_payload() const;

  /// Unit channel direction of the pixel patch.
  std::vector<double> patch_direction() const;

  std::vector<double> channel_offsets() const;

 private:
  GeneratorOptions options_;
};

/// (1 - a) v + a mean(v) 1 at every location.
void apply_style(LatentTensor& latent, double strength);

/// Index-aligned clean/poisoned batches over `seeds`.
std::pair<LatentBatch, LatentBatch> make_paired_batches(const SyntheticGenerator& gen,
                                                        std::span<const std::uint64_t> seeds);

/// first, first + 1, ..., first + count - 1
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

}  // namespace sau::sim

#endif  // SAU_ATTACK_SIM_HPP_
