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

#include "sau/trigger_profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sau/error.hpp"
#include "sau/kernels.hpp"

namespace sau {

TriggerProfile::TriggerProfile(LatentTensor trigger_latent, std::size_t sample_count)
    : trigger_(std::move(trigger_latent)),
      activation_(channel_l2_map(trigger_)),
      sample_count_(sample_count) {
  if (sample_count_ == 0) {
    throw ValidationError("trigger profile: sample count must be positive");
  }
}

TriggerProfile::TriggerProfile(LatentTensor trigger_latent, SpatialMap activation_map,
                               std::size_t sample_count)
    : trigger_(std::move(trigger_latent)),
      activation_(std::move(activation_map)),
      sample_count_(sample_count) {}

TriggerProfile TriggerProfile::restore(LatentTensor trigger_latent, SpatialMap activation_map,
                                       std::size_t sample_count, double tolerance) {
  if (sample_count == 0) {
    throw ValidationError("trigger profile: sample count must be positive");
  }
  const Shape& s = trigger_latent.shape();
  if (activation_map.height() != s.height || activation_map.width() != s.width) {
    throw ValidationError("trigger profile: activation map shape does not match trigger latent");
  }
  const SpatialMap expected = channel_l2_map(trigger_latent);
  const auto stored = activation_map.values();
  const auto recomputed = expected.values();
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const double diff = std::abs(static_cast<double>(stored[i]) - recomputed[i]);
    if (diff > tolerance) {
      throw ValidationError("trigger profile: activation map does not match trigger latent (deviation " +
                            std::to_string(diff) + " at location " + std::to_string(i) + ")");
    }
  }
  return TriggerProfile(std::move(trigger_latent), std::move(activation_map), sample_count);
}

TriggerProfile estimate_trigger(const LatentBatch& clean, const LatentBatch& poisoned) {
  if (clean.item_shape() != poisoned.item_shape()) {
    throw ValidationError("estimate trigger: clean and poisoned batch shapes differ");
  }
  const LatentTensor mean_clean = batch_mean(clean);
  const LatentTensor mean_poisoned = batch_mean(poisoned);

  std::vector<float> diff(mean_clean.size());
  const auto c = mean_clean.data();
  const auto p = mean_poisoned.data();
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = static_cast<float>(static_cast<double>(p[i]) - static_cast<double>(c[i]));
  }
  return TriggerProfile(LatentTensor(mean_clean.shape(), std::move(diff)),
                        std::min(clean.count(), poisoned.count()));
}

}  // namespace sau
