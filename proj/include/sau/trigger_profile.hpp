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

#ifndef SAU_TRIGGER_PROFILE_HPP_
#define SAU_TRIGGER_PROFILE_HPP_

#include <cstddef>

#include "sau/latent.hpp"

namespace sau {

/// Latent signature of a trigger: the mean poisoned-minus-clean latent and
/// its per-location channel norm (the activation map).
class TriggerProfile {
 public:
  /// Derives the activation map from `trigger_latent`.
  TriggerProfile(LatentTensor trigger_latent, std::size_t sample_count);

  /// Rebuilds a persisted profile, checking that `activation_map` matches
  /// the trigger latent within `tolerance` (absolute, per location).
  static TriggerProfile restore(LatentTensor trigger_latent, SpatialMap activation_map,
                                std::size_t sample_count, double tolerance = 1e-5);

  const LatentTensor& trigger_latent() const { return trigger_; }
  const SpatialMap& activation_map() const { return activation_; }
  std::size_t sample_count() const { return sample_count_; }
  const Shape& shape() const { return trigger_.shape(); }

 private:
  TriggerProfile(LatentTensor trigger_latent, SpatialMap activation_map, std::size_t sample_count);

  LatentTensor trigger_;
  SpatialMap activation_;
  std::size_t sample_count_;
};

/// trigger = mean(poisoned) - mean(clean). Batches are averaged independently,
/// so their counts may differ; the recorded sample count is the smaller one.
TriggerProfile estimate_trigger(const LatentBatch& clean, const LatentBatch& poisoned);

}  // namespace sau

#endif  // SAU_TRIGGER_PROFILE_HPP_
