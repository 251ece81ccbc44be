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

#ifndef SAU_MASK_GEN_HPP_
#define SAU_MASK_GEN_HPP_

#include "sau/latent.hpp"
#include "sau/trigger_profile.hpp"

namespace sau {

/// Hyperparameters of the purification pipeline.
struct SauConfig {
  double tau1 = 0.5;         // primary threshold on the similarity map
  double tau2 = 0.3;         // secondary threshold on the blurred similarity map
  double sigma_mask = 2.0;   // blur applied to the similarity map before tau2
  double beta = 10.0;        // sigmoid scale for mask smoothing
  double alpha = 1.0;        // clean-latent blend strength, [0, 1]
  double sigma_final = 1.0;  // blur applied to the blended latent

  /// Throws ValidationError naming the first offending key.
  void validate() const;

  friend bool operator==(const SauConfig&, const SauConfig&) = default;
};

struct MaskPair {
  BinaryMask primary_raw;
  BinaryMask secondary_raw;
  SpatialMap primary_smooth;
  SpatialMap secondary_smooth;
  SpatialMap similarity;

  friend bool operator==(const MaskPair&, const MaskPair&) = default;
};

/// Per-location channel cosine between `latent` and the profile's trigger latent.
SpatialMap similarity_map(const LatentTensor& latent, const TriggerProfile& profile);

/// primary = S > tau1, secondary = blur(S, sigma_mask) > tau2, each then
/// passed through the shifted sigmoid with scale beta.
MaskPair build_masks(const SpatialMap& similarity, const SauConfig& config);

}  // namespace sau

#endif  // SAU_MASK_GEN_HPP_
