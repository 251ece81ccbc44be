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

#ifndef SAU_PURIFIER_HPP_
#define SAU_PURIFIER_HPP_

#include <string>

#include "sau/latent.hpp"
#include "sau/mask_gen.hpp"
#include "sau/trigger_profile.hpp"

namespace sau {

struct PurifiedResult {
  LatentTensor latent;
  MaskPair masks;
  SauConfig config_used;
  std::string poisoned_id;
  std::string clean_id;
};

/// Mixes the poisoned and clean latents through the smoothed masks:
///
///   out = h_p (1 - m_p)(1 - m_s) + h_c m_p alpha + h_c m_s (alpha / 2)
///
/// Masks broadcast across channels. The weights are not renormalized, so in
/// locations covered by both masks the clean latent enters with weight up to
/// 1.5 alpha.
LatentTensor blend_latents(const LatentTensor& poisoned, const LatentTensor& clean,
                           const MaskPair& masks, double alpha);

/// Gaussian blur of every channel plane with the same sigma; channels never mix.
LatentTensor finalize(const LatentTensor& latent, double sigma_final);

/// similarity_map -> build_masks -> blend_latents -> finalize.
PurifiedResult purify(const LatentTensor& poisoned, const LatentTensor& clean,
                      const TriggerProfile& profile, const SauConfig& config,
                      std::string poisoned_id = {}, std::string clean_id = {});

}  // namespace sau

#endif  // SAU_PURIFIER_HPP_
