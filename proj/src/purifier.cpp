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

#include "sau/purifier.hpp"

#include "sau/error.hpp"
#include "sau/kernels.hpp"

namespace sau {

LatentTensor blend_latents(const LatentTensor& poisoned, const LatentTensor& clean,
                           const MaskPair& masks, double alpha) {
  const Shape& s = poisoned.shape();
  if (clean.shape() != s) {
    throw ValidationError("blend: poisoned and clean latent shapes differ");
  }
  const auto& mp = masks.primary_smooth;
  const auto& ms = masks.secondary_smooth;
  if (mp.height() != s.height || mp.width() != s.width || ms.height() != s.height ||
      ms.width() != s.width) {
    throw ValidationError("blend: mask shape does not match latent spatial shape");
  }

  const double half_alpha = alpha * 0.5;
  LatentTensor out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        const double p = mp(y, x);
        const double q = ms(y, x);
        const double hp = poisoned(c, y, x);
        const double hc = clean(c, y, x);
        out(c, y, x) = static_cast<float>(hp * (1.0 - p) * (1.0 - q) + hc * p * alpha + hc * q * half_alpha);
      }
    }
  }
  return out;
}

LatentTensor finalize(const LatentTensor& latent, double sigma_final) {
  const Shape& s = latent.shape();
  LatentTensor out(s);
  for (std::size_t c = 0; c < s.channels; ++c) {
    gaussian_blur_plane(latent.plane(c), s.height, s.width, sigma_final, out.plane(c));
  }
  return out;
}

PurifiedResult purify(const LatentTensor& poisoned, const LatentTensor& clean,
                      const TriggerProfile& profile, const SauConfig& config,
                      std::string poisoned_id, std::string clean_id) {
  config.validate();
  if (poisoned.shape() != profile.shape() || clean.shape() != profile.shape()) {
    throw ValidationError("purify: latent shapes are inconsistent with the trigger profile");
  }
  MaskPair masks = build_masks(similarity_map(poisoned, profile), config);
  LatentTensor blended = blend_latents(poisoned, clean, masks, config.alpha);
  return PurifiedResult{finalize(blended, config.sigma_final), std::move(masks), config,
                        std::move(poisoned_id), std::move(clean_id)};
}

}  // namespace sau
