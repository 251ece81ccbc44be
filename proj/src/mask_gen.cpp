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

#include "sau/mask_gen.hpp"

#include <cmath>
#include <string>

#include "sau/error.hpp"
#include "sau/kernels.hpp"

namespace sau {
namespace {

void require(bool ok, const char* key, const char* rule) {
  if (!ok) {
    throw ValidationError(std::string("config key \"") + key + "\": " + rule);
  }
}

}  // namespace

void SauConfig::validate() const {
  require(std::isfinite(tau1), "tau1", "must be finite");
  require(std::isfinite(tau2), "tau2", "must be finite");
  require(std::isfinite(sigma_mask) && sigma_mask > 0.0, "sigma_mask", "must be > 0");
  require(std::isfinite(beta) && beta > 0.0, "beta", "must be > 0");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "alpha", "must lie in [0, 1]");
  require(std::isfinite(sigma_final) && sigma_final > 0.0, "sigma_final", "must be > 0");
}

SpatialMap similarity_map(const LatentTensor& latent, const TriggerProfile& profile) {
  if (latent.shape() != profile.shape()) {
    throw ValidationError("similarity map: latent shape does not match trigger profile");
  }
  return cosine_map(latent, profile.trigger_latent());
}

MaskPair build_masks(const SpatialMap& similarity, const SauConfig& config) {
  config.validate();
  BinaryMask primary = threshold_map(similarity, config.tau1);
  BinaryMask secondary = threshold_map(gaussian_blur_map(similarity, config.sigma_mask), config.tau2);
  SpatialMap primary_smooth = sigmoid_smooth(primary, config.beta);
  SpatialMap secondary_smooth = sigmoid_smooth(secondary, config.beta);
  return MaskPair{std::move(primary), std::move(secondary), std::move(primary_smooth),
                  std::move(secondary_smooth), similarity};
}

}  // namespace sau
