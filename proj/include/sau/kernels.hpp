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

#ifndef SAU_KERNELS_HPP_
#define SAU_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "sau/latent.hpp"

namespace sau {

// Norms below this are treated as zero vectors by cosine_map.
inline constexpr double kDegenerateNorm = 1e-12;

/// Elementwise arithmetic mean with double accumulation.
/// Throws ValidationError("empty batch") or ValidationError("inhomogeneous batch").
LatentTensor batch_mean(std::span<const LatentTensor> items);
LatentTensor batch_mean(const LatentBatch& batch);

/// Per-location L2 norm of the channel vector.
SpatialMap channel_l2_map(const LatentTensor& t);

/// Per-location cosine between the channel vectors of `a` and `b`, clamped
/// to [-1, 1]. Locations where either vector is (near) zero map to 0.
SpatialMap cosine_map(const LatentTensor& a, const LatentTensor& b);

/// Normalized truncated Gaussian taps, radius ceil(3 sigma); index r is the center.
std::vector<double> gaussian_kernel(double sigma);

/// Mirror-without-repeat reflection of index `i` into [0, n).
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);

/// Separable Gaussian blur of one H x W plane (rows first, then columns),
/// reflect boundary. `src` and `dst` may alias.
void gaussian_blur_plane(std::span<const float> src, std::size_t height, std::size_t width,
                         double sigma, std::span<float> dst);

SpatialMap gaussian_blur_map(const SpatialMap& m, double sigma);

/// 1 / (1 + exp(-(v - 0.5) * beta)) elementwise.
SpatialMap sigmoid_smooth(const SpatialMap& m, double beta);
SpatialMap sigmoid_smooth(const BinaryMask& m, double beta);

/// Scalar form used by sigmoid_smooth.
double shifted_sigmoid(double value, double beta);

/// 1 where value > tau (strict), else 0.
BinaryMask threshold_map(const SpatialMap& m, double tau);

}  // namespace sau

#endif  // SAU_KERNELS_HPP_
