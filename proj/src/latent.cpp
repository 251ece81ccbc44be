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

#include "sau/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sau/error.hpp"

namespace sau {
namespace {

void require_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": non-finite value");
    }
  }
}

}  // namespace

LatentTensor::LatentTensor(Shape shape) : shape_(shape) {
  if (!shape.valid()) {
    throw ValidationError("latent tensor: dimensions must be positive");
  }
  data_.assign(shape.size(), 0.0F);
}

LatentTensor::LatentTensor(Shape shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  if (!shape.valid()) {
    throw ValidationError("latent tensor: dimensions must be positive");
  }
  if (data_.size() != shape.size()) {
    throw ValidationError("latent tensor: data length " + std::to_string(data_.size()) +
                          " does not match shape (" + std::to_string(shape.size()) + ")");
  }
  require_finite(data_, "latent tensor");
}

LatentBatch::LatentBatch(std::vector<LatentTensor> items) : items_(std::move(items)) {
  if (items_.empty()) {
    throw ValidationError("empty batch");
  }
  const Shape& first = items_.front().shape();
  for (const auto& item : items_) {
    if (item.shape() != first) {
      throw ValidationError("inhomogeneous batch");
    }
  }
}

SpatialMap::SpatialMap(std::size_t height, std::size_t width, float fill)
    : height_(height), width_(width), values_(height * width, fill) {
  if (height == 0 || width == 0) {
    throw ValidationError("spatial map: dimensions must be positive");
  }
  require_finite(values_, "spatial map");
}

SpatialMap::SpatialMap(std::size_t height, std::size_t width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height == 0 || width == 0) {
    throw ValidationError("spatial map: dimensions must be positive");
  }
  if (values_.size() != height * width) {
    throw ValidationError("spatial map: value count does not match shape");
  }
  require_finite(values_, "spatial map");
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, bool fill)
    : height_(height), width_(width), values_(height * width, fill ? 1 : 0) {
  if (height == 0 || width == 0) {
    throw ValidationError("binary mask: dimensions must be positive");
  }
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height == 0 || width == 0) {
    throw ValidationError("binary mask: dimensions must be positive");
  }
  if (values_.size() != height * width) {
    throw ValidationError("binary mask: value count does not match shape");
  }
  if (std::any_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw ValidationError("binary mask: values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

bool BinaryMask::contains(const BinaryMask& other) const {
  if (other.height_ != height_ || other.width_ != width_) {
    return false;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (other.values_[i] != 0 && values_[i] == 0) {
      return false;
    }
  }
  return true;
}

}  // namespace sau
