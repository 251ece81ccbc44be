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

#ifndef SAU_LATENT_HPP_
#define SAU_LATENT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sau {

/// Dimensions of a dense latent: channels x height x width.
struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t plane_size() const { return height * width; }
  std::size_t size() const { return channels * height * width; }
  bool valid() const { return channels > 0 && height > 0 && width > 0; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Axis-aligned rectangle of spatial locations, [row, row+height) x [col, col+width).
struct Rect {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  bool fits_within(std::size_t map_height, std::size_t map_width) const {
    return height > 0 && width > 0 && row + height <= map_height && col + width <= map_width;
  }
  bool contains(std::size_t y, std::size_t x) const {
    return y >= row && y < row + height && x >= col && x < col + width;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Dense C x H x W array of 32-bit activations, row-major by (channel, row, column).
///
/// Constructors reject non-positive dimensions, length mismatches and
/// non-finite values. Mutable element access is unchecked.
class LatentTensor {
 public:
  explicit LatentTensor(Shape shape);
  LatentTensor(Shape shape, std::vector<float> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  float operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  float& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  std::span<const float> plane(std::size_t c) const {
    return std::span<const float>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
  }
  std::span<float> plane(std::size_t c) {
    return std::span<float>(data_).subspan(c * shape_.plane_size(), shape_.plane_size());
  }

  friend bool operator==(const LatentTensor&, const LatentTensor&) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Ordered, nonempty collection of tensors sharing one shape.
class LatentBatch {
 public:
  explicit LatentBatch(std::vector<LatentTensor> items);

  std::size_t count() const { return items_.size(); }
  const Shape& item_shape() const { return items_.front().shape(); }
  const LatentTensor& operator[](std::size_t i) const { return items_[i]; }
  std::span<const LatentTensor> items() const { return items_; }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const LatentBatch&, const LatentBatch&) = default;

 private:
  std::vector<LatentTensor> items_;
};

/// H x W scalar field (activation maps, similarity maps, smoothed masks).
class SpatialMap {
 public:
  SpatialMap(std::size_t height, std::size_t width, float fill = 0.0F);
  SpatialMap(std::size_t height, std::size_t width, std::vector<float> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  float operator()(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
  float& operator()(std::size_t y, std::size_t x) { return values_[y * width_ + x]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  friend bool operator==(const SpatialMap&, const SpatialMap&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<float> values_;
};

/// H x W field of exact 0/1 values.
class BinaryMask {
 public:
  BinaryMask(std::size_t height, std::size_t width, bool fill = false);
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  bool operator()(std::size_t y, std::size_t x) const { return values_[y * width_ + x] != 0; }
  void set(std::size_t y, std::size_t x, bool on) { values_[y * width_ + x] = on ? 1 : 0; }

  std::span<const std::uint8_t> values() const { return values_; }
  std::size_t count() const;

  // True where every set location of `other` is also set here.
  bool contains(const BinaryMask& other) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> values_;
};

}  // namespace sau

#endif  // SAU_LATENT_HPP_
