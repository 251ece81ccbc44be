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

#ifndef SAU_METRICS_HPP_
#define SAU_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sau/latent.hpp"
#include "sau/trigger_profile.hpp"

namespace sau {

// Reports clamp infinite PSNR (identical tensors) to this value.
inline constexpr double kPsnrReportCap = 99.0;
inline constexpr std::size_t kMinCalibrationScores = 8;

/// Threshold = mean + k * std of detector scores on clean latents
/// (population std). An empty region means the full frame.
struct DetectorCalibration {
  std::optional<Rect> region;
  double mean = 0.0;
  double stddev = 0.0;
  double k = 3.0;
  double threshold = 0.0;
  std::size_t sample_count = 0;
};

DetectorCalibration calibrate_detector(std::span<const double> clean_scores, double k = 3.0,
                                       std::optional<Rect> region = std::nullopt);

/// Mean similarity to the trigger latent over `region` (full frame if empty).
double trigger_score(const LatentTensor& latent, const TriggerProfile& profile,
                     const std::optional<Rect>& region);

struct Detection {
  bool detected = false;
  double score = 0.0;
};

Detection detect_trigger(const LatentTensor& latent, const TriggerProfile& profile,
                         const DetectorCalibration& calibration);

/// Fraction of items in which the trigger was not detected.
double removal_accuracy(const std::vector<bool>& detections);

/// 10 log10(peak^2 / MSE); +inf when the tensors are identical.
double psnr(const LatentTensor& a, const LatentTensor& b, double peak);

struct ItemRecord {
  std::string id;
  bool detected_trigger = false;
  double score = 0.0;
  double psnr_db = 0.0;  // already capped at kPsnrReportCap

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

struct EvalReport {
  std::vector<ItemRecord> items;
  double removal_accuracy = 0.0;
  double mean_psnr_db = 0.0;
  double psnr_peak = 1.0;
  DetectorCalibration detector;
  std::string attack_kind;

  friend bool operator==(const EvalReport& a, const EvalReport& b) {
    return a.items == b.items && a.removal_accuracy == b.removal_accuracy &&
           a.mean_psnr_db == b.mean_psnr_db && a.psnr_peak == b.psnr_peak &&
           a.attack_kind == b.attack_kind && a.detector.region == b.detector.region &&
           a.detector.mean == b.detector.mean && a.detector.stddev == b.detector.stddev &&
           a.detector.k == b.detector.k && a.detector.threshold == b.detector.threshold &&
           a.detector.sample_count == b.detector.sample_count;
  }
};

/// Scores every candidate against a detector calibrated on `references`
/// and measures PSNR of candidate i against reference i.
EvalReport evaluate_batch(const LatentBatch& candidates, const LatentBatch& references,
                          const TriggerProfile& profile, const std::optional<Rect>& region,
                          double k, double psnr_peak);

/// Largest absolute value across the batch.
double max_abs_value(const LatentBatch& batch);

}  // namespace sau

#endif  // SAU_METRICS_HPP_
