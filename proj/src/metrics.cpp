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

#include "sau/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sau/error.hpp"
#include "sau/mask_gen.hpp"

namespace sau {

DetectorCalibration calibrate_detector(std::span<const double> clean_scores, double k,
                                       std::optional<Rect> region) {
  if (clean_scores.size() < kMinCalibrationScores) {
    throw ValidationError("detector calibration needs at least " + std::to_string(kMinCalibrationScores) +
                          " scores, got " + std::to_string(clean_scores.size()));
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ValidationError("detector calibration: k must be positive");
  }
  const auto n = static_cast<double>(clean_scores.size());
  double sum = 0.0;
  for (double s : clean_scores) {
    sum += s;
  }
  const double mean = sum / n;
  double sq = 0.0;
  for (double s : clean_scores) {
    sq += (s - mean) * (s - mean);
  }
  const double stddev = std::sqrt(sq / n);

  DetectorCalibration cal;
  cal.region = region;
  cal.mean = mean;
  cal.stddev = stddev;
  cal.k = k;
  cal.threshold = mean + k * stddev;
  cal.sample_count = clean_scores.size();
  return cal;
}

double trigger_score(const LatentTensor& latent, const TriggerProfile& profile,
                     const std::optional<Rect>& region) {
  const SpatialMap s = similarity_map(latent, profile);
  const Rect r = region.value_or(Rect{0, 0, s.height(), s.width()});
  if (!r.fits_within(s.height(), s.width())) {
    throw ValidationError("detector region does not fit within the latent extent");
  }
  double sum = 0.0;
  for (std::size_t y = r.row; y < r.row + r.height; ++y) {
    for (std::size_t x = r.col; x < r.col + r.width; ++x) {
      sum += s(y, x);
    }
  }
  return sum / static_cast<double>(r.height * r.width);
}

Detection detect_trigger(const LatentTensor& latent, const TriggerProfile& profile,
                         const DetectorCalibration& calibration) {
  const double score = trigger_score(latent, profile, calibration.region);
  return Detection{score > calibration.threshold, score};
}

double removal_accuracy(const std::vector<bool>& detections) {
  if (detections.empty()) {
    throw ValidationError("removal accuracy: no detections");
  }
  const auto clean = std::count(detections.begin(), detections.end(), false);
  return static_cast<double>(clean) / static_cast<double>(detections.size());
}

double psnr(const LatentTensor& a, const LatentTensor& b, double peak) {
  if (a.shape() != b.shape()) {
    throw ValidationError("psnr: shape mismatch");
  }
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw ValidationError("psnr: peak must be positive");
  }
  const auto da = a.data();
  const auto db = b.data();
  double sq = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(da.size());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(peak * peak / mse);
}

EvalReport evaluate_batch(const LatentBatch& candidates, const LatentBatch& references,
                          const TriggerProfile& profile, const std::optional<Rect>& region,
                          double k, double psnr_peak) {
  if (candidates.count() != references.count()) {
    throw ValidationError("evaluation: candidate and reference counts differ (" +
                          std::to_string(candidates.count()) + " vs " + std::to_string(references.count()) + ")");
  }
  if (candidates.item_shape() != references.item_shape() || candidates.item_shape() != profile.shape()) {
    throw ValidationError("evaluation: latent shapes are inconsistent with the trigger profile");
  }

  std::vector<double> reference_scores;
  reference_scores.reserve(references.count());
  for (const auto& ref : references) {
    reference_scores.push_back(trigger_score(ref, profile, region));
  }

  EvalReport report;
  report.detector = calibrate_detector(reference_scores, k, region);
  report.psnr_peak = psnr_peak;

  std::vector<bool> detections;
  double psnr_sum = 0.0;
  for (std::size_t i = 0; i < candidates.count(); ++i) {
    const Detection d = detect_trigger(candidates[i], profile, report.detector);
    const double db = std::min(psnr(candidates[i], references[i], psnr_peak), kPsnrReportCap);
    char id[32];
    std::snprintf(id, sizeof(id), "item-%04zu", i);
    report.items.push_back(ItemRecord{id, d.detected, d.score, db});
    detections.push_back(d.detected);
    psnr_sum += db;
  }
  report.removal_accuracy = removal_accuracy(detections);
  report.mean_psnr_db = psnr_sum / static_cast<double>(candidates.count());
  return report;
}

double max_abs_value(const LatentBatch& batch) {
  double peak = 0.0;
  for (const auto& t : batch) {
    for (float v : t.data()) {
      peak = std::max(peak, static_cast<double>(std::abs(v)));
    }
  }
  return peak;
}

}  // namespace sau
