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

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sau/attack_sim.hpp"
#include "sau/error.hpp"
#include "sau/metrics.hpp"

namespace sau {
namespace {

TEST(CalibrateDetector, EqualScoresGiveZeroSpread) {
  const std::vector<double> scores(10, 0.25);
  const auto cal = calibrate_detector(scores);
  EXPECT_EQ(cal.mean, 0.25);
  EXPECT_EQ(cal.stddev, 0.0);
  EXPECT_EQ(cal.threshold, 0.25);
  EXPECT_EQ(cal.sample_count, 10U);
}

TEST(CalibrateDetector, BalancedBinaryScores) {
  // Mean 0.5, population std 0.5, so mean + 3 std = 2.
  std::vector<double> scores;
  for (int i = 0; i < 20; ++i) {
    scores.push_back(i % 2);
  }
  EXPECT_DOUBLE_EQ(calibrate_detector(scores, 3.0).threshold, 2.0);
}

TEST(CalibrateDetector, MatchesTwoPassOracle) {
  std::mt19937_64 rng(40);
  std::normal_distribution<double> dist(0.1, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> scores(50);
    for (auto& s : scores) {
      s = dist(rng);
    }
    double mean = 0.0;
    for (double s : scores) {
      mean += s;
    }
    mean /= 50.0;
    double var = 0.0;
    for (double s : scores) {
      var += (s - mean) * (s - mean);
    }
    const double sd = std::sqrt(var / 50.0);
    const auto cal = calibrate_detector(scores, 2.5);
    EXPECT_NEAR(cal.mean, mean, 1e-9);
    EXPECT_NEAR(cal.stddev, sd, 1e-9);
    EXPECT_NEAR(cal.threshold, mean + 2.5 * sd, 1e-9);
  }
}

TEST(CalibrateDetector, RejectsTooFewScoresAndBadK) {
  const std::vector<double> seven(7, 0.0);
  EXPECT_THROW(calibrate_detector(seven), ValidationError);
  const std::vector<double> eight(8, 0.0);
  EXPECT_NO_THROW(calibrate_detector(eight));
  EXPECT_THROW(calibrate_detector(eight, -1.0), ValidationError);
}

class SimulatedDetector : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto [c, p] = sim::make_paired_batches(gen_, sim::seed_range(40000, 256));
    profile_ = std::make_unique<TriggerProfile>(estimate_trigger(c, p));
    std::vector<double> scores;
    for (std::uint64_t seed = 50000; seed < 50100; ++seed) {
      scores.push_back(trigger_score(gen_.generate({seed, false}), *profile_, region_));
    }
    cal_ = calibrate_detector(scores, 3.0, region_);
  }

  sim::SyntheticGenerator gen_{sim::GeneratorOptions{}};
  Rect region_ = sim::GeneratorOptions{}.attack.patch;
  std::unique_ptr<TriggerProfile> profile_;
  DetectorCalibration cal_;
};

TEST_F(SimulatedDetector, SeparatesFreshCleanFromPoisoned) {
  int false_alarms = 0;
  int hits = 0;
  for (std::uint64_t seed = 60000; seed < 60100; ++seed) {
    false_alarms += detect_trigger(gen_.generate({seed, false}), *profile_, cal_).detected ? 1 : 0;
    hits += detect_trigger(gen_.generate({seed, true}), *profile_, cal_).detected ? 1 : 0;
  }
  EXPECT_LE(false_alarms, 1);
  EXPECT_EQ(hits, 100);
}

TEST_F(SimulatedDetector, TriggerItselfScoresOne) {
  const auto d = detect_trigger(profile_->trigger_latent(), *profile_, cal_);
  EXPECT_NEAR(d.score, 1.0, 1e-6);
  EXPECT_TRUE(d.detected);
}

TEST_F(SimulatedDetector, ScoreIsScaleInvariant) {
  auto latent = gen_.generate({7, true});
  const double base = trigger_score(latent, *profile_, region_);
  for (auto& v : latent.data()) {
    v *= 4.0F;
  }
  EXPECT_NEAR(trigger_score(latent, *profile_, region_), base, 1e-6);
}

TEST(TriggerScore, RegionAveragesLocationCosines) {
  std::mt19937_64 rng(41);
  const auto latent = oracle::random_tensor(rng, Shape{3, 8, 8});
  const auto trig = oracle::random_tensor(rng, Shape{3, 8, 8});
  const TriggerProfile profile(trig, 1);
  const Rect r{1, 2, 3, 4};
  double acc = 0.0;
  for (std::size_t y = 1; y < 4; ++y) {
    for (std::size_t x = 2; x < 6; ++x) {
      acc += oracle::location_cosine(latent, trig, y, x);
    }
  }
  EXPECT_NEAR(trigger_score(latent, profile, r), acc / 12.0, 1e-6);
  double full = 0.0;
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      full += oracle::location_cosine(latent, trig, y, x);
    }
  }
  EXPECT_NEAR(trigger_score(latent, profile, std::nullopt), full / 64.0, 1e-6);
  EXPECT_THROW(trigger_score(latent, profile, Rect{6, 6, 4, 4}), ValidationError);
}

TEST(RemovalAccuracy, Fractions) {
  EXPECT_EQ(removal_accuracy(std::vector<bool>(100, false)), 1.0);
  EXPECT_EQ(removal_accuracy(std::vector<bool>(100, true)), 0.0);
  std::vector<bool> three(100, false);
  three[5] = three[50] = three[99] = true;
  EXPECT_DOUBLE_EQ(removal_accuracy(three), 0.97);
  EXPECT_THROW(removal_accuracy({}), ValidationError);
}

TEST(Psnr, IdenticalIsInfinite) {
  std::mt19937_64 rng(42);
  const auto a = oracle::random_tensor(rng, Shape{2, 4, 4});
  EXPECT_TRUE(std::isinf(psnr(a, a, 1.0)));
  EXPECT_GT(psnr(a, a, 1.0), 0.0);
}

TEST(Psnr, MseEqualToPeakSquaredIsZeroDecibels) {
  const LatentTensor a(Shape{1, 2, 2}, {0.0F, 0.0F, 0.0F, 0.0F});
  const LatentTensor b(Shape{1, 2, 2}, {2.0F, -2.0F, 2.0F, -2.0F});
  EXPECT_NEAR(psnr(a, b, 2.0), 0.0, 1e-12);
  EXPECT_NEAR(psnr(a, b, 20.0), 20.0, 1e-12);
}

TEST(Psnr, MatchesScalarOracleAndIsSymmetric) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = oracle::random_tensor(rng, Shape{3, 5, 7});
    const auto b = oracle::random_tensor(rng, Shape{3, 5, 7});
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a.data()[i]) - b.data()[i];
      mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    const double peak = 3.0;
    EXPECT_NEAR(psnr(a, b, peak), 10.0 * std::log10(peak * peak / mse), 1e-9);
    EXPECT_EQ(psnr(a, b, peak), psnr(b, a, peak));
  }
  EXPECT_THROW(psnr(LatentTensor(Shape{1, 2, 2}), LatentTensor(Shape{1, 2, 3}), 1.0), ValidationError);
  EXPECT_THROW(psnr(LatentTensor(Shape{1, 2, 2}), LatentTensor(Shape{1, 2, 2}), 0.0), ValidationError);
}

TEST(EvaluateBatch, IdenticalBatchesAreCleanAndCapped) {
  const sim::SyntheticGenerator gen(sim::GeneratorOptions{});
  const auto [clean, poisoned] = sim::make_paired_batches(gen, sim::seed_range(0, 16));
  const auto [fc, fp] = sim::make_paired_batches(gen, sim::seed_range(900, 64));
  const auto profile = estimate_trigger(fc, fp);
  const Rect region = gen.options().attack.patch;

  const auto same = evaluate_batch(clean, clean, profile, region, 3.0, 1.0);
  ASSERT_EQ(same.items.size(), 16U);
  EXPECT_EQ(same.items[3].id, "item-0003");
  EXPECT_EQ(same.mean_psnr_db, kPsnrReportCap);
  EXPECT_EQ(same.detector.sample_count, 16U);
  for (const auto& item : same.items) {
    EXPECT_EQ(item.psnr_db, kPsnrReportCap);
  }

  const auto bad = evaluate_batch(poisoned, clean, profile, region, 3.0, max_abs_value(clean));
  EXPECT_EQ(bad.removal_accuracy, 0.0);
  EXPECT_LT(bad.mean_psnr_db, kPsnrReportCap);

  EXPECT_THROW(evaluate_batch(LatentBatch({clean[0]}), clean, profile, region, 3.0, 1.0), ValidationError);
}

TEST(MaxAbsValue, FindsLargestMagnitude) {
  const LatentBatch b({LatentTensor(Shape{1, 1, 2}, {1.0F, -3.5F}), LatentTensor(Shape{1, 1, 2}, {2.0F, 0.0F})});
  EXPECT_EQ(max_abs_value(b), 3.5);
}

}  // namespace
}  // namespace sau
