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
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sau/attack_sim.hpp"
#include "sau/error.hpp"
#include "sau/kernels.hpp"
#include "sau/metrics.hpp"
#include "sau/purifier.hpp"

namespace sau {
namespace {

// MaskPair whose "smooth" masks are the raw 0/1 fields themselves.
MaskPair raw_masks(const BinaryMask& primary, const BinaryMask& secondary) {
  auto as_map = [](const BinaryMask& m) {
    return SpatialMap(m.height(), m.width(), std::vector<float>(m.values().begin(), m.values().end()));
  };
  return MaskPair{primary, secondary, as_map(primary), as_map(secondary),
                  SpatialMap(primary.height(), primary.width())};
}

TEST(BlendLatents, SubstitutionCases) {
  std::mt19937_64 rng(30);
  const Shape shape{3, 4, 4};
  const auto hp = oracle::random_tensor(rng, shape);
  const auto hc = oracle::random_tensor(rng, shape);

  EXPECT_EQ(blend_latents(hp, hc, raw_masks(BinaryMask(4, 4, false), BinaryMask(4, 4, false)), 1.0), hp);
  EXPECT_EQ(blend_latents(hp, hc, raw_masks(BinaryMask(4, 4, true), BinaryMask(4, 4, false)), 1.0), hc);

  const auto both = blend_latents(hp, hc, raw_masks(BinaryMask(4, 4, true), BinaryMask(4, 4, true)), 1.0);
  for (std::size_t i = 0; i < hc.size(); ++i) {
    EXPECT_EQ(both.data()[i], static_cast<float>(1.5 * hc.data()[i]));
  }
}

TEST(BlendLatents, FourCaseTableExact) {
  std::mt19937_64 rng(31);
  const Shape shape{4, 2, 2};
  const auto hp = oracle::random_tensor(rng, shape);
  const auto hc = oracle::random_tensor(rng, shape);
  // Location (0,0): neither; (0,1): primary; (1,0): secondary; (1,1): both.
  const BinaryMask primary(2, 2, std::vector<std::uint8_t>{0, 1, 0, 1});
  const BinaryMask secondary(2, 2, std::vector<std::uint8_t>{0, 0, 1, 1});
  for (double alpha : {1.0, 0.5, 0.25}) {
    const auto out = blend_latents(hp, hc, raw_masks(primary, secondary), alpha);
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(out(c, 0, 0), hp(c, 0, 0));
      EXPECT_EQ(out(c, 0, 1), static_cast<float>(alpha * hc(c, 0, 1)));
      EXPECT_EQ(out(c, 1, 0), static_cast<float>(0.5 * alpha * hc(c, 1, 0)));
      EXPECT_EQ(out(c, 1, 1), static_cast<float>(1.5 * alpha * hc(c, 1, 1)));
    }
  }
}

TEST(BlendLatents, MatchesScalarOracleWithSmoothMasks) {
  std::mt19937_64 rng(32);
  const Shape shape{4, 8, 8};
  for (int trial = 0; trial < 5; ++trial) {
    const auto hp = oracle::random_tensor(rng, shape);
    const auto hc = oracle::random_tensor(rng, shape);
    const auto masks = build_masks(oracle::random_map(rng, 8, 8), SauConfig{});
    const double alpha = 0.2 * (trial + 1);
    const auto out = blend_latents(hp, hc, masks, alpha);
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 8; ++x) {
          const double mp = masks.primary_smooth(y, x);
          const double ms = masks.secondary_smooth(y, x);
          const double ref = hp(c, y, x) * (1 - mp) * (1 - ms) + hc(c, y, x) * mp * alpha +
                             hc(c, y, x) * ms * alpha * 0.5;
          EXPECT_NEAR(out(c, y, x), ref, 1e-6);
        }
      }
    }
  }
}

TEST(BlendLatents, LinearInJointScaling) {
  std::mt19937_64 rng(33);
  const Shape shape{2, 6, 6};
  const auto hp = oracle::random_tensor(rng, shape);
  const auto hc = oracle::random_tensor(rng, shape);
  const auto masks = build_masks(oracle::random_map(rng, 6, 6), SauConfig{});
  const auto base = blend_latents(hp, hc, masks, 0.8);
  for (float a : {-2.0F, 0.5F, 3.0F}) {
    LatentTensor sp = hp;
    LatentTensor sc = hc;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      sp.data()[i] *= a;
      sc.data()[i] *= a;
    }
    const auto scaled = blend_latents(sp, sc, masks, 0.8);
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(scaled.data()[i], a * base.data()[i], 1e-5);
    }
  }
}

TEST(BlendLatents, ShapeMismatch) {
  const auto masks = build_masks(SpatialMap(4, 4), SauConfig{});
  EXPECT_THROW(blend_latents(LatentTensor(Shape{2, 4, 4}), LatentTensor(Shape{2, 4, 5}), masks, 1.0),
               ValidationError);
  EXPECT_THROW(blend_latents(LatentTensor(Shape{2, 5, 4}), LatentTensor(Shape{2, 5, 4}), masks, 1.0),
               ValidationError);
}

TEST(Finalize, ConstantTensorUnchanged) {
  const LatentTensor t(Shape{3, 9, 7}, std::vector<float>(3 * 9 * 7, -1.25F));
  EXPECT_EQ(finalize(t, 1.0), t);
}

TEST(Finalize, ChannelsDoNotMix) {
  LatentTensor t(Shape{3, 11, 11});
  t(1, 5, 5) = 1.0F;
  const auto out = finalize(t, 1.0);
  const double w0 = oracle::center_tap(1.0);
  for (std::size_t y = 0; y < 11; ++y) {
    for (std::size_t x = 0; x < 11; ++x) {
      EXPECT_EQ(out(0, y, x), 0.0F);
      EXPECT_EQ(out(2, y, x), 0.0F);
    }
  }
  EXPECT_NEAR(out(1, 5, 5), w0 * w0, 1e-7);
}

TEST(Finalize, MatchesDenseOraclePerChannel) {
  std::mt19937_64 rng(34);
  const auto t = oracle::random_tensor(rng, Shape{3, 16, 16});
  const auto out = finalize(t, 1.5);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> plane(t.plane(c).begin(), t.plane(c).end());
    const auto ref = oracle::dense_blur(plane, 16, 16, 1.5);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_NEAR(out.plane(c)[i], ref[i], 1e-6);
    }
  }
}

TEST(Purify, IdenticalInputsGiveScaledBlur) {
  // S is far below both thresholds (trigger is antiparallel), so every
  // location gets weight (1 - s0)^2 + 1.5 alpha s0.
  std::mt19937_64 rng(35);
  const Shape shape{4, 12, 12};
  LatentTensor h(shape);
  LatentTensor trig(shape);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t y = 0; y < 12; ++y) {
      for (std::size_t x = 0; x < 12; ++x) {
        h(c, y, x) = 1.0F + static_cast<float>(std::uniform_real_distribution<double>(0, 1)(rng));
        trig(c, y, x) = -h(c, y, x);
      }
    }
  }
  const TriggerProfile profile(trig, 1);
  const SauConfig cfg;
  const auto result = purify(h, h, profile, cfg);
  EXPECT_EQ(result.masks.primary_raw.count(), 0U);
  EXPECT_EQ(result.masks.secondary_raw.count(), 0U);

  const double weight = 0.9966983687913523;  // (1 - s0)^2 + s0 + 0.5 s0, s0 = sigmoid(-5)
  const double s0 = oracle::sigmoid(-5.0);
  EXPECT_NEAR(weight, (1 - s0) * (1 - s0) + 1.5 * s0, 1e-15);
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> plane(h.plane(c).begin(), h.plane(c).end());
    for (auto& v : plane) {
      v *= weight;
    }
    const auto ref = oracle::dense_blur(plane, 12, 12, 1.0);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_NEAR(result.latent.plane(c)[i], ref[i], 1e-5);
    }
  }
}

TEST(Purify, ZeroProfilePassesThrough) {
  std::mt19937_64 rng(36);
  const Shape shape{4, 10, 10};
  const auto hp = oracle::random_tensor(rng, shape);
  const auto hc = oracle::random_tensor(rng, shape);
  const TriggerProfile zero(LatentTensor(shape), 4);
  const auto r = purify(hp, hc, zero, SauConfig{});
  for (float v : r.masks.similarity.values()) {
    EXPECT_EQ(v, 0.0F);
  }
  EXPECT_EQ(r.masks.primary_raw.count(), 0U);
  EXPECT_EQ(r.masks.secondary_raw.count(), 0U);
  const auto expected = finalize(blend_latents(hp, hc, r.masks, 1.0), 1.0);
  EXPECT_EQ(r.latent, expected);
}

TEST(Purify, EqualsManualCompositionAndIsDeterministic) {
  std::mt19937_64 rng(37);
  const Shape shape{4, 12, 12};
  for (int trial = 0; trial < 20; ++trial) {
    const auto hp = oracle::random_tensor(rng, shape);
    const auto hc = oracle::random_tensor(rng, shape);
    const TriggerProfile profile(oracle::random_tensor(rng, shape), 8);
    SauConfig cfg;
    cfg.alpha = std::uniform_real_distribution<double>(0, 1)(rng);
    cfg.tau1 = std::uniform_real_distribution<double>(0, 0.6)(rng);
    cfg.tau2 = std::uniform_real_distribution<double>(-0.2, 0.4)(rng);

    const auto r = purify(hp, hc, profile, cfg, "p", "c");
    const auto masks = build_masks(similarity_map(hp, profile), cfg);
    const auto manual = finalize(blend_latents(hp, hc, masks, cfg.alpha), cfg.sigma_final);
    EXPECT_EQ(r.latent, manual);
    EXPECT_EQ(r.masks, masks);
    EXPECT_EQ(r.config_used, cfg);
    EXPECT_EQ(r.poisoned_id, "p");
    EXPECT_EQ(purify(hp, hc, profile, cfg).latent, r.latent);
  }
}

TEST(Purify, SimulatorPixelAttackIsRemoved) {
  const sim::SyntheticGenerator gen(sim::GeneratorOptions{});
  const auto [fit_clean, fit_poisoned] = sim::make_paired_batches(gen, sim::seed_range(20000, 256));
  const auto profile = estimate_trigger(fit_clean, fit_poisoned);
  const Rect region = gen.options().attack.patch;

  const auto [ref, poisoned] = sim::make_paired_batches(gen, sim::seed_range(0, 32));
  std::vector<double> scores;
  for (const auto& r : ref) {
    scores.push_back(trigger_score(r, profile, region));
  }
  const auto cal = calibrate_detector(scores, 3.0, region);
  for (std::size_t i = 0; i < poisoned.count(); ++i) {
    EXPECT_TRUE(detect_trigger(poisoned[i], profile, cal).detected);
    const auto result = purify(poisoned[i], ref[i], profile, SauConfig{});
    EXPECT_FALSE(detect_trigger(result.latent, profile, cal).detected) << "item " << i;
  }
}

TEST(Purify, RejectsInconsistentShapes) {
  const TriggerProfile profile(LatentTensor(Shape{2, 4, 4}), 1);
  EXPECT_THROW(purify(LatentTensor(Shape{2, 4, 4}), LatentTensor(Shape{2, 4, 5}), profile, SauConfig{}),
               ValidationError);
  SauConfig bad;
  bad.alpha = -0.1;
  EXPECT_THROW(purify(LatentTensor(Shape{2, 4, 4}), LatentTensor(Shape{2, 4, 4}), profile, bad), ValidationError);
}

}  // namespace
}  // namespace sau
