/*
 * Copyright 2026 The ordcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ordcal/rectify.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ordcal/errors.hpp"
#include "ordcal/metrics.hpp"
#include "ordcal/synth.hpp"
#include "test_util.hpp"

namespace ordcal {
namespace {

DistortionCoefficients div(std::vector<double> k, double r_norm) {
  return {Model::kDivision, std::move(k), r_norm};
}

TEST(InverseRadialMap, IdentityTable) {
  const auto map = InverseRadialMap::build(div({0, 0, 0, 0}, 90.5), {64, 64}, 128, 128);
  EXPECT_GE(map.size(), InverseRadialMap::kMinEntries);
  for (std::size_t i = 0; i < map.size(); i += 97) {
    EXPECT_EQ(*map.lookup(map.grid_radius(i)), map.grid_radius(i));
    EXPECT_NEAR(map.entry(i), map.grid_radius(i), 1e-9);
  }
  EXPECT_EQ(*map.lookup(17.25), 17.25);
}

TEST(InverseRadialMap, GridPointsAreExact) {
  const auto k = div({0.5, 0.02, -0.01, 0.005}, 181.0);
  const auto map = InverseRadialMap::build(k, {128, 128}, 256, 256);
  for (std::size_t i = 1; i + 1 < map.size(); i += 131) {
    const double direct = solve_distorted_radius(k, map.grid_radius(i), 1.0);
    EXPECT_EQ(*map.lookup(map.grid_radius(i)), direct);
  }
}

TEST(InverseRadialMap, OffGridAccuracy) {
  const double rn = 181.01933598375618;
  const auto k = div({0.5}, rn);
  const auto map = InverseRadialMap::build(k, {128, 128}, 256, 256);
  EXPECT_LE(map.spot_check_error(), 1e-4 * rn);
  Rng rng(64);
  for (int i = 0; i < 64; ++i) {
    const double rc = rng.uniform(0.0, map.max_corrected());
    const double direct = solve_distorted_radius(k, rc, map.max_distorted() / rn);
    EXPECT_LE(std::abs(*map.lookup(rc) - direct), 1e-4 * rn) << rc;
  }
}

TEST(InverseRadialMap, RangeAndErrors) {
  const auto k = div({0.5}, 100.0);
  const auto map = InverseRadialMap::build(k, {50, 50}, 100, 100);
  EXPECT_FALSE(map.lookup(map.max_corrected() * 1.01).has_value());
  EXPECT_FALSE(map.lookup(-1.0).has_value());
  EXPECT_TRUE(map.lookup(0.0).has_value());
  EXPECT_EQ(*map.lookup(0.0), 0.0);
  // Reaches the farthest corner: sqrt(2) * 50 px.
  EXPECT_NEAR(map.max_distorted(), std::hypot(50.0, 50.0), 1e-9);
  EXPECT_THROW(InverseRadialMap::build(div({2.0}, 100.0), {50, 50}, 100, 100), DomainError);
}

TEST(InverseRadialMap, TruncatesPastUnitRadiusWhenFolding) {
  // Monotone on [0, 1]; s / (1 + 0.45 s^2 + 0.1 s^4) peaks before the corner
  // of a far off-center principal point.
  const auto k = div({0.45, 0.1}, 50.0);
  ASSERT_TRUE(validate_monotone(k, 1.0).ok);
  const auto map = InverseRadialMap::build(k, {0, 0}, 100, 100);
  EXPECT_LT(map.max_distorted(), std::hypot(100.0, 100.0));
  EXPECT_GE(map.max_distorted(), 50.0);
}

ImageBuffer scene(int w, int h, std::uint64_t seed) {
  return render_scene(SceneKind::kMixed, w, h, seed);
}

TEST(RectifyImage, IdentityIsByteExact) {
  const auto img = scene(64, 48, 1);
  EXPECT_EQ(rectify_image(img, div({0, 0, 0, 0}, 40.0), {32, 24}), img);
}

TEST(RectifyImage, RoundTripRecoversCenter) {
  const int w = 256, h = 256;
  const double rn = default_r_norm(w, h);
  auto ranges = default_ranges();
  ranges.level_window = std::make_pair(1.05, 1.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto k = sample_coefficients(ranges, seed, rn);
    const auto clean = scene(w, h, seed);
    const auto back = rectify_image(distort_image(clean, k, {128, 128}), k, {128, 128});
    const double p = psnr(crop(clean, 37, 37, 181, 181), crop(back, 37, 37, 181, 181));
    EXPECT_GE(p, 28.0) << "seed " << seed;
  }
}

TEST(RectifyImage, LinesThroughCenterStayStraight) {
  ImageBuffer img(64, 64, 1, 0);
  for (int i = 0; i < 64; ++i) {
    img.at(i, 31, 0) = 200;
    img.at(i, 32, 0) = 200;
  }
  const auto out = rectify_image(img, div({0.4, 0.05}, 45.0), {32, 32});
  for (int i = 0; i < 64; ++i) {
    EXPECT_EQ(out.at(i, 31, 0), out.at(i, 32, 0));
    EXPECT_EQ(out.at(i, 30, 0), out.at(i, 33, 0));
    for (int j = 0; j < 29; ++j) EXPECT_EQ(out.at(i, j, 0), 0) << i << "," << j;
  }
  // Away from the unmapped border the line is still the brightest pair of rows.
  for (int i = 16; i < 48; ++i) {
    EXPECT_GT(out.at(i, 31, 0), 0) << i;
    EXPECT_GE(out.at(i, 31, 0), out.at(i, 30, 0)) << i;
  }
}

TEST(RectifyImage, NoFoldOvers) {
  const double rn = 181.0;
  const auto k = div({0.9, -0.05, 0.03, -0.02}, rn);
  const auto map = InverseRadialMap::build(k, {128, 128}, 256, 256);
  for (double angle : {0.0, 0.3, 1.1, 2.5, 4.0}) {
    double prev = -1.0;
    for (int step = 1; step < 2000; ++step) {
      const double rho = step * 0.1;
      const auto r = map.lookup(rho);
      if (!r) break;
      EXPECT_GT(*r, prev) << "angle " << angle << " rho " << rho;
      prev = *r;
    }
  }
}

TEST(RectifyImage, FitPolicyShowsWholeField) {
  const auto img = ImageBuffer(64, 64, 3, 255);
  const auto k = div({0.5}, default_r_norm(64, 64));
  EXPECT_EQ(rectify_scale(k, {32, 32}, 64, 64, ScalePolicy::kSameSize), 1.0);
  const double s = rectify_scale(k, {32, 32}, 64, 64, ScalePolicy::kFit);
  EXPECT_LT(s, 1.0);
  const auto same = rectify_image(img, k, {32, 32}, ScalePolicy::kSameSize);
  const auto fit = rectify_image(img, k, {32, 32}, ScalePolicy::kFit);
  // Same-size leaves unmapped corners; fit maps the full input border inward.
  EXPECT_EQ(same.at(0, 0, 0), 0);
  EXPECT_EQ(fit.at(32, 0, 0), 255);
  EXPECT_EQ(fit.at(0, 32, 0), 255);
}

TEST(RectifyImage, DeterministicAcrossThreads) {
  const auto img = scene(96, 64, 3);
  const auto k = div({0.6, 0.02}, default_r_norm(96, 64));
  ImageBuffer a, b;
  {
    testing::ScopedEnv env("ORDCAL_THREADS", "1");
    a = rectify_image(img, k, {48, 32});
  }
  {
    testing::ScopedEnv env("ORDCAL_THREADS", "4");
    b = rectify_image(img, k, {48, 32});
  }
  EXPECT_EQ(a, b);
}

TEST(RectifyFromOrdinal, FlatLevelsAreIdentity) {
  const auto img = scene(64, 64, 2);
  const OrdinalDistortion d{default_radii(), {1, 1, 1, 1}};
  EXPECT_EQ(rectify_from_ordinal(img, d, {32, 32}, 45.0), img);
}

TEST(RectifyFromOrdinal, MatchesCoefficientPath) {
  const int w = 128, h = 128;
  const double rn = default_r_norm(w, h);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto k = sample_coefficients(default_ranges(), seed, rn);
    const auto img = distort_image(scene(w, h, seed), k, {64, 64});
    const auto d = compute_ordinal(k, default_radii());
    const auto conv = ordinal_to_coefficients(d, rn);
    EXPECT_EQ(rectify_from_ordinal(img, d, {64, 64}, rn),
              rectify_image(img, conv.coefficients, {64, 64}));
    // And the recovered coefficients agree with k, so the images agree with
    // the direct path to within interpolation noise.
    const double p = psnr(rectify_from_ordinal(img, d, {64, 64}, rn),
                          rectify_image(img, k, {64, 64}));
    EXPECT_GT(p, 45.0);
  }
}

TEST(RectifyFromOrdinal, PerturbedLevelsDiffer) {
  const int w = 128, h = 128;
  const double rn = default_r_norm(w, h);
  const auto k = sample_coefficients(default_ranges(), 4, rn);
  const auto img = distort_image(scene(w, h, 4), k, {64, 64});
  auto d = compute_ordinal(k, default_radii());
  const auto base = rectify_from_ordinal(img, d, {64, 64}, rn);
  const auto k0 = ordinal_to_coefficients(d, rn).coefficients;
  d.levels.back() += 0.01;
  const auto k1 = ordinal_to_coefficients(d, rn).coefficients;
  EXPECT_GT(mdld(k0, k1, {64, 64}, w, h), 0.0);
  EXPECT_NE(rectify_from_ordinal(img, d, {64, 64}, rn), base);
}

TEST(RectifyFromOrdinal, PropagatesConversionErrors) {
  const auto img = scene(32, 32, 1);
  EXPECT_THROW(rectify_from_ordinal(img, {{0.5, 0.5}, {1.1, 1.2}}, {16, 16}, 22.0),
               ConversionError);
}

TEST(RectifyImage, TrueParametersRemoveDistortion) {
  // Before: the distorted geometry has a non-trivial DDM. After rectifying
  // with the true k, the corrected image is modelled by k = 0, whose DDM is
  // identically one.
  const int w = 64, h = 64;
  const auto k = div({0.5, 0.02}, default_r_norm(w, h));
  DistortionCoefficients identity = k;
  identity.k.assign(k.k.size(), 0.0);
  const auto ones = ddm(identity, {32, 32}, w, h);
  EXPECT_GT(mdld(ddm(k, {32, 32}, w, h), ones), 0.0);
  for (double v : ones.values) EXPECT_EQ(v, 1.0);
}

}  // namespace
}  // namespace ordcal
