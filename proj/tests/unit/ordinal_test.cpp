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
#include "ordcal/ordinal.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "ordcal/image.hpp"
#include "ordcal/metrics.hpp"
#include "ordcal/synth.hpp"
#include "test_util.hpp"

namespace ordcal {
namespace {

DistortionCoefficients div(std::vector<double> k, double r_norm = 1.0) {
  return {Model::kDivision, std::move(k), r_norm};
}

TEST(ComputeOrdinal, Examples) {
  const auto flat = compute_ordinal(div({0, 0, 0, 0}), default_radii());
  EXPECT_EQ(flat.levels, (std::vector<double>{1, 1, 1, 1}));

  const auto two = compute_ordinal(div({0.2, 0.05}), std::vector<double>{0.5, 1.0});
  ASSERT_EQ(two.levels.size(), 2u);
  EXPECT_NEAR(two.levels[0], 1.053125, 1e-15);
  EXPECT_NEAR(two.levels[1], 1.25, 1e-15);

  const auto one = compute_ordinal(div({0.1}), std::vector<double>{1.0});
  EXPECT_NEAR(one.levels[0], 1.1, 1e-15);
}

TEST(ComputeOrdinal, RadiiScaledByRNorm) {
  const auto d = compute_ordinal(div({0.2, 0.05}, 181.0), std::vector<double>{0.5, 1.0});
  EXPECT_NEAR(d.levels[0], 1.053125, 1e-14);
  EXPECT_NEAR(d.levels[1], 1.25, 1e-14);
}

TEST(ComputeOrdinal, RejectsBadRadii) {
  EXPECT_THROW(compute_ordinal(div({0.1}), std::vector<double>{0.5, 0.5}), ArgumentError);
  EXPECT_THROW(compute_ordinal(div({0.1}), std::vector<double>{0.7, 0.5}), ArgumentError);
  EXPECT_THROW(compute_ordinal(div({0.1}), std::vector<double>{0.5, 1.2}), ArgumentError);
  EXPECT_THROW(compute_ordinal(div({0.1}), std::vector<double>{-0.1, 0.5}), ArgumentError);
}

TEST(ComputeOrdinal, SortedForNonNegativeCoefficients) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto k = div({rng.uniform(0, 1), rng.uniform(0, 0.1), rng.uniform(0, 0.1),
                        rng.uniform(0, 0.1)});
    const auto d = compute_ordinal(k, default_radii());
    EXPECT_TRUE(std::is_sorted(d.levels.begin(), d.levels.end()));
  }
}

TEST(OrdinalToCoefficients, Examples) {
  const auto flat = ordinal_to_coefficients({default_radii(), {1, 1, 1, 1}});
  for (double k : flat.coefficients.k) EXPECT_EQ(k, 0.0);

  const auto one = ordinal_to_coefficients({{1.0}, {1.4}});
  ASSERT_EQ(one.coefficients.k.size(), 1u);
  EXPECT_NEAR(one.coefficients.k[0], 0.4, 1e-15);
  EXPECT_EQ(one.condition, 1.0);

  const auto two = ordinal_to_coefficients({{0.5, 1.0}, {1.053125, 1.25}});
  EXPECT_NEAR(two.coefficients.k[0], 0.2, 1e-14);
  EXPECT_NEAR(two.coefficients.k[1], 0.05, 1e-14);
  EXPECT_LE(two.relative_residual, 1e-10);
}

TEST(OrdinalToCoefficients, DefaultGridCondition) {
  const auto r = ordinal_to_coefficients({default_radii(), {1.1, 1.2, 1.3, 1.4}});
  // Exact 1-norm condition number of the default grid system.
  EXPECT_NEAR(r.condition, 1333.3333333, 1e-3);
  EXPECT_LT(r.condition, 1e4);
}

TEST(OrdinalToCoefficients, SingleCoefficientIsAnalytic) {
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    const double r = rng.uniform(0.05, 1.0);
    const double level = rng.uniform(0.5, 3.0);
    const auto res = ordinal_to_coefficients({{r}, {level}});
    EXPECT_NEAR(res.coefficients.k[0], (level - 1.0) / (r * r),
                1e-12 * std::max(1.0, std::abs((level - 1.0) / (r * r))));
  }
}

TEST(OrdinalToCoefficients, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto k = sample_coefficients(default_ranges(), seed);
    const auto d = compute_ordinal(k, default_radii());
    const auto back = ordinal_to_coefficients(d);
    for (std::size_t i = 0; i < k.k.size(); ++i) {
      EXPECT_LE(std::abs(back.coefficients.k[i] - k.k[i]), 1e-6);
    }
  }
}

TEST(OrdinalToCoefficients, CarriesModelAndNorm) {
  const auto res = ordinal_to_coefficients({{1.0}, {1.4}}, 181.0, Model::kPolynomial);
  EXPECT_EQ(res.coefficients.model, Model::kPolynomial);
  EXPECT_EQ(res.coefficients.r_norm, 181.0);
}

TEST(OrdinalToCoefficients, Errors) {
  try {
    ordinal_to_coefficients({{0.5, 0.5}, {1.1, 1.2}});
    FAIL() << "expected ConversionError";
  } catch (const ConversionError& e) {
    EXPECT_EQ(e.radii(), (std::vector<double>{0.5, 0.5}));
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
  }
  // Nearly coincident radii push the condition number past the limit.
  try {
    ordinal_to_coefficients({{0.5, 0.5000001, 0.5000002, 0.5000003}, {1.1, 1.1, 1.1, 1.1}});
    FAIL() << "expected ConversionError";
  } catch (const ConversionError& e) {
    EXPECT_GT(e.condition(), kMaxConversionCondition);
  }
  EXPECT_THROW(ordinal_to_coefficients({{0.0}, {1.1}}), ConversionError);
  EXPECT_THROW(ordinal_to_coefficients({{0.5}, {1.1, 1.2}}), ArgumentError);
}

TEST(ConversionSystem, Layout) {
  const auto sys = build_conversion_system({{0.5, 1.0}, {1.053125, 1.25}});
  // matrix(i, j) = r_j^(2(i+1))
  EXPECT_EQ(sys.matrix(0, 0), 0.25);
  EXPECT_EQ(sys.matrix(1, 0), 0.0625);
  EXPECT_EQ(sys.matrix(0, 1), 1.0);
  EXPECT_EQ(sys.matrix(1, 1), 1.0);
  EXPECT_NEAR(sys.rhs[0], 0.053125, 1e-15);
  EXPECT_NEAR(sys.rhs[1], 0.25, 1e-15);
}

std::vector<Point> sample_points() {
  return {{40, 30}, {200, 50}, {60, 210}, {220, 230}, {120, 90}, {170, 160}};
}

std::vector<double> levels_at(const DistortionCoefficients& k, const PrincipalPoint& c,
                              const std::vector<Point>& pts) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(distortion_level(k, radius(p, c)));
  return out;
}

TEST(EstimateFullParams, RecoversCenteredModel) {
  const int w = 256, h = 256;
  const auto pts = sample_points();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto k = sample_coefficients(default_ranges(), seed, default_r_norm(w, h));
    const PrincipalPoint c{128, 128};
    const auto res = estimate_full_params(levels_at(k, c, pts), pts, w, h);
    EXPECT_FALSE(res.flat);
    EXPECT_NEAR(res.principal_point.xc, 128.0, 1e-3);
    EXPECT_NEAR(res.principal_point.yc, 128.0, 1e-3);
    ASSERT_EQ(res.coefficients.k.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(res.coefficients.k[i], k.k[i], 1e-6);
  }
}

TEST(EstimateFullParams, RecoversOffsetCenter) {
  const int w = 256, h = 256;
  const auto pts = sample_points();
  const auto k = sample_coefficients(default_ranges(), 9, default_r_norm(w, h));
  const PrincipalPoint c{133, 125};
  const auto res = estimate_full_params(levels_at(k, c, pts), pts, w, h);
  EXPECT_NEAR(res.principal_point.xc, 133.0, 1e-2);
  EXPECT_NEAR(res.principal_point.yc, 125.0, 1e-2);
}

TEST(EstimateFullParams, FlatLevels) {
  const auto pts = sample_points();
  const auto res = estimate_full_params(std::vector<double>(6, 1.0), pts, 256, 256);
  EXPECT_TRUE(res.flat);
  EXPECT_EQ(res.principal_point.xc, 128.0);
  EXPECT_EQ(res.principal_point.yc, 128.0);
  EXPECT_EQ(res.coefficients.k, (std::vector<double>{0, 0, 0, 0}));
}

TEST(EstimateFullParams, Errors) {
  const std::vector<Point> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(estimate_full_params(std::vector<double>{1.1, 1.2, 1.3, 1.4}, line, 10, 10),
               ArgumentError);
  EXPECT_THROW(estimate_full_params(std::vector<double>{1.1, 1.2}, line, 10, 10), ArgumentError);
}

TEST(Ddm, IdentityIsAllOnes) {
  const auto m = ddm(div({0, 0, 0, 0}, 10.0), {8, 6}, 16, 12);
  EXPECT_EQ(m.values.size(), 16u * 12u);
  for (double v : m.values) EXPECT_EQ(v, 1.0);
}

TEST(Ddm, CornerValue) {
  const double rn = default_r_norm(256, 256);
  const auto m = ddm(div({0.1}, rn), {128, 128}, 256, 256);
  const double rc = std::hypot(127.5, 127.5);
  EXPECT_NEAR(m.at(0, 0), 1.0 + 0.1 * (rc / rn) * (rc / rn), 1e-15);
  EXPECT_NEAR(m.at(0, 0), 1.0992202758789062, 1e-15);
}

TEST(Ddm, ValueNearPrincipalPoint) {
  const double rn = default_r_norm(256, 256);
  const auto m = ddm(div({0.1}, rn), {128, 128}, 256, 256);
  EXPECT_LE(std::abs(m.at(128, 128) - 1.0), 0.1 * (1.0 / (rn * rn)) * 0.5 + 1e-15);
}

TEST(CheckSymmetry, CenteredMapsAreExactlySymmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto k = sample_coefficients(default_ranges(), seed, default_r_norm(128, 96));
    EXPECT_EQ(check_symmetry(ddm(k, {64, 48}, 128, 96)), 0.0);
  }
}

TEST(CheckSymmetry, PerturbedCorner) {
  auto m = ddm(div({0.1}, 90.0), {64, 64}, 128, 128);
  m.at(0, 0) += 0.5;
  EXPECT_NEAR(check_symmetry(m), 0.5, 1e-12);
}

TEST(CheckSymmetry, OffCenterIsAsymmetric) {
  const auto m = ddm(div({0.3}, 90.0), {70, 60}, 128, 128);
  EXPECT_GT(check_symmetry(m), 1e-3);
}

TEST(CheckSymmetry, MdldOfIdenticalMapsIsZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto k = sample_coefficients(default_ranges(), seed, 90.0);
    const auto m = ddm(k, {64, 64}, 128, 128);
    EXPECT_EQ(mdld(m, m), 0.0);
  }
}

TEST(DdmExport, AffineU16Map) {
  DistortionDistributionMap m;
  m.width = 3;
  m.height = 1;
  m.values = {1.0, 1.5, 2.5};
  EXPECT_EQ(ddm_to_u16(m, 2.0), (std::vector<std::uint16_t>{0, 32768, 65535}));
  EXPECT_EQ(ddm_to_u16(m), (std::vector<std::uint16_t>{0, 21845, 65535}));
  m.values = {0.5, 1.0, 1.0};
  EXPECT_EQ(ddm_to_u16(m, 2.0), (std::vector<std::uint16_t>{0, 0, 0}));
}

TEST(DdmExport, CsvAndPng) {
  testing::TempDir dir("ddm");
  const auto m = ddm(div({0.1}, 5.0), {2, 1.5}, 4, 3);
  write_ddm_csv(m, dir / "m.csv");
  const std::string csv = testing::read_file(dir / "m.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), ','), 9);
  char first[32];
  std::snprintf(first, sizeof first, "%.9g", m.at(0, 0));
  EXPECT_EQ(csv.rfind(first, 0), 0u);

  write_ddm_png(m, dir / "m.png", 1.2);
  const std::string png = testing::read_file(dir / "m.png");
  ASSERT_GT(png.size(), 26u);
  EXPECT_EQ(png.substr(1, 3), "PNG");
  EXPECT_EQ(static_cast<int>(static_cast<unsigned char>(png[24])), 16);  // bit depth
  EXPECT_EQ(static_cast<int>(static_cast<unsigned char>(png[25])), 0);   // grayscale
}

}  // namespace
}  // namespace ordcal
