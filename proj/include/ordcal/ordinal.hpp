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
#ifndef ORDCAL_ORDINAL_HPP_
#define ORDCAL_ORDINAL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ordcal/camera_model.hpp"
#include "ordcal/errors.hpp"
#include "ordcal/linalg.hpp"

namespace ordcal {

/// Distortion levels sampled at strictly increasing normalized radii.
struct OrdinalDistortion {
  std::vector<double> radii;
  std::vector<double> levels;
};

/// The default sampling grid, (0.25, 0.5, 0.75, 1.0).
std::vector<double> default_radii();

/// Per-pixel distortion level over a W x H raster, row-major.
struct DistortionDistributionMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  PrincipalPoint principal_point;

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * width + i];
  }
  double& at(int i, int j) {
    return values[static_cast<std::size_t>(j) * width + i];
  }
};

/// Linear system K . R = D* relating coefficients to levels. matrix(i, j) is
/// r_j^(2(i+1)): rows are even powers, columns are sample radii.
struct ConversionSystem {
  linalg::Matrix matrix;
  std::vector<double> rhs;
};

struct ConversionResult {
  DistortionCoefficients coefficients;
  double condition = 0.0;  // 1-norm condition number of the system
  double relative_residual = 0.0;
};

/// Throws ArgumentError unless radii are strictly increasing inside [0, 1].
OrdinalDistortion compute_ordinal(const DistortionCoefficients& k,
                                  std::span<const double> radii);

ConversionSystem build_conversion_system(const OrdinalDistortion& d);

/// Solves for n coefficients from n levels with partial-pivot LU (no explicit
/// inverse). Throws ConversionError when the system is singular or its
/// condition number exceeds kMaxConversionCondition.
inline constexpr double kMaxConversionCondition = 1e12;
ConversionResult ordinal_to_coefficients(const OrdinalDistortion& d,
                                         double r_norm = 1.0,
                                         Model model = Model::kDivision);

struct FullParamsResult {
  PrincipalPoint principal_point;
  DistortionCoefficients coefficients;
  bool flat = false;  // all levels were 1; the center is not identifiable
  int iterations = 0;
  double cost = 0.0;  // sum of squared level residuals
};

class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, FullParamsResult best)
      : Error(ErrorCode::kEstimation, what), best_(std::move(best)) {}
  const FullParamsResult& best() const noexcept { return best_; }

 private:
  FullParamsResult best_;
};

/// Recovers principal point and n coefficients from n + 2 levels observed at
/// known distorted-image points. Damped Gauss-Newton over the center, with
/// the coefficients eliminated by an inner linear least-squares solve.
/// Radii are normalized by half the image diagonal.
FullParamsResult estimate_full_params(std::span<const double> levels,
                                      std::span<const Point> sample_points,
                                      int width, int height,
                                      Model model = Model::kDivision);

DistortionDistributionMap ddm(const DistortionCoefficients& k,
                              const PrincipalPoint& c, int width, int height);

/// Largest deviation between a pixel and its horizontal, vertical and
/// central mirror images about the raster center.
double check_symmetry(const DistortionDistributionMap& m);

/// Affine export map: delta in [1, delta_max] to [0, 65535], clamped.
/// delta_max <= 1 selects the map maximum.
std::vector<std::uint16_t> ddm_to_u16(const DistortionDistributionMap& m,
                                      double delta_max = 0.0);

void write_ddm_csv(const DistortionDistributionMap& m,
                   const std::filesystem::path& path);
void write_ddm_png(const DistortionDistributionMap& m,
                   const std::filesystem::path& path, double delta_max = 0.0);

}  // namespace ordcal

#endif  // ORDCAL_ORDINAL_HPP_
