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
#ifndef ORDCAL_RECTIFY_HPP_
#define ORDCAL_RECTIFY_HPP_

#include <optional>
#include <vector>

#include "ordcal/camera_model.hpp"
#include "ordcal/image.hpp"
#include "ordcal/ordinal.hpp"

namespace ordcal {

/// Tabulated inverse of the radial map, corrected radius -> distorted radius
/// (both in pixels), on a uniform corrected-radius grid. Between grid points
/// it interpolates with a monotone (Fritsch-Carlson) cubic.
class InverseRadialMap {
 public:
  static constexpr std::size_t kMinEntries = 4096;
  static constexpr double kMaxInterpolationError = 1e-4;  // x r_norm

  /// Covers distorted radii up to the farthest image corner from c. Throws
  /// DomainError when the coefficients are not monotone on [0, 1].
  static InverseRadialMap build(const DistortionCoefficients& k,
                                const PrincipalPoint& c, int width, int height);

  /// nullopt when r_corrected lies beyond the tabulated range.
  std::optional<double> lookup(double r_corrected) const;

  std::size_t size() const { return distorted_.size(); }
  double grid_radius(std::size_t i) const { return step_ * static_cast<double>(i); }
  double entry(std::size_t i) const { return distorted_[i]; }
  double max_corrected() const { return max_corrected_; }
  double max_distorted() const { return distorted_.back(); }
  /// Worst |interpolated - solved| found by the build-time spot check (px).
  double spot_check_error() const { return spot_check_error_; }

  const DistortionCoefficients& coefficients() const { return k_; }
  const PrincipalPoint& principal_point() const { return c_; }

 private:
  DistortionCoefficients k_;
  PrincipalPoint c_;
  bool identity_ = false;
  double step_ = 0.0;
  double max_corrected_ = 0.0;
  double spot_check_error_ = 0.0;
  std::vector<double> distorted_;
  std::vector<double> slopes_;
};

enum class ScalePolicy {
  kSameSize,  // one corrected pixel per output pixel; the corrected field is cropped
  kFit,       // scale so the full corrected field of the input fits the output
};

/// Every output (corrected) pixel center is pushed through the inverse radial
/// map and the distorted input is sampled bilinearly there.
ImageBuffer rectify_image(const ImageBuffer& distorted,
                          const DistortionCoefficients& k,
                          const PrincipalPoint& c,
                          ScalePolicy policy = ScalePolicy::kSameSize,
                          const Background& bg = {});

/// Same as rectify_image with a prebuilt map.
ImageBuffer rectify_image(const ImageBuffer& distorted,
                          const InverseRadialMap& map, ScalePolicy policy,
                          const Background& bg = {});

/// Output-pixel to corrected-coordinate scale for the given policy.
double rectify_scale(const DistortionCoefficients& k, const PrincipalPoint& c,
                     int width, int height, ScalePolicy policy);

/// Converts the ordinal vector to coefficients, then rectifies.
ImageBuffer rectify_from_ordinal(const ImageBuffer& distorted,
                                 const OrdinalDistortion& d,
                                 const PrincipalPoint& c, double r_norm,
                                 ScalePolicy policy = ScalePolicy::kSameSize,
                                 const Background& bg = {});

}  // namespace ordcal

#endif  // ORDCAL_RECTIFY_HPP_
