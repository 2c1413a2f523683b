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
#ifndef ORDCAL_CAMERA_MODEL_HPP_
#define ORDCAL_CAMERA_MODEL_HPP_

#include <optional>
#include <string>
#include <vector>

namespace ordcal {

/// Radial camera model family.
///
/// Division:   x' - xc = (x - xc) / delta(r)
/// Polynomial: x' - xc = (x - xc) * delta(r)
///
/// with delta(r) = 1 + k1 s^2 + k2 s^4 + ... and s = r / r_norm.
enum class Model { kDivision, kPolynomial };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

struct PrincipalPoint {
  double xc = 0.0;
  double yc = 0.0;
};

enum class Frame { kDistorted, kCorrected };

struct Point {
  double x = 0.0;
  double y = 0.0;
  Frame frame = Frame::kDistorted;
};

/// Distortion coefficients in normalized-radius units. k[i] multiplies
/// (r / r_norm)^(2(i+1)).
struct DistortionCoefficients {
  Model model = Model::kDivision;
  std::vector<double> k;
  double r_norm = 1.0;

  bool is_identity() const;
  std::size_t order() const { return k.size(); }
};

/// Half the image diagonal, the default radius normalization.
double default_r_norm(int width, int height);

double radius(const Point& p, const PrincipalPoint& c);

/// delta(r) for a pixel radius r. Throws DomainError when the polynomial
/// overflows or the radius is negative.
double distortion_level(const DistortionCoefficients& k, double r);

/// Same polynomial in normalized radius s = r / r_norm, together with its
/// derivative d(delta)/ds.
struct LevelAndSlope {
  double level;
  double slope;
};
LevelAndSlope distortion_level_normalized(const DistortionCoefficients& k,
                                          double s);

/// Corrected radius as a function of distorted radius, both normalized:
/// s / delta(s) for the division model, s * delta(s) for the polynomial one.
double corrected_radius_normalized(const DistortionCoefficients& k, double s);

/// Maps a distorted point to its corrected position about the principal
/// point. Throws SingularModelError when delta(r) <= 0.
Point undistort_point(const Point& p, const DistortionCoefficients& k,
                      const PrincipalPoint& c);

/// Inverts the radial map: finds the distorted radius r (pixels) whose
/// corrected radius is r_corrected (pixels). Searches [0, max_search * r_norm]
/// and throws OutOfRangeError when the target is not bracketed there. The
/// coefficients must be monotone on the search interval.
double solve_distorted_radius(const DistortionCoefficients& k,
                              double r_corrected, double max_search = 1.0);

/// Result of validate_monotone: ok, or the first normalized radius at which
/// the radial map stops increasing (or delta stops being positive).
struct MonotoneCheck {
  bool ok = true;
  std::optional<double> violation_radius;
  explicit operator bool() const { return ok; }
};

/// Checks that the radial map is strictly increasing on [0, r_max]
/// (normalized radius) using a dense grid of samples plus the analytic
/// derivative at each sample.
MonotoneCheck validate_monotone(const DistortionCoefficients& k,
                                double r_max = 1.0, int samples = 4096);

}  // namespace ordcal

#endif  // ORDCAL_CAMERA_MODEL_HPP_
