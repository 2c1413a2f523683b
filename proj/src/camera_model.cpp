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
#include "ordcal/camera_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ordcal/errors.hpp"

namespace ordcal {

std::string to_string(Model m) {
  return m == Model::kDivision ? "division" : "polynomial";
}

Model model_from_string(const std::string& s) {
  if (s == "division") return Model::kDivision;
  if (s == "polynomial") return Model::kPolynomial;
  throw ArgumentError("unknown camera model '" + s + "'");
}

bool DistortionCoefficients::is_identity() const {
  return std::all_of(k.begin(), k.end(), [](double v) { return v == 0.0; });
}

double default_r_norm(int width, int height) {
  return 0.5 * std::hypot(static_cast<double>(width),
                          static_cast<double>(height));
}

double radius(const Point& p, const PrincipalPoint& c) {
  const double dx = p.x - c.xc;
  const double dy = p.y - c.yc;
  return std::sqrt(dx * dx + dy * dy);
}

LevelAndSlope distortion_level_normalized(const DistortionCoefficients& k,
                                          double s) {
  const double u = s * s;
  double level = 1.0;
  double slope = 0.0;
  double pow_u = 1.0;  // u^(i-1)
  for (std::size_t i = 0; i < k.k.size(); ++i) {
    const double order = static_cast<double>(i + 1);
    slope += 2.0 * order * k.k[i] * pow_u * s;
    pow_u *= u;
    level += k.k[i] * pow_u;
  }
  if (!std::isfinite(level) || !std::isfinite(slope)) {
    std::ostringstream os;
    os << "distortion level overflow at normalized radius " << s;
    throw DomainError(os.str());
  }
  return {level, slope};
}

double distortion_level(const DistortionCoefficients& k, double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be non-negative");
  if (!(k.r_norm > 0.0)) throw DomainError("r_norm must be positive");
  return distortion_level_normalized(k, r / k.r_norm).level;
}

double corrected_radius_normalized(const DistortionCoefficients& k, double s) {
  const double level = distortion_level_normalized(k, s).level;
  return k.model == Model::kDivision ? s / level : s * level;
}

namespace {

double corrected_slope(const DistortionCoefficients& k, double s) {
  const auto [level, slope] = distortion_level_normalized(k, s);
  if (k.model == Model::kDivision) {
    return (level - s * slope) / (level * level);
  }
  return level + s * slope;
}

}  // namespace

Point undistort_point(const Point& p, const DistortionCoefficients& k,
                      const PrincipalPoint& c) {
  if (k.is_identity()) return {p.x, p.y, Frame::kCorrected};
  const double level = distortion_level(k, radius(p, c));
  if (!(level > 0.0)) {
    std::ostringstream os;
    os << "singular radial model: delta = " << level << " at (" << p.x << ", "
       << p.y << ")";
    throw SingularModelError(os.str());
  }
  const double dx = p.x - c.xc;
  const double dy = p.y - c.yc;
  if (k.model == Model::kDivision) {
    return {c.xc + dx / level, c.yc + dy / level, Frame::kCorrected};
  }
  return {c.xc + dx * level, c.yc + dy * level, Frame::kCorrected};
}

double solve_distorted_radius(const DistortionCoefficients& k,
                              double r_corrected, double max_search) {
  if (!(r_corrected >= 0.0)) {
    throw ArgumentError("corrected radius must be non-negative");
  }
  if (k.is_identity()) return r_corrected;
  const double target = r_corrected / k.r_norm;
  if (target == 0.0) return 0.0;

  double lo = 0.0;
  double hi = max_search;
  const double g_hi = corrected_radius_normalized(k, hi);
  if (!(g_hi >= target)) {
    std::ostringstream os;
    os << "corrected radius " << r_corrected
       << " px is not reachable within normalized radius " << max_search;
    throw OutOfRangeError(os.str());
  }
  if (g_hi == target) return hi * k.r_norm;

  constexpr double kStepTol = 1e-14;
  double s = std::clamp(target, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = corrected_radius_normalized(k, s) - target;
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    const double fp = corrected_slope(k, s);
    double next = fp > 0.0 ? s - f / fp : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step < kStepTol || hi - lo < kStepTol) break;
  }
  return s * k.r_norm;
}

MonotoneCheck validate_monotone(const DistortionCoefficients& k, double r_max,
                                int samples) {
  samples = std::max(samples, 4096);
  MonotoneCheck result;
  double prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = r_max * static_cast<double>(i) / samples;
    bool bad = false;
    double g = 0.0;
    try {
      const double level = distortion_level_normalized(k, s).level;
      g = k.model == Model::kDivision ? s / level : s * level;
      bad = !(level > 0.0) || !(corrected_slope(k, s) > 0.0) ||
            (i > 0 && !(g > prev));
    } catch (const DomainError&) {
      bad = true;
    }
    if (bad) {
      result.ok = false;
      result.violation_radius = s;
      return result;
    }
    prev = g;
  }
  return result;
}

}  // namespace ordcal
