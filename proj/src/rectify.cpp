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

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ordcal/errors.hpp"
#include "ordcal/parallel.hpp"
#include "ordcal/synth.hpp"

namespace ordcal {

namespace {

double farthest_corner(const PrincipalPoint& c, int width, int height) {
  double best = 0.0;
  for (double x : {0.0, static_cast<double>(width)}) {
    for (double y : {0.0, static_cast<double>(height)}) {
      best = std::max(best, std::hypot(x - c.xc, y - c.yc));
    }
  }
  return best;
}

// Fritsch-Carlson slopes for strictly increasing data on a uniform grid.
std::vector<double> monotone_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y[i + 1] - y[i]) / h;
  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m[i] = secant[i - 1] * secant[i] <= 0.0 ? 0.0
                                             : 0.5 * (secant[i - 1] + secant[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / secant[i];
    const double b = m[i + 1] / secant[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m[i] = t * a * secant[i];
      m[i + 1] = t * b * secant[i];
    }
  }
  return m;
}

}  // namespace

InverseRadialMap InverseRadialMap::build(const DistortionCoefficients& k,
                                         const PrincipalPoint& c, int width,
                                         int height) {
  if (width <= 0 || height <= 0) throw ArgumentError("invalid image size");
  InverseRadialMap map;
  map.k_ = k;
  map.c_ = c;
  const double reach = farthest_corner(c, width, height);
  double s_limit = reach / k.r_norm;

  if (const auto unit = validate_monotone(k, 1.0); !unit) {
    std::ostringstream os;
    os << "radial map is not monotone: violation at normalized radius "
       << *unit.violation_radius;
    throw DomainError(os.str());
  }
  if (s_limit > 1.0) {
    constexpr int kSamples = 4096;
    if (const auto wide = validate_monotone(k, s_limit, kSamples); !wide) {
      // Past the unit radius the table stops where the map stops increasing;
      // everything beyond is background.
      s_limit = std::max(1.0, *wide.violation_radius - s_limit / kSamples);
    }
  }

  map.identity_ = k.is_identity();
  map.max_corrected_ = corrected_radius_normalized(k, s_limit) * k.r_norm;

  Rng rng(0x5eed0f1a7ULL);
  std::vector<double> probes(64);
  for (double& p : probes) p = rng.uniform(0.0, map.max_corrected_);

  for (std::size_t entries = kMinEntries;; entries *= 2) {
    map.step_ = map.max_corrected_ / static_cast<double>(entries - 1);
    map.distorted_.resize(entries);
    for (std::size_t i = 0; i + 1 < entries; ++i) {
      map.distorted_[i] = solve_distorted_radius(k, map.grid_radius(i), s_limit);
    }
    map.distorted_.back() = s_limit * k.r_norm;
    map.slopes_ = monotone_slopes(map.distorted_, map.step_);

    map.spot_check_error_ = 0.0;
    for (double p : probes) {
      const double direct = solve_distorted_radius(k, p, s_limit);
      const double table = map.lookup(p).value_or(direct);
      map.spot_check_error_ = std::max(map.spot_check_error_, std::abs(table - direct));
    }
    if (map.spot_check_error_ <= kMaxInterpolationError * k.r_norm) break;
    if (entries >= (std::size_t{1} << 22)) {
      throw DomainError("inverse radial map cannot reach interpolation tolerance");
    }
  }
  return map;
}

std::optional<double> InverseRadialMap::lookup(double r_corrected) const {
  if (!(r_corrected >= 0.0) || r_corrected > max_corrected_) return std::nullopt;
  if (identity_) return r_corrected;
  const std::size_t n = distorted_.size();
  const double t = r_corrected / step_;
  const double nearest = std::round(t);
  if (std::abs(t - nearest) <= 1e-9 * std::max(1.0, t)) {
    return distorted_[std::min(static_cast<std::size_t>(nearest), n - 1)];
  }
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= n - 1) i = n - 2;
  const double f = std::min(t - static_cast<double>(i), 1.0);
  const double f2 = f * f;
  const double f3 = f2 * f;
  const double h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
  const double h10 = f3 - 2.0 * f2 + f;
  const double h01 = -2.0 * f3 + 3.0 * f2;
  const double h11 = f3 - f2;
  return h00 * distorted_[i] + h10 * step_ * slopes_[i] +
         h01 * distorted_[i + 1] + h11 * step_ * slopes_[i + 1];
}

double rectify_scale(const DistortionCoefficients& k, const PrincipalPoint& c,
                     int width, int height, ScalePolicy policy) {
  if (policy == ScalePolicy::kSameSize || k.is_identity()) return 1.0;
  // Corrected images of the input border, expressed as the multiple of the
  // output half-extent they reach on each side.
  double scale = 0.0;
  auto visit = [&](double x, double y) {
    const Point q = undistort_point({x, y, Frame::kDistorted}, k, c);
    const double dx = q.x - c.xc;
    const double dy = q.y - c.yc;
    if (dx > 0.0) scale = std::max(scale, dx / (width - c.xc));
    if (dx < 0.0) scale = std::max(scale, -dx / c.xc);
    if (dy > 0.0) scale = std::max(scale, dy / (height - c.yc));
    if (dy < 0.0) scale = std::max(scale, -dy / c.yc);
  };
  constexpr int kPerPixel = 4;
  for (int i = 0; i <= width * kPerPixel; ++i) {
    const double x = static_cast<double>(i) / kPerPixel;
    visit(x, 0.0);
    visit(x, height);
  }
  for (int j = 0; j <= height * kPerPixel; ++j) {
    const double y = static_cast<double>(j) / kPerPixel;
    visit(0.0, y);
    visit(width, y);
  }
  return scale > 0.0 ? scale : 1.0;
}

ImageBuffer rectify_image(const ImageBuffer& distorted,
                          const InverseRadialMap& map, ScalePolicy policy,
                          const Background& bg) {
  const auto& k = map.coefficients();
  const auto& c = map.principal_point();
  const int w = distorted.width();
  const int h = distorted.height();
  const double scale = rectify_scale(k, c, w, h, policy);
  if (k.is_identity() && scale == 1.0) return distorted;

  ImageBuffer out(w, h, distorted.channels());
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    std::array<std::uint8_t, 4> px{};
    for (int i = 0; i < w; ++i) {
      const double dx = (i + 0.5 - c.xc) * scale;
      const double dy = (j + 0.5 - c.yc) * scale;
      const double rho = std::sqrt(dx * dx + dy * dy);
      double sx = c.xc;
      double sy = c.yc;
      if (rho > 0.0) {
        const auto r = map.lookup(rho);
        if (!r) {
          for (int ch = 0; ch < out.channels(); ++ch) out.at(i, j, ch) = bg.value[ch];
          continue;
        }
        const double gain = *r / rho;
        sx += dx * gain;
        sy += dy * gain;
      }
      sample_bilinear(distorted, sx, sy, bg, px);
      for (int ch = 0; ch < out.channels(); ++ch) out.at(i, j, ch) = px[ch];
    }
  });
  return out;
}

ImageBuffer rectify_image(const ImageBuffer& distorted,
                          const DistortionCoefficients& k,
                          const PrincipalPoint& c, ScalePolicy policy,
                          const Background& bg) {
  if (k.is_identity() && policy == ScalePolicy::kSameSize) return distorted;
  const auto map =
      InverseRadialMap::build(k, c, distorted.width(), distorted.height());
  return rectify_image(distorted, map, policy, bg);
}

ImageBuffer rectify_from_ordinal(const ImageBuffer& distorted,
                                 const OrdinalDistortion& d,
                                 const PrincipalPoint& c, double r_norm,
                                 ScalePolicy policy, const Background& bg) {
  const auto conv = ordinal_to_coefficients(d, r_norm);
  return rectify_image(distorted, conv.coefficients, c, policy, bg);
}

}  // namespace ordcal
