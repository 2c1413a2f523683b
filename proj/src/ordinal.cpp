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
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ordcal/image.hpp"
#include "ordcal/parallel.hpp"

namespace ordcal {

std::vector<double> default_radii() { return {0.25, 0.5, 0.75, 1.0}; }

namespace {

void require_increasing_radii(std::span<const double> radii) {
  if (radii.empty()) throw ArgumentError("at least one radius is required");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0 && radii[i] <= 1.0)) {
      throw ArgumentError("normalized radii must lie in [0, 1]");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw ArgumentError("radii must be strictly increasing");
    }
  }
}

std::string format_radii(std::span<const double> radii) {
  std::ostringstream os;
  os.precision(9);
  os << "(";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    os << (i ? ", " : "") << radii[i];
  }
  os << ")";
  return os.str();
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Rows index sample radii, columns index even powers: the transpose of
// ConversionSystem::matrix, so that A k = D*.
linalg::Matrix power_matrix(std::span<const double> radii, std::size_t n) {
  linalg::Matrix a(radii.size(), n);
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double u = radii[j] * radii[j];
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      p *= u;
      a(j, i) = p;
    }
  }
  return a;
}

}  // namespace

OrdinalDistortion compute_ordinal(const DistortionCoefficients& k,
                                  std::span<const double> radii) {
  require_increasing_radii(radii);
  OrdinalDistortion d;
  d.radii.assign(radii.begin(), radii.end());
  d.levels.reserve(radii.size());
  for (double r : radii) d.levels.push_back(distortion_level(k, r * k.r_norm));
  return d;
}

ConversionSystem build_conversion_system(const OrdinalDistortion& d) {
  if (d.radii.size() != d.levels.size()) {
    throw ArgumentError("radii and levels differ in length");
  }
  const std::size_t n = d.radii.size();
  ConversionSystem sys;
  sys.matrix = linalg::Matrix(n, n);
  const linalg::Matrix a = power_matrix(d.radii, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sys.matrix(i, j) = a(j, i);
  }
  sys.rhs.reserve(n);
  for (double level : d.levels) sys.rhs.push_back(level - 1.0);
  return sys;
}

ConversionResult ordinal_to_coefficients(const OrdinalDistortion& d,
                                         double r_norm, Model model) {
  if (d.radii.size() != d.levels.size() || d.radii.empty()) {
    throw ArgumentError("need equally many (>= 1) radii and levels");
  }
  for (double l : d.levels) {
    if (!std::isfinite(l)) throw ArgumentError("levels must be finite");
  }
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    if (!(d.radii[i] > 0.0) || !std::isfinite(d.radii[i])) {
      throw ConversionError("sample radii must be positive: " +
                                format_radii(d.radii),
                            d.radii, std::numeric_limits<double>::infinity());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (d.radii[i] == d.radii[j]) {
        throw ConversionError("sample radii must be distinct: " +
                                  format_radii(d.radii),
                              d.radii,
                              std::numeric_limits<double>::infinity());
      }
    }
  }
  const std::size_t n = d.radii.size();
  const linalg::Matrix a = power_matrix(d.radii, n);
  std::vector<double> rhs;
  rhs.reserve(n);
  for (double level : d.levels) rhs.push_back(level - 1.0);

  const auto lu = linalg::LuFactorization::factor(a);
  if (!lu) {
    throw ConversionError("singular conversion system for radii " +
                              format_radii(d.radii),
                          d.radii, std::numeric_limits<double>::infinity());
  }
  const double cond = lu->condition_1();
  if (!(cond <= kMaxConversionCondition)) {
    std::ostringstream os;
    os << "ill-conditioned conversion system (condition " << cond
       << ") for radii " << format_radii(d.radii);
    throw ConversionError(os.str(), d.radii, cond);
  }

  ConversionResult out;
  out.coefficients.model = model;
  out.coefficients.r_norm = r_norm;
  out.coefficients.k = lu->solve(rhs);
  out.condition = cond;

  const auto ak = linalg::multiply(a, out.coefficients.k);
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = ak[i] - rhs[i];
  double a_inf = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += std::abs(a(r, c));
    a_inf = std::max(a_inf, row);
  }
  const double denom =
      a_inf * inf_norm(out.coefficients.k) + inf_norm(rhs);
  out.relative_residual = denom > 0.0 ? inf_norm(res) / denom : 0.0;
  if (!(out.relative_residual <= 1e-10)) {
    std::ostringstream os;
    os << "conversion residual " << out.relative_residual
       << " exceeds tolerance for radii " << format_radii(d.radii);
    throw ConversionError(os.str(), d.radii, cond);
  }
  return out;
}

namespace {

struct CenterFit {
  std::vector<double> k;
  std::vector<double> residual;
  double cost = std::numeric_limits<double>::infinity();
  bool valid = false;
};

CenterFit fit_at_center(std::span<const double> levels,
                        std::span<const Point> points, std::size_t n,
                        double r_norm, double xc, double yc) {
  CenterFit fit;
  const std::size_t m = levels.size();
  std::vector<double> radii(m);
  for (std::size_t i = 0; i < m; ++i) {
    radii[i] = radius(points[i], {xc, yc}) / r_norm;
  }
  const linalg::Matrix a = power_matrix(radii, n);
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = levels[i] - 1.0;
  auto k = linalg::least_squares(a, rhs);
  if (!k) return fit;
  const auto ak = linalg::multiply(a, *k);
  fit.residual.resize(m);
  fit.cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    fit.residual[i] = ak[i] - rhs[i];
    fit.cost += fit.residual[i] * fit.residual[i];
  }
  fit.k = std::move(*k);
  fit.valid = std::isfinite(fit.cost);
  return fit;
}

bool collinear(std::span<const Point> pts) {
  const Point& a = pts[0];
  for (std::size_t i = 1; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double cross = (pts[i].x - a.x) * (pts[j].y - a.y) -
                           (pts[i].y - a.y) * (pts[j].x - a.x);
      if (std::abs(cross) > 1e-9) return false;
    }
  }
  return true;
}

}  // namespace

FullParamsResult estimate_full_params(std::span<const double> levels,
                                      std::span<const Point> sample_points,
                                      int width, int height, Model model) {
  if (levels.size() != sample_points.size()) {
    throw ArgumentError("levels and sample points differ in length");
  }
  if (levels.size() < 3) {
    throw ArgumentError("need n + 2 >= 3 levels to recover the center");
  }
  if (width <= 0 || height <= 0) throw ArgumentError("invalid image size");
  if (collinear(sample_points)) {
    throw ArgumentError("sample points must not be collinear");
  }
  const std::size_t n = levels.size() - 2;
  const double r_norm = default_r_norm(width, height);

  FullParamsResult best;
  best.principal_point = {0.5 * width, 0.5 * height};
  best.coefficients.model = model;
  best.coefficients.r_norm = r_norm;

  const bool flat = std::all_of(levels.begin(), levels.end(), [](double l) {
    return std::abs(l - 1.0) <= 1e-12;
  });
  if (flat) {
    best.coefficients.k.assign(n, 0.0);
    best.flat = true;
    return best;
  }

  double xc = best.principal_point.xc;
  double yc = best.principal_point.yc;
  CenterFit current = fit_at_center(levels, sample_points, n, r_norm, xc, yc);
  if (!current.valid) {
    throw EstimationError("degenerate radii at the initial center", best);
  }
  const auto record = [&](int iter) {
    best.principal_point = {xc, yc};
    best.coefficients.k = current.k;
    best.cost = current.cost;
    best.iterations = iter;
  };
  record(0);

  constexpr int kMaxIterations = 200;
  constexpr double kStepTol = 1e-6;  // px
  constexpr double kFdStep = 1e-4;   // px
  const std::size_t m = levels.size();
  double lambda = 1e-3;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    if (current.cost == 0.0) return best;
    // Central-difference Jacobian of the residual w.r.t. (xc, yc).
    std::vector<double> jx(m), jy(m);
    const CenterFit px = fit_at_center(levels, sample_points, n, r_norm, xc + kFdStep, yc);
    const CenterFit mx = fit_at_center(levels, sample_points, n, r_norm, xc - kFdStep, yc);
    const CenterFit py = fit_at_center(levels, sample_points, n, r_norm, xc, yc + kFdStep);
    const CenterFit my = fit_at_center(levels, sample_points, n, r_norm, xc, yc - kFdStep);
    if (!(px.valid && mx.valid && py.valid && my.valid)) {
      throw EstimationError("degenerate radii near the current center", best);
    }
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      jx[i] = (px.residual[i] - mx.residual[i]) / (2.0 * kFdStep);
      jy[i] = (py.residual[i] - my.residual[i]) / (2.0 * kFdStep);
      a11 += jx[i] * jx[i];
      a12 += jx[i] * jy[i];
      a22 += jy[i] * jy[i];
      g1 += jx[i] * current.residual[i];
      g2 += jy[i] * current.residual[i];
    }

    bool accepted = false;
    double step_len = 0.0;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      const double b11 = a11 * (1.0 + lambda);
      const double b22 = a22 * (1.0 + lambda);
      const double det = b11 * b22 - a12 * a12;
      if (!(det > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double dx = -(b22 * g1 - a12 * g2) / det;
      const double dy = -(b11 * g2 - a12 * g1) / det;
      const CenterFit trial =
          fit_at_center(levels, sample_points, n, r_norm, xc + dx, yc + dy);
      if (trial.valid && trial.cost <= current.cost) {
        xc += dx;
        yc += dy;
        current = trial;
        step_len = std::hypot(dx, dy);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // No descent direction left: the current center is a local minimum.
      record(iter);
      return best;
    }
    record(iter);
    if (step_len < kStepTol) return best;
  }
  throw EstimationError("principal point estimate did not converge in 200 "
                        "iterations",
                        best);
}

DistortionDistributionMap ddm(const DistortionCoefficients& k,
                              const PrincipalPoint& c, int width, int height) {
  if (width <= 0 || height <= 0) throw ArgumentError("invalid map size");
  DistortionDistributionMap m;
  m.width = width;
  m.height = height;
  m.principal_point = c;
  m.values.resize(static_cast<std::size_t>(width) * height);
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t j) {
    for (int i = 0; i < width; ++i) {
      const Point p{i + 0.5, static_cast<double>(j) + 0.5, Frame::kDistorted};
      m.at(i, static_cast<int>(j)) = distortion_level(k, radius(p, c));
    }
  });
  return m;
}

double check_symmetry(const DistortionDistributionMap& m) {
  double worst = 0.0;
  for (int j = 0; j < m.height; ++j) {
    const int mj = m.height - 1 - j;
    for (int i = 0; i < m.width; ++i) {
      const int mi = m.width - 1 - i;
      const double v = m.at(i, j);
      worst = std::max({worst, std::abs(v - m.at(mi, j)),
                        std::abs(v - m.at(i, mj)),
                        std::abs(v - m.at(mi, mj))});
    }
  }
  return worst;
}

std::vector<std::uint16_t> ddm_to_u16(const DistortionDistributionMap& m,
                                      double delta_max) {
  if (!(delta_max > 1.0)) {
    delta_max = m.values.empty()
                    ? 1.0
                    : *std::max_element(m.values.begin(), m.values.end());
  }
  std::vector<std::uint16_t> out(m.values.size(), 0);
  if (!(delta_max > 1.0)) return out;
  const double span = delta_max - 1.0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const double t = std::clamp((m.values[i] - 1.0) / span, 0.0, 1.0);
    out[i] = static_cast<std::uint16_t>(std::lround(t * 65535.0));
  }
  return out;
}

void write_ddm_csv(const DistortionDistributionMap& m,
                   const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing", path.string());
  char buf[32];
  for (int j = 0; j < m.height; ++j) {
    for (int i = 0; i < m.width; ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", m.at(i, j));
      if (i) os << ',';
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed", path.string());
}

void write_ddm_png(const DistortionDistributionMap& m,
                   const std::filesystem::path& path, double delta_max) {
  const auto values = ddm_to_u16(m, delta_max);
  save_png16(m.width, m.height, values, path);
}

}  // namespace ordcal
