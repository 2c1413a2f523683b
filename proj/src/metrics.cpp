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
#include "ordcal/metrics.hpp"

#include <array>
#include <cmath>

#include "ordcal/errors.hpp"
#include "ordcal/parallel.hpp"

namespace ordcal {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height() ||
      a.channels() != b.channels()) {
    throw ArgumentError("image dimensions differ");
  }
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable 'valid' Gaussian filter: output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  static const auto taps = gaussian_taps();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> horiz(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += taps[t] * src[static_cast<std::size_t>(y) * w + x + t];
      horiz[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < kWindow; ++t) s += taps[t] * horiz[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sum / static_cast<double>(da.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

std::vector<double> luma(const ImageBuffer& img) {
  std::vector<double> y(static_cast<std::size_t>(img.width()) * img.height());
  for (int j = 0; j < img.height(); ++j) {
    for (int i = 0; i < img.width(); ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * img.width() + i;
      if (img.channels() >= 3) {
        y[idx] = 0.299 * img.at(i, j, 0) + 0.587 * img.at(i, j, 1) +
                 0.114 * img.at(i, j, 2);
      } else {
        y[idx] = img.at(i, j, 0);
      }
    }
  }
  return y;
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < kWindow || h < kWindow) {
    throw ArgumentError("SSIM needs images of at least 11x11");
  }
  const auto x = luma(a);
  const auto y = luma(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h);
  const auto my = filter_valid(y, w, h);
  const auto sxx = filter_valid(xx, w, h);
  const auto syy = filter_valid(yy, w, h);
  const auto sxy = filter_valid(xy, w, h);
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
  }
  return total / static_cast<double>(mx.size());
}

double rmse_params(std::span<const double> estimate,
                   std::span<const double> truth, RmseVariant variant) {
  if (estimate.size() != truth.size()) {
    throw ArgumentError("parameter vectors differ in length");
  }
  if (estimate.empty()) throw ArgumentError("parameter vectors are empty");
  const double n = static_cast<double>(estimate.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double d = estimate[i] - truth[i];
    sum += variant == RmseVariant::kAsPrinted ? std::sqrt(d * d) : d * d;
  }
  return variant == RmseVariant::kAsPrinted ? sum / n : std::sqrt(sum / n);
}

double mdld(const DistortionDistributionMap& estimate,
            const DistortionDistributionMap& truth) {
  if (estimate.width != truth.width || estimate.height != truth.height ||
      estimate.values.size() != truth.values.size()) {
    throw ArgumentError("distortion maps differ in size");
  }
  if (estimate.values.empty()) throw ArgumentError("empty distortion map");
  // Row sums are reduced in row order so the result does not depend on the
  // worker count.
  std::vector<double> rows(static_cast<std::size_t>(truth.height), 0.0);
  parallel_for(rows.size(), [&](std::size_t j) {
    double s = 0.0;
    for (int i = 0; i < truth.width; ++i) {
      s += std::abs(estimate.at(i, static_cast<int>(j)) - truth.at(i, static_cast<int>(j)));
    }
    rows[j] = s;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total / static_cast<double>(truth.values.size());
}

double mdld(const DistortionCoefficients& estimate,
            const DistortionCoefficients& truth, const PrincipalPoint& c,
            int width, int height) {
  return mdld(ddm(estimate, c, width, height), ddm(truth, c, width, height));
}

double learning_friendly_rate(std::span<const LfrGroup> groups,
                              double total_data, double total_epochs,
                              LogBase base) {
  if (groups.empty()) throw ArgumentError("at least one group is required");
  if (!(total_data > 0.0) || !(total_epochs > 0.0)) {
    throw ArgumentError("totals D and C must be positive");
  }
  double sum = 0.0;
  for (const auto& g : groups) {
    if (!(g.error > 0.0)) throw ArgumentError("group error E_i must be positive");
    if (!(g.convergence_epoch > 0.0) || g.convergence_epoch > total_epochs) {
      throw ArgumentError("convergence epoch C_i must lie in (0, C]");
    }
    if (!(g.data_count > 0.0) || g.data_count > total_data) {
      throw ArgumentError("data count D_i must lie in (0, D]");
    }
    const double arg = 2.0 - g.convergence_epoch / total_epochs;
    const double lg = base == LogBase::kNatural ? std::log(arg) : std::log10(arg);
    sum += (g.data_count / total_data) * (1.0 / g.error) * lg;
  }
  return sum / static_cast<double>(groups.size());
}

}  // namespace ordcal
