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
#ifndef ORDCAL_METRICS_HPP_
#define ORDCAL_METRICS_HPP_

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ordcal/camera_model.hpp"
#include "ordcal/image.hpp"
#include "ordcal/ordinal.hpp"

namespace ordcal {

struct MetricReport {
  std::optional<double> psnr;  // +inf for identical images
  std::optional<double> ssim;
  std::optional<double> rmse_params;
  std::optional<double> mdld;
};

/// 10 log10(255^2 / MSE) over all channels; +infinity when MSE is zero.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

inline bool is_infinite_psnr(double v) {
  return v == std::numeric_limits<double>::infinity();
}

/// Mean SSIM over all fully-covered 11x11 Gaussian windows (sigma 1.5) of the
/// Rec. 601 luma, with K1 = 0.01, K2 = 0.03, L = 255.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// Rec. 601 luma per pixel (gray images pass through).
std::vector<double> luma(const ImageBuffer& img);

enum class RmseVariant {
  kAsPrinted,     // (1/N) sum sqrt((a - b)^2), i.e. mean absolute difference
  kConventional,  // sqrt((1/N) sum (a - b)^2)
};

double rmse_params(std::span<const double> estimate,
                   std::span<const double> truth,
                   RmseVariant variant = RmseVariant::kAsPrinted);

/// Mean absolute per-pixel difference of two distortion distribution maps.
double mdld(const DistortionDistributionMap& estimate,
            const DistortionDistributionMap& truth);

/// Renders both coefficient sets at the same size and center, then compares.
double mdld(const DistortionCoefficients& estimate,
            const DistortionCoefficients& truth, const PrincipalPoint& c,
            int width, int height);

struct LfrGroup {
  double error = 0.0;              // E_i, e.g. MDLD
  double data_count = 0.0;         // D_i
  double convergence_epoch = 0.0;  // C_i
};

enum class LogBase { kNatural, kTen };

/// (1/N) sum_i (D_i / D) (1 / E_i) log(2 - C_i / C).
double learning_friendly_rate(std::span<const LfrGroup> groups,
                              double total_data, double total_epochs,
                              LogBase base = LogBase::kNatural);

}  // namespace ordcal

#endif  // ORDCAL_METRICS_HPP_
