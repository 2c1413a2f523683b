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
#include "ordcal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ordcal/errors.hpp"

namespace ordcal::linalg {

double Matrix::norm1() const {
  double best = 0.0;
  for (std::size_t c = 0; c < cols_; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) sum += std::abs((*this)(r, c));
    best = std::max(best, sum);
  }
  return best;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw ArgumentError("matrix/vector size mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) y[r] += a(r, c) * x[c];
  }
  return y;
}

std::optional<LuFactorization> LuFactorization::factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("LU needs a square matrix");
  const std::size_t n = a.rows();
  LuFactorization f;
  f.lu_ = a;
  f.norm1_ = a.norm1();
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});
  Matrix& m = f.lu_;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    }
    if (m(pivot, col) == 0.0) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(pivot, c), m(col, c));
      std::swap(f.perm_[pivot], f.perm_[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = m(r, col) / m(col, col);
      m(r, col) = factor;
      for (std::size_t c = col + 1; c < n; ++c) m(r, c) -= factor * m(col, c);
    }
  }
  return f;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw ArgumentError("rhs size mismatch");
  std::vector<double> x(n);
  for (std::size_t r = 0; r < n; ++r) {
    double v = b[perm_[r]];
    for (std::size_t c = 0; c < r; ++c) v -= lu_(r, c) * x[c];
    x[r] = v;
  }
  for (std::size_t r = n; r-- > 0;) {
    double v = x[r];
    for (std::size_t c = r + 1; c < n; ++c) v -= lu_(r, c) * x[c];
    x[r] = v / lu_(r, r);
  }
  return x;
}

double LuFactorization::condition_1() const {
  const std::size_t n = lu_.rows();
  double inv_norm = 0.0;
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    const auto col = solve(e);
    double sum = 0.0;
    for (double v : col) sum += std::abs(v);
    inv_norm = std::max(inv_norm, sum);
  }
  return norm1_ * inv_norm;
}

std::optional<std::vector<double>> least_squares(Matrix a,
                                                 std::vector<double> b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw ArgumentError("rhs size mismatch");
  if (m < n) throw ArgumentError("least squares needs rows >= cols");

  double scale = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
  }
  std::vector<double> v(m);
  for (std::size_t col = 0; col < n; ++col) {
    double norm = 0.0;
    for (std::size_t r = col; r < m; ++r) norm += a(r, col) * a(r, col);
    norm = std::sqrt(norm);
    if (norm <= 1e-14 * scale || norm == 0.0) return std::nullopt;
    const double alpha = a(col, col) > 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t r = col; r < m; ++r) {
      v[r] = a(r, col) - (r == col ? alpha : 0.0);
      vnorm2 += v[r] * v[r];
    }
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = col; c < n; ++c) {
      double dot = 0.0;
      for (std::size_t r = col; r < m; ++r) dot += v[r] * a(r, c);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t r = col; r < m; ++r) a(r, c) -= f * v[r];
    }
    double dot = 0.0;
    for (std::size_t r = col; r < m; ++r) dot += v[r] * b[r];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t r = col; r < m; ++r) b[r] -= f * v[r];
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return x;
}

}  // namespace ordcal::linalg
