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
#ifndef ORDCAL_LINALG_HPP_
#define ORDCAL_LINALG_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

// Small dense solvers for the radial coefficient systems (n is typically 4).
namespace ordcal::linalg {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  double norm1() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// LU factorization with partial pivoting. factor() returns nullopt when a
/// pivot is exactly zero.
class LuFactorization {
 public:
  static std::optional<LuFactorization> factor(const Matrix& a);

  std::vector<double> solve(std::span<const double> b) const;

  /// Exact 1-norm condition number ||A||_1 * ||A^-1||_1, obtained by solving
  /// for every column of the inverse. Cheap for the sizes used here.
  double condition_1() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double norm1_ = 0.0;
};

/// Minimum-norm-residual solution of an overdetermined full-rank system via
/// Householder QR. Returns nullopt when a column is numerically dependent.
std::optional<std::vector<double>> least_squares(Matrix a,
                                                 std::vector<double> b);

}  // namespace ordcal::linalg

#endif  // ORDCAL_LINALG_HPP_
