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
#ifndef ORDCAL_ERRORS_HPP_
#define ORDCAL_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace ordcal {

// Numeric values are mirrored by ordcal_status in ordcal.h.
enum class ErrorCode : int {
  kArgument = 1,
  kDomain = 2,
  kSingularModel = 3,
  kOutOfRange = 4,
  kConversion = 5,
  kEstimation = 6,
  kConfig = 7,
  kIo = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorCode::kArgument, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

class SingularModelError : public Error {
 public:
  explicit SingularModelError(const std::string& what)
      : Error(ErrorCode::kSingularModel, what) {}
};

class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what)
      : Error(ErrorCode::kOutOfRange, what) {}
};

/// Raised when an ordinal vector cannot be turned into coefficients. Carries
/// the sample radii that produced the singular or ill-conditioned system.
class ConversionError : public Error {
 public:
  ConversionError(const std::string& what, std::vector<double> radii,
                  double condition)
      : Error(ErrorCode::kConversion, what),
        radii_(std::move(radii)),
        condition_(condition) {}
  const std::vector<double>& radii() const noexcept { return radii_; }
  double condition() const noexcept { return condition_; }

 private:
  std::vector<double> radii_;
  double condition_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(ErrorCode::kIo, what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace ordcal

#endif  // ORDCAL_ERRORS_HPP_
