// Copyright 2026 The kexcess Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kex {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr double kValidationTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;

enum class ErrorKind {
  NotHermitian,
  TraceNotOne,
  NotPositive,
  NotUnitary,
  NotRotation,
  NotComplementary,
  SingularReduction,
  NoConvergence,
  OutOfRange,
  NotAProbabilityVector,
  EmptyRecord,
  Parse,
  Io,
};

const char *to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported as a kex::Error.
/// The kind lets callers (and the CLI) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Pauli matrices, index 0..2 for x, y, z.
const Matrix2c &pauli(int k);

}  // namespace kex
