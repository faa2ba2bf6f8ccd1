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

/**
 * @file state.hpp
 * Two-qubit states, their Bloch/correlation-matrix form, and single-qubit
 * two-outcome projective measurements.
 *
 * Basis ordering is fixed to |HH>, |HV>, |VH>, |VV> with the signal qubit
 * first: index = 2 * signal + meter, |H> = |0> = Bloch +z.
 */

#pragma once

#include "kex/types.hpp"

namespace kex {

/// A validated 4x4 density matrix (Hermitian, unit trace, PSD within 1e-10).
class TwoQubitState {
 public:
  /// Validates and (if only slightly asymmetric) symmetrizes the input.
  /// Checks run in the order Hermitian, trace, positivity; the first failure
  /// is reported.
  static TwoQubitState validate(const Matrix4c &matrix);

  const Matrix4c &matrix() const noexcept { return rho_; }

  /// Reduced state of the signal qubit (partial trace over the meter).
  Matrix2c reduced_signal() const;
  /// Reduced state of the meter qubit (partial trace over the signal).
  Matrix2c reduced_meter() const;

 private:
  explicit TwoQubitState(const Matrix4c &m) : rho_(m) {}
  Matrix4c rho_;
};

inline TwoQubitState validate_state(const Matrix4c &matrix) {
  return TwoQubitState::validate(matrix);
}

/// rho = 1/4 (I + I x m.sigma + n.sigma x I + sum_kl t_kl sigma_k x sigma_l)
struct BlochForm {
  Vector3 n = Vector3::Zero();  // signal
  Vector3 m = Vector3::Zero();  // meter
  Matrix3 T = Matrix3::Zero();  // rows: signal axis, columns: meter axis
};

BlochForm decompose(const TwoQubitState &state);

/// Throws NotPositive if the Bloch data is not a physical state.
TwoQubitState recompose(const BlochForm &form);

/// Two-outcome projective measurement along a Bloch axis. Outcome "+" is the
/// projector (I + a.sigma)/2. Axes a and -a describe the same measurement
/// with swapped outcome labels.
class QubitMeasurement {
 public:
  /// Normalizes any nonzero axis; throws OutOfRange on a (near) zero vector.
  static QubitMeasurement from_axis(const Vector3 &axis);

  const Vector3 &axis() const noexcept { return axis_; }

  /// sign > 0 selects the "+" projector, otherwise "-".
  Matrix2c projector(int sign) const;

  /// Measurement with the outcome labels swapped (axis negated).
  QubitMeasurement flipped() const { return QubitMeasurement(-axis_); }

 private:
  explicit QubitMeasurement(const Vector3 &a) : axis_(a) {}
  Vector3 axis_;
};

/// Linear polarization analyzer at theta degrees: "+" is
/// cos(theta)|H> + sin(theta)|V>, i.e. axis (sin 2theta, 0, cos 2theta).
QubitMeasurement measurement_from_polarization_angle(double theta_deg);

bool are_complementary(const QubitMeasurement &a, const QubitMeasurement &b);

void require_unitary(const Matrix2c &u, const char *what);

TwoQubitState apply_local_unitary(const TwoQubitState &state,
                                  const Matrix2c &u_signal,
                                  const Matrix2c &u_meter);

/// The rotation O with U (v.sigma) U^dag = (O v).sigma.
Matrix3 rotation_of_unitary(const Matrix2c &u);

/// Inverse of rotation_of_unitary up to global phase. The returned matrix is
/// w I - i (x sigma_x + y sigma_y + z sigma_z) for the unit quaternion
/// (w, x, y, z) of O, with the first nonzero quaternion component positive.
Matrix2c unitary_from_rotation(const Matrix3 &rotation);

/// The expansion
///   rho = w |Psi><Psi| x rho_M + w_perp |Psi_perp><Psi_perp| x rho_M_perp
///         + sqrt(w w_perp) (|Psi><Psi_perp| x chi_M + h.c.)
/// relative to a signal measurement with |Psi> the "+" eigenvector.
struct ConditionalDecomposition {
  double w = 0.0;
  double w_perp = 0.0;
  Matrix2c rho_M = Matrix2c::Zero();
  Matrix2c rho_M_perp = Matrix2c::Zero();
  Matrix2c chi_M = Matrix2c::Zero();
  Vector2c psi = Vector2c::Zero();
  Vector2c psi_perp = Vector2c::Zero();
  // Set when the corresponding weight is below 1e-12; the conditional state
  // is then undefined and stored as zero.
  bool degenerate = false;
  bool degenerate_perp = false;

  /// Unnormalized meter operator w rho_M - w_perp rho_M_perp.
  Matrix2c helstrom_operator() const { return w * rho_M - w_perp * rho_M_perp; }

  Matrix4c reassemble() const;
};

ConditionalDecomposition conditional_decompose(const TwoQubitState &state,
                                               const QubitMeasurement &signal);

/// Kronecker product a x b.
Matrix4c kron(const Matrix2c &a, const Matrix2c &b);

}  // namespace kex
