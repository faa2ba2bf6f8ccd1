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

#include "kex/state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kex {

const char *to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotRotation: return "NotRotation";
    case ErrorKind::NotComplementary: return "NotComplementary";
    case ErrorKind::SingularReduction: return "SingularReduction";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotAProbabilityVector: return "NotAProbabilityVector";
    case ErrorKind::EmptyRecord: return "EmptyRecord";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

const Matrix2c &pauli(int k) {
  static const std::array<Matrix2c, 3> sigma = [] {
    const Complex i(0.0, 1.0);
    std::array<Matrix2c, 3> s;
    s[0] << 0, 1, 1, 0;
    s[1] << 0, -i, i, 0;
    s[2] << 1, 0, 0, -1;
    return s;
  }();
  return sigma.at(static_cast<std::size_t>(k));
}

Matrix4c kron(const Matrix2c &a, const Matrix2c &b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

namespace {

std::string magnitude(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

TwoQubitState TwoQubitState::validate(const Matrix4c &matrix) {
  if (!matrix.allFinite())
    throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");

  const double asymmetry = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (asymmetry >= kValidationTol)
    throw Error(ErrorKind::NotHermitian,
                "max |A - A^dag| = " + magnitude(asymmetry));
  const Matrix4c rho = 0.5 * (matrix + matrix.adjoint());

  const double trace_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (trace_dev > kValidationTol)
    throw Error(ErrorKind::TraceNotOne, "|Tr rho - 1| = " + magnitude(trace_dev));

  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Matrix4c>(rho, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  if (min_eig < -kValidationTol)
    throw Error(ErrorKind::NotPositive,
                "smallest eigenvalue = " + magnitude(min_eig));

  return TwoQubitState(rho);
}

Matrix2c TwoQubitState::reduced_signal() const {
  Matrix2c r;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      r(i, k) = rho_(2 * i, 2 * k) + rho_(2 * i + 1, 2 * k + 1);
  return r;
}

Matrix2c TwoQubitState::reduced_meter() const {
  return rho_.block<2, 2>(0, 0) + rho_.block<2, 2>(2, 2);
}

BlochForm decompose(const TwoQubitState &state) {
  const Matrix4c &rho = state.matrix();
  const Matrix2c id = Matrix2c::Identity();
  BlochForm f;
  for (int k = 0; k < 3; ++k) {
    f.n[k] = (rho * kron(pauli(k), id)).trace().real();
    f.m[k] = (rho * kron(id, pauli(k))).trace().real();
    for (int l = 0; l < 3; ++l)
      f.T(k, l) = (rho * kron(pauli(k), pauli(l))).trace().real();
  }
  return f;
}

TwoQubitState recompose(const BlochForm &form) {
  const Matrix2c id = Matrix2c::Identity();
  Matrix4c rho = kron(id, id);
  for (int k = 0; k < 3; ++k) {
    rho += form.m[k] * kron(id, pauli(k));
    rho += form.n[k] * kron(pauli(k), id);
    for (int l = 0; l < 3; ++l) rho += form.T(k, l) * kron(pauli(k), pauli(l));
  }
  return TwoQubitState::validate(0.25 * rho);
}

QubitMeasurement QubitMeasurement::from_axis(const Vector3 &axis) {
  const double norm = axis.norm();
  if (!std::isfinite(norm) || norm < 1e-12)
    throw Error(ErrorKind::OutOfRange, "measurement axis must be nonzero");
  // Already-normalized axes are kept bit-for-bit so serialized measurements
  // reproduce identical results.
  if (std::abs(norm - 1.0) <= 1e-15) return QubitMeasurement(axis);
  return QubitMeasurement(axis / norm);
}

Matrix2c QubitMeasurement::projector(int sign) const {
  const double s = sign > 0 ? 1.0 : -1.0;
  Matrix2c p = Matrix2c::Identity();
  for (int k = 0; k < 3; ++k) p += s * axis_[k] * pauli(k);
  return 0.5 * p;
}

QubitMeasurement measurement_from_polarization_angle(double theta_deg) {
  const double reduced = std::fmod(theta_deg, 180.0);
  const double two_theta = 2.0 * reduced * std::numbers::pi / 180.0;
  return QubitMeasurement::from_axis(
      Vector3(std::sin(two_theta), 0.0, std::cos(two_theta)));
}

bool are_complementary(const QubitMeasurement &a, const QubitMeasurement &b) {
  return std::abs(a.axis().dot(b.axis())) < 1e-9;
}

void require_unitary(const Matrix2c &u, const char *what) {
  const double dev =
      (u.adjoint() * u - Matrix2c::Identity()).cwiseAbs().maxCoeff();
  if (!(dev < kValidationTol))
    throw Error(ErrorKind::NotUnitary,
                std::string(what) + ": max |U^dag U - I| = " + magnitude(dev));
}

TwoQubitState apply_local_unitary(const TwoQubitState &state,
                                  const Matrix2c &u_signal,
                                  const Matrix2c &u_meter) {
  require_unitary(u_signal, "signal unitary");
  require_unitary(u_meter, "meter unitary");
  const Matrix4c u = kron(u_signal, u_meter);
  return TwoQubitState::validate(u * state.matrix() * u.adjoint());
}

Matrix3 rotation_of_unitary(const Matrix2c &u) {
  require_unitary(u, "unitary");
  Matrix3 o;
  for (int j = 0; j < 3; ++j) {
    const Matrix2c conj = u * pauli(j) * u.adjoint();
    for (int i = 0; i < 3; ++i) o(i, j) = 0.5 * (pauli(i) * conj).trace().real();
  }
  return o;
}

Matrix2c unitary_from_rotation(const Matrix3 &rotation) {
  const double orth =
      (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (!(orth < 1e-8) || !(std::abs(det - 1.0) < 1e-8))
    throw Error(ErrorKind::NotRotation,
                "max |O^T O - I| = " + magnitude(orth) +
                    ", det O = " + magnitude(det));

  Eigen::Quaterniond q(rotation);
  q.normalize();
  std::array<double, 4> c = {q.w(), q.x(), q.y(), q.z()};
  for (double v : c) {
    if (std::abs(v) > 1e-12) {
      if (v < 0)
        for (double &x : c) x = -x;
      break;
    }
  }
  const Complex i(0.0, 1.0);
  Matrix2c u = c[0] * Matrix2c::Identity();
  for (int k = 0; k < 3; ++k) u -= i * c[static_cast<std::size_t>(k + 1)] * pauli(k);
  return u;
}

Matrix4c ConditionalDecomposition::reassemble() const {
  const Matrix2c pp = psi * psi.adjoint();
  const Matrix2c qq = psi_perp * psi_perp.adjoint();
  const Matrix2c pq = psi * psi_perp.adjoint();
  Matrix4c cross = std::sqrt(w * w_perp) * kron(pq, chi_M);
  return w * kron(pp, rho_M) + w_perp * kron(qq, rho_M_perp) + cross +
         cross.adjoint();
}

ConditionalDecomposition conditional_decompose(const TwoQubitState &state,
                                               const QubitMeasurement &signal) {
  const Vector3 &a = signal.axis();
  const double theta = std::acos(std::clamp(a.z(), -1.0, 1.0));
  const double phi = std::atan2(a.y(), a.x());
  const Complex phase = std::polar(1.0, phi);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);

  ConditionalDecomposition d;
  d.psi << c, phase * s;
  d.psi_perp << -std::conj(phase) * s, c;

  // Meter blocks B_ij = (<i| x I) rho (|j> x I) in the {Psi, Psi_perp} basis.
  auto bra = [](const Vector2c &v) {
    Eigen::Matrix<Complex, 2, 4> p;
    p.block<2, 2>(0, 0) = std::conj(v[0]) * Matrix2c::Identity();
    p.block<2, 2>(0, 2) = std::conj(v[1]) * Matrix2c::Identity();
    return p;
  };
  const auto p0 = bra(d.psi);
  const auto p1 = bra(d.psi_perp);
  const Matrix4c &rho = state.matrix();
  const Matrix2c b00 = p0 * rho * p0.adjoint();
  const Matrix2c b11 = p1 * rho * p1.adjoint();
  const Matrix2c b01 = p0 * rho * p1.adjoint();

  d.w = b00.trace().real();
  d.w_perp = b11.trace().real();
  constexpr double floor = 1e-12;
  d.degenerate = d.w <= floor;
  d.degenerate_perp = d.w_perp <= floor;
  if (!d.degenerate) d.rho_M = b00 / d.w;
  if (!d.degenerate_perp) d.rho_M_perp = b11 / d.w_perp;
  if (!d.degenerate && !d.degenerate_perp)
    d.chi_M = b01 / std::sqrt(d.w * d.w_perp);
  return d;
}

}  // namespace kex
