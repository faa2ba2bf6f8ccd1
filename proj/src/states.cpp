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

#include "kex/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/random/normal_distribution.hpp>

namespace kex {

Vector4c bell_vector(BellState which) {
  const double r = 1.0 / std::numbers::sqrt2;
  Vector4c v = Vector4c::Zero();
  switch (which) {
    case BellState::PhiPlus: v << r, 0, 0, r; break;
    case BellState::PhiMinus: v << r, 0, 0, -r; break;
    case BellState::PsiPlus: v << 0, r, r, 0; break;
    case BellState::PsiMinus: v << 0, r, -r, 0; break;
  }
  return v;
}

TwoQubitState pure_state(const Vector4c &amplitudes) {
  const Vector4c psi = amplitudes.normalized();
  return validate_state(psi * psi.adjoint());
}

TwoQubitState singlet() { return pure_state(bell_vector(BellState::PsiMinus)); }

TwoQubitState maximally_mixed() { return validate_state(0.25 * Matrix4c::Identity()); }

TwoQubitState werner(double p) {
  if (!(p >= -1.0 / 3.0 - 1e-15 && p <= 1.0))
    throw Error(ErrorKind::OutOfRange,
                "Werner parameter must lie in [-1/3, 1], got " + std::to_string(p));
  const Vector4c s = bell_vector(BellState::PsiMinus);
  return validate_state(p * (s * s.adjoint()) + 0.25 * (1.0 - p) * Matrix4c::Identity());
}

TwoQubitState bell_diagonal(const std::array<double, 4> &lambdas) {
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0))
      throw Error(ErrorKind::NotAProbabilityVector,
                  "negative or non-finite weight " + std::to_string(l));
    total += l;
  }
  if (std::abs(total - 1.0) > kValidationTol)
    throw Error(ErrorKind::NotAProbabilityVector,
                "weights sum to " + std::to_string(total));
  Matrix4c rho = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) {
    const Vector4c b = bell_vector(static_cast<BellState>(i));
    rho += lambdas[static_cast<std::size_t>(i)] * (b * b.adjoint());
  }
  return validate_state(rho);
}

TwoQubitState random_state(CounterRng &rng, int ancilla_dim) {
  if (ancilla_dim < 1 || ancilla_dim > 4)
    throw Error(ErrorKind::OutOfRange,
                "ancilla dimension must be 1..4, got " + std::to_string(ancilla_dim));
  boost::random::normal_distribution<double> gauss;
  Eigen::Matrix<Complex, 4, Eigen::Dynamic> psi(4, ancilla_dim);
  for (int j = 0; j < ancilla_dim; ++j)
    for (int i = 0; i < 4; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      psi(i, j) = Complex(re, im);
    }
  const Matrix4c rho = psi * psi.adjoint();
  return validate_state(rho / rho.trace().real());
}

TwoQubitState random_state(std::uint64_t seed, int ancilla_dim) {
  CounterRng rng(seed, 0);
  return random_state(rng, ancilla_dim);
}

Vector3 random_axis(CounterRng &rng) {
  boost::random::normal_distribution<double> gauss;
  for (;;) {
    Vector3 v;
    for (int k = 0; k < 3; ++k) v[k] = gauss(rng);
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

Matrix2c random_unitary(CounterRng &rng) {
  boost::random::normal_distribution<double> gauss;
  Eigen::Vector4d q;
  for (int k = 0; k < 4; ++k) q[k] = gauss(rng);
  q.normalize();
  // q0 I - i (q1 sx + q2 sy + q3 sz)
  Matrix2c u;
  u << Complex(q[0], -q[3]), Complex(-q[2], -q[1]), Complex(q[2], -q[1]),
      Complex(q[0], q[3]);
  return u;
}

WernerPrediction werner_prediction(double p, double theta_deg, double theta_prime_deg) {
  if (!(p >= -1.0 / 3.0 - 1e-15 && p <= 1.0))
    throw Error(ErrorKind::OutOfRange,
                "Werner parameter must lie in [-1/3, 1], got " + std::to_string(p));
  const double deg = std::numbers::pi / 180.0;
  const double ap = std::abs(p);
  WernerPrediction w;
  w.K = ap * std::abs(std::cos(2.0 * theta_deg * deg));
  w.K_prime = ap * std::abs(std::sin(2.0 * theta_prime_deg * deg));
  w.P = 0.0;
  w.P_prime = 0.0;
  w.b_max = 2.0 * std::numbers::sqrt2 * ap;
  return w;
}

}  // namespace kex
