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

#include <array>
#include <cstdint>

#include "kex/rng.hpp"
#include "kex/state.hpp"

namespace kex {

/// Bell basis order used throughout: Phi+, Phi-, Psi+, Psi-.
enum class BellState { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

Vector4c bell_vector(BellState which);

TwoQubitState singlet();
TwoQubitState maximally_mixed();
/// Pure product state |a><a| x |b<b| from amplitude vectors.
TwoQubitState pure_state(const Vector4c &amplitudes);

/// p |Psi-><Psi-| + (1 - p)/4 I, for p in [-1/3, 1].
TwoQubitState werner(double p);

/// sum_i lambda_i |Bell_i><Bell_i| in the order Phi+, Phi-, Psi+, Psi-.
TwoQubitState bell_diagonal(const std::array<double, 4> &lambdas);

/// Partial trace over a d-dimensional ancilla of a Gaussian random pure state
/// on 4 x d. ancilla_dim = 1 gives pure states, 4 gives full rank.
TwoQubitState random_state(std::uint64_t seed, int ancilla_dim);
TwoQubitState random_state(CounterRng &rng, int ancilla_dim);

/// Isotropic random Bloch axis.
Vector3 random_axis(CounterRng &rng);
/// Haar-random SU(2) element.
Matrix2c random_unitary(CounterRng &rng);

struct WernerPrediction {
  double K = 0.0;
  double K_prime = 0.0;
  double P = 0.0;
  double P_prime = 0.0;
  double b_max = 0.0;
};

/// Closed forms for a Werner state with meter analyzer at theta (predicting
/// H/V) and theta_prime (predicting the diagonal basis):
///   K = p |cos 2theta|, K' = p |sin 2theta'|, P = P' = 0, B_max = 2 sqrt(2) p.
WernerPrediction werner_prediction(double p, double theta_deg, double theta_prime_deg);

}  // namespace kex
