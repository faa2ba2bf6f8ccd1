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
 * @file canonical.hpp
 * Diagonal-correlation-matrix canonical form under local unitaries, and the
 * local-filtering normal form (Bell-diagonal, maximally mixed reductions).
 */

#pragma once

#include <utility>
#include <vector>

#include "kex/knowledge.hpp"
#include "kex/state.hpp"

namespace kex {

/// T = O_S diag(d) O_M^T with proper rotations and d ordered by descending
/// square, so d[0] is the dominant correlation. The original state equals
/// apply_local_unitary(state_bar, U_S, U_M) where U_S, U_M realize O_S, O_M.
struct CanonicalForm {
  TwoQubitState state_bar;
  Matrix3 O_S;
  Matrix3 O_M;
  Matrix2c U_S;
  Matrix2c U_M;
  Vector3 diag;
};

CanonicalForm canonical_form(const TwoQubitState &state);

struct FilterResult {
  TwoQubitState state_out;
  Matrix2c F_S;
  Matrix2c F_M;
  double success_probability = 0.0;
  int iterations = 0;
  double b_max_in = 0.0;
  double b_max_out = 0.0;
  // Max deviation of the two reductions from I/2 (max-abs entry), before the
  // first iteration and after each one.
  std::vector<double> deviation_history;
};

inline constexpr double kDefaultFilterTol = 1e-10;
inline constexpr int kDefaultFilterMaxIter = 10000;

/// Alternating local filters (2 rho_S)^(-1/2), (2 rho_M)^(-1/2) until both
/// reductions are within tol of I/2, followed by the canonical rotations.
/// Throws SingularReduction when a reduction has an eigenvalue below 1e-8,
/// NoConvergence when max_iter is exhausted.
FilterResult filter_normal_form(const TwoQubitState &state,
                                double tol = kDefaultFilterTol,
                                int max_iter = kDefaultFilterMaxIter);

/// Filters, then maximizes the excess sum on the filtered state.
std::pair<FilterResult, BoundCheck> saturate_after_filter(const TwoQubitState &state);

}  // namespace kex
