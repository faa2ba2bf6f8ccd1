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
 * @file knowledge.hpp
 * Knowledge about a signal measurement gained from a meter measurement, the
 * a-priori knowledge, their excess, the distinguishability, and the bound on
 * the sum of squared excesses set by the maximal CHSH factor.
 *
 * Every scalar quantity has two independent routes: a trace route through
 * conditional_decompose and a closed form in Bloch variables
 * (s = signal axis, b = meter axis, v = T^T s):
 *
 *   K = max(|n.s|, |v.b|),  P = |n.s|,  D = max(|n.s|, |v|).
 *
 * The public entry points compute both and require agreement to 1e-12.
 */

#pragma once

#include <array>

#include "kex/state.hpp"

namespace kex {

struct KnowledgeReport {
  double K = 0.0;
  double P = 0.0;
  double deltaK = 0.0;
  double D = 0.0;
  double deltaD = 0.0;
};

struct BoundCheck {
  double sum_of_squares = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  double b_max = 0.0;
};

// Single-route evaluations, exposed for cross-checking.
double knowledge_by_trace(const TwoQubitState &state, const QubitMeasurement &meter,
                          const QubitMeasurement &signal);
double knowledge_by_bloch(const BlochForm &form, const QubitMeasurement &meter,
                          const QubitMeasurement &signal);
double apriori_by_trace(const TwoQubitState &state, const QubitMeasurement &signal);
double apriori_by_bloch(const BlochForm &form, const QubitMeasurement &signal);
double distinguishability_by_trace(const TwoQubitState &state,
                                   const QubitMeasurement &signal);
double distinguishability_by_bloch(const BlochForm &form,
                                   const QubitMeasurement &signal);

double knowledge(const TwoQubitState &state, const QubitMeasurement &meter,
                 const QubitMeasurement &signal);
double apriori(const TwoQubitState &state, const QubitMeasurement &signal);
double knowledge_excess(const TwoQubitState &state, const QubitMeasurement &meter,
                        const QubitMeasurement &signal);
double distinguishability(const TwoQubitState &state, const QubitMeasurement &signal);
/// max(0, |T^T s| - |n.s|)
double distinguishability_excess(const TwoQubitState &state,
                                 const QubitMeasurement &signal);

KnowledgeReport knowledge_report(const TwoQubitState &state,
                                 const QubitMeasurement &meter,
                                 const QubitMeasurement &signal);

struct OptimalMeter {
  QubitMeasurement meter;
  // |T^T s| < 1e-12: every meter measurement is equally uninformative and
  // the axis defaults to e3.
  bool degenerate = false;
};

/// Helstrom-optimal meter measurement for predicting `signal`.
OptimalMeter optimal_meter(const TwoQubitState &state, const QubitMeasurement &signal);

/// 2 sqrt(u1 + u2) for the two largest eigenvalues of T^T T.
double bell_max(const BlochForm &form);
double bell_max(const TwoQubitState &state);

/// Sum of squared excesses for complementary signal measurements and
/// arbitrary meters, against (B_max / 2)^2. Throws NotComplementary.
BoundCheck check_bound(const TwoQubitState &state, const QubitMeasurement &signal,
                       const QubitMeasurement &signal_prime,
                       const QubitMeasurement &meter,
                       const QubitMeasurement &meter_prime);

/// Same meter for both predictions; the bound is 1.
BoundCheck check_same_meter_bound(const TwoQubitState &state,
                                  const QubitMeasurement &signal,
                                  const QubitMeasurement &signal_prime,
                                  const QubitMeasurement &meter);

struct ExcessOptimum {
  QubitMeasurement signal;
  QubitMeasurement signal_prime;
  QubitMeasurement meter;
  QubitMeasurement meter_prime;
  BoundCheck check;
};

/// Maximizes the sum of squared excesses over complementary signal pairs with
/// Helstrom-optimal meters. Starts from the two leading left singular vectors
/// of T, then refines the signal frame with a Nelder-Mead search.
ExcessOptimum optimize_excess_sum(const TwoQubitState &state);

}  // namespace kex
