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

#include "kex/knowledge.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include <gsl/gsl_multimin.h>

namespace kex {

namespace {

constexpr double kCrossCheckTol = 1e-12;

double cross_checked(double trace_value, double bloch_value, const char *what) {
  if (!(std::abs(trace_value - bloch_value) <= kCrossCheckTol))
    throw std::logic_error(std::string(what) + ": trace and Bloch routes disagree (" +
                           std::to_string(trace_value) + " vs " +
                           std::to_string(bloch_value) + ")");
  return trace_value;
}

double trace_norm(const Matrix2c &hermitian) {
  const Matrix2c h = 0.5 * (hermitian + hermitian.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix2c>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .sum();
}

}  // namespace

double knowledge_by_trace(const TwoQubitState &state, const QubitMeasurement &meter,
                          const QubitMeasurement &signal) {
  const Matrix2c delta = conditional_decompose(state, signal).helstrom_operator();
  return std::abs((meter.projector(+1) * delta).trace().real()) +
         std::abs((meter.projector(-1) * delta).trace().real());
}

double knowledge_by_bloch(const BlochForm &form, const QubitMeasurement &meter,
                          const QubitMeasurement &signal) {
  const Vector3 &s = signal.axis();
  const Vector3 v = form.T.transpose() * s;
  return std::max(std::abs(form.n.dot(s)), std::abs(v.dot(meter.axis())));
}

double apriori_by_trace(const TwoQubitState &state, const QubitMeasurement &signal) {
  const auto d = conditional_decompose(state, signal);
  return std::abs(d.w - d.w_perp);
}

double apriori_by_bloch(const BlochForm &form, const QubitMeasurement &signal) {
  return std::abs(form.n.dot(signal.axis()));
}

double distinguishability_by_trace(const TwoQubitState &state,
                                   const QubitMeasurement &signal) {
  return trace_norm(conditional_decompose(state, signal).helstrom_operator());
}

double distinguishability_by_bloch(const BlochForm &form,
                                   const QubitMeasurement &signal) {
  const Vector3 &s = signal.axis();
  return std::max(std::abs(form.n.dot(s)), (form.T.transpose() * s).norm());
}

double knowledge(const TwoQubitState &state, const QubitMeasurement &meter,
                 const QubitMeasurement &signal) {
  return cross_checked(knowledge_by_trace(state, meter, signal),
                       knowledge_by_bloch(decompose(state), meter, signal),
                       "knowledge");
}

double apriori(const TwoQubitState &state, const QubitMeasurement &signal) {
  return cross_checked(apriori_by_trace(state, signal),
                       apriori_by_bloch(decompose(state), signal), "apriori");
}

double knowledge_excess(const TwoQubitState &state, const QubitMeasurement &meter,
                        const QubitMeasurement &signal) {
  const double dk = knowledge(state, meter, signal) - apriori(state, signal);
  assert(dk >= -kCrossCheckTol);
  return dk;
}

double distinguishability(const TwoQubitState &state, const QubitMeasurement &signal) {
  return cross_checked(distinguishability_by_trace(state, signal),
                       distinguishability_by_bloch(decompose(state), signal),
                       "distinguishability");
}

double distinguishability_excess(const TwoQubitState &state,
                                 const QubitMeasurement &signal) {
  const BlochForm f = decompose(state);
  const double closed = std::max(
      0.0, (f.T.transpose() * signal.axis()).norm() - std::abs(f.n.dot(signal.axis())));
  const double via_d = distinguishability(state, signal) - apriori(state, signal);
  return cross_checked(via_d, closed, "distinguishability excess");
}

KnowledgeReport knowledge_report(const TwoQubitState &state,
                                 const QubitMeasurement &meter,
                                 const QubitMeasurement &signal) {
  KnowledgeReport r;
  r.K = knowledge(state, meter, signal);
  r.P = apriori(state, signal);
  r.D = distinguishability(state, signal);
  r.deltaK = r.K - r.P;
  r.deltaD = r.D - r.P;
  return r;
}

OptimalMeter optimal_meter(const TwoQubitState &state, const QubitMeasurement &signal) {
  const Vector3 v = decompose(state).T.transpose() * signal.axis();
  if (v.norm() < 1e-12)
    return {QubitMeasurement::from_axis(Vector3::UnitZ()), true};
  return {QubitMeasurement::from_axis(v), false};
}

double bell_max(const BlochForm &form) {
  const Matrix3 gram = form.T.transpose() * form.T;
  // Ascending eigenvalues.
  const Vector3 u =
      Eigen::SelfAdjointEigenSolver<Matrix3>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  return 2.0 * std::sqrt(std::max(0.0, u[1] + u[2]));
}

double bell_max(const TwoQubitState &state) { return bell_max(decompose(state)); }

namespace {

BoundCheck make_check(double sum, double bound, double b_max) {
  return {sum, bound, bound - sum, b_max};
}

void require_complementary(const QubitMeasurement &a, const QubitMeasurement &b) {
  if (!are_complementary(a, b))
    throw Error(ErrorKind::NotComplementary,
                "signal axes overlap a.b = " + std::to_string(a.axis().dot(b.axis())));
}

}  // namespace

BoundCheck check_bound(const TwoQubitState &state, const QubitMeasurement &signal,
                       const QubitMeasurement &signal_prime,
                       const QubitMeasurement &meter,
                       const QubitMeasurement &meter_prime) {
  require_complementary(signal, signal_prime);
  const double dk = knowledge_excess(state, meter, signal);
  const double dkp = knowledge_excess(state, meter_prime, signal_prime);
  const double b = bell_max(state);
  return make_check(dk * dk + dkp * dkp, 0.25 * b * b, b);
}

BoundCheck check_same_meter_bound(const TwoQubitState &state,
                                  const QubitMeasurement &signal,
                                  const QubitMeasurement &signal_prime,
                                  const QubitMeasurement &meter) {
  require_complementary(signal, signal_prime);
  const double dk = knowledge_excess(state, meter, signal);
  const double dkp = knowledge_excess(state, meter, signal_prime);
  return make_check(dk * dk + dkp * dkp, 1.0, bell_max(state));
}

namespace {

Matrix3 euler_zyz(double a, double b, double c) {
  using Eigen::AngleAxisd;
  return (AngleAxisd(a, Vector3::UnitZ()) * AngleAxisd(b, Vector3::UnitY()) *
          AngleAxisd(c, Vector3::UnitZ()))
      .toRotationMatrix();
}

struct FrameObjective {
  const BlochForm *form;
  Matrix3 base;

  double excess_sum(const Matrix3 &frame) const {
    double sum = 0.0;
    for (int k = 0; k < 2; ++k) {
      const Vector3 s = frame.col(k);
      const double dd = std::max(
          0.0, (form->T.transpose() * s).norm() - std::abs(form->n.dot(s)));
      sum += dd * dd;
    }
    return sum;
  }

  static double negated(const gsl_vector *x, void *params) {
    const auto *self = static_cast<const FrameObjective *>(params);
    const Matrix3 frame = self->base * euler_zyz(gsl_vector_get(x, 0),
                                                 gsl_vector_get(x, 1),
                                                 gsl_vector_get(x, 2));
    return -self->excess_sum(frame);
  }
};

// Nelder-Mead refinement of a signal frame. Returns the best frame found.
Matrix3 refine_frame(const BlochForm &form, const Matrix3 &start) {
  FrameObjective obj{&form, start};
  gsl_multimin_function fn{&FrameObjective::negated, 3, &obj};

  gsl_vector *x = gsl_vector_calloc(3);
  gsl_vector *step = gsl_vector_alloc(3);
  gsl_vector_set_all(step, 0.25);
  gsl_multimin_fminimizer *nm =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
  gsl_multimin_fminimizer_set(nm, &fn, x, step);

  double last = nm->fval;
  int stalled = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(nm);
    if (last - nm->fval < 1e-10) {
      if (++stalled >= 30 && size < 1e-6) break;
    } else {
      stalled = 0;
    }
    last = nm->fval;
    if (size < 1e-10) break;
  }
  const gsl_vector *best = gsl_multimin_fminimizer_x(nm);
  const Matrix3 frame = start * euler_zyz(gsl_vector_get(best, 0),
                                          gsl_vector_get(best, 1),
                                          gsl_vector_get(best, 2));
  gsl_multimin_fminimizer_free(nm);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return frame;
}

}  // namespace

ExcessOptimum optimize_excess_sum(const TwoQubitState &state) {
  const BlochForm form = decompose(state);
  Eigen::JacobiSVD<Matrix3> svd(form.T, Eigen::ComputeFullU);
  Matrix3 seed = svd.matrixU();
  if (seed.determinant() < 0) seed.col(2) = -seed.col(2);

  const FrameObjective eval{&form, Matrix3::Identity()};
  Matrix3 best = seed;
  double best_value = eval.excess_sum(seed);

  // Three restarts from the cyclic relabellings of the seed frame.
  Matrix3 start = seed;
  for (int restart = 0; restart < 3; ++restart) {
    const Matrix3 refined = refine_frame(form, start);
    const double value = eval.excess_sum(refined);
    if (value > best_value + 1e-15) {
      best = refined;
      best_value = value;
    }
    const Matrix3 prev = start;
    start.col(0) = prev.col(1);
    start.col(1) = prev.col(2);
    start.col(2) = prev.col(0);
  }

  // Re-orthonormalize against drift from the composed rotations.
  const Vector3 s = best.col(0).normalized();
  const Vector3 sp = (best.col(1) - best.col(1).dot(s) * s).normalized();

  const auto signal = QubitMeasurement::from_axis(s);
  const auto signal_prime = QubitMeasurement::from_axis(sp);
  const auto meter = optimal_meter(state, signal).meter;
  const auto meter_prime = optimal_meter(state, signal_prime).meter;
  return {signal, signal_prime, meter, meter_prime,
          check_bound(state, signal, signal_prime, meter, meter_prime)};
}

}  // namespace kex
