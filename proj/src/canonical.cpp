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

#include "kex/canonical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace kex {

CanonicalForm canonical_form(const TwoQubitState &state) {
  const BlochForm form = decompose(state);
  Eigen::JacobiSVD<Matrix3> svd(form.T, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 u = svd.matrixU();
  Matrix3 v = svd.matrixV();
  Vector3 d = svd.singularValues();

  // Absorb reflections into the last diagonal entry.
  if (u.determinant() < 0) {
    u.col(2) = -u.col(2);
    d[2] = -d[2];
  }
  if (v.determinant() < 0) {
    v.col(2) = -v.col(2);
    d[2] = -d[2];
  }

  std::array<int, 3> perm{0, 1, 2};
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return d[a] * d[a] > d[b] * d[b]; });
  int inversions = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)])
        ++inversions;
  Matrix3 us, vs;
  Vector3 ds;
  for (int i = 0; i < 3; ++i) {
    const int src = perm[static_cast<std::size_t>(i)];
    us.col(i) = u.col(src);
    vs.col(i) = v.col(src);
    ds[i] = d[src];
  }
  // An odd permutation flips both determinants; negating the same column of
  // both factors restores them and leaves O_S D O_M^T unchanged.
  if (inversions % 2 == 1) {
    us.col(2) = -us.col(2);
    vs.col(2) = -vs.col(2);
  }

  const Matrix2c u_s = unitary_from_rotation(us);
  const Matrix2c u_m = unitary_from_rotation(vs);
  TwoQubitState bar = apply_local_unitary(state, u_s.adjoint(), u_m.adjoint());
  return {std::move(bar), us, vs, u_s, u_m, ds};
}

namespace {

double reduction_deviation(const Matrix4c &rho) {
  const auto st = TwoQubitState::validate(rho);
  const Matrix2c half = 0.5 * Matrix2c::Identity();
  return std::max((st.reduced_signal() - half).cwiseAbs().maxCoeff(),
                  (st.reduced_meter() - half).cwiseAbs().maxCoeff());
}

constexpr double kReductionFloor = 1e-8;

// (2 r)^(-1/2) for a full-rank single-qubit reduction r.
Matrix2c balancing_filter(const Matrix2c &reduction, const char *side) {
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(0.5 * (reduction + reduction.adjoint()));
  const Eigen::Vector2d ev = es.eigenvalues();
  if (!(ev.minCoeff() > kReductionFloor))
    throw Error(ErrorKind::SingularReduction,
                std::string(side) + " reduction has eigenvalue " +
                    std::to_string(ev.minCoeff()) + " below 1e-8");
  const Eigen::Vector2d scale = (2.0 * ev).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * scale.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix4c filtered(const Matrix4c &rho, const Matrix2c &fs, const Matrix2c &fm) {
  const Matrix4c k = kron(fs, fm);
  return k * rho * k.adjoint();
}

double largest_singular_value(const Matrix2c &m) {
  return Eigen::JacobiSVD<Matrix2c>(m).singularValues()[0];
}

}  // namespace

FilterResult filter_normal_form(const TwoQubitState &state, double tol, int max_iter) {
  const Matrix2c id = Matrix2c::Identity();
  Matrix2c fs = id;
  Matrix2c fm = id;
  Matrix4c rho = state.matrix();

  // Rejects rank-deficient inputs before any filtering.
  balancing_filter(state.reduced_signal(), "signal");
  balancing_filter(state.reduced_meter(), "meter");

  std::vector<double> history{reduction_deviation(rho)};
  int iterations = 0;
  while (history.back() > tol) {
    if (iterations >= max_iter)
      throw Error(ErrorKind::NoConvergence,
                  "reductions still " + std::to_string(history.back()) +
                      " from I/2 after " + std::to_string(max_iter) + " iterations");
    TwoQubitState cur = TwoQubitState::validate(rho);
    const Matrix2c f = balancing_filter(cur.reduced_signal(), "signal");
    rho = filtered(rho, f, id);
    rho /= rho.trace().real();
    fs = f * fs;

    cur = TwoQubitState::validate(rho);
    const Matrix2c g = balancing_filter(cur.reduced_meter(), "meter");
    rho = filtered(rho, id, g);
    rho /= rho.trace().real();
    fm = g * fm;

    ++iterations;
    history.push_back(reduction_deviation(rho));
  }

  fs /= largest_singular_value(fs);
  fm /= largest_singular_value(fm);
  const Matrix4c unnormalized = filtered(state.matrix(), fs, fm);
  const double success = unnormalized.trace().real();
  TwoQubitState balanced = TwoQubitState::validate(unnormalized / success);

  // Reductions are now I/2; rotate T to diagonal unless it already is.
  const Matrix3 t = decompose(balanced).T;
  const double off_diag = (t - Matrix3(t.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
  if (off_diag > kValidationTol) {
    CanonicalForm cf = canonical_form(balanced);
    fs = cf.U_S.adjoint() * fs;
    fm = cf.U_M.adjoint() * fm;
    balanced = cf.state_bar;
  }

  const double b_in = bell_max(state);
  const double b_out = bell_max(balanced);
  return {std::move(balanced), fs, fm, success, iterations, b_in, b_out,
          std::move(history)};
}

std::pair<FilterResult, BoundCheck> saturate_after_filter(const TwoQubitState &state) {
  FilterResult fr = filter_normal_form(state);
  const ExcessOptimum opt = optimize_excess_sum(fr.state_out);
  return {std::move(fr), opt.check};
}

}  // namespace kex
