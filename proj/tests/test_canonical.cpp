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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kex/canonical.hpp"
#include "kex/knowledge.hpp"
#include "kex/states.hpp"
#include "test_util.hpp"

using namespace kex;
using kex::test::max_abs_diff;

namespace {

void check_canonical_invariants(const TwoQubitState &st, const CanonicalForm &cf) {
  const BlochForm f = decompose(st);
  CHECK(std::abs(cf.O_S.determinant() - 1.0) < 1e-10);
  CHECK(std::abs(cf.O_M.determinant() - 1.0) < 1e-10);
  CHECK(max_abs_diff(Matrix3(cf.O_S * cf.diag.asDiagonal() * cf.O_M.transpose()), f.T) < 1e-10);
  CHECK(max_abs_diff(decompose(cf.state_bar).T, Matrix3(cf.diag.asDiagonal())) < 1e-10);
  CHECK(max_abs_diff(apply_local_unitary(cf.state_bar, cf.U_S, cf.U_M).matrix(), st.matrix()) <
        1e-10);
  CHECK(cf.diag[0] * cf.diag[0] >= cf.diag[1] * cf.diag[1] - 1e-12);
  CHECK(cf.diag[1] * cf.diag[1] >= cf.diag[2] * cf.diag[2] - 1e-12);
  // Sign of det T is carried by the product of the diagonal.
  CHECK(std::abs(cf.diag.prod() - f.T.determinant()) < 1e-10);
}

}  // namespace

TEST_CASE("canonical_form") {
  SUBCASE("werner: already diagonal with |d| = p and det -p^3") {
    const auto cf = canonical_form(werner(0.82));
    CHECK(max_abs_diff(cf.diag.cwiseAbs(), Vector3::Constant(0.82)) < 1e-12);
    CHECK(std::abs(cf.diag.prod() + std::pow(0.82, 3)) < 1e-12);
    // Degenerate spectrum: any proper frame works, so only invariants are checked.
    CHECK(bell_max(cf.state_bar) == doctest::Approx(bell_max(werner(0.82))));
    check_canonical_invariants(werner(0.82), cf);
  }
  SUBCASE("rotated singlet: construct then recover") {
    CounterRng rng(41, 0);
    for (int i = 0; i < 50; ++i) {
      const auto st = apply_local_unitary(singlet(), random_unitary(rng), random_unitary(rng));
      const auto cf = canonical_form(st);
      CHECK(max_abs_diff(cf.diag.cwiseAbs(), Vector3::Ones()) < 1e-10);
      CHECK(std::abs(cf.diag.prod() + 1.0) < 1e-10);
      check_canonical_invariants(st, cf);
    }
  }
  SUBCASE("T with rows swapped by a reflection") {
    // Swapping rows 0 and 1 of a diagonal T is a reflection on the signal
    // side; the proper factorization carries the sign in the diagonal.
    BlochForm f;
    f.T = Vector3(-0.3, -0.2, -0.1).asDiagonal();
    f.T.row(0).swap(f.T.row(1));
    const auto st = recompose(f);
    const auto cf = canonical_form(st);
    CHECK(max_abs_diff(cf.diag.cwiseAbs(), Vector3(0.3, 0.2, 0.1)) < 1e-12);
    CHECK(cf.diag.prod() > 0);  // one sign flip relative to diag(-0.3, -0.2, -0.1)
    check_canonical_invariants(st, cf);
  }
  SUBCASE("random states") {
    CounterRng rng(42, 0);
    for (int i = 0; i < 300; ++i) {
      const auto st = test::any_random_state(rng);
      check_canonical_invariants(st, canonical_form(st));
    }
  }
}

TEST_CASE("filter_normal_form") {
  SUBCASE("bell-diagonal input is left alone") {
    const auto st = bell_diagonal({0.1, 0.2, 0.3, 0.4});
    const auto r = filter_normal_form(st);
    CHECK(r.iterations == 0);
    CHECK(max_abs_diff(r.F_S, Matrix2c::Identity()) < 1e-15);
    CHECK(max_abs_diff(r.F_M, Matrix2c::Identity()) < 1e-15);
    CHECK(max_abs_diff(r.state_out.matrix(), st.matrix()) < 1e-15);
    CHECK(r.success_probability == doctest::Approx(1.0));
    CHECK(r.deviation_history.size() == 1);
  }
  SUBCASE("pure cos a |HH> + sin a |VV> becomes maximally entangled") {
    for (double deg : {5.0, 20.0, 40.0}) {
      const double a = deg * std::numbers::pi / 180;
      Vector4c v = Vector4c::Zero();
      v[0] = std::cos(a);
      v[3] = std::sin(a);
      const auto r = filter_normal_form(pure_state(v));
      const Matrix2c half = 0.5 * Matrix2c::Identity();
      CHECK(max_abs_diff(r.state_out.reduced_signal(), half) < 1e-8);
      CHECK(max_abs_diff(r.state_out.reduced_meter(), half) < 1e-8);
      CHECK(std::abs(r.b_max_out - 2 * std::numbers::sqrt2) < 1e-6);
      CHECK(r.b_max_out >= r.b_max_in);
      // Procrustean success probability 2 sin^2 a.
      CHECK(std::abs(r.success_probability - 2 * std::pow(std::sin(a), 2)) < 1e-6);
      // The returned filters reproduce the output state.
      const Matrix4c k = kron(r.F_S, r.F_M);
      const Matrix4c out = k * pure_state(v).matrix() * k.adjoint() / r.success_probability;
      CHECK(max_abs_diff(out, r.state_out.matrix()) < 1e-8);
    }
  }
  SUBCASE("pure product state has singular reductions") {
    Vector4c hh = Vector4c::Zero();
    hh[0] = 1.0;
    try {
      filter_normal_form(pure_state(hh));
      FAIL("expected SingularReduction");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::SingularReduction);
    }
  }
  SUBCASE("iteration budget") {
    CounterRng rng(43, 0);
    const auto st = random_state(rng, 4);
    try {
      filter_normal_form(st, 1e-14, 1);
      FAIL("expected NoConvergence");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::NoConvergence);
    }
  }
  SUBCASE("random full-rank states") {
    CounterRng rng(44, 0);
    for (int i = 0; i < 50; ++i) {
      const auto st = random_state(rng, 4);
      const auto r = filter_normal_form(st);
      const Matrix2c half = 0.5 * Matrix2c::Identity();
      CHECK(max_abs_diff(r.state_out.reduced_signal(), half) < 1e-8);
      CHECK(max_abs_diff(r.state_out.reduced_meter(), half) < 1e-8);
      const Matrix3 t = decompose(r.state_out).T;
      CHECK(max_abs_diff(t, Matrix3(t.diagonal().asDiagonal())) < 1e-8);
      CHECK(r.success_probability > 0.0);
      CHECK(r.success_probability <= 1.0 + 1e-12);
      CHECK(r.F_S.jacobiSvd().singularValues()[0] == doctest::Approx(1.0));
      CHECK(r.F_M.jacobiSvd().singularValues()[0] == doctest::Approx(1.0));
      const Matrix4c k = kron(r.F_S, r.F_M);
      CHECK(max_abs_diff(Matrix4c(k * st.matrix() * k.adjoint() / r.success_probability),
                         r.state_out.matrix()) < 1e-9);
      CHECK(r.deviation_history.back() <= kDefaultFilterTol);
    }
  }
}

TEST_CASE("filtering does not lower the Bell factor of CHSH-violating states") {
  // Nearly pure random states with a little white noise: full rank, and most
  // of them violate CHSH.
  CounterRng rng(46, 0);
  int violating = 0;
  while (violating < 50) {
    const Matrix4c rho =
        0.9 * random_state(rng, 1).matrix() + 0.1 * maximally_mixed().matrix();
    const auto st = validate_state(rho);
    if (bell_max(st) <= 2.0) continue;
    ++violating;
    const auto r = filter_normal_form(st);
    CHECK(r.b_max_out >= r.b_max_in - 1e-9);
  }
}

TEST_CASE("saturate_after_filter") {
  SUBCASE("werner 0.82") {
    const auto [fr, check] = saturate_after_filter(werner(0.82));
    CHECK(max_abs_diff(fr.state_out.matrix(), werner(0.82).matrix()) < 1e-12);
    CHECK(std::abs(check.sum_of_squares - 1.3448) < 1e-12);
    CHECK(std::abs(check.slack) < 1e-12);
  }
  SUBCASE("maximally mixed") {
    const auto [fr, check] = saturate_after_filter(maximally_mixed());
    CHECK(max_abs_diff(fr.state_out.matrix(), maximally_mixed().matrix()) < 1e-15);
    CHECK(check.sum_of_squares < 1e-15);
    CHECK(check.bound < 1e-15);
  }
  SUBCASE("random full-rank states saturate") {
    CounterRng rng(45, 0);
    for (int i = 0; i < 30; ++i) {
      const auto [fr, check] = saturate_after_filter(random_state(rng, 4));
      CHECK(std::abs(check.slack) < 1e-6);
    }
  }
}
