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

#include <algorithm>
#include <filesystem>

#include "kex/io.hpp"
#include "kex/states.hpp"
#include "test_util.hpp"

using namespace kex;
using kex::test::max_abs_diff;

namespace {

ErrorKind parse_kind(const std::string &text) {
  try {
    parse_state(text);
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(2.3193102422918757)) == 2.3193102422918757);
}

TEST_CASE("dump_json") {
  Json j{{"a", 1}, {"b", Json::array({0.5, -0.0})}, {"c", Json{{"d", "x"}}}};
  CHECK(dump_json(j) == "{\n  \"a\": 1,\n  \"b\": [0.5, 0],\n  \"c\": {\n    \"d\": \"x\"\n  }\n}");
  CHECK(dump_json(j, 0) == "{\"a\":1,\"b\":[0.5, 0],\"c\":{\"d\":\"x\"}}");
  CHECK(dump_json(Json::array()) == "[]");
  CHECK(dump_json(Json::object()) == "{}");
}

TEST_CASE("state JSON round trip is bit-exact") {
  CounterRng rng(61, 0);
  for (int i = 0; i < 50; ++i) {
    const auto st = test::any_random_state(rng);
    const auto back = parse_state(dump_json(to_json(st)));
    CHECK(back.matrix() == st.matrix());
  }
  const Vector3 v(0.1, -1.0 / 3, 2e-17);
  CHECK(vector_from_json(Json::parse(dump_json(vector_to_json(v)))) == v);
}

TEST_CASE("state factories") {
  CHECK(max_abs_diff(parse_state(R"({"factory": "werner", "p": 0.82})").matrix(),
                     werner(0.82).matrix()) == 0.0);
  CHECK(max_abs_diff(
            parse_state(R"({"factory": "bell_diagonal", "lambdas": [0, 0, 0, 1]})").matrix(),
            singlet().matrix()) < 1e-15);
  CHECK(parse_state(R"({"factory": "random", "seed": 9, "ancilla_dim": 2})").matrix() ==
        random_state(9, 2).matrix());
  SUBCASE("real-only entries") {
    const auto st = parse_state(R"({"matrix": [[{"re": 0.25}, {"re": 0}, {"re": 0}, {"re": 0}],
                                              [{"re": 0}, {"re": 0.25}, {"re": 0}, {"re": 0}],
                                              [{"re": 0}, {"re": 0}, {"re": 0.25}, {"re": 0}],
                                              [{"re": 0}, {"re": 0}, {"re": 0}, {"re": 0.25}]]})");
    CHECK(st.matrix() == maximally_mixed().matrix());
  }
}

TEST_CASE("state parse errors") {
  CHECK(parse_kind("{not json") == ErrorKind::Parse);
  CHECK(parse_kind("[]") == ErrorKind::Parse);
  CHECK(parse_kind(R"({"factory": "nope"})") == ErrorKind::Parse);
  CHECK(parse_kind(R"({"factory": "werner"})") == ErrorKind::Parse);
  CHECK(parse_kind(R"({"factory": "werner", "p": 2})") == ErrorKind::OutOfRange);
  CHECK(parse_kind(R"({"matrix": [[1, 2]]})") == ErrorKind::Parse);
  CHECK(parse_kind(R"({"factory": "bell_diagonal", "lambdas": [1, 1, 0, 0]})") ==
        ErrorKind::NotAProbabilityVector);
  try {
    load_state_file("/nonexistent/dir/state.json");
    FAIL("expected Io");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("CSV writers") {
  const auto rows = noiseless_sweep(0.5, {{0, SignalBasis::HV}, {45, SignalBasis::HV}});
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("theta_deg,K_hat,P_hat,dK_hat,dK_theory\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\n0,0.49999999999999989,0,0.49999999999999989,0.5\n") != std::string::npos);

  const auto surf = surface_csv(excess_surface(werner(0.5), {0}, {45}));
  CHECK(surf.rfind("theta_deg,theta_prime_deg,dK2,dKp2,sum,bound\n0,45,", 0) == 0);
  CHECK(std::count(surf.begin(), surf.end(), ',') == 10);
}

TEST_CASE("file helpers") {
  const auto path = std::filesystem::temp_directory_path() / "kex_test_io_roundtrip.txt";
  write_file(path.string(), "abc\n");
  CHECK(read_file(path.string()) == "abc\n");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_file("/nonexistent/dir/x", "y"), Error);
}
