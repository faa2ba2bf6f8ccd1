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
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "kex/io.hpp"

namespace fs = std::filesystem;
using kex::Json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = kex::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string &name)
      : dir(fs::temp_directory_path() / ("kex_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string &name, const std::string &contents = "") const {
    const auto p = (dir / name).string();
    if (!contents.empty()) kex::write_file(p, contents);
    return p;
  }
};

std::vector<std::vector<double>> csv_rows(const std::string &csv, std::string *header) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, *header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("analyze") {
  Scratch s("analyze");
  const auto w = s.file("w.json", R"({"factory": "werner", "p": 0.82})");
  const auto r = run({"analyze", w});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(std::abs(j["b_max"].get<double>() - 2.319) < 1e-3);
  const double sum = j["canonical_pair"]["sum"].get<double>();
  CHECK(std::abs(sum - j["canonical_pair"]["bound"].get<double>()) < 1e-12);

  const auto mm = s.file("mm.json", R"({"factory": "werner", "p": 0})");
  const Json z = Json::parse(run({"analyze", mm}).out);
  CHECK(z["b_max"].get<double>() == 0.0);
  for (const auto &x : z["bloch"]["n"]) CHECK(x.get<double>() == 0.0);
  for (const auto &row : z["bloch"]["T"])
    for (const auto &x : row) CHECK(x.get<double>() == 0.0);

  const auto bad = s.file("bad.json", "{\"factory\": ");
  const auto e = run({"analyze", bad});
  CHECK(e.code == 1);
  CHECK(e.err.find("Parse") != std::string::npos);

  CHECK(run({"analyze", s.file("missing.json")}).code == 1);
}

TEST_CASE("argument errors and help") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"sweep", "--p", "abc"}).code == 1);
  CHECK(run({"sweep", "--p", "1.5"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("sweep") {
  Scratch s("sweep");
  const auto r = run({"sweep", "--p", "0.82", "--from", "0", "--to", "90", "--step", "5"});
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header == "theta_deg,K_hat,P_hat,dK_hat,dK_theory");
  CHECK(rows.size() == 19);
  for (const auto &row : rows) {
    const double expected = std::pow(0.82 * std::cos(2 * row[0] * M_PI / 180), 2);
    CHECK(std::abs(row[3] * row[3] - expected) < 1e-12);
  }

  const auto zero = run({"sweep", "--p", "0"});
  for (const auto &row : csv_rows(zero.out, &header)) {
    CHECK(row[3] == 0.0);
    CHECK(row[4] == 0.0);
  }

  SUBCASE("noisy output is bit-identical across runs and thread counts") {
    const auto a = s.file("a.csv");
    const auto b = s.file("b.csv");
    REQUIRE(run({"sweep", "--noise", "--seed", "7", "--out", a}).code == 0);
    REQUIRE(run({"sweep", "--noise", "--seed", "7", "--threads", "3", "--out", b}).code == 0);
    CHECK(kex::read_file(a) == kex::read_file(b));
    const auto c = run({"sweep", "--noise", "--seed", "8"});
    CHECK(c.out != kex::read_file(a));

    const Json manifest = Json::parse(kex::read_file(a + ".manifest.json"));
    CHECK(manifest["command"] == "sweep");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["version"] == kex::cli::kVersion);
    CHECK(manifest.contains("parameters"));
    CHECK(manifest.contains("wall_clock_seconds"));
  }

  SUBCASE("config file") {
    const auto cfg = s.file("run.ini", "[sweep]\np=0.5\nstep=45\n");
    const auto c = run({"--config", cfg, "sweep"});
    REQUIRE(c.code == 0);
    const auto rows2 = csv_rows(c.out, &header);
    CHECK(rows2.size() == 3);
    CHECK(rows2[0][1] == doctest::Approx(0.5));
  }
}

TEST_CASE("surface") {
  const auto r = run({"surface", "--p", "0.82", "--step", "1", "--prime-step", "1"});
  REQUIRE(r.code == 0);
  std::string header;
  const auto rows = csv_rows(r.out, &header);
  CHECK(header == "theta_deg,theta_prime_deg,dK2,dKp2,sum,bound");
  CHECK(rows.size() == 91 * 91);
  const std::vector<double> *best = &rows.front();
  for (const auto &row : rows) {
    if (row[4] > (*best)[4]) best = &row;
    CHECK(std::abs(row[5] - 1.3448) < 1e-12);
  }
  CHECK(std::abs((*best)[4] - 1.3448) < 1e-10);
  CHECK((*best)[0] == 0.0);
  CHECK((*best)[1] == 45.0);

  const auto low = csv_rows(run({"surface", "--p", "0.45"}).out, &header);
  CHECK(std::abs(low[0][5] - 2 * 0.45 * 0.45) < 1e-12);
  CHECK(std::abs(low[0][5] - 0.4051) < 1.5e-4);
}

TEST_CASE("simulate") {
  const auto r = run({"simulate", "--p", "0.82", "--step", "45"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  const Json &bell = j["bell"];
  const double b = bell["b_max_hat"].get<double>();
  const double se = bell["standard_error"].get<double>();
  CHECK(std::abs(b - 2.319) < 3 * se);
  CHECK(bell["reference_measurement"]["b_max"].get<double>() == 2.36);
  CHECK(j["points"].size() == 6);

  const Json low = Json::parse(run({"simulate", "--p", "0.45", "--step", "45"}).out);
  CHECK(low["bell"]["reference_measurement"]["b_max"].get<double>() == 1.32);

  const auto empty = run({"simulate", "--duration", "0"});
  CHECK(empty.code == 1);
  CHECK(empty.err.find("EmptyRecord") != std::string::npos);
}

TEST_CASE("filter") {
  Scratch s("filter");
  const auto bd = s.file("bd.json", R"({"factory": "bell_diagonal", "lambdas": [0.1, 0.2, 0.3, 0.4]})");
  const auto r = run({"filter", bd});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["iterations"] == 0);
  CHECK(j["F_S"][0][0]["re"].get<double>() == 1.0);
  CHECK(j["F_S"][0][1]["re"].get<double>() == 0.0);
  CHECK(std::abs(j["post_filter_check"]["slack"].get<double>()) < 1e-9);

  const auto prod = s.file("p.json", R"({"matrix": [[{"re": 1}, {"re": 0}, {"re": 0}, {"re": 0}],
      [{"re": 0}, {"re": 0}, {"re": 0}, {"re": 0}], [{"re": 0}, {"re": 0}, {"re": 0}, {"re": 0}],
      [{"re": 0}, {"re": 0}, {"re": 0}, {"re": 0}]]})");
  const auto e = run({"filter", prod});
  CHECK(e.code == 1);
  CHECK(e.err.find("SingularReduction") != std::string::npos);
}

TEST_CASE("verify") {
  Scratch s("verify");
  SUBCASE("random trials pass") {
    const auto r = run({"verify", "--trials", "2000", "--seed", "1"});
    CHECK(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["passed"] == true);
    CHECK(j["min_slack"].get<double>() >= -1e-9);
  }
  SUBCASE("forced maximally mixed instance has zero slack") {
    const auto mm = s.file("mm.json", R"({"factory": "werner", "p": 0})");
    const auto r = run({"verify", "--trials", "1", "--state", mm});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out)["min_slack"].get<double>() == 0.0);
  }
  SUBCASE("failing margin exits 2 and dumps a replayable instance") {
    const auto mm = s.file("mm.json", R"({"factory": "werner", "p": 0})");
    const auto replay = s.file("replay.json");
    const auto r = run({"verify", "--trials", "3", "--state", mm, "--margin", "1e-3",
                        "--replay-out", replay});
    CHECK(r.code == 2);
    CHECK(r.err.find("violated") != std::string::npos);
    const auto again = run({"verify", "--replay", replay, "--margin", "1e-3"});
    CHECK(again.code == 2);
    CHECK(run({"verify", "--replay", replay}).code == 0);
  }
  SUBCASE("replay reproduces the recorded slack bit for bit") {
    const auto replay = s.file("ok.json");
    REQUIRE(run({"verify", "--trials", "50", "--seed", "3", "--replay-out", replay}).code == 0);
    const Json dumped = Json::parse(kex::read_file(replay));
    const Json re = Json::parse(run({"verify", "--replay", replay}).out);
    CHECK(re["check"]["slack"] == dumped["check"]["slack"]);
    CHECK(re["same_meter_check"]["sum"] == dumped["same_meter_check"]["sum"]);
  }
}
