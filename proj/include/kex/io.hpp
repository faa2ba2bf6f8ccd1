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
 * @file io.hpp
 * State files, JSON exports and CSV tables.
 *
 * State files are JSON, either an explicit matrix
 *   {"matrix": [[{"re": .., "im": ..} x4] x4]}
 * or a factory
 *   {"factory": "werner", "p": 0.82}
 *   {"factory": "bell_diagonal", "lambdas": [l0, l1, l2, l3]}
 *   {"factory": "random", "seed": 7, "ancilla_dim": 4}
 *
 * All floating point output uses 17 significant digits; CSV uses LF endings.
 */

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kex/canonical.hpp"
#include "kex/expsim.hpp"
#include "kex/knowledge.hpp"
#include "kex/state.hpp"

namespace kex {

using Json = nlohmann::ordered_json;

/// printf("%.17g")
std::string format_double(double v);

/// Serializes like Json::dump but prints every float with 17 significant
/// digits.
std::string dump_json(const Json &j, int indent = 2);

Json matrix_to_json(const Matrix4c &m);
Json matrix_to_json(const Matrix2c &m);
Json vector_to_json(const Vector3 &v);
Vector3 vector_from_json(const Json &j);

Json to_json(const TwoQubitState &state);  // {"matrix": ...}
Json to_json(const BlochForm &form);
Json to_json(const BoundCheck &check);
Json to_json(const FilterResult &result);
Json to_json(const CountRecord &counts);

/// Throws Error(Parse) on malformed JSON or schema violations, and the usual
/// validation errors for unphysical matrices.
TwoQubitState state_from_json(const Json &j);
TwoQubitState parse_state(const std::string &text);
TwoQubitState load_state_file(const std::string &path);

inline constexpr const char *kSweepCsvHeader =
    "theta_deg,K_hat,P_hat,dK_hat,dK_theory";
inline constexpr const char *kSurfaceCsvHeader =
    "theta_deg,theta_prime_deg,dK2,dKp2,sum,bound";

std::string sweep_csv(const std::vector<SweepRow> &rows);
std::string surface_csv(const std::vector<SurfaceRow> &rows);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &contents);

}  // namespace kex
