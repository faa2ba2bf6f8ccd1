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

#include "kex/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kex/states.hpp"

namespace kex {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_rec(const Json &j, int indent, int depth, std::string &out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char *nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto &e : j) scalars = scalars && !e.is_structured();
      out += "[";
      if (!scalars) out += nl;
      bool first = true;
      for (const auto &e : j) {
        if (!first) {
          out += scalars ? ", " : ",";
          if (!scalars) out += nl;
        }
        first = false;
        if (!scalars) out += pad;
        dump_rec(e, indent, depth + 1, out);
      }
      if (!scalars) out += nl + close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Error parse_error(const std::string &what) { return Error(ErrorKind::Parse, what); }

template <typename Matrix>
Json complex_matrix_to_json(const Matrix &m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k)
      row.push_back(Json{{"re", m(i, k).real()}, {"im", m(i, k).imag()}});
    rows.push_back(std::move(row));
  }
  return rows;
}

double number_field(const Json &j, const char *key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw parse_error(std::string("expected numeric field \"") + key + "\"");
  return j.at(key).get<double>();
}

}  // namespace

std::string dump_json(const Json &j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

Json matrix_to_json(const Matrix4c &m) { return complex_matrix_to_json(m); }
Json matrix_to_json(const Matrix2c &m) { return complex_matrix_to_json(m); }

Json vector_to_json(const Vector3 &v) { return Json::array({v[0], v[1], v[2]}); }

Vector3 vector_from_json(const Json &j) {
  if (!j.is_array() || j.size() != 3)
    throw parse_error("expected an array of 3 numbers");
  Vector3 v;
  for (int k = 0; k < 3; ++k) {
    const Json &e = j.at(static_cast<std::size_t>(k));
    if (!e.is_number()) throw parse_error("expected an array of 3 numbers");
    v[k] = e.get<double>();
  }
  return v;
}

Json to_json(const TwoQubitState &state) {
  return Json{{"matrix", matrix_to_json(state.matrix())}};
}

Json to_json(const BlochForm &form) {
  Json t = Json::array();
  for (int k = 0; k < 3; ++k) t.push_back(vector_to_json(form.T.row(k).transpose()));
  return Json{{"n", vector_to_json(form.n)}, {"m", vector_to_json(form.m)}, {"T", t}};
}

Json to_json(const BoundCheck &c) {
  return Json{{"sum", c.sum_of_squares}, {"bound", c.bound}, {"slack", c.slack},
              {"b_max", c.b_max}};
}

Json to_json(const FilterResult &r) {
  return Json{{"F_S", matrix_to_json(r.F_S)},
              {"F_M", matrix_to_json(r.F_M)},
              {"iterations", r.iterations},
              {"success_probability", r.success_probability},
              {"b_max_in", r.b_max_in},
              {"b_max_out", r.b_max_out},
              {"state_out", matrix_to_json(r.state_out.matrix())}};
}

Json to_json(const CountRecord &c) {
  return Json{{"c_pp", c.c_pp}, {"c_pm", c.c_pm}, {"c_mp", c.c_mp}, {"c_mm", c.c_mm}};
}

TwoQubitState state_from_json(const Json &j) {
  if (!j.is_object()) throw parse_error("state must be a JSON object");
  if (j.contains("matrix")) {
    const Json &rows = j.at("matrix");
    if (!rows.is_array() || rows.size() != 4)
      throw parse_error("\"matrix\" must be a 4x4 array");
    Matrix4c m;
    for (std::size_t i = 0; i < 4; ++i) {
      const Json &row = rows.at(i);
      if (!row.is_array() || row.size() != 4)
        throw parse_error("\"matrix\" row " + std::to_string(i) + " must have 4 entries");
      for (std::size_t k = 0; k < 4; ++k) {
        const Json &e = row.at(k);
        if (!e.is_object())
          throw parse_error("matrix entries must be {\"re\": .., \"im\": ..} objects");
        m(static_cast<int>(i), static_cast<int>(k)) =
            Complex(number_field(e, "re"), e.contains("im") ? number_field(e, "im") : 0.0);
      }
    }
    return validate_state(m);
  }
  if (!j.contains("factory") || !j.at("factory").is_string())
    throw parse_error("state needs either \"matrix\" or \"factory\"");
  const std::string factory = j.at("factory").get<std::string>();
  if (factory == "werner") return werner(number_field(j, "p"));
  if (factory == "bell_diagonal") {
    const Json &l = j.contains("lambdas") ? j.at("lambdas") : Json();
    if (!l.is_array() || l.size() != 4)
      throw parse_error("\"lambdas\" must be an array of 4 numbers");
    std::array<double, 4> lambdas{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!l.at(i).is_number()) throw parse_error("\"lambdas\" must be numeric");
      lambdas[i] = l.at(i).get<double>();
    }
    return bell_diagonal(lambdas);
  }
  if (factory == "random") {
    if (!j.contains("seed") || !j.at("seed").is_number_integer())
      throw parse_error("expected integer field \"seed\"");
    if (!j.contains("ancilla_dim") || !j.at("ancilla_dim").is_number_integer())
      throw parse_error("expected integer field \"ancilla_dim\"");
    return random_state(j.at("seed").get<std::uint64_t>(), j.at("ancilla_dim").get<int>());
  }
  throw parse_error("unknown factory \"" + factory + "\"");
}

TwoQubitState parse_state(const std::string &text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw parse_error(e.what());
  }
  return state_from_json(j);
}

TwoQubitState load_state_file(const std::string &path) {
  return parse_state(read_file(path));
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow &r : rows)
    out += format_double(r.point.theta_meter) + "," + format_double(r.K_hat) + "," +
           format_double(r.P_hat) + "," + format_double(r.dK_hat) + "," +
           format_double(r.dK_theory) + "\n";
  return out;
}

std::string surface_csv(const std::vector<SurfaceRow> &rows) {
  std::string out = std::string(kSurfaceCsvHeader) + "\n";
  for (const SurfaceRow &r : rows)
    out += format_double(r.theta) + "," + format_double(r.theta_prime) + "," +
           format_double(r.dK2) + "," + format_double(r.dKp2) + "," +
           format_double(r.sum) + "," + format_double(r.bound) + "\n";
  return out;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace kex
