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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "kex/canonical.hpp"
#include "kex/expsim.hpp"
#include "kex/io.hpp"
#include "kex/knowledge.hpp"
#include "kex/parallel.hpp"
#include "kex/states.hpp"

namespace kex::cli {

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
};

struct Grid {
  double from = 0.0;
  double to = 90.0;
  double step = 5.0;

  std::vector<double> values() const {
    if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from)
      throw Error(ErrorKind::OutOfRange, "angle grid needs from <= to and step > 0");
    std::vector<double> v;
    for (std::size_t i = 0;; ++i) {
      const double x = from + static_cast<double>(i) * step;
      if (x > to + 1e-9) break;
      v.push_back(x);
    }
    return v;
  }

  Json to_json() const { return Json{{"from", from}, {"to", to}, {"step", step}}; }
};

Json config_to_json(const ExperimentConfig &c) {
  return Json{{"pair_rate", c.pair_rate},
              {"duration", c.duration},
              {"dark_coincidence_rate", c.dark_coincidence_rate},
              {"seed", c.seed}};
}

/// Writes data to --out (plus a run manifest next to it) or to stdout.
class Emitter {
 public:
  Emitter(std::string command, const Common &common, std::vector<std::string> argv,
          std::ostream &out)
      : command_(std::move(command)),
        common_(common),
        argv_(std::move(argv)),
        out_(out),
        start_(std::chrono::steady_clock::now()) {}

  void emit(const std::string &data) {
    if (common_.out.empty()) {
      out_ << data;
      return;
    }
    write_file(common_.out, data);
    outputs_.push_back(common_.out);
  }

  void add_output(const std::string &path) { outputs_.push_back(path); }

  void finish(const Json &params) {
    if (common_.out.empty()) return;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json manifest{{"command", command_},
                  {"parameters", params},
                  {"seed", common_.seed},
                  {"threads", common_.threads},
                  {"version", kVersion},
                  {"argv", argv_},
                  {"outputs", outputs_},
                  {"wall_clock_seconds", elapsed}};
    write_file(common_.out + ".manifest.json", dump_json(manifest) + "\n");
  }

 private:
  std::string command_;
  Common common_;
  std::vector<std::string> argv_;
  std::ostream &out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

// --- analyze ---------------------------------------------------------------

Json analyze(const TwoQubitState &state) {
  const BlochForm form = decompose(state);
  const CanonicalForm cf = canonical_form(state);
  const double b = bell_max(state);

  Json o_s = Json::array(), o_m = Json::array();
  for (int k = 0; k < 3; ++k) {
    o_s.push_back(vector_to_json(cf.O_S.row(k).transpose()));
    o_m.push_back(vector_to_json(cf.O_M.row(k).transpose()));
  }

  const auto s = QubitMeasurement::from_axis(cf.O_S.col(0));
  const auto sp = QubitMeasurement::from_axis(cf.O_S.col(1));
  const double dd = distinguishability_excess(state, s);
  const double ddp = distinguishability_excess(state, sp);

  return Json{{"bloch", to_json(form)},
              {"canonical", {{"diag", vector_to_json(cf.diag)}, {"O_S", o_s}, {"O_M", o_m}}},
              {"b_max", b},
              {"canonical_pair",
               {{"signal", vector_to_json(s.axis())},
                {"signal_prime", vector_to_json(sp.axis())},
                {"deltaD", dd},
                {"deltaD_prime", ddp},
                {"sum", dd * dd + ddp * ddp},
                {"bound", 0.25 * b * b}}}};
}

// --- verify ----------------------------------------------------------------

struct Instance {
  std::uint64_t trial = 0;
  std::optional<TwoQubitState> state;
  Vector3 signal, signal_prime, meter, meter_prime;
  BoundCheck check;
  BoundCheck same_meter;
};

Instance evaluate(std::uint64_t trial, TwoQubitState state, const Vector3 &s,
                  const Vector3 &sp, const Vector3 &m, const Vector3 &mp) {
  const auto ms = QubitMeasurement::from_axis(s);
  const auto msp = QubitMeasurement::from_axis(sp);
  const auto mm = QubitMeasurement::from_axis(m);
  const auto mmp = QubitMeasurement::from_axis(mp);
  Instance inst;
  inst.trial = trial;
  inst.signal = ms.axis();
  inst.signal_prime = msp.axis();
  inst.meter = mm.axis();
  inst.meter_prime = mmp.axis();
  inst.check = check_bound(state, ms, msp, mm, mmp);
  inst.same_meter = check_same_meter_bound(state, ms, msp, mm);
  inst.state = std::move(state);
  return inst;
}

Instance random_instance(std::uint64_t seed, std::uint64_t trial,
                         const std::optional<TwoQubitState> &forced) {
  CounterRng rng(seed, trial);
  const int ancilla = 1 + static_cast<int>(rng() % 4);
  TwoQubitState state = forced ? *forced : random_state(rng, ancilla);
  const Vector3 s = random_axis(rng);
  Vector3 sp = random_axis(rng);
  sp = (sp - sp.dot(s) * s).normalized();
  const Vector3 m = random_axis(rng);
  const Vector3 mp = random_axis(rng);
  return evaluate(trial, std::move(state), s, sp, m, mp);
}

Json instance_to_json(const Instance &inst, std::uint64_t seed) {
  return Json{{"trial", inst.trial},
              {"seed", seed},
              {"state", to_json(*inst.state)},
              {"signal", vector_to_json(inst.signal)},
              {"signal_prime", vector_to_json(inst.signal_prime)},
              {"meter", vector_to_json(inst.meter)},
              {"meter_prime", vector_to_json(inst.meter_prime)},
              {"check", to_json(inst.check)},
              {"same_meter_check", to_json(inst.same_meter)}};
}

Instance instance_from_json(const Json &j) {
  try {
    return evaluate(j.at("trial").get<std::uint64_t>(), state_from_json(j.at("state")),
                    vector_from_json(j.at("signal")), vector_from_json(j.at("signal_prime")),
                    vector_from_json(j.at("meter")), vector_from_json(j.at("meter_prime")));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::Parse, std::string("replay file: ") + e.what());
  }
}

std::optional<std::pair<double, double>> reference_measurement(double p) {
  // Measured B_max (value, statistical error) for the two prepared states.
  static const std::map<double, std::pair<double, double>> table{{0.45, {1.32, 0.02}},
                                                                 {0.82, {2.36, 0.02}}};
  for (const auto &[key, value] : table)
    if (std::abs(key - p) < 1e-9) return value;
  return std::nullopt;
}

ExperimentConfig make_config(double pair_rate, double duration, double dark,
                             std::uint64_t seed) {
  ExperimentConfig c;
  c.pair_rate = pair_rate;
  c.duration = duration;
  c.dark_coincidence_rate = dark;
  c.seed = seed;
  require_valid(c);
  return c;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"kexcess: knowledge excesses, Bell-factor bound and coincidence simulation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value config file (CLI flags take precedence)");

  Common common;
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", common.out, "output file (default: stdout)");
  app.add_option("--threads", common.threads, "worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // analyze / filter
  std::string state_file;
  auto *analyze_cmd = app.add_subcommand("analyze", "Bloch form, canonical form, B_max");
  analyze_cmd->add_option("state_file", state_file, "state JSON file")->required();

  auto *filter_cmd = app.add_subcommand("filter", "local-filtering normal form and saturation");
  filter_cmd->add_option("state_file", state_file, "state JSON file")->required();
  double filter_tol = kDefaultFilterTol;
  int filter_max_iter = kDefaultFilterMaxIter;
  filter_cmd->add_option("--tol", filter_tol)->capture_default_str();
  filter_cmd->add_option("--max-iter", filter_max_iter)->capture_default_str();

  // sweep / surface / simulate share the Werner parameter and noise config
  double p = 0.82;
  double pair_rate = ExperimentConfig{}.pair_rate;
  double duration = ExperimentConfig{}.duration;
  double dark_rate = 0.0;
  bool noise = false;
  Grid grid;
  Grid grid_prime{0.0, 90.0, 5.0};
  std::string basis = "hv";
  auto add_experiment_opts = [&](CLI::App *cmd, bool with_noise_flag) {
    cmd->add_option("--p", p, "Werner parameter")->capture_default_str();
    cmd->add_option("--pair-rate", pair_rate, "detected pairs per second")->capture_default_str();
    cmd->add_option("--duration", duration, "seconds per point")->capture_default_str();
    cmd->add_option("--dark-rate", dark_rate, "accidental coincidences per second per channel")
        ->capture_default_str();
    if (with_noise_flag) cmd->add_flag("--noise", noise, "simulate shot noise");
    cmd->add_option("--from", grid.from, "first meter angle (deg)")->capture_default_str();
    cmd->add_option("--to", grid.to, "last meter angle (deg)")->capture_default_str();
    cmd->add_option("--step", grid.step, "angle step (deg)")->capture_default_str();
  };

  auto *sweep_cmd = app.add_subcommand("sweep", "1-D knowledge-excess sweep (CSV)");
  add_experiment_opts(sweep_cmd, true);
  sweep_cmd->add_option("--basis", basis, "signal basis: hv or xy")
      ->check(CLI::IsMember({"hv", "xy"}))
      ->capture_default_str();

  auto *surface_cmd = app.add_subcommand("surface", "two-angle excess-sum surface (CSV)");
  add_experiment_opts(surface_cmd, true);
  surface_cmd->add_option("--prime-from", grid_prime.from)->capture_default_str();
  surface_cmd->add_option("--prime-to", grid_prime.to)->capture_default_str();
  surface_cmd->add_option("--prime-step", grid_prime.step)->capture_default_str();

  auto *simulate_cmd = app.add_subcommand("simulate", "simulated counts, estimates and B_max (JSON)");
  add_experiment_opts(simulate_cmd, false);

  auto *verify_cmd = app.add_subcommand("verify", "fuzz the excess-sum inequalities");
  std::uint64_t trials = 10000;
  std::string forced_state_file, replay_file, replay_out;
  double margin = -1e-9;
  verify_cmd->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--state", forced_state_file, "use this state for every trial");
  verify_cmd->add_option("--replay", replay_file, "re-evaluate a dumped instance");
  verify_cmd->add_option("--replay-out", replay_out,
                         "where to dump the worst instance (always written on violation)");
  verify_cmd->add_option("--margin", margin, "pass iff every slack >= margin")
      ->capture_default_str();

  std::vector<std::string> argv_copy = args;
  std::vector<const char *> argv;
  argv.push_back("kexcess");
  for (const auto &a : argv_copy) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (analyze_cmd->parsed()) {
      Emitter em("analyze", common, args, out);
      const auto state = load_state_file(state_file);
      em.emit(dump_json(analyze(state)) + "\n");
      em.finish(Json{{"state_file", state_file}});
      return kSuccess;
    }

    if (filter_cmd->parsed()) {
      Emitter em("filter", common, args, out);
      const auto state = load_state_file(state_file);
      const FilterResult fr = filter_normal_form(state, filter_tol, filter_max_iter);
      const ExcessOptimum opt = optimize_excess_sum(fr.state_out);
      Json report = to_json(fr);
      report["post_filter_check"] = to_json(opt.check);
      em.emit(dump_json(report) + "\n");
      em.finish(Json{{"state_file", state_file},
                     {"tol", filter_tol},
                     {"max_iter", filter_max_iter}});
      return kSuccess;
    }

    if (sweep_cmd->parsed()) {
      Emitter em("sweep", common, args, out);
      const SignalBasis b = basis == "hv" ? SignalBasis::HV : SignalBasis::XY;
      std::vector<SweepPoint> points;
      for (double t : grid.values()) points.push_back({t, b});
      const auto config = make_config(pair_rate, duration, dark_rate, common.seed);
      const auto rows = noise ? run_sweep_experiment(p, points, config, common.threads)
                              : noiseless_sweep(p, points);
      em.emit(sweep_csv(rows));
      em.finish(Json{{"p", p},
                     {"basis", basis},
                     {"grid", grid.to_json()},
                     {"noise", noise},
                     {"config", config_to_json(config)}});
      return kSuccess;
    }

    if (surface_cmd->parsed()) {
      Emitter em("surface", common, args, out);
      const auto config = make_config(pair_rate, duration, dark_rate, common.seed);
      const auto thetas = grid.values();
      const auto primes = grid_prime.values();
      const auto rows =
          noise ? simulated_excess_surface(p, thetas, primes, config, common.threads)
                : excess_surface(werner(p), thetas, primes);
      em.emit(surface_csv(rows));
      em.finish(Json{{"p", p},
                     {"grid", grid.to_json()},
                     {"grid_prime", grid_prime.to_json()},
                     {"noise", noise},
                     {"config", config_to_json(config)}});
      return kSuccess;
    }

    if (simulate_cmd->parsed()) {
      Emitter em("simulate", common, args, out);
      const auto config = make_config(pair_rate, duration, dark_rate, common.seed);
      std::vector<SweepPoint> points;
      for (SignalBasis b : {SignalBasis::HV, SignalBasis::XY})
        for (double t : grid.values()) points.push_back({t, b});
      const auto rows = run_sweep_experiment(p, points, config, common.threads);
      const auto records = simulate_bell_records(werner(p), config, points.size());
      const double b_hat = estimate_bell_max(records);
      const double se = bell_max_standard_error(records);
      const double b_theory = bell_max(werner(p));

      Json pts = Json::array();
      for (const SweepRow &r : rows)
        pts.push_back(Json{{"theta_deg", r.point.theta_meter},
                           {"basis", to_string(r.point.basis)},
                           {"counts", to_json(r.counts)},
                           {"K_hat", r.K_hat},
                           {"P_hat", r.P_hat},
                           {"dK_hat", r.dK_hat},
                           {"dK_theory", r.dK_theory}});
      Json recs = Json::array();
      const auto settings = bell_angle_settings();
      for (std::size_t i = 0; i < 4; ++i)
        recs.push_back(Json{{"meter_deg", settings[i].first},
                            {"signal_deg", settings[i].second},
                            {"counts", to_json(records[i])},
                            {"correlation", estimate_correlation(records[i])}});
      Json bell{{"records", recs},
                {"b_max_hat", b_hat},
                {"standard_error", se},
                {"b_max_theory", b_theory},
                {"z_theory", (b_hat - b_theory) / se}};
      if (const auto ref = reference_measurement(p)) {
        const double z = (ref->first - b_theory) / se;
        bell["reference_measurement"] = Json{{"b_max", ref->first},
                                             {"error", ref->second},
                                             {"z_vs_theory", z},
                                             {"within_3_se", std::abs(z) <= 3.0}};
      }
      em.emit(dump_json(Json{{"p", p},
                             {"config", config_to_json(config)},
                             {"points", pts},
                             {"bell", bell}}) +
              "\n");
      em.finish(Json{{"p", p}, {"grid", grid.to_json()}, {"config", config_to_json(config)}});
      return kSuccess;
    }

    if (verify_cmd->parsed()) {
      Emitter em("verify", common, args, out);
      if (!replay_file.empty()) {
        Json j;
        try {
          j = Json::parse(read_file(replay_file));
        } catch (const nlohmann::json::parse_error &e) {
          throw Error(ErrorKind::Parse, e.what());
        }
        const Instance inst = instance_from_json(j);
        const bool ok = inst.check.slack >= margin && inst.same_meter.slack >= margin;
        Json report = instance_to_json(inst, j.value("seed", std::uint64_t{0}));
        report["passed"] = ok;
        em.emit(dump_json(report) + "\n");
        em.finish(Json{{"replay", replay_file}, {"margin", margin}});
        return ok ? kSuccess : kPropertyViolation;
      }

      std::optional<TwoQubitState> forced;
      if (!forced_state_file.empty()) forced = load_state_file(forced_state_file);

      std::vector<double> slack(trials), same(trials);
      parallel_for(trials, common.threads, [&](std::size_t i) {
        const Instance inst = random_instance(common.seed, i, forced);
        slack[i] = inst.check.slack;
        same[i] = inst.same_meter.slack;
      });
      std::size_t worst = 0, worst_same = 0;
      for (std::size_t i = 1; i < trials; ++i) {
        if (slack[i] < slack[worst]) worst = i;
        if (same[i] < same[worst_same]) worst_same = i;
      }
      const bool ok = slack[worst] >= margin && same[worst_same] >= margin;
      const std::size_t dump_index =
          (same[worst_same] < margin && slack[worst] >= margin) ? worst_same : worst;

      std::string replay_path = replay_out;
      if (!ok && replay_path.empty()) replay_path = "kexcess_verify_replay.json";
      if (!replay_path.empty()) {
        const Instance inst = random_instance(common.seed, dump_index, forced);
        write_file(replay_path, dump_json(instance_to_json(inst, common.seed)) + "\n");
        em.add_output(replay_path);
      }

      Json report{{"trials", trials},
                  {"seed", common.seed},
                  {"min_slack", slack[worst]},
                  {"min_slack_trial", worst},
                  {"min_same_meter_slack", same[worst_same]},
                  {"min_same_meter_slack_trial", worst_same},
                  {"margin", margin},
                  {"passed", ok}};
      if (!replay_path.empty()) report["replay_file"] = replay_path;
      em.emit(dump_json(report) + "\n");
      em.finish(Json{{"trials", trials},
                     {"margin", margin},
                     {"state", forced_state_file.empty() ? Json("random") : Json(forced_state_file)}});
      if (!ok)
        err << "inequality violated: min slack " << format_double(slack[worst])
            << ", min same-meter slack " << format_double(same[worst_same])
            << "; instance written to " << replay_path << "\n";
      return ok ? kSuccess : kPropertyViolation;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace kex::cli
