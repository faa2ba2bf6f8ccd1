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

#include "kex/expsim.hpp"

#include <cmath>
#include <string>

#include <boost/random/poisson_distribution.hpp>

#include "kex/knowledge.hpp"
#include "kex/parallel.hpp"
#include "kex/rng.hpp"
#include "kex/states.hpp"

namespace kex {

void require_valid(const ExperimentConfig &config) {
  if (!(config.pair_rate >= 0.0) || !std::isfinite(config.pair_rate))
    throw Error(ErrorKind::OutOfRange, "pair_rate must be a finite value >= 0");
  if (!(config.duration >= 0.0) || !std::isfinite(config.duration))
    throw Error(ErrorKind::OutOfRange, "duration must be a finite value >= 0");
  if (!(config.dark_coincidence_rate >= 0.0) ||
      !std::isfinite(config.dark_coincidence_rate))
    throw Error(ErrorKind::OutOfRange,
                "dark_coincidence_rate must be a finite value >= 0");
}

std::array<double, 4> coincidence_probs(const TwoQubitState &state,
                                        const QubitMeasurement &meter,
                                        const QubitMeasurement &signal) {
  std::array<double, 4> probs{};
  std::size_t idx = 0;
  for (int a : {+1, -1})    // meter outcome
    for (int b : {+1, -1})  // signal outcome
      probs[idx++] =
          (kron(signal.projector(b), meter.projector(a)) * state.matrix()).trace().real();
  return probs;
}

namespace {

std::uint64_t poisson(CounterRng &rng, double mean) {
  if (!(mean > 0.0)) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

}  // namespace

CountRecord simulate_counts(const TwoQubitState &state, const QubitMeasurement &meter,
                            const QubitMeasurement &signal,
                            const ExperimentConfig &config, std::uint64_t point_index) {
  require_valid(config);
  const auto probs = coincidence_probs(state, meter, signal);
  std::array<std::uint64_t, 4> c{};
  for (std::size_t ch = 0; ch < 4; ++ch) {
    CounterRng rng(config.seed, 4 * point_index + ch);
    const double mean = std::max(0.0, probs[ch]) * config.pair_rate * config.duration +
                        config.dark_coincidence_rate * config.duration;
    c[ch] = poisson(rng, mean);
  }
  return {c[0], c[1], c[2], c[3]};
}

CountRecord exact_counts(const std::array<double, 4> &probs, double total) {
  auto n = [&](double p) {
    return static_cast<std::uint64_t>(std::llround(std::max(0.0, p) * total));
  };
  return {n(probs[0]), n(probs[1]), n(probs[2]), n(probs[3])};
}

namespace {

double require_total(const CountRecord &c) {
  if (c.total() == 0) throw Error(ErrorKind::EmptyRecord, "coincidence record is empty");
  return static_cast<double>(c.total());
}

double d(std::uint64_t v) { return static_cast<double>(v); }

}  // namespace

double estimate_knowledge(const CountRecord &c) {
  const double n = require_total(c);
  return (std::abs(d(c.c_pp) - d(c.c_pm)) + std::abs(d(c.c_mp) - d(c.c_mm))) / n;
}

double estimate_apriori(const CountRecord &c) {
  const double n = require_total(c);
  return std::abs((d(c.c_pp) + d(c.c_mp)) - (d(c.c_pm) + d(c.c_mm))) / n;
}

double estimate_correlation(const CountRecord &c) {
  const double n = require_total(c);
  return (d(c.c_pp) + d(c.c_mm) - d(c.c_pm) - d(c.c_mp)) / n;
}

std::array<std::pair<double, double>, 4> bell_angle_settings() {
  return {{{22.5, 45.0}, {67.5, 45.0}, {22.5, 0.0}, {67.5, 0.0}}};
}

namespace {

std::array<double, 4> checked_correlations(const std::array<CountRecord, 4> &records) {
  const auto settings = bell_angle_settings();
  std::array<double, 4> corr{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (records[i].total() == 0)
      throw Error(ErrorKind::EmptyRecord,
                  "Bell record " + std::to_string(i) + " (meter " +
                      std::to_string(settings[i].first) + " deg, signal " +
                      std::to_string(settings[i].second) + " deg) is empty");
    corr[i] = estimate_correlation(records[i]);
  }
  return corr;
}

}  // namespace

double estimate_bell_max(const std::array<CountRecord, 4> &records) {
  const auto c = checked_correlations(records);
  return std::abs(c[0] + c[1] + c[2] - c[3]);
}

double bell_max_standard_error(const std::array<CountRecord, 4> &records) {
  const auto c = checked_correlations(records);
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    var += std::max(0.0, 1.0 - c[i] * c[i]) / static_cast<double>(records[i].total());
  return std::sqrt(var);
}

std::array<CountRecord, 4> simulate_bell_records(const TwoQubitState &state,
                                                 const ExperimentConfig &config,
                                                 std::uint64_t first_point_index) {
  const auto settings = bell_angle_settings();
  std::array<CountRecord, 4> out{};
  for (std::size_t i = 0; i < 4; ++i)
    out[i] = simulate_counts(state, measurement_from_polarization_angle(settings[i].first),
                             measurement_from_polarization_angle(settings[i].second),
                             config, first_point_index + i);
  return out;
}

void require_valid(const MixingModel &m) {
  if (!(m.visibility >= 0.0 && m.visibility <= 1.0))
    throw Error(ErrorKind::OutOfRange, "visibility must lie in [0, 1]");
  if (!(m.w_singlet >= 0.0 && m.w_hh >= 0.0 && m.w_vv >= 0.0))
    throw Error(ErrorKind::NotAProbabilityVector, "mixing weights must be >= 0");
  const double total = m.w_singlet + m.w_hh + m.w_vv;
  if (std::abs(total - 1.0) > kValidationTol)
    throw Error(ErrorKind::NotAProbabilityVector,
                "mixing weights sum to " + std::to_string(total));
}

TwoQubitState mixed_state_from_model(const MixingModel &m) {
  require_valid(m);
  const Vector4c s = bell_vector(BellState::PsiMinus);
  Matrix4c incoherent = Matrix4c::Zero();
  incoherent(1, 1) = 0.5;  // |HV>
  incoherent(2, 2) = 0.5;  // |VH>
  Matrix4c rho = m.w_singlet * (m.visibility * (s * s.adjoint()) +
                                (1.0 - m.visibility) * incoherent);
  rho(0, 0) += m.w_hh;
  rho(3, 3) += m.w_vv;
  return validate_state(rho);
}

MixingModel werner_mixing_model(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::OutOfRange,
                "mixing model needs p in [0, 1], got " + std::to_string(p));
  return {2.0 * p / (1.0 + p), 0.5 * (1.0 + p), 0.25 * (1.0 - p), 0.25 * (1.0 - p)};
}

std::array<double, 3> weights_from_schedule(const std::array<double, 3> &durations,
                                            const std::array<double, 3> &rates) {
  std::array<double, 3> w{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(durations[i] >= 0.0 && rates[i] >= 0.0))
      throw Error(ErrorKind::OutOfRange, "durations and rates must be >= 0");
    w[i] = durations[i] * rates[i];
    total += w[i];
  }
  if (!(total > 0.0))
    throw Error(ErrorKind::NotAProbabilityVector, "schedule has zero total exposure");
  for (double &x : w) x /= total;
  return w;
}

const char *to_string(SignalBasis basis) {
  return basis == SignalBasis::HV ? "HV" : "XY";
}

QubitMeasurement signal_measurement(SignalBasis basis) {
  return measurement_from_polarization_angle(basis == SignalBasis::HV ? 0.0 : 45.0);
}

std::vector<SweepRow> run_sweep_experiment(double p, const std::vector<SweepPoint> &points,
                                           const ExperimentConfig &config, int threads) {
  require_valid(config);
  const TwoQubitState state = werner(p);
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const SweepPoint &pt = points[i];
    SweepRow &row = rows[i];
    row.point = pt;
    row.counts = simulate_counts(state, measurement_from_polarization_angle(pt.theta_meter),
                                 signal_measurement(pt.basis), config, i);
    row.K_hat = estimate_knowledge(row.counts);
    row.P_hat = estimate_apriori(row.counts);
    row.dK_hat = row.K_hat - row.P_hat;
    const auto theory = werner_prediction(p, pt.theta_meter, pt.theta_meter);
    row.dK_theory = pt.basis == SignalBasis::HV ? theory.K : theory.K_prime;
  });
  return rows;
}

std::vector<SweepRow> noiseless_sweep(double p, const std::vector<SweepPoint> &points) {
  const TwoQubitState state = werner(p);
  std::vector<SweepRow> rows;
  rows.reserve(points.size());
  for (const SweepPoint &pt : points) {
    const auto meter = measurement_from_polarization_angle(pt.theta_meter);
    const auto signal = signal_measurement(pt.basis);
    SweepRow row;
    row.point = pt;
    row.K_hat = knowledge(state, meter, signal);
    row.P_hat = apriori(state, signal);
    row.dK_hat = row.K_hat - row.P_hat;
    const auto theory = werner_prediction(p, pt.theta_meter, pt.theta_meter);
    row.dK_theory = pt.basis == SignalBasis::HV ? theory.K : theory.K_prime;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<SurfaceRow> combine(const std::vector<double> &thetas,
                                const std::vector<double> &theta_primes,
                                const std::vector<double> &dk, const std::vector<double> &dkp,
                                double bound) {
  std::vector<SurfaceRow> rows;
  rows.reserve(thetas.size() * theta_primes.size());
  for (std::size_t i = 0; i < thetas.size(); ++i)
    for (std::size_t j = 0; j < theta_primes.size(); ++j) {
      const double a = dk[i] * dk[i];
      const double b = dkp[j] * dkp[j];
      rows.push_back({thetas[i], theta_primes[j], a, b, a + b, bound});
    }
  return rows;
}

}  // namespace

std::vector<SurfaceRow> excess_surface(const TwoQubitState &state,
                                       const std::vector<double> &thetas,
                                       const std::vector<double> &theta_primes) {
  const auto hv = signal_measurement(SignalBasis::HV);
  const auto xy = signal_measurement(SignalBasis::XY);
  std::vector<double> dk, dkp;
  for (double t : thetas)
    dk.push_back(knowledge_excess(state, measurement_from_polarization_angle(t), hv));
  for (double t : theta_primes)
    dkp.push_back(knowledge_excess(state, measurement_from_polarization_angle(t), xy));
  const double b = bell_max(state);
  return combine(thetas, theta_primes, dk, dkp, 0.25 * b * b);
}

std::vector<SurfaceRow> simulated_excess_surface(double p,
                                                 const std::vector<double> &thetas,
                                                 const std::vector<double> &theta_primes,
                                                 const ExperimentConfig &config,
                                                 int threads) {
  std::vector<SweepPoint> points;
  for (double t : thetas) points.push_back({t, SignalBasis::HV});
  for (double t : theta_primes) points.push_back({t, SignalBasis::XY});
  const auto rows = run_sweep_experiment(p, points, config, threads);
  std::vector<double> dk, dkp;
  for (std::size_t i = 0; i < rows.size(); ++i)
    (i < thetas.size() ? dk : dkp).push_back(rows[i].dK_hat);
  const auto records = simulate_bell_records(werner(p), config, points.size());
  const double b = estimate_bell_max(records);
  return combine(thetas, theta_primes, dk, dkp, 0.25 * b * b);
}

}  // namespace kex
