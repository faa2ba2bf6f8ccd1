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
 * @file expsim.hpp
 * Photon-coincidence experiment: Born-rule channel probabilities, Poisson
 * shot noise, the rate-based estimators of K, P, correlation and B_max, and
 * the three-input mixing model used to prepare Werner states.
 *
 * Channel labels follow "meter sign, signal sign": c_pm counts meter "+"
 * together with signal "-".
 */

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "kex/state.hpp"

namespace kex {

struct CountRecord {
  std::uint64_t c_pp = 0;
  std::uint64_t c_pm = 0;
  std::uint64_t c_mp = 0;
  std::uint64_t c_mm = 0;

  std::uint64_t total() const { return c_pp + c_pm + c_mp + c_mm; }
  bool operator==(const CountRecord &) const = default;
};

struct ExperimentConfig {
  double pair_rate = 10000.0 / 22.0;  // pairs per second, ~1e4 per 22 s point
  double duration = 22.0;             // seconds per point
  double dark_coincidence_rate = 0.0; // per second per channel
  std::uint64_t seed = 1;
};

void require_valid(const ExperimentConfig &config);

/// (p++, p+-, p-+, p--) with p^{ab} = Tr[(Pi_S^b x Pi_M^a) rho].
std::array<double, 4> coincidence_probs(const TwoQubitState &state,
                                        const QubitMeasurement &meter,
                                        const QubitMeasurement &signal);

/// Independent Poisson count per channel with mean
/// p^{ab} pair_rate duration + dark_rate duration. Channel c of point
/// `point_index` draws from stream 4 * point_index + c of config.seed.
CountRecord simulate_counts(const TwoQubitState &state, const QubitMeasurement &meter,
                            const QubitMeasurement &signal,
                            const ExperimentConfig &config,
                            std::uint64_t point_index = 0);

/// Counts N p^{ab} rounded to the nearest integer (no noise).
CountRecord exact_counts(const std::array<double, 4> &probs, double total);

double estimate_knowledge(const CountRecord &counts);
double estimate_apriori(const CountRecord &counts);
double estimate_correlation(const CountRecord &counts);

/// Meter/signal analyzer angles (degrees) for the four correlation terms,
/// in the order combined by estimate_bell_max: +C0 + C1 + C2 - C3.
std::array<std::pair<double, double>, 4> bell_angle_settings();

double estimate_bell_max(const std::array<CountRecord, 4> &records);

/// Simulated records at bell_angle_settings(); record i uses point index
/// first_point_index + i.
std::array<CountRecord, 4> simulate_bell_records(const TwoQubitState &state,
                                                 const ExperimentConfig &config,
                                                 std::uint64_t first_point_index);

/// Binomial standard error of estimate_bell_max, sqrt(sum_i (1 - C_i^2)/N_i).
double bell_max_standard_error(const std::array<CountRecord, 4> &records);

/// Effective mixture of the three interferometer inputs: orthogonal
/// polarizations (yielding the singlet with HOM visibility V, otherwise
/// |HV>, |VH> incoherently) and the two parallel-polarization inputs.
struct MixingModel {
  double visibility = 1.0;
  double w_singlet = 1.0;
  double w_hh = 0.0;
  double w_vv = 0.0;
};

void require_valid(const MixingModel &model);

TwoQubitState mixed_state_from_model(const MixingModel &model);

/// V = 2p/(1+p), weights ((1+p)/2, (1-p)/4, (1-p)/4); reproduces werner(p).
MixingModel werner_mixing_model(double p);

/// Weights proportional to rate x duration of each input configuration, in
/// the order (orthogonal, HH, VV).
std::array<double, 3> weights_from_schedule(const std::array<double, 3> &durations,
                                            const std::array<double, 3> &rates);

enum class SignalBasis { HV, XY };

const char *to_string(SignalBasis basis);
QubitMeasurement signal_measurement(SignalBasis basis);

struct SweepPoint {
  double theta_meter = 0.0;
  SignalBasis basis = SignalBasis::HV;
};

struct SweepRow {
  SweepPoint point;
  CountRecord counts;
  double K_hat = 0.0;
  double P_hat = 0.0;
  double dK_hat = 0.0;
  double dK_theory = 0.0;
};

/// Simulates every point of a Werner-state sweep; point i uses RNG streams
/// keyed by i, so the result is independent of `threads`.
std::vector<SweepRow> run_sweep_experiment(double p, const std::vector<SweepPoint> &points,
                                           const ExperimentConfig &config,
                                           int threads = 1);

/// Same table computed from exact probabilities (K_hat = K etc., zero counts).
std::vector<SweepRow> noiseless_sweep(double p, const std::vector<SweepPoint> &points);

/// One cell of the two-angle excess surface: meter at theta predicting H/V,
/// meter at theta_prime predicting the diagonal basis.
struct SurfaceRow {
  double theta = 0.0;
  double theta_prime = 0.0;
  double dK2 = 0.0;
  double dKp2 = 0.0;
  double sum = 0.0;
  double bound = 0.0;
};

/// Exact surface; bound = (B_max / 2)^2. Rows ordered theta-major.
std::vector<SurfaceRow> excess_surface(const TwoQubitState &state,
                                       const std::vector<double> &thetas,
                                       const std::vector<double> &theta_primes);

/// Simulated surface for werner(p). Each theta is measured once per basis
/// (point indices 0..n-1 for H/V, n..n+m-1 for the diagonal basis) and the
/// bound column uses the estimated B_max from points n+m..n+m+3.
std::vector<SurfaceRow> simulated_excess_surface(double p,
                                                 const std::vector<double> &thetas,
                                                 const std::vector<double> &theta_primes,
                                                 const ExperimentConfig &config,
                                                 int threads = 1);

}  // namespace kex
