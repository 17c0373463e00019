// SPDX-License-Identifier: Apache-2.0
//
// Alternating outer loop: auxiliary update, surrogate rebuild, relaxed solve,
// rounding, and the accept-if-the-surrogate-decreases guard.
//
// Internally the channel is rescaled so that P = 1 and sigma^2 = 1 (H and G
// multiplied by sqrt(P)/sigma, Omega divided by sigma^2) and the IRS cascade
// G diag(theta) H_RM is balanced between its two factors. Rates are invariant
// under both; Omega is reported back in watts.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cranirs/auxiliary.hpp"
#include "cranirs/channel.hpp"
#include "cranirs/conic.hpp"
#include "cranirs/rates.hpp"
#include "cranirs/scenario.hpp"

namespace cranirs {

struct DriverOptions {
  int max_iters = 100;
  double rel_tol = 1e-4;
  int num_candidates = 200;
  bool optimize_phases = true;  // false: phases stay at their initial value, Omega-only iterations
  SolverOptions solver;
};

struct IterateState {
  PhaseConfig phases;
  QuantNoise omega;    // watts
  AuxiliaryState aux;  // normalized units, from the last surrogate rebuild
  double rate = 0.0;   // nats
  double surrogate = 0.0;
  int iteration = 0;
  std::vector<FronthaulSlack> slacks;
};

struct TraceRow {
  int iteration = 0;
  double rate_bits = 0.0;
  double surrogate = 0.0;
  double rank_gap = 0.0;  // 1 - lambda_1 / sum(lambda) of the relaxed Theta_bar
  double millis = 0.0;
  bool accepted = false;
  double min_slack = 0.0;  // nats, true constraints at the kept iterate
};

enum class Termination { Converged, Stalled, MaxIterations, SolverFailure };
std::string to_string(Termination t);

struct RunReport {
  std::vector<TraceRow> trace;
  Termination termination = Termination::MaxIterations;
  std::string message;
  IterateState final_state;
  double initial_rate_bits = 0.0;
  double max_hypograph_error = 0.0;
  double max_diag_error = 0.0;
  int rounding_resolves = 0;

  double rate_bits() const { return units::nats_to_bits(final_state.rate); }
  /// Rates (bits) of the initial point followed by every accepted iterate.
  std::vector<double> accepted_rates_bits() const;

  void write_csv(std::ostream& out) const;
};

/// Random phases (InitialPhases stream of `drop`) unless `phases` is given, and
/// Omega_l = beta I with the smallest beta meeting every true constraint.
IterateState initialize(const ScenarioConfig& cfg, const ChannelSet& ch, std::uint64_t drop = 0,
                        const std::optional<PhaseConfig>& phases = std::nullopt);

/// Smallest uniform beta (watts) making every true fronthaul constraint hold.
double feasible_beta(const ScenarioConfig& cfg, const CMat& v_l);

/// Uses cfg.compression_mode and cfg.covariance_mode.
RunReport run(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts = {}, std::uint64_t drop = 0,
              const std::optional<PhaseConfig>& phases = std::nullopt);

RunReport run_p2p(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts = {},
                  std::uint64_t drop = 0);

/// Omega_l = beta_l I throughout.
RunReport run_high_sqnr(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts = {},
                        std::uint64_t drop = 0);

/// Surrogate problem of `state` in the driver's normalized units, for dumps and tests.
ConicProblem conic_problem_at(const ScenarioConfig& cfg, const ChannelSet& ch, const IterateState& state);

}  // namespace cranirs
