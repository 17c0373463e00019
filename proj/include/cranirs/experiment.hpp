// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo harness: named variants, the two phase baselines, paired-drop
// sweeps over N_I, C or P, and their CSV / plot-script output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cranirs/driver.hpp"

namespace cranirs {

enum class VariantKind { Optimized, Discrete, RandomPhase, NoIrs };

/// wz, p2p, wz-approx, p2p-approx, wz-<b>bit, p2p-<b>bit, random-phase,
/// no-irs (both Wyner-Ziv), and p2p-random-phase, p2p-no-irs.
struct Variant {
  std::string name;
  VariantKind kind = VariantKind::Optimized;
  CompressionMode mode = CompressionMode::WynerZiv;
  CovarianceMode covariance = CovarianceMode::Full;
  int bits = 0;  // Discrete only

  static Variant parse(const std::string& name);
  /// The optimized variant a Discrete variant is projected from.
  std::string base_name() const;
};

struct VariantOutcome {
  std::string variant;
  double rate_bits = 0.0;
  int iterations = 0;
  double millis = 0.0;
  Termination termination = Termination::Converged;
  std::string message;
  std::vector<double> accepted_rates_bits;
  double min_slack = 0.0;  // nats, over every reported iterate
  double max_hypograph_error = 0.0;
  bool ok() const { return termination != Termination::SolverFailure; }
};

/// Phases from the RandomPhases stream of `drop`, Omega-only iterations.
RunReport baseline_random_phase(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts = {},
                                std::uint64_t drop = 0);

/// G_L = 0, Omega-only iterations.
RunReport baseline_no_irs(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts = {},
                          std::uint64_t drop = 0);

/// Snap the phases of an optimized run to `bits` and scale its Omega up until
/// the true constraints hold again.
VariantOutcome discrete_from(const ScenarioConfig& cfg, const ChannelSet& ch, const RunReport& continuous, int bits,
                             const std::string& name);

/// Runs every variant on one channel drop. Discrete variants reuse the run
/// of their base variant (adding it when missing).
std::vector<VariantOutcome> run_variants(const ScenarioConfig& cfg, const ChannelSet& ch,
                                         const std::vector<Variant>& variants, const DriverOptions& opts,
                                         std::uint64_t drop);

enum class SweepParameter { ElementsPerIrs, Capacity, Power };
std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& s);

/// Sets the swept field of `cfg` (Capacity sets every C_l).
void apply_sweep_value(ScenarioConfig& cfg, SweepParameter p, double value);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::ElementsPerIrs;
  std::vector<double> values;
  int drops = 20;
  std::vector<std::string> variants{"wz", "p2p"};
  int threads = 0;  // 0: hardware concurrency

  /// Throws ConfigError.
  void validate() const;
};

struct AggregateRow {
  std::string variant;
  double value = 0.0;
  double mean_rate_bits = 0.0;
  double stderr_bits = 0.0;
  double mean_iterations = 0.0;
  double mean_millis = 0.0;
  int runs = 0;
  int failures = 0;
};

struct RunRecord {
  double value = 0.0;
  std::uint64_t drop = 0;
  VariantOutcome outcome;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<AggregateRow> rows;  // values outer, variants inner
  std::vector<RunRecord> runs;     // values, then drops, then variants
  int failures = 0;

  const AggregateRow& row(const std::string& variant, double value) const;
  /// Mean rate per swept value, in order.
  std::vector<double> means(const std::string& variant) const;
};

/// Drop d at every sweep point uses channel stream d of cfg.seed, so all
/// variants see the same realizations. Failed runs are excluded from the
/// means and counted.
SweepResult sweep(const SweepSpec& spec, const ScenarioConfig& cfg, const DriverOptions& opts = {});

/// Aggregates without timing; identical inputs give identical bytes.
void write_sweep_csv(std::ostream& out, const SweepResult& res, std::uint64_t seed);
void write_runs_csv(std::ostream& out, const SweepResult& res);
void write_timing_csv(std::ostream& out, const SweepResult& res);
/// gnuplot script plotting mean rate with standard-error bars from `csv_name`.
void write_plot_script(std::ostream& out, const SweepResult& res, const std::string& csv_name);

}  // namespace cranirs
