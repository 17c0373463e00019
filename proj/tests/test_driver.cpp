// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cranirs/driver.hpp"
#include "support.hpp"

using namespace cranirs;
using namespace cranirs::testing;

namespace {

ScenarioConfig small_scenario(int elements = 2) {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.elements_per_irs = elements;
  return cfg;
}

ScenarioConfig scalar_scenario() {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.num_users = 1;
  cfg.num_rrhs = 1;
  cfg.num_irs = 1;
  cfg.antennas_per_rrh = 1;
  cfg.elements_per_irs = 1;
  cfg.fronthaul_caps_bits = {5.0};
  cfg.rrh_positions = {{0.0, 90.0}};
  cfg.irs_positions = {{-10.0, 80.0}};
  return cfg;
}

// quantization-free rate with the physical channel
double clean_rate_bits(const ScenarioConfig& cfg, const CMat& v) {
  const double snr = units::dbm_to_watts(cfg.tx_power_dbm) / units::dbm_to_watts(cfg.noise_power_dbm);
  const int k = static_cast<int>(v.cols());
  return units::nats_to_bits(logdet_hpd(CMat::Identity(k, k) + snr * v.adjoint() * v));
}

}  // namespace

TEST_CASE("loop contract") {
  const ScenarioConfig cfg = small_scenario();
  const Drop d = draw_drop(cfg, 0);
  DriverOptions opts;
  opts.rel_tol = 0.0;
  opts.max_iters = 1;
  const RunReport one = run(cfg, d.channels, opts);
  CHECK(one.trace.size() == 1);
  CHECK(one.termination == Termination::MaxIterations);
  opts.max_iters = 0;
  const RunReport none = run(cfg, d.channels, opts);
  CHECK(none.trace.empty());
  CHECK(none.rate_bits() == doctest::Approx(none.initial_rate_bits));
  opts.rel_tol = -1.0;
  CHECK_THROWS_AS(run(cfg, d.channels, opts), ConfigError);
}

TEST_CASE("initialization") {
  ScenarioConfig cfg = small_scenario();
  const Drop d = draw_drop(cfg, 1);

  cfg.fronthaul_caps_bits = {1e3, 1e3};
  const IterateState loose = initialize(cfg, d.channels, 1);
  const CMat v = effective_channel(d.channels, loose.phases).v;
  const double clean = clean_rate_bits(cfg, v);
  CHECK(std::abs(units::nats_to_bits(loose.rate) - clean) < 1e-6 * clean);
  CHECK(loose.omega.blocks[0](0, 0).real() < 1e-20);

  cfg.fronthaul_caps_bits = {0.1, 0.1};
  for (auto mode : {CompressionMode::WynerZiv, CompressionMode::PointToPoint}) {
    cfg.compression_mode = mode;
    const IterateState tight = initialize(cfg, d.channels, 1);
    CHECK(units::nats_to_bits(tight.rate) < 0.25);
    CHECK(tight.rate > 0.0);
    CHECK(min_slack(tight.slacks) >= -1e-8);
    CHECK(min_slack(tight.slacks) < 1e-3);
    CHECK(tight.omega.blocks[0](0, 0).real() > units::dbm_to_watts(cfg.noise_power_dbm));
    const double beta = feasible_beta(cfg, effective_channel(d.channels, tight.phases).v);
    CHECK(beta == doctest::Approx(tight.omega.blocks[0](0, 0).real()).epsilon(1e-12));
  }

  const IterateState a = initialize(cfg, d.channels, 1), b = initialize(cfg, d.channels, 1);
  CHECK(a.phases.theta == b.phases.theta);
  CHECK(a.rate == b.rate);
  const IterateState c = initialize(cfg, d.channels, 2);
  CHECK(a.phases.theta != c.phases.theta);
}

TEST_CASE("trace is monotone, feasible and reproducible") {
  const ScenarioConfig cfg = small_scenario(4);
  const Drop d = draw_drop(cfg, 3);
  const RunReport r = run(cfg, d.channels, {}, 3);
  REQUIRE(!r.trace.empty());
  CHECK(r.termination != Termination::SolverFailure);
  double prev = r.initial_rate_bits;
  for (const auto& row : r.trace) {
    CHECK(row.rate_bits >= prev - 1e-12);
    CHECK(row.min_slack >= -1e-6);
    prev = row.rate_bits;
  }
  const auto acc = r.accepted_rates_bits();
  for (std::size_t i = 1; i < acc.size(); ++i) CHECK(acc[i] >= acc[i - 1]);
  CHECK(r.max_hypograph_error <= 1e-7);
  CHECK(r.max_diag_error <= 1e-7);
  CHECK(r.rate_bits() > r.initial_rate_bits);

  const RunReport again = run(cfg, d.channels, {}, 3);
  REQUIRE(again.trace.size() == r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) CHECK(again.trace[i].rate_bits == r.trace[i].rate_bits);

  std::ostringstream os;
  r.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# cranirs-trace v1 termination=" + to_string(r.termination), 0) == 0);
  std::getline(is, line);
  CHECK(line == "iteration,rate_bits,surrogate,rank_gap,millis,accepted,min_slack_nats");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(r.trace.size()));
}

TEST_CASE("without the IRS the loop solves the fronthaul problem in closed form") {
  const ScenarioConfig cfg = scalar_scenario();
  for (std::uint64_t drop = 0; drop < 3; ++drop) {
    const Drop d = draw_drop(cfg, drop);
    const ChannelSet ch = without_irs(d.channels);
    const RunReport r = run(cfg, ch, {}, drop);
    const double snr = units::dbm_to_watts(cfg.tx_power_dbm) / units::dbm_to_watts(cfg.noise_power_dbm) *
                       std::norm(ch.h_l(0, 0));
    const double q = (snr + 1.0) / (std::exp2(cfg.fronthaul_caps_bits[0]) - 1.0);
    const double oracle = std::log2(1.0 + snr / (1.0 + q));
    CHECK(std::abs(r.rate_bits() - oracle) < 1e-4);
  }
}

TEST_CASE("a single RRH makes both compression schemes coincide") {
  ScenarioConfig cfg = small_scenario();
  cfg.num_rrhs = 1;
  cfg.rrh_positions = {{0.0, 90.0}};
  cfg.fronthaul_caps_bits = {4.0};
  const Drop d = draw_drop(cfg, 0);
  DriverOptions opts;
  opts.max_iters = 5;
  const RunReport wz = run(cfg, d.channels, opts);
  const RunReport p2p = run_p2p(cfg, d.channels, opts);
  REQUIRE(wz.trace.size() == p2p.trace.size());
  CHECK(std::abs(wz.initial_rate_bits - p2p.initial_rate_bits) < 1e-9);
  for (std::size_t i = 0; i < wz.trace.size(); ++i)
    CHECK(std::abs(wz.trace[i].rate_bits - p2p.trace[i].rate_bits) < 1e-6);
}

TEST_CASE("Wyner-Ziv compression is at least as good as point-to-point") {
  const ScenarioConfig cfg = small_scenario();
  for (std::uint64_t drop = 0; drop < 20; ++drop) {
    const Drop d = draw_drop(cfg, drop);
    const RunReport wz = run(cfg, d.channels, {}, drop);
    const RunReport p2p = run_p2p(cfg, d.channels, {}, drop);
    CHECK(wz.rate_bits() >= p2p.rate_bits() - 1e-6);
  }
}

TEST_CASE("high fronthaul capacity") {
  ScenarioConfig cfg = small_scenario();
  cfg.fronthaul_caps_bits = {30.0, 30.0};
  for (std::uint64_t drop = 0; drop < 3; ++drop) {
    const Drop d = draw_drop(cfg, drop);
    const double wz = run(cfg, d.channels, {}, drop).rate_bits();
    const double p2p = run_p2p(cfg, d.channels, {}, drop).rate_bits();
    const double approx = run_high_sqnr(cfg, d.channels, {}, drop).rate_bits();
    CHECK(wz - p2p <= 0.02 * wz);
    CHECK(wz - approx <= 0.03 * wz);
  }
}

TEST_CASE("Omega-only iterations keep the phases") {
  const ScenarioConfig cfg = small_scenario();
  const Drop d = draw_drop(cfg, 0);
  DriverOptions opts;
  opts.optimize_phases = false;
  const PhaseConfig fixed = PhaseConfig::ones(cfg.num_irs * cfg.elements_per_irs);
  const RunReport r = run(cfg, d.channels, opts, 0, fixed);
  CHECK(r.final_state.phases.theta == fixed.theta);
  CHECK(r.rate_bits() >= r.initial_rate_bits);
  CHECK(min_slack(r.final_state.slacks) >= -1e-6);
}
