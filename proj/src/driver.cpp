// SPDX-License-Identifier: Apache-2.0

#include "cranirs/driver.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "cranirs/surrogate.hpp"

namespace cranirs {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::Stalled: return "stalled";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::SolverFailure: return "solver-failure";
  }
  return "unknown";
}

std::vector<double> RunReport::accepted_rates_bits() const {
  std::vector<double> out{initial_rate_bits};
  for (const auto& row : trace)
    if (row.accepted) out.push_back(row.rate_bits);
  return out;
}

void RunReport::write_csv(std::ostream& out) const {
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# cranirs-trace v1 termination=" << to_string(termination) << " initial_rate_bits=" << initial_rate_bits
      << '\n';
  out << "iteration,rate_bits,surrogate,rank_gap,millis,accepted,min_slack_nats\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << r.rate_bits << ',' << r.surrogate << ',' << r.rank_gap << ',' << r.millis << ','
        << (r.accepted ? 1 : 0) << ',' << r.min_slack << '\n';
  out.precision(old_prec);
}

namespace {

struct Normalized {
  ChannelSet ch;
  double noise_w = 1.0;
  std::vector<double> caps_nats;
};

Normalized normalize(const ScenarioConfig& cfg, const ChannelSet& ch) {
  cfg.validate();
  ch.validate();
  if (ch.num_rrhs != cfg.num_rrhs || ch.antennas_per_rrh != cfg.antennas_per_rrh || ch.num_users() != cfg.num_users ||
      ch.num_elements() != cfg.num_elements())
    throw DimensionError("driver: channel does not match the scenario dimensions");
  Normalized n;
  n.noise_w = units::dbm_to_watts(cfg.noise_power_dbm);
  const double amp = std::sqrt(units::dbm_to_watts(cfg.tx_power_dbm) / n.noise_w);
  n.ch = ch;
  n.ch.h_l *= amp;
  n.ch.g_l *= amp;
  const double ng = n.ch.g_l.norm();
  const double nh = n.ch.h_rm.norm();
  if (ng > 0.0 && nh > 0.0) {
    const double c = std::sqrt(ng / nh);
    n.ch.g_l /= c;
    n.ch.h_rm *= c;
  }
  for (double c : cfg.fronthaul_caps_bits) n.caps_nats.push_back(units::bits_to_nats(c));
  return n;
}

double beta_normalized(CompressionMode mode, const CMat& v, const std::vector<double>& caps, int num_rrhs, int n_r) {
  auto ok = [&](double b) {
    return min_slack(all_fronthaul_slacks(mode, v, QuantNoise::uniform(num_rrhs, n_r, b), caps, 1.0, 1.0)) >= 0.0;
  };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 4.0;
    if (hi > 1e40) throw NumericalError("feasible_beta: no feasible quantization level");
  }
  double lo = hi / 4.0;
  while (ok(lo)) {
    hi = lo;
    lo /= 4.0;
    if (lo < 1e-14) return hi;
  }
  while (std::log(hi / lo) > 1e-10) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

ConicProblem build_problem(const ScenarioConfig& cfg, const Normalized& n, const AuxiliaryState& aux) {
  return make_conic_problem(build_objective(n.ch, aux, 1.0, 1.0), build_constraints(n.ch, aux, 1.0, 1.0, n.caps_nats),
                            cfg.covariance_mode);
}

double rank_gap_of(const CMat& theta_bar) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(theta_bar), Eigen::EigenvaluesOnly);
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  return 1.0 - ev.maxCoeff() / std::max(1e-300, ev.sum());
}

}  // namespace

double feasible_beta(const ScenarioConfig& cfg, const CMat& v_l) {
  const double noise = units::dbm_to_watts(cfg.noise_power_dbm);
  const double amp = std::sqrt(units::dbm_to_watts(cfg.tx_power_dbm) / noise);
  std::vector<double> caps;
  for (double c : cfg.fronthaul_caps_bits) caps.push_back(units::bits_to_nats(c));
  return noise * beta_normalized(cfg.compression_mode, amp * v_l, caps, cfg.num_rrhs, cfg.antennas_per_rrh);
}

IterateState initialize(const ScenarioConfig& cfg, const ChannelSet& ch, std::uint64_t drop,
                        const std::optional<PhaseConfig>& phases) {
  const Normalized n = normalize(cfg, ch);
  IterateState st;
  if (phases) {
    if (phases->theta.size() != ch.num_elements()) throw DimensionError("initialize: phase vector length mismatch");
    st.phases = *phases;
  } else {
    RngStream rng(cfg.seed, drop, StreamPurpose::InitialPhases);
    st.phases = PhaseConfig::random(ch.num_elements(), rng);
  }
  const CMat v = effective_channel(n.ch, st.phases).v;
  const double beta = beta_normalized(cfg.compression_mode, v, n.caps_nats, cfg.num_rrhs, cfg.antennas_per_rrh);
  const QuantNoise om = QuantNoise::uniform(cfg.num_rrhs, cfg.antennas_per_rrh, beta);
  st.omega = om.scaled(n.noise_w);
  st.rate = sum_rate(v, om, 1.0, 1.0);
  st.slacks = all_fronthaul_slacks(cfg.compression_mode, v, om, n.caps_nats, 1.0, 1.0);
  st.aux = build_auxiliary(cfg.compression_mode, v, om, 1.0, 1.0);
  st.surrogate = evaluate_surrogate(build_objective(n.ch, st.aux, 1.0, 1.0), st.phases.lifted(), om);
  return st;
}

ConicProblem conic_problem_at(const ScenarioConfig& cfg, const ChannelSet& ch, const IterateState& state) {
  const Normalized n = normalize(cfg, ch);
  const QuantNoise om = state.omega.scaled(1.0 / n.noise_w);
  const CMat v = effective_channel(n.ch, state.phases).v;
  return build_problem(cfg, n, build_auxiliary(cfg.compression_mode, v, om, 1.0, 1.0));
}

RunReport run(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts, std::uint64_t drop,
              const std::optional<PhaseConfig>& phases) {
  if (opts.max_iters < 0 || !(opts.rel_tol >= 0.0)) throw ConfigError("run: max_iters and rel_tol must be non-negative");
  const Normalized n = normalize(cfg, ch);
  RunReport rep;
  IterateState st = initialize(cfg, ch, drop, phases);
  rep.initial_rate_bits = units::nats_to_bits(st.rate);
  RngStream rng(cfg.seed, drop, StreamPurpose::Rounding);
  rep.termination = Termination::MaxIterations;
  int rejections = 0;

  for (int it = 1; it <= opts.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    TraceRow row;
    row.iteration = it;
    bool accepted = false;
    double old_rate = st.rate;
    try {
      const QuantNoise om = st.omega.scaled(1.0 / n.noise_w);
      const CMat v = effective_channel(n.ch, st.phases).v;
      st.aux = build_auxiliary(cfg.compression_mode, v, om, 1.0, 1.0);
      const ConicProblem prob = build_problem(cfg, n, st.aux);
      const CMat lifted = st.phases.lifted();
      const double prev = evaluate_surrogate(prob.objective, lifted, om);
      for (const auto& con : prob.constraints)
        if (evaluate_surrogate(con, lifted, om) > con.rhs + 1e-6)
          throw SolverError("run: kept iterate violates the rebuilt surrogate constraint " + con.id);

      PhaseConfig cand_phases = st.phases;
      QuantNoise cand_omega;
      double cand_sur = std::numeric_limits<double>::infinity();
      if (opts.optimize_phases) {
        const RelaxationResult rel = solve_relaxation(prob, lifted, om, opts.solver);
        rep.max_hypograph_error = std::max(rep.max_hypograph_error, rel.hypograph_error);
        rep.max_diag_error = std::max(rep.max_diag_error, rel.max_diag_error);
        row.rank_gap = rank_gap_of(rel.theta_bar);
        try {
          const RoundingResult rr = randomize_round(prob, rel, opts.num_candidates, rng, opts.solver, {st.phases});
          rep.rounding_resolves += rr.resolves;
          cand_phases = rr.phases;
          cand_omega = rr.omega;
          cand_sur = rr.objective;
        } catch (const InfeasibleError&) {
        }
      } else {
        const RelaxationResult rel = solve_omega_only(prob, lifted, om, opts.solver);
        rep.max_hypograph_error = std::max(rep.max_hypograph_error, rel.hypograph_error);
        cand_omega = rel.omega;
        cand_sur = rel.objective;
      }

      if (cand_sur < prev - 1e-12) {
        const CMat v_new = effective_channel(n.ch, cand_phases).v;
        auto slacks = all_fronthaul_slacks(cfg.compression_mode, v_new, cand_omega, n.caps_nats, 1.0, 1.0);
        if (min_slack(slacks) >= -1e-6) {
          accepted = true;
          st.phases = cand_phases;
          st.omega = cand_omega.scaled(n.noise_w);
          st.rate = sum_rate(v_new, cand_omega, 1.0, 1.0);
          st.slacks = std::move(slacks);
          st.surrogate = cand_sur;
          st.iteration = it;
        }
      }
      if (!accepted) st.surrogate = prev;
    } catch (const Error& e) {
      rep.termination = Termination::SolverFailure;
      rep.message = e.what();
      break;
    }

    row.accepted = accepted;
    row.rate_bits = units::nats_to_bits(st.rate);
    row.surrogate = st.surrogate;
    row.min_slack = min_slack(st.slacks);
    row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rep.trace.push_back(row);

    if (accepted) {
      rejections = 0;
      if (std::abs(st.rate - old_rate) <= opts.rel_tol * std::abs(old_rate)) {
        rep.termination = Termination::Converged;
        break;
      }
    } else if (++rejections >= 2) {
      rep.termination = Termination::Stalled;
      break;
    }
  }
  rep.final_state = std::move(st);
  return rep;
}

RunReport run_p2p(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts, std::uint64_t drop) {
  ScenarioConfig c = cfg;
  c.compression_mode = CompressionMode::PointToPoint;
  return run(c, ch, opts, drop);
}

RunReport run_high_sqnr(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts,
                        std::uint64_t drop) {
  ScenarioConfig c = cfg;
  c.covariance_mode = CovarianceMode::ScalarBeta;
  return run(c, ch, opts, drop);
}

}  // namespace cranirs
