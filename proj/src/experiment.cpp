// SPDX-License-Identifier: Apache-2.0

#include "cranirs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

namespace cranirs {

Variant Variant::parse(const std::string& name) {
  Variant v;
  v.name = name;
  std::string rest = name;
  if (rest.rfind("p2p", 0) == 0) {
    v.mode = CompressionMode::PointToPoint;
    rest = rest.substr(3);
  } else if (rest.rfind("wz", 0) == 0) {
    rest = rest.substr(2);
  } else {
    rest = "-" + rest;
  }
  if (rest.empty()) return v;
  if (rest == "-approx") {
    v.covariance = CovarianceMode::ScalarBeta;
    return v;
  }
  if (rest == "-random-phase") {
    v.kind = VariantKind::RandomPhase;
    return v;
  }
  if (rest == "-no-irs") {
    v.kind = VariantKind::NoIrs;
    return v;
  }
  if (rest.size() > 4 && rest.front() == '-' && rest.substr(rest.size() - 3) == "bit") {
    const std::string digits = rest.substr(1, rest.size() - 4);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      v.kind = VariantKind::Discrete;
      v.bits = std::stoi(digits);
      if (v.bits < 1 || v.bits > 52) throw ConfigError("variant '" + name + "': bits must be in [1, 52]");
      return v;
    }
  }
  throw ConfigError("unknown variant '" + name + "'");
}

std::string Variant::base_name() const { return mode == CompressionMode::WynerZiv ? "wz" : "p2p"; }

namespace {

ScenarioConfig variant_config(const ScenarioConfig& cfg, const Variant& v) {
  ScenarioConfig c = cfg;
  c.compression_mode = v.mode;
  c.covariance_mode = v.covariance;
  return c;
}

VariantOutcome outcome_of(const std::string& name, const RunReport& rep, double millis) {
  VariantOutcome o;
  o.variant = name;
  o.rate_bits = rep.rate_bits();
  o.iterations = static_cast<int>(rep.trace.size());
  o.millis = millis;
  o.termination = rep.termination;
  o.message = rep.message;
  o.accepted_rates_bits = rep.accepted_rates_bits();
  o.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.trace) o.min_slack = std::min(o.min_slack, row.min_slack);
  if (rep.trace.empty()) o.min_slack = min_slack(rep.final_state.slacks);
  o.max_hypograph_error = rep.max_hypograph_error;
  return o;
}

VariantOutcome failed(const std::string& name, const std::string& msg) {
  VariantOutcome o;
  o.variant = name;
  o.termination = Termination::SolverFailure;
  o.message = msg;
  o.rate_bits = std::numeric_limits<double>::quiet_NaN();
  return o;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunReport baseline_random_phase(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts,
                                std::uint64_t drop) {
  RngStream rng(cfg.seed, drop, StreamPurpose::RandomPhases);
  const PhaseConfig phases = PhaseConfig::random(ch.num_elements(), rng);
  DriverOptions o = opts;
  o.optimize_phases = false;
  return run(cfg, ch, o, drop, phases);
}

RunReport baseline_no_irs(const ScenarioConfig& cfg, const ChannelSet& ch, const DriverOptions& opts,
                          std::uint64_t drop) {
  DriverOptions o = opts;
  o.optimize_phases = false;
  return run(cfg, without_irs(ch), o, drop, PhaseConfig::ones(ch.num_elements()));
}

VariantOutcome discrete_from(const ScenarioConfig& cfg, const ChannelSet& ch, const RunReport& continuous, int bits,
                             const std::string& name) {
  const auto t0 = std::chrono::steady_clock::now();
  if (continuous.termination == Termination::SolverFailure)
    return failed(name, "base run failed: " + continuous.message);
  const double power = units::dbm_to_watts(cfg.tx_power_dbm);
  const double noise = units::dbm_to_watts(cfg.noise_power_dbm);
  std::vector<double> caps;
  for (double c : cfg.fronthaul_caps_bits) caps.push_back(units::bits_to_nats(c));
  const PhaseConfig phases = project_discrete(continuous.final_state.phases, bits);
  const CMat v = effective_channel(ch, phases).v;
  const ScaledNoise sn = scale_to_feasible(cfg.compression_mode, v, continuous.final_state.omega, caps, power, noise);
  VariantOutcome o;
  o.variant = name;
  o.rate_bits = units::nats_to_bits(sum_rate(v, sn.omega, power, noise));
  o.iterations = 0;
  o.termination = Termination::Converged;
  o.accepted_rates_bits = {o.rate_bits};
  o.min_slack = min_slack(all_fronthaul_slacks(cfg.compression_mode, v, sn.omega, caps, power, noise));
  o.millis = elapsed_ms(t0);
  return o;
}

std::vector<VariantOutcome> run_variants(const ScenarioConfig& cfg, const ChannelSet& ch,
                                         const std::vector<Variant>& variants, const DriverOptions& opts,
                                         std::uint64_t drop) {
  std::map<std::string, RunReport> optimized;
  auto optimized_run = [&](const Variant& v, double* millis) -> const RunReport& {
    auto it = optimized.find(v.name);
    if (it != optimized.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep = run(variant_config(cfg, v), ch, opts, drop);
    if (millis) *millis = elapsed_ms(t0);
    return optimized.emplace(v.name, std::move(rep)).first->second;
  };

  std::vector<VariantOutcome> out;
  for (const auto& v : variants) {
    try {
      const ScenarioConfig vc = variant_config(cfg, v);
      const auto t0 = std::chrono::steady_clock::now();
      switch (v.kind) {
        case VariantKind::Optimized: {
          double ms = 0.0;
          const RunReport& rep = optimized_run(v, &ms);
          out.push_back(outcome_of(v.name, rep, ms));
          break;
        }
        case VariantKind::Discrete: {
          const RunReport& base = optimized_run(Variant::parse(v.base_name()), nullptr);
          out.push_back(discrete_from(vc, ch, base, v.bits, v.name));
          break;
        }
        case VariantKind::RandomPhase: {
          const RunReport rep = baseline_random_phase(vc, ch, opts, drop);
          out.push_back(outcome_of(v.name, rep, elapsed_ms(t0)));
          break;
        }
        case VariantKind::NoIrs: {
          const RunReport rep = baseline_no_irs(vc, ch, opts, drop);
          out.push_back(outcome_of(v.name, rep, elapsed_ms(t0)));
          break;
        }
      }
    } catch (const Error& e) {
      out.push_back(failed(v.name, e.what()));
    }
  }
  return out;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::ElementsPerIrs: return "N_I";
    case SweepParameter::Capacity: return "C";
    case SweepParameter::Power: return "P";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "N_I" || s == "n_i" || s == "elements_per_irs") return SweepParameter::ElementsPerIrs;
  if (s == "C" || s == "c" || s == "fronthaul_caps_bits") return SweepParameter::Capacity;
  if (s == "P" || s == "p" || s == "tx_power_dbm") return SweepParameter::Power;
  throw ConfigError("unknown sweep parameter '" + s + "'");
}

void apply_sweep_value(ScenarioConfig& cfg, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::ElementsPerIrs:
      if (value != std::round(value) || value < 1) throw ConfigError("N_I sweep values must be positive integers");
      cfg.elements_per_irs = static_cast<int>(value);
      break;
    case SweepParameter::Capacity:
      std::fill(cfg.fronthaul_caps_bits.begin(), cfg.fronthaul_caps_bits.end(), value);
      break;
    case SweepParameter::Power: cfg.tx_power_dbm = value; break;
  }
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep: value list is empty");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw ConfigError("sweep: values must be strictly increasing");
  if (drops < 1) throw ConfigError("sweep: drops must be >= 1");
  if (variants.empty()) throw ConfigError("sweep: no variants");
  if (threads < 0) throw ConfigError("sweep: threads must be >= 0");
  for (const auto& v : variants) (void)Variant::parse(v);
}

const AggregateRow& SweepResult::row(const std::string& variant, double value) const {
  for (const auto& r : rows)
    if (r.variant == variant && r.value == value) return r;
  throw ConfigError("sweep result has no row for " + variant);
}

std::vector<double> SweepResult::means(const std::string& variant) const {
  std::vector<double> out;
  for (double v : spec.values) out.push_back(row(variant, v).mean_rate_bits);
  return out;
}

SweepResult sweep(const SweepSpec& spec, const ScenarioConfig& cfg, const DriverOptions& opts) {
  spec.validate();
  std::vector<Variant> variants;
  for (const auto& name : spec.variants) variants.push_back(Variant::parse(name));

  const std::size_t nv = spec.values.size();
  const std::size_t nd = static_cast<std::size_t>(spec.drops);
  std::vector<ScenarioConfig> cfgs(nv, cfg);
  for (std::size_t i = 0; i < nv; ++i) {
    apply_sweep_value(cfgs[i], spec.parameter, spec.values[i]);
    cfgs[i].validate();
  }

  std::vector<std::vector<VariantOutcome>> results(nv * nd);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t task = next++; task < results.size(); task = next++) {
      const std::size_t vi = task / nd;
      const std::uint64_t drop = task % nd;
      try {
        const Drop dr = draw_drop(cfgs[vi], drop);
        results[task] = run_variants(cfgs[vi], dr.channels, variants, opts, drop);
      } catch (const Error& e) {
        results[task].clear();
        for (const auto& v : variants) results[task].push_back(failed(v.name, e.what()));
      }
    }
  };
  unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(results.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult res;
  res.spec = spec;
  for (std::size_t vi = 0; vi < nv; ++vi) {
    for (std::size_t d = 0; d < nd; ++d)
      for (const auto& o : results[vi * nd + d]) res.runs.push_back({spec.values[vi], d, o});
    for (std::size_t k = 0; k < variants.size(); ++k) {
      AggregateRow row;
      row.variant = variants[k].name;
      row.value = spec.values[vi];
      std::vector<double> rates;
      for (std::size_t d = 0; d < nd; ++d) {
        const VariantOutcome& o = results[vi * nd + d][k];
        if (!o.ok()) {
          ++row.failures;
          continue;
        }
        rates.push_back(o.rate_bits);
        row.mean_iterations += o.iterations;
        row.mean_millis += o.millis;
      }
      row.runs = static_cast<int>(rates.size());
      if (row.runs > 0) {
        double sum = 0.0;
        for (double r : rates) sum += r;
        row.mean_rate_bits = sum / row.runs;
        row.mean_iterations /= row.runs;
        row.mean_millis /= row.runs;
        if (row.runs > 1) {
          double ss = 0.0;
          for (double r : rates) ss += (r - row.mean_rate_bits) * (r - row.mean_rate_bits);
          row.stderr_bits = std::sqrt(ss / (row.runs - 1) / row.runs);
        }
      }
      res.failures += row.failures;
      res.rows.push_back(row);
    }
  }
  return res;
}

void write_sweep_csv(std::ostream& out, const SweepResult& res, std::uint64_t seed) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# cranirs-sweep v1 parameter=" << to_string(res.spec.parameter) << " drops=" << res.spec.drops
      << " seed=" << seed << '\n';
  out << "variant,value,mean_rate_bits,stderr_bits,mean_iterations,runs,failures\n";
  for (const auto& r : res.rows)
    out << r.variant << ',' << r.value << ',' << r.mean_rate_bits << ',' << r.stderr_bits << ',' << r.mean_iterations
        << ',' << r.runs << ',' << r.failures << '\n';
  out.precision(old);
}

void write_runs_csv(std::ostream& out, const SweepResult& res) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# cranirs-runs v1 parameter=" << to_string(res.spec.parameter) << '\n';
  out << "value,drop,variant,rate_bits,iterations,termination,min_slack_nats\n";
  for (const auto& r : res.runs)
    out << r.value << ',' << r.drop << ',' << r.outcome.variant << ',' << r.outcome.rate_bits << ','
        << r.outcome.iterations << ',' << to_string(r.outcome.termination) << ',' << r.outcome.min_slack << '\n';
  out.precision(old);
}

void write_timing_csv(std::ostream& out, const SweepResult& res) {
  out << "# cranirs-timing v1\n";
  out << "variant,value,mean_millis\n";
  for (const auto& r : res.rows) out << r.variant << ',' << r.value << ',' << r.mean_millis << '\n';
}

void write_plot_script(std::ostream& out, const SweepResult& res, const std::string& csv_name) {
  const std::string xlabel = res.spec.parameter == SweepParameter::ElementsPerIrs ? "N_I (elements per IRS)"
                             : res.spec.parameter == SweepParameter::Capacity     ? "C (bits/s/Hz)"
                                                                                  : "P (dBm)";
  out << "# gnuplot -persist <this file>\n";
  out << "set datafile separator ','\n";
  out << "set key left top\n";
  out << "set grid\n";
  out << "set xlabel '" << xlabel << "'\n";
  out << "set ylabel 'average sum rate (bits/s/Hz)'\n";
  out << "plot \\\n";
  for (std::size_t i = 0; i < res.spec.variants.size(); ++i) {
    const std::string& v = res.spec.variants[i];
    out << "  '" << csv_name << "' using 2:(strcol(1) eq '" << v << "' ? $3 : 1/0):4 with yerrorlines title '" << v
        << "'" << (i + 1 < res.spec.variants.size() ? ", \\" : "") << '\n';
  }
}

}  // namespace cranirs
