// SPDX-License-Identifier: Apache-2.0
//
// cranirs run | sweep | converge

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cranirs/experiment.hpp"

namespace {

using namespace cranirs;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Overrides {
  std::string config_path;
  std::optional<int> num_users, num_rrhs, num_irs, antennas_per_rrh, elements_per_irs;
  std::optional<double> tx_power_dbm, noise_power_dbm, pathloss_ref_db, rician_factor_db, user_disk_radius;
  std::optional<double> array_spacing;
  std::vector<double> caps;
  std::optional<std::string> phase_bits;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> compression_mode, covariance_mode;

  int max_iters = 100;
  double rel_tol = 1e-4;
  int candidates = 200;
};

void add_config_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON scenario file; flags override its values");
  app->add_option("--num-users", o.num_users, "K");
  app->add_option("--num-rrhs", o.num_rrhs, "L");
  app->add_option("--num-irs", o.num_irs, "M");
  app->add_option("--antennas-per-rrh", o.antennas_per_rrh, "N_R");
  app->add_option("--elements-per-irs", o.elements_per_irs, "N_I");
  app->add_option("--tx-power-dbm", o.tx_power_dbm, "P");
  app->add_option("--noise-power-dbm", o.noise_power_dbm, "sigma^2");
  app->add_option("--caps", o.caps, "C_l in bits/s/Hz; one value applies to every RRH");
  app->add_option("--pathloss-ref-db", o.pathloss_ref_db);
  app->add_option("--rician-factor-db", o.rician_factor_db);
  app->add_option("--user-disk-radius", o.user_disk_radius);
  app->add_option("--array-spacing", o.array_spacing, "ULA spacing in wavelengths");
  app->add_option("--phase-bits", o.phase_bits, "integer or 'continuous'");
  app->add_option("--seed", o.seed);
  app->add_option("--compression-mode", o.compression_mode, "wz | p2p");
  app->add_option("--covariance-mode", o.covariance_mode, "full | scalar");
  app->add_option("--max-iters", o.max_iters)->check(CLI::NonNegativeNumber);
  app->add_option("--rel-tol", o.rel_tol)->check(CLI::NonNegativeNumber);
  app->add_option("--candidates", o.candidates, "randomization draws per iteration")->check(CLI::PositiveNumber);
}

ScenarioConfig build_config(const Overrides& o) {
  ScenarioConfig cfg = o.config_path.empty() ? default_paper_scenario() : load_config(o.config_path);
  if (o.num_users) cfg.num_users = *o.num_users;
  if (o.num_rrhs) cfg.num_rrhs = *o.num_rrhs;
  if (o.num_irs) cfg.num_irs = *o.num_irs;
  if (o.antennas_per_rrh) cfg.antennas_per_rrh = *o.antennas_per_rrh;
  if (o.elements_per_irs) cfg.elements_per_irs = *o.elements_per_irs;
  if (o.tx_power_dbm) cfg.tx_power_dbm = *o.tx_power_dbm;
  if (o.noise_power_dbm) cfg.noise_power_dbm = *o.noise_power_dbm;
  if (o.pathloss_ref_db) cfg.pathloss_ref_db = *o.pathloss_ref_db;
  if (o.rician_factor_db) cfg.rician_factor_db = *o.rician_factor_db;
  if (o.user_disk_radius) cfg.user_disk_radius = *o.user_disk_radius;
  if (o.array_spacing) cfg.array_spacing_wavelengths = *o.array_spacing;
  if (o.caps.size() == 1) cfg.fronthaul_caps_bits.assign(static_cast<std::size_t>(cfg.num_rrhs), o.caps.front());
  else if (!o.caps.empty()) cfg.fronthaul_caps_bits = o.caps;
  if (o.phase_bits) {
    if (*o.phase_bits == "continuous") {
      cfg.phase_bits.reset();
    } else {
      try {
        cfg.phase_bits = std::stoi(*o.phase_bits);
      } catch (const std::exception&) {
        throw ConfigError("--phase-bits must be an integer or 'continuous'");
      }
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.compression_mode) cfg.compression_mode = parse_compression_mode(*o.compression_mode);
  if (o.covariance_mode) cfg.covariance_mode = parse_covariance_mode(*o.covariance_mode);
  cfg.validate();
  return cfg;
}

DriverOptions driver_options(const Overrides& o) {
  DriverOptions d;
  d.max_iters = o.max_iters;
  d.rel_tol = o.rel_tol;
  d.num_candidates = o.candidates;
  return d;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return f;
}

std::vector<std::string> split_variants(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(',', start);
    const std::string item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!item.empty()) out.push_back(item);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

struct RunArgs {
  std::uint64_t drop = 0;
  std::string out;
  std::string dump_channel;
  std::string dump_conic;
};

int cmd_run(const Overrides& o, const RunArgs& a) {
  const ScenarioConfig cfg = build_config(o);
  const Drop dr = draw_drop(cfg, a.drop);
  if (!a.dump_channel.empty()) {
    auto f = open_out(a.dump_channel);
    write_channel_csv(f, dr.channels);
  }
  if (!a.dump_conic.empty()) {
    auto f = open_out(a.dump_conic);
    write_conic_problem(f, conic_problem_at(cfg, dr.channels, initialize(cfg, dr.channels, a.drop)));
  }
  const RunReport rep = run(cfg, dr.channels, driver_options(o), a.drop);
  if (a.out.empty()) {
    rep.write_csv(std::cout);
  } else {
    auto f = open_out(a.out);
    rep.write_csv(f);
  }
  std::cerr << "rate " << rep.rate_bits() << " bits/s/Hz after " << rep.trace.size() << " iterations ("
            << to_string(rep.termination) << ")\n";
  if (cfg.phase_bits) {
    const VariantOutcome d = discrete_from(cfg, dr.channels, rep, *cfg.phase_bits, "discrete");
    std::cerr << "rate with " << *cfg.phase_bits << "-bit phases " << d.rate_bits << " bits/s/Hz\n";
  }
  if (rep.termination == Termination::SolverFailure) {
    std::cerr << "solver failure: " << rep.message << '\n';
    return kExitSolver;
  }
  return 0;
}

struct SweepArgs {
  std::string parameter = "N_I";
  std::vector<double> values{10, 20, 30};
  int drops = 20;
  std::string variants = "wz,p2p,wz-approx,p2p-approx,wz-2bit,random-phase,no-irs";
  int threads = 0;
  std::string out = "sweep";
};

int cmd_sweep(const Overrides& o, const SweepArgs& a) {
  const ScenarioConfig cfg = build_config(o);
  SweepSpec spec;
  spec.parameter = parse_sweep_parameter(a.parameter);
  spec.values = a.values;
  spec.drops = a.drops;
  spec.variants = split_variants(a.variants);
  spec.threads = a.threads;
  spec.validate();
  const SweepResult res = sweep(spec, cfg, driver_options(o));
  const std::string csv = a.out + ".csv";
  {
    auto f = open_out(csv);
    write_sweep_csv(f, res, cfg.seed);
  }
  {
    auto f = open_out(a.out + ".runs.csv");
    write_runs_csv(f, res);
  }
  {
    auto f = open_out(a.out + ".timing.csv");
    write_timing_csv(f, res);
  }
  {
    auto f = open_out(a.out + ".gp");
    const std::size_t slash = csv.find_last_of('/');
    write_plot_script(f, res, slash == std::string::npos ? csv : csv.substr(slash + 1));
  }
  for (const auto& r : res.rows)
    std::cerr << r.variant << " " << to_string(spec.parameter) << "=" << r.value << ": " << r.mean_rate_bits << " +- "
              << r.stderr_bits << " bits/s/Hz\n";
  if (res.failures > 0) {
    std::cerr << res.failures << " run(s) failed\n";
    for (const auto& r : res.runs)
      if (!r.outcome.ok())
        std::cerr << "  " << r.outcome.variant << " value " << r.value << " drop " << r.drop << ": "
                  << r.outcome.message << '\n';
    return kExitSolver;
  }
  return 0;
}

struct ConvergeArgs {
  std::vector<int> elements{10, 20, 30};
  int drops = 5;
  std::string variants = "wz,p2p,wz-approx,p2p-approx";
  std::string out = "converge.csv";
};

// mean rate per iteration index, each run held at its last value after it stops
int cmd_converge(const Overrides& o, const ConvergeArgs& a) {
  const ScenarioConfig base = build_config(o);
  const DriverOptions opts = driver_options(o);
  auto f = open_out(a.out);
  f.precision(17);
  f << "# cranirs-converge v1 drops=" << a.drops << " seed=" << base.seed << '\n';
  f << "variant,N_I,iteration,mean_rate_bits\n";
  int failures = 0;
  for (int n : a.elements) {
    ScenarioConfig cfg = base;
    cfg.elements_per_irs = n;
    cfg.validate();
    for (const auto& name : split_variants(a.variants)) {
      const Variant v = Variant::parse(name);
      if (v.kind != VariantKind::Optimized) throw ConfigError("converge: '" + name + "' is not an optimized variant");
      ScenarioConfig vc = cfg;
      vc.compression_mode = v.mode;
      vc.covariance_mode = v.covariance;
      std::vector<std::vector<double>> traces;
      for (int d = 0; d < a.drops; ++d) {
        const Drop dr = draw_drop(vc, static_cast<std::uint64_t>(d));
        const RunReport rep = run(vc, dr.channels, opts, static_cast<std::uint64_t>(d));
        if (rep.termination == Termination::SolverFailure) {
          ++failures;
          std::cerr << name << " N_I=" << n << " drop " << d << ": " << rep.message << '\n';
          continue;
        }
        std::vector<double> t{rep.initial_rate_bits};
        for (const auto& row : rep.trace) t.push_back(row.rate_bits);
        traces.push_back(std::move(t));
      }
      if (traces.empty()) continue;
      std::size_t len = 0;
      for (const auto& t : traces) len = std::max(len, t.size());
      for (std::size_t i = 0; i < len; ++i) {
        double s = 0.0;
        for (const auto& t : traces) s += t[std::min(i, t.size() - 1)];
        f << name << ',' << n << ',' << i << ',' << s / static_cast<double>(traces.size()) << '\n';
      }
      std::cerr << name << " N_I=" << n << " done\n";
    }
  }
  return failures > 0 ? kExitSolver : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-aided C-RAN uplink: joint phase and fronthaul compression design"};
  app.require_subcommand(1);
  Overrides o;
  RunArgs run_args;
  SweepArgs sweep_args;
  ConvergeArgs conv_args;

  auto* run_cmd = app.add_subcommand("run", "one drop, full iteration trace as CSV");
  add_config_flags(run_cmd, o);
  run_cmd->add_option("--drop", run_args.drop, "drop index");
  run_cmd->add_option("--out", run_args.out, "trace CSV (default stdout)");
  run_cmd->add_option("--dump-channel", run_args.dump_channel, "write the channel realization");
  run_cmd->add_option("--dump-conic", run_args.dump_conic, "write the first relaxed problem");

  auto* sweep_cmd = app.add_subcommand("sweep", "paired-drop sweep over N_I, C or P");
  add_config_flags(sweep_cmd, o);
  sweep_cmd->add_option("--param", sweep_args.parameter, "N_I | C | P");
  sweep_cmd->add_option("--values", sweep_args.values, "strictly increasing values");
  sweep_cmd->add_option("--drops", sweep_args.drops)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--variants", sweep_args.variants, "comma separated");
  sweep_cmd->add_option("--threads", sweep_args.threads, "0: hardware concurrency")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--out", sweep_args.out, "output prefix (.csv, .runs.csv, .timing.csv, .gp)");

  auto* conv_cmd = app.add_subcommand("converge", "average rate per iteration for a list of N_I");
  add_config_flags(conv_cmd, o);
  conv_cmd->add_option("--elements", conv_args.elements, "N_I values");
  conv_cmd->add_option("--drops", conv_args.drops)->check(CLI::PositiveNumber);
  conv_cmd->add_option("--variants", conv_args.variants, "comma separated");
  conv_cmd->add_option("--out", conv_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(o, run_args);
    if (*sweep_cmd) return cmd_sweep(o, sweep_args);
    return cmd_converge(o, conv_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}
