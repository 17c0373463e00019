// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cranirs/driver.hpp"
#include "cranirs/experiment.hpp"

namespace py = pybind11;
using namespace cranirs;

namespace {

QuantNoise noise_from(const std::vector<CMat>& blocks) {
  QuantNoise q;
  q.blocks = blocks;
  q.validate();
  return q;
}

py::dict report_dict(const RunReport& r) {
  py::list trace;
  for (const auto& row : r.trace) {
    py::dict d;
    d["iteration"] = row.iteration;
    d["rate_bits"] = row.rate_bits;
    d["surrogate"] = row.surrogate;
    d["rank_gap"] = row.rank_gap;
    d["millis"] = row.millis;
    d["accepted"] = row.accepted;
    d["min_slack_nats"] = row.min_slack;
    trace.append(d);
  }
  py::dict out;
  out["rate_bits"] = r.rate_bits();
  out["initial_rate_bits"] = r.initial_rate_bits;
  out["termination"] = to_string(r.termination);
  out["message"] = r.message;
  out["trace"] = trace;
  out["phases"] = r.final_state.phases.theta;
  out["omega"] = r.final_state.omega.blocks;
  out["max_hypograph_error"] = r.max_hypograph_error;
  return out;
}

DriverOptions driver_options(int max_iters, double rel_tol, int candidates) {
  DriverOptions o;
  o.max_iters = max_iters;
  o.rel_tol = rel_tol;
  o.num_candidates = candidates;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint IRS phase and fronthaul compression design for C-RAN uplink";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<InfiniteRateError>(m, "InfiniteRateError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("default_config", [] { return format_config(default_paper_scenario()); },
        "Reference scenario as a JSON string.");
  m.def("normalize_config", [](const std::string& text) { return format_config(parse_config(text)); },
        py::arg("json"), "Fill defaults and validate; returns the full JSON.");

  py::class_<ChannelSet>(m, "ChannelSet")
      .def(py::init<>())
      .def_readwrite("h_l", &ChannelSet::h_l)
      .def_readwrite("g_l", &ChannelSet::g_l)
      .def_readwrite("h_rm", &ChannelSet::h_rm)
      .def_readwrite("num_rrhs", &ChannelSet::num_rrhs)
      .def_readwrite("antennas_per_rrh", &ChannelSet::antennas_per_rrh)
      .def("without_irs", [](const ChannelSet& c) { return without_irs(c); })
      .def("to_csv", [](const ChannelSet& c) {
        std::ostringstream os;
        write_channel_csv(os, c);
        return os.str();
      })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream is(text);
        return read_channel_csv(is);
      });

  m.def("draw_drop", [](const std::string& cfg, std::uint64_t drop) {
    const Drop d = draw_drop(parse_config(cfg), drop);
    std::vector<std::pair<double, double>> users;
    for (const auto& u : d.users) users.emplace_back(u.x, u.y);
    return py::make_tuple(d.channels, users);
  }, py::arg("config"), py::arg("drop") = 0, "Channel realization and user positions for one drop.");

  m.def("effective_channel", [](const ChannelSet& ch, const CVec& theta) {
    return effective_channel(ch, PhaseConfig{theta}).v;
  }, py::arg("channels"), py::arg("theta"));

  m.def("sum_rate", [](const CMat& v, const std::vector<CMat>& omega, double power, double noise) {
    return sum_rate(v, noise_from(omega), power, noise);
  }, py::arg("v"), py::arg("omega"), py::arg("power") = 1.0, py::arg("noise") = 1.0, "Sum rate in nats.");
  m.def("p2p_lhs", [](const CMat& v, const CMat& omega, double power, double noise) {
    return p2p_lhs(v, omega, power, noise);
  }, py::arg("v"), py::arg("omega"), py::arg("power") = 1.0, py::arg("noise") = 1.0);
  m.def("wz_lhs", [](std::uint32_t mask, const CMat& v, const std::vector<CMat>& omega, double power, double noise) {
    const QuantNoise q = noise_from(omega);
    return wz_lhs({mask, q.num_rrhs()}, v, q, power, noise);
  }, py::arg("mask"), py::arg("v"), py::arg("omega"), py::arg("power") = 1.0, py::arg("noise") = 1.0);
  m.def("fronthaul_slacks", [](const std::string& mode, const CMat& v, const std::vector<CMat>& omega,
                               const std::vector<double>& caps_nats, double power, double noise) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& s : all_fronthaul_slacks(parse_compression_mode(mode), v, noise_from(omega), caps_nats, power, noise))
      out.emplace_back(s.id, s.slack);
    return out;
  }, py::arg("mode"), py::arg("v"), py::arg("omega"), py::arg("caps_nats"), py::arg("power") = 1.0,
     py::arg("noise") = 1.0);

  m.def("run", [](const std::string& cfg, const ChannelSet& ch, std::uint64_t drop, int max_iters, double rel_tol,
                  int candidates) {
    const ScenarioConfig c = parse_config(cfg);
    py::gil_scoped_release release;
    RunReport r = run(c, ch, driver_options(max_iters, rel_tol, candidates), drop);
    py::gil_scoped_acquire acquire;
    return report_dict(r);
  }, py::arg("config"), py::arg("channels"), py::arg("drop") = 0, py::arg("max_iters") = 100,
     py::arg("rel_tol") = 1e-4, py::arg("candidates") = 200);

  m.def("first_relaxation", [](const std::string& cfg, const ChannelSet& ch, std::uint64_t drop) {
    const ScenarioConfig c = parse_config(cfg);
    const IterateState st = initialize(c, ch, drop);
    const ConicProblem prob = conic_problem_at(c, ch, st);
    const double noise_w = units::dbm_to_watts(c.noise_power_dbm);
    const RelaxationResult r = solve_relaxation(prob, st.phases.lifted(), st.omega.scaled(1.0 / noise_w));
    std::ostringstream os;
    write_conic_problem(os, prob);
    py::dict out;
    out["problem"] = os.str();
    out["objective"] = r.objective;
    out["theta_bar"] = r.theta_bar;
    out["omega"] = r.omega.blocks;
    out["lhs"] = r.lhs;
    return out;
  }, py::arg("config"), py::arg("channels"), py::arg("drop") = 0,
     "Relaxed conic problem at the initial point: its text dump and the interior-point solution.");

  m.def("sweep", [](const std::string& cfg, const std::string& parameter, const std::vector<double>& values, int drops,
                    const std::vector<std::string>& variants, int threads) {
    SweepSpec spec;
    spec.parameter = parse_sweep_parameter(parameter);
    spec.values = values;
    spec.drops = drops;
    spec.variants = variants;
    spec.threads = threads;
    const ScenarioConfig c = parse_config(cfg);
    SweepResult res;
    {
      py::gil_scoped_release release;
      res = sweep(spec, c);
    }
    std::ostringstream os;
    write_sweep_csv(os, res, c.seed);
    return os.str();
  }, py::arg("config"), py::arg("parameter"), py::arg("values"), py::arg("drops") = 20,
     py::arg("variants") = std::vector<std::string>{"wz", "p2p"}, py::arg("threads") = 0,
     "Paired sweep; returns the aggregate CSV text.");
}
