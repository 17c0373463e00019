// SPDX-License-Identifier: Apache-2.0

#include "cranirs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cranirs/linalg.hpp"
#include "json.hpp"

namespace cranirs {

using nlohmann::json;

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string to_string(CompressionMode m) {
  return m == CompressionMode::WynerZiv ? "wyner-ziv" : "point-to-point";
}

std::string to_string(CovarianceMode m) { return m == CovarianceMode::Full ? "full" : "scalar-beta"; }

CompressionMode parse_compression_mode(const std::string& s) {
  if (s == "wyner-ziv" || s == "wz") return CompressionMode::WynerZiv;
  if (s == "point-to-point" || s == "p2p") return CompressionMode::PointToPoint;
  throw ConfigError("unknown compression_mode '" + s + "'");
}

CovarianceMode parse_covariance_mode(const std::string& s) {
  if (s == "full") return CovarianceMode::Full;
  if (s == "scalar-beta" || s == "scalar") return CovarianceMode::ScalarBeta;
  throw ConfigError("unknown covariance_mode '" + s + "'");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid scenario: " + msg); };
  if (num_users < 1) fail("num_users must be >= 1");
  if (num_rrhs < 1) fail("num_rrhs must be >= 1");
  if (num_rrhs > 8) fail("num_rrhs must be <= 8 (subset enumeration is 2^L - 1)");
  if (num_irs < 1) fail("num_irs must be >= 1");
  if (antennas_per_rrh < 1) fail("antennas_per_rrh must be >= 1");
  if (elements_per_irs < 1) fail("elements_per_irs must be >= 1");
  if (!std::isfinite(tx_power_dbm)) fail("tx_power_dbm must be finite");
  if (!std::isfinite(noise_power_dbm)) fail("noise_power_dbm must be finite");
  if (static_cast<int>(fronthaul_caps_bits.size()) != num_rrhs) fail("fronthaul_caps_bits needs one entry per RRH");
  for (double c : fronthaul_caps_bits)
    if (!(c > 0.0)) fail("fronthaul capacities must be > 0");
  if (!(pathloss_ref_db < 0.0)) fail("pathloss_ref_db must be < 0 dB");
  if (static_cast<int>(rrh_positions.size()) != num_rrhs) fail("rrh_positions needs one entry per RRH");
  if (static_cast<int>(irs_positions.size()) != num_irs) fail("irs_positions needs one entry per IRS");
  if (!(user_disk_radius >= 0.0)) fail("user_disk_radius must be >= 0");
  if (phase_bits && *phase_bits < 1) fail("phase_bits must be >= 1");
  if (!(array_spacing_wavelengths > 0.0)) fail("array_spacing_wavelengths must be > 0");
}

ScenarioConfig default_paper_scenario() { return ScenarioConfig{}; }

namespace {

json point_list(const std::vector<Point2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point2> parse_points(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + " must be a list of [x, y] pairs");
  std::vector<Point2> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError(std::string(key) + " entries must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text, const ScenarioConfig& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ScenarioConfig cfg = base;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "num_users") cfg.num_users = v.get<int>();
      else if (key == "num_rrhs") cfg.num_rrhs = v.get<int>();
      else if (key == "num_irs") cfg.num_irs = v.get<int>();
      else if (key == "antennas_per_rrh") cfg.antennas_per_rrh = v.get<int>();
      else if (key == "elements_per_irs") cfg.elements_per_irs = v.get<int>();
      else if (key == "tx_power_dbm") cfg.tx_power_dbm = v.get<double>();
      else if (key == "noise_power_dbm") cfg.noise_power_dbm = v.get<double>();
      else if (key == "fronthaul_caps_bits") cfg.fronthaul_caps_bits = v.get<std::vector<double>>();
      else if (key == "pathloss_ref_db") cfg.pathloss_ref_db = v.get<double>();
      else if (key == "pathloss_exponents") {
        if (v.contains("user_rrh")) cfg.exponents.user_rrh = v["user_rrh"].get<double>();
        if (v.contains("user_irs")) cfg.exponents.user_irs = v["user_irs"].get<double>();
        if (v.contains("irs_rrh")) cfg.exponents.irs_rrh = v["irs_rrh"].get<double>();
      } else if (key == "rician_factor_db") cfg.rician_factor_db = v.get<double>();
      else if (key == "user_disk_radius") cfg.user_disk_radius = v.get<double>();
      else if (key == "user_disk_center") {
        auto pts = parse_points(json::array({v}), "user_disk_center");
        cfg.user_disk_center = pts.front();
      } else if (key == "rrh_positions") cfg.rrh_positions = parse_points(v, "rrh_positions");
      else if (key == "irs_positions") cfg.irs_positions = parse_points(v, "irs_positions");
      else if (key == "phase_bits") {
        if (v.is_string()) {
          if (v.get<std::string>() != "continuous") throw ConfigError("phase_bits must be an integer or \"continuous\"");
          cfg.phase_bits.reset();
        } else {
          cfg.phase_bits = v.get<int>();
        }
      } else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "compression_mode") cfg.compression_mode = parse_compression_mode(v.get<std::string>());
      else if (key == "covariance_mode") cfg.covariance_mode = parse_covariance_mode(v.get<std::string>());
      else if (key == "array_spacing_wavelengths") cfg.array_spacing_wavelengths = v.get<double>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string format_config(const ScenarioConfig& cfg) {
  json j;
  j["num_users"] = cfg.num_users;
  j["num_rrhs"] = cfg.num_rrhs;
  j["num_irs"] = cfg.num_irs;
  j["antennas_per_rrh"] = cfg.antennas_per_rrh;
  j["elements_per_irs"] = cfg.elements_per_irs;
  j["tx_power_dbm"] = cfg.tx_power_dbm;
  j["noise_power_dbm"] = cfg.noise_power_dbm;
  j["fronthaul_caps_bits"] = cfg.fronthaul_caps_bits;
  j["pathloss_ref_db"] = cfg.pathloss_ref_db;
  j["pathloss_exponents"] = {{"user_rrh", cfg.exponents.user_rrh},
                             {"user_irs", cfg.exponents.user_irs},
                             {"irs_rrh", cfg.exponents.irs_rrh}};
  j["rician_factor_db"] = cfg.rician_factor_db;
  j["user_disk_radius"] = cfg.user_disk_radius;
  j["user_disk_center"] = {cfg.user_disk_center.x, cfg.user_disk_center.y};
  j["rrh_positions"] = point_list(cfg.rrh_positions);
  j["irs_positions"] = point_list(cfg.irs_positions);
  if (cfg.phase_bits) j["phase_bits"] = *cfg.phase_bits;
  else j["phase_bits"] = "continuous";
  j["seed"] = cfg.seed;
  j["compression_mode"] = to_string(cfg.compression_mode);
  j["covariance_mode"] = to_string(cfg.covariance_mode);
  j["array_spacing_wavelengths"] = cfg.array_spacing_wavelengths;
  return j.dump(2);
}

namespace units {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace units

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master, std::uint64_t drop, StreamPurpose purpose)
    : engine_(splitmix64(splitmix64(splitmix64(master) ^ drop) ^ static_cast<std::uint64_t>(purpose))) {}

std::vector<Point2> sample_user_positions(const ScenarioConfig& cfg, RngStream& rng) {
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(cfg.num_users));
  for (int k = 0; k < cfg.num_users; ++k) {
    // sqrt of a uniform gives an area-uniform radius
    const double r = cfg.user_disk_radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    pts.push_back({cfg.user_disk_center.x + r * std::cos(phi), cfg.user_disk_center.y + r * std::sin(phi)});
  }
  return pts;
}

}  // namespace cranirs
