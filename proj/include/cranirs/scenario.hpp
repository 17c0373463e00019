// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration, unit conversions and seeded random streams.
//
// Physical quantities are stored in the units users think in (dBm, dB,
// bits/s/Hz, meters). Everything downstream of the scenario works in linear
// units and nats; the conversions live here.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cranirs {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

enum class CompressionMode { WynerZiv, PointToPoint };
enum class CovarianceMode { Full, ScalarBeta };

std::string to_string(CompressionMode m);
std::string to_string(CovarianceMode m);
CompressionMode parse_compression_mode(const std::string& s);
CovarianceMode parse_covariance_mode(const std::string& s);

struct PathlossExponents {
  double user_rrh = 3.6;
  double user_irs = 2.2;
  double irs_rrh = 2.2;
};

struct ScenarioConfig {
  int num_users = 4;          // K
  int num_rrhs = 2;           // L
  int num_irs = 2;            // M
  int antennas_per_rrh = 4;   // N_R
  int elements_per_irs = 20;  // N_I
  double tx_power_dbm = 10.0;
  double noise_power_dbm = -89.0;
  std::vector<double> fronthaul_caps_bits{5.0, 5.0};  // C_l, bits/s/Hz
  double pathloss_ref_db = -30.0;                     // xi
  PathlossExponents exponents;
  double rician_factor_db = 10.0;
  double user_disk_radius = 30.0;
  Point2 user_disk_center{0.0, 0.0};
  std::vector<Point2> rrh_positions{{-30.0, 90.0}, {30.0, 90.0}};
  std::vector<Point2> irs_positions{{-40.0, 80.0}, {40.0, 80.0}};
  std::optional<int> phase_bits;  // empty: continuous phases
  std::uint64_t seed = 1;
  CompressionMode compression_mode = CompressionMode::WynerZiv;
  CovarianceMode covariance_mode = CovarianceMode::Full;
  double array_spacing_wavelengths = 0.5;  // ULA element spacing at RRHs and IRSs

  int num_elements() const { return num_irs * elements_per_irs; }
  int total_antennas() const { return num_rrhs * antennas_per_rrh; }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// The desk-scale version of the reference scenario: 4 users in a 30 m disk,
/// two 4-antenna RRHs, two IRSs, P = 10 dBm, C_l = 5 bits/s/Hz.
ScenarioConfig default_paper_scenario();

/// Parse a JSON config; keys not present keep the values from `base`.
ScenarioConfig parse_config(const std::string& json_text, const ScenarioConfig& base = default_paper_scenario());
ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base = default_paper_scenario());
std::string format_config(const ScenarioConfig& cfg);

namespace units {

inline constexpr double kLn2 = 0.69314718055994530942;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double lin);
inline double bits_to_nats(double bits) { return bits * kLn2; }
inline double nats_to_bits(double nats) { return nats / kLn2; }

}  // namespace units

/// Independent random streams derived from one master seed. A stream is
/// addressed by (drop index, purpose) so that adding drops or purposes never
/// perturbs existing streams.
enum class StreamPurpose : std::uint64_t {
  Positions = 1,
  Channel = 2,
  InitialPhases = 3,
  Rounding = 4,
  RandomPhases = 5,
  Test = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t drop, StreamPurpose purpose);

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// K points, area-uniform over the configured disk.
std::vector<Point2> sample_user_positions(const ScenarioConfig& cfg, RngStream& rng);

}  // namespace cranirs
