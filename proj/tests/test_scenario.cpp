// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "cranirs/linalg.hpp"
#include "cranirs/scenario.hpp"
#include "support.hpp"

using namespace cranirs;
using namespace cranirs::testing;

TEST_CASE("reference scenario values") {
  const ScenarioConfig cfg = default_paper_scenario();
  REQUIRE(cfg.rrh_positions.size() == 2);
  CHECK(cfg.rrh_positions[0].x == -30.0);
  CHECK(cfg.rrh_positions[0].y == 90.0);
  CHECK(cfg.rrh_positions[1].x == 30.0);
  CHECK(cfg.rrh_positions[1].y == 90.0);
  CHECK(cfg.irs_positions[0].x == -40.0);
  CHECK(cfg.irs_positions[1].x == 40.0);
  CHECK(cfg.irs_positions[1].y == 80.0);
  CHECK(cfg.exponents.user_rrh == 3.6);
  CHECK(cfg.exponents.user_irs == 2.2);
  CHECK(cfg.exponents.irs_rrh == 2.2);
  CHECK(cfg.noise_power_dbm == -89.0);
  CHECK(cfg.pathloss_ref_db == -30.0);
  CHECK(cfg.rician_factor_db == 10.0);
  CHECK(cfg.num_rrhs == 2);
  CHECK(cfg.antennas_per_rrh == 4);
  CHECK(cfg.tx_power_dbm == 10.0);
  CHECK(cfg.fronthaul_caps_bits == std::vector<double>{5.0, 5.0});
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unit conversions") {
  CHECK(units::dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(units::dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  for (double p : {-120.0, -89.0, 0.0, 10.0, 47.3}) CHECK(std::abs(units::watts_to_dbm(units::dbm_to_watts(p)) - p) < 1e-12);
  CHECK(std::abs(units::linear_to_db(units::db_to_linear(-30.0)) + 30.0) < 1e-12);
  CHECK(units::nats_to_bits(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(units::bits_to_nats(units::nats_to_bits(3.7)) == doctest::Approx(3.7).epsilon(1e-15));
}

TEST_CASE("validation rejects inconsistent configs") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.num_rrhs = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_paper_scenario();
  cfg.fronthaul_caps_bits = {5.0, 0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_paper_scenario();
  cfg.elements_per_irs = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = default_paper_scenario();
  cfg.user_disk_radius = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config text round trip and overrides") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.elements_per_irs = 7;
  cfg.phase_bits = 3;
  cfg.compression_mode = CompressionMode::PointToPoint;
  cfg.seed = 99;
  const ScenarioConfig back = parse_config(format_config(cfg));
  CHECK(back.elements_per_irs == 7);
  CHECK(back.phase_bits == std::optional<int>(3));
  CHECK(back.compression_mode == CompressionMode::PointToPoint);
  CHECK(back.seed == 99);
  CHECK(format_config(back) == format_config(cfg));

  const ScenarioConfig partial = parse_config(R"({"tx_power_dbm": 20, "fronthaul_caps_bits": [3, 4]})");
  CHECK(partial.tx_power_dbm == 20.0);
  CHECK(partial.fronthaul_caps_bits == std::vector<double>{3.0, 4.0});
  CHECK(partial.num_users == 4);

  CHECK_THROWS_AS(parse_config(R"({"no_such_key": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"num_users": "four"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cranirs.json"), ConfigError);
}

TEST_CASE("area-uniform user sampling") {
  ScenarioConfig cfg = default_paper_scenario();
  cfg.num_users = 100000;
  RngStream rng(5, 0, StreamPurpose::Test);
  const auto pts = sample_user_positions(cfg, rng);
  double mean_r = 0.0;
  for (const auto& p : pts) {
    const double r = std::hypot(p.x, p.y);
    CHECK(r <= cfg.user_disk_radius + 1e-12);
    mean_r += r;
  }
  mean_r /= static_cast<double>(pts.size());
  // E[r] = 2R/3 for a uniform disk
  CHECK(std::abs(mean_r - 20.0) / 20.0 < 0.01);

  cfg.num_users = 5;
  cfg.user_disk_radius = 0.0;
  RngStream z(1);
  for (const auto& p : sample_user_positions(cfg, z)) {
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
  }
}

TEST_CASE("random streams are deterministic and separated") {
  RngStream a(7, 3, StreamPurpose::Channel), b(7, 3, StreamPurpose::Channel);
  RngStream c(7, 4, StreamPurpose::Channel), d(7, 3, StreamPurpose::Rounding);
  bool differs_drop = false, differs_purpose = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs_drop = differs_drop || x != c.normal();
    differs_purpose = differs_purpose || x != d.normal();
  }
  CHECK(differs_drop);
  CHECK(differs_purpose);
}

TEST_CASE("log-det, inverse and block helpers") {
  RngStream rng(11, 0, StreamPurpose::Test);
  const CMat a = random_hpd(5, rng);
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  CHECK(logdet_hpd(a) == doctest::Approx(es.eigenvalues().array().log().sum()).epsilon(1e-12));
  CHECK((inverse_hpd(a) * a - CMat::Identity(5, 5)).norm() < 1e-10);
  CHECK(logdet_hpd(CMat(0, 0)) == 0.0);
  CHECK_THROWS_AS(logdet_hpd(-a), NumericalError);
  double out = 0.0;
  CHECK_FALSE(try_logdet_hpd(-a, out));

  const CMat b = random_hpd(2, rng);
  const CMat bd = block_diagonal({a, b});
  CHECK(bd.rows() == 7);
  CHECK(bd.topRightCorner(5, 2).norm() == 0.0);
  CHECK(logdet_hpd(bd) == doctest::Approx(logdet_hpd(a) + logdet_hpd(b)).epsilon(1e-12));
  const CMat c = random_complex(5, 5, rng);
  CHECK(real_trace_product(a, c) == doctest::Approx((a * c).trace().real()).epsilon(1e-12));
}

TEST_CASE("real embedding identities") {
  RngStream rng(12, 0, StreamPurpose::Test);
  const CMat x = random_hpd(4, rng), y = random_hpd(4, rng);
  const RMat ex = embed_real(x), ey = embed_real(y);
  CHECK((ex - ex.transpose()).norm() < 1e-14);
  CHECK(0.5 * (ex * ey).trace() == doctest::Approx(real_trace_product(x, y)).epsilon(1e-12));
  Eigen::LLT<RMat> llt(ex);
  REQUIRE(llt.info() == Eigen::Success);
  const double ld = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  CHECK(0.5 * ld == doctest::Approx(logdet_hpd(x)).epsilon(1e-12));
}
