// SPDX-License-Identifier: Apache-2.0

#include "cranirs/channel.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace cranirs {

namespace {

cd complex_normal(RngStream& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return cd(re, im) * std::sqrt(0.5);
}

double pathloss(double xi_lin, double d, double alpha) {
  if (!(d > 0.0)) throw ConfigError("channel: zero link distance (co-located nodes)");
  return xi_lin * std::pow(d, -alpha);
}

struct RicianWeights {
  double los;
  double nlos;
};

RicianWeights rician_weights(double factor_db) {
  if (std::isinf(factor_db) && factor_db > 0) return {1.0, 0.0};
  const double k = units::db_to_linear(factor_db);
  return {std::sqrt(k / (1.0 + k)), std::sqrt(1.0 / (1.0 + k))};
}

}  // namespace

void ChannelSet::validate() const {
  const Eigen::Index rows = static_cast<Eigen::Index>(num_rrhs) * antennas_per_rrh;
  if (h_l.rows() != rows || g_l.rows() != rows) throw DimensionError("ChannelSet: RRH row count mismatch");
  if (g_l.cols() != h_rm.rows()) throw DimensionError("ChannelSet: IRS element count mismatch");
  if (h_rm.cols() != h_l.cols()) throw DimensionError("ChannelSet: user count mismatch");
  if (!h_l.allFinite() || !g_l.allFinite() || !h_rm.allFinite()) throw NumericalError("ChannelSet: non-finite entries");
}

PhaseConfig PhaseConfig::ones(int n) { return PhaseConfig{CVec::Ones(n)}; }

PhaseConfig PhaseConfig::random(int n, RngStream& rng) {
  RVec angles(n);
  for (int i = 0; i < n; ++i) angles(i) = 2.0 * std::numbers::pi * rng.uniform();
  return from_angles(angles);
}

PhaseConfig PhaseConfig::from_angles(const RVec& angles) {
  CVec t(angles.size());
  for (Eigen::Index i = 0; i < angles.size(); ++i) t(i) = std::polar(1.0, angles(i));
  return PhaseConfig{t};
}

CVec PhaseConfig::extended() const {
  CVec out(theta.size() + 1);
  out.head(theta.size()) = theta;
  out(theta.size()) = 1.0;
  return out;
}

CMat PhaseConfig::lifted() const {
  const CVec e = extended();
  return e * e.adjoint();
}

double PhaseConfig::max_modulus_error() const {
  double err = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) err = std::max(err, std::abs(std::abs(theta(i)) - 1.0));
  return err;
}

CVec ula_response(int n, double cos_angle, double spacing_wavelengths) {
  CVec a(n);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, 2.0 * std::numbers::pi * spacing_wavelengths * i * cos_angle);
  return a;
}

ChannelSet draw_channels(const ScenarioConfig& cfg, const std::vector<Point2>& users, RngStream& rng) {
  cfg.validate();
  if (static_cast<int>(users.size()) != cfg.num_users) throw DimensionError("draw_channels: need one position per user");
  const int k_users = cfg.num_users;
  const int n_r = cfg.antennas_per_rrh;
  const int n_i = cfg.elements_per_irs;
  const double xi = std::isinf(cfg.pathloss_ref_db) ? 0.0 : units::db_to_linear(cfg.pathloss_ref_db);
  const RicianWeights w = rician_weights(cfg.rician_factor_db);
  const double spacing = cfg.array_spacing_wavelengths;

  ChannelSet ch;
  ch.num_rrhs = cfg.num_rrhs;
  ch.antennas_per_rrh = n_r;
  ch.h_l = CMat::Zero(cfg.total_antennas(), k_users);
  ch.g_l = CMat::Zero(cfg.total_antennas(), cfg.num_elements());
  ch.h_rm = CMat::Zero(cfg.num_elements(), k_users);

  // users -> RRHs: Rayleigh
  for (int l = 0; l < cfg.num_rrhs; ++l) {
    for (int k = 0; k < k_users; ++k) {
      const double amp = std::sqrt(pathloss(xi, distance(users[k], cfg.rrh_positions[l]), cfg.exponents.user_rrh));
      for (int a = 0; a < n_r; ++a) ch.h_l(l * n_r + a, k) = amp * complex_normal(rng);
    }
  }

  // users -> IRSs: Rician around the ULA arrival response
  for (int m = 0; m < cfg.num_irs; ++m) {
    const Point2& irs = cfg.irs_positions[m];
    for (int k = 0; k < k_users; ++k) {
      const double d = distance(users[k], irs);
      const double amp = std::sqrt(pathloss(xi, d, cfg.exponents.user_irs));
      const CVec los = ula_response(n_i, (users[k].x - irs.x) / d, spacing);
      for (int e = 0; e < n_i; ++e) {
        const cd nlos = complex_normal(rng);
        ch.h_rm(m * n_i + e, k) = amp * (w.los * los(e) + w.nlos * nlos);
      }
    }
  }

  // IRSs -> RRHs: Rician around the outer product of the two array responses
  for (int l = 0; l < cfg.num_rrhs; ++l) {
    const Point2& rrh = cfg.rrh_positions[l];
    for (int m = 0; m < cfg.num_irs; ++m) {
      const Point2& irs = cfg.irs_positions[m];
      const double d = distance(rrh, irs);
      const double amp = std::sqrt(pathloss(xi, d, cfg.exponents.irs_rrh));
      const CVec arrive = ula_response(n_r, (irs.x - rrh.x) / d, spacing);
      const CVec depart = ula_response(n_i, (rrh.x - irs.x) / d, spacing);
      const CMat los = arrive * depart.adjoint();
      for (int a = 0; a < n_r; ++a) {
        for (int e = 0; e < n_i; ++e) {
          const cd nlos = complex_normal(rng);
          ch.g_l(l * n_r + a, m * n_i + e) = amp * (w.los * los(a, e) + w.nlos * nlos);
        }
      }
    }
  }
  return ch;
}

Drop draw_drop(const ScenarioConfig& cfg, std::uint64_t drop) {
  RngStream pos_rng(cfg.seed, drop, StreamPurpose::Positions);
  RngStream ch_rng(cfg.seed, drop, StreamPurpose::Channel);
  Drop d;
  d.users = sample_user_positions(cfg, pos_rng);
  d.channels = draw_channels(cfg, d.users, ch_rng);
  return d;
}

EffectiveChannel effective_channel(const ChannelSet& ch, const PhaseConfig& phases) {
  if (phases.theta.size() != ch.g_l.cols() || ch.h_rm.rows() != ch.g_l.cols() || ch.h_rm.cols() != ch.h_l.cols() ||
      ch.g_l.rows() != ch.h_l.rows())
    throw DimensionError("effective_channel: dimension mismatch");
  EffectiveChannel eff;
  eff.num_rrhs = ch.num_rrhs;
  eff.antennas_per_rrh = ch.antennas_per_rrh;
  eff.v = ch.h_l + ch.g_l * phases.theta.asDiagonal() * ch.h_rm;
  return eff;
}

ChannelSet without_irs(const ChannelSet& ch) {
  ChannelSet out = ch;
  out.g_l.setZero();
  return out;
}

namespace {

void write_matrix(std::ostream& out, const char* name, const CMat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << name << ',' << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << '\n';
}

}  // namespace

void write_channel_csv(std::ostream& out, const ChannelSet& ch) {
  out << "# cranirs-channel v1 L=" << ch.num_rrhs << " N_R=" << ch.antennas_per_rrh << " K=" << ch.num_users()
      << " MN_I=" << ch.num_elements() << '\n';
  out << "name,row,col,re,im\n";
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  write_matrix(out, "H_L", ch.h_l);
  write_matrix(out, "G_L", ch.g_l);
  write_matrix(out, "H_RM", ch.h_rm);
  out.precision(old_prec);
}

ChannelSet read_channel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("channel csv: empty input");
  int l = 0, n_r = 0, k = 0, n = 0;
  if (std::sscanf(line.c_str(), "# cranirs-channel v1 L=%d N_R=%d K=%d MN_I=%d", &l, &n_r, &k, &n) != 4)
    throw ConfigError("channel csv: bad header");
  std::getline(in, line);  // column names
  ChannelSet ch;
  ch.num_rrhs = l;
  ch.antennas_per_rrh = n_r;
  ch.h_l = CMat::Zero(l * n_r, k);
  ch.g_l = CMat::Zero(l * n_r, n);
  ch.h_rm = CMat::Zero(n, k);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, field;
    std::getline(ss, name, ',');
    long row = 0, col = 0;
    double re = 0, im = 0;
    char comma = 0;
    ss >> row >> comma >> col >> comma >> re >> comma >> im;
    if (!ss) throw ConfigError("channel csv: bad line '" + line + "'");
    CMat* target = name == "H_L" ? &ch.h_l : name == "G_L" ? &ch.g_l : name == "H_RM" ? &ch.h_rm : nullptr;
    if (target == nullptr || row >= target->rows() || col >= target->cols())
      throw ConfigError("channel csv: bad entry '" + line + "'");
    (*target)(row, col) = cd(re, im);
  }
  ch.validate();
  return ch;
}

}  // namespace cranirs
