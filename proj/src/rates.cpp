// SPDX-License-Identifier: Apache-2.0

#include "cranirs/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cranirs {

QuantNoise QuantNoise::uniform(int num_rrhs, int antennas, double beta) {
  QuantNoise q;
  q.blocks.assign(static_cast<std::size_t>(num_rrhs), beta * CMat::Identity(antennas, antennas));
  return q;
}

QuantNoise QuantNoise::from_betas(const std::vector<double>& betas, int antennas) {
  QuantNoise q;
  for (double b : betas) q.blocks.push_back(b * CMat::Identity(antennas, antennas));
  return q;
}

QuantNoise QuantNoise::scaled(double gamma) const {
  QuantNoise q = *this;
  for (auto& b : q.blocks) b *= gamma;
  return q;
}

void QuantNoise::validate() const {
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw DimensionError("QuantNoise: block is not square");
    if (!b.allFinite()) throw NumericalError("QuantNoise: non-finite entries");
    if (hermitian_defect(b) > 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      throw NumericalError("QuantNoise: block is not Hermitian");
    if (min_eigenvalue(b) < -1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      throw NumericalError("QuantNoise: block is not positive semidefinite");
  }
}

std::vector<int> SubsetIndex::members() const {
  std::vector<int> out;
  for (int l = 0; l < num_rrhs; ++l)
    if (contains(l)) out.push_back(l);
  return out;
}

std::vector<int> SubsetIndex::rows(int antennas) const {
  std::vector<int> out;
  for (int l : members())
    for (int a = 0; a < antennas; ++a) out.push_back(l * antennas + a);
  return out;
}

std::string SubsetIndex::label() const {
  std::string s = "{";
  bool first = true;
  for (int l : members()) {
    if (!first) s += ",";
    s += std::to_string(l + 1);
    first = false;
  }
  return s + "}";
}

std::vector<SubsetIndex> all_subsets(int num_rrhs) {
  std::vector<SubsetIndex> out;
  for (std::uint32_t m = 1; m <= SubsetIndex::full_mask(num_rrhs); ++m) out.push_back({m, num_rrhs});
  return out;
}

CMat select_rows(const CMat& m, const std::vector<int>& rows) {
  CMat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

std::vector<CMat> select_blocks(const QuantNoise& omega, const SubsetIndex& s) {
  std::vector<CMat> out;
  for (int l : s.members()) out.push_back(omega.blocks[static_cast<std::size_t>(l)]);
  return out;
}

namespace {

CMat gram(const CMat& v, double power, double noise, const CMat& omega) {
  CMat g = power * v * v.adjoint() + omega;
  g.diagonal().array() += noise;
  return hermitian_part(g);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite result");
  return v;
}

double logdet_quant(const CMat& omega, double floor) {
  CMat o = omega;
  o.diagonal().array() += floor;
  double v = 0.0;
  if (!try_logdet_hpd(o, v)) throw InfiniteRateError("singular quantization covariance: infinite compression rate");
  return v;
}

}  // namespace

double sum_rate(const CMat& v_l, const QuantNoise& omega, double power, double noise) {
  omega.validate();
  const CMat o = omega.assembled();
  if (o.rows() != v_l.rows()) throw DimensionError("sum_rate: Omega_L does not match V_L rows");
  CMat base = o;
  base.diagonal().array() += noise;
  return checked(logdet_hpd(gram(v_l, power, noise, o)) - logdet_hpd(base), "sum_rate");
}

double p2p_lhs(const CMat& v_rrh, const CMat& omega_rrh, double power, double noise, double floor) {
  if (omega_rrh.rows() != v_rrh.rows()) throw DimensionError("p2p_lhs: Omega_l does not match V_l rows");
  return checked(logdet_hpd(gram(v_rrh, power, noise, omega_rrh)) - logdet_quant(omega_rrh, floor), "p2p_lhs");
}

double wz_lhs(const SubsetIndex& s, const CMat& v_l, const QuantNoise& omega, double power, double noise,
              double floor) {
  const int n_r = omega.antennas();
  if (v_l.rows() != static_cast<Eigen::Index>(omega.num_rrhs()) * n_r) throw DimensionError("wz_lhs: dimension mismatch");
  double lhs = logdet_hpd(gram(v_l, power, noise, omega.assembled()));
  lhs -= logdet_quant(block_diagonal(select_blocks(omega, s)), floor);
  const SubsetIndex sc = s.complement();
  if (sc.mask != 0) {
    const CMat v_sc = select_rows(v_l, sc.rows(n_r));
    lhs -= logdet_hpd(gram(v_sc, power, noise, block_diagonal(select_blocks(omega, sc))));
  }
  return checked(lhs, "wz_lhs");
}

std::vector<FronthaulSlack> all_fronthaul_slacks(CompressionMode mode, const CMat& v_l, const QuantNoise& omega,
                                                 const std::vector<double>& caps_nats, double power, double noise) {
  const int num_rrhs = omega.num_rrhs();
  if (static_cast<int>(caps_nats.size()) != num_rrhs) throw DimensionError("all_fronthaul_slacks: one capacity per RRH");
  std::vector<FronthaulSlack> out;
  if (mode == CompressionMode::PointToPoint) {
    const int n_r = omega.antennas();
    for (int l = 0; l < num_rrhs; ++l) {
      const CMat v = v_l.middleRows(l * n_r, n_r);
      const double lhs = p2p_lhs(v, omega.blocks[static_cast<std::size_t>(l)], power, noise);
      out.push_back({"l=" + std::to_string(l + 1), 1u << l, caps_nats[static_cast<std::size_t>(l)] - lhs});
    }
  } else {
    for (const auto& s : all_subsets(num_rrhs)) {
      double cap = 0.0;
      for (int l : s.members()) cap += caps_nats[static_cast<std::size_t>(l)];
      out.push_back({"S=" + s.label(), s.mask, cap - wz_lhs(s, v_l, omega, power, noise)});
    }
  }
  return out;
}

double min_slack(const std::vector<FronthaulSlack>& slacks) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : slacks) m = std::min(m, s.slack);
  return m;
}

}  // namespace cranirs
