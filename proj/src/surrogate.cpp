// SPDX-License-Identifier: Apache-2.0

#include "cranirs/surrogate.hpp"

#include <cmath>

namespace cranirs {

namespace {

// diag(X H_RM^H) without forming the product
CVec diag_times_adjoint(const CMat& x, const CMat& h_rm) {
  return (x.array() * h_rm.conjugate().array()).rowwise().sum();
}

void check_dims(const ChannelSet& ch, const AuxiliaryState& aux) {
  ch.validate();
  if (aux.full.w.cols() != ch.h_l.rows() || aux.full.w.rows() != ch.h_l.cols())
    throw DimensionError("surrogate: auxiliaries do not match the channel");
}

}  // namespace

CMat lift_quadratic(const CMat& a, const CMat& b, const CVec& z) {
  const Eigen::Index n = a.rows();
  CMat out = CMat::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = a.array() * b.transpose().array();
  out.topRightCorner(n, 1) = z;
  out.bottomLeftCorner(1, n) = z.adjoint();
  return hermitian_part(out);
}

CMat SurrogateObjective::omega_block(int rrh) const {
  return omega_coeff.block(rrh * antennas_per_rrh, rrh * antennas_per_rrh, antennas_per_rrh, antennas_per_rrh);
}

SurrogateObjective build_objective(const ChannelSet& ch, const AuxiliaryState& aux, double power, double noise) {
  check_dims(ch, aux);
  const double sp = std::sqrt(power);
  const CMat& w = aux.full.w;
  const CMat sigma_inv = inverse_hpd(aux.full.sigma);
  const CMat phi = hermitian_part(w.adjoint() * sigma_inv * w);
  const CMat& h = ch.h_l;
  const CMat& g = ch.g_l;
  const CMat& hr = ch.h_rm;

  SurrogateObjective obj;
  obj.antennas_per_rrh = ch.antennas_per_rrh;
  obj.omega_coeff = phi;
  obj.a = hermitian_part(g.adjoint() * phi * g);
  obj.b = hermitian_part(power * hr * hr.adjoint());
  obj.z = diag_times_adjoint(g.adjoint() * (power * phi * h - sp * w.adjoint() * sigma_inv), hr);
  obj.psi = lift_quadratic(obj.a, obj.b, obj.z);

  const double k = static_cast<double>(h.cols());
  obj.j1 = power * real_trace_product(phi, h * h.adjoint()) - 2.0 * sp * (sigma_inv * w * h).trace().real() +
           noise * phi.trace().real() + sigma_inv.trace().real() + logdet_hpd(aux.full.sigma) - k;
  return obj;
}

SurrogateConstraint build_constraint(const SubsetIndex& s, const ChannelSet& ch, const AuxiliaryState& aux,
                                     double power, double noise, const std::vector<double>& caps_nats) {
  check_dims(ch, aux);
  if (aux.mode != CompressionMode::WynerZiv) throw DimensionError("build_constraint: auxiliaries are not Wyner-Ziv");
  const double sp = std::sqrt(power);
  const int n_r = ch.antennas_per_rrh;
  const int num_rrhs = ch.num_rrhs;
  const CMat& h = ch.h_l;
  const CMat& g = ch.g_l;
  const CMat& hr = ch.h_rm;
  const CMat& e_inv = aux.e_l_inv;

  SurrogateConstraint con;
  con.id = "S=" + s.label();
  con.mask = s.mask;
  for (int l : s.members()) con.rhs += caps_nats[static_cast<std::size_t>(l)];

  CMat a = g.adjoint() * e_inv * g;
  CMat zx = power * g.adjoint() * e_inv * h;
  CMat hh = power * h * h.adjoint();
  hh.diagonal().array() += noise;
  double j2 = logdet_hpd(aux.e_l) + real_trace_product(e_inv, hh) - static_cast<double>(num_rrhs * n_r);

  con.linear.assign(static_cast<std::size_t>(num_rrhs), CMat::Zero(n_r, n_r));
  for (int l = 0; l < num_rrhs; ++l) con.linear[static_cast<std::size_t>(l)] = e_inv.block(l * n_r, l * n_r, n_r, n_r);

  const SubsetIndex sc = s.complement();
  if (sc.mask != 0) {
    const MmseFilter& f = aux.complements.at(sc.mask);
    const std::vector<int> rows = sc.rows(n_r);
    const CMat h_sc = select_rows(h, rows);
    const CMat g_sc = select_rows(g, rows);
    const CMat sigma_inv = inverse_hpd(f.sigma);
    const CMat phi = hermitian_part(f.w.adjoint() * sigma_inv * f.w);
    a += g_sc.adjoint() * phi * g_sc;
    zx += g_sc.adjoint() * (power * phi * h_sc - sp * f.w.adjoint() * sigma_inv);
    CMat hh_sc = power * h_sc * h_sc.adjoint();
    hh_sc.diagonal().array() += noise;
    j2 += -static_cast<double>(h.cols()) - 2.0 * sp * (sigma_inv * f.w * h_sc).trace().real() +
          logdet_hpd(f.sigma) + sigma_inv.trace().real() + real_trace_product(phi, hh_sc);
    int offset = 0;
    for (int l : sc.members()) {
      con.linear[static_cast<std::size_t>(l)] += phi.block(offset, offset, n_r, n_r);
      offset += n_r;
    }
  }
  for (int l = 0; l < num_rrhs; ++l) con.logdets.push_back({l, s.contains(l) ? 0.0 : noise});

  con.a = hermitian_part(a);
  con.z = diag_times_adjoint(zx, hr);
  con.upsilon = lift_quadratic(con.a, hermitian_part(power * hr * hr.adjoint()), con.z);
  con.j2 = j2;
  return con;
}

SurrogateConstraint build_p2p_constraint(int rrh, const ChannelSet& ch, const AuxiliaryState& aux, double power,
                                         double noise, const std::vector<double>& caps_nats) {
  check_dims(ch, aux);
  if (aux.mode != CompressionMode::PointToPoint)
    throw DimensionError("build_p2p_constraint: auxiliaries are not point-to-point");
  const int n_r = ch.antennas_per_rrh;
  const CMat h = ch.h_l.middleRows(rrh * n_r, n_r);
  const CMat g = ch.g_l.middleRows(rrh * n_r, n_r);
  const CMat& hr = ch.h_rm;
  const CMat& e_inv = aux.e_rrh_inv[static_cast<std::size_t>(rrh)];

  SurrogateConstraint con;
  con.id = "l=" + std::to_string(rrh + 1);
  con.mask = 1u << rrh;
  con.rhs = caps_nats[static_cast<std::size_t>(rrh)];
  con.a = hermitian_part(g.adjoint() * e_inv * g);
  con.z = diag_times_adjoint(power * g.adjoint() * e_inv * h, hr);
  con.upsilon = lift_quadratic(con.a, hermitian_part(power * hr * hr.adjoint()), con.z);
  CMat hh = power * h * h.adjoint();
  hh.diagonal().array() += noise;
  con.j2 = logdet_hpd(aux.e_rrh[static_cast<std::size_t>(rrh)]) + real_trace_product(e_inv, hh) - n_r;
  con.linear.assign(static_cast<std::size_t>(ch.num_rrhs), CMat::Zero(n_r, n_r));
  con.linear[static_cast<std::size_t>(rrh)] = e_inv;
  con.logdets.push_back({rrh, 0.0});
  return con;
}

std::vector<SurrogateConstraint> build_constraints(const ChannelSet& ch, const AuxiliaryState& aux, double power,
                                                   double noise, const std::vector<double>& caps_nats) {
  std::vector<SurrogateConstraint> out;
  if (aux.mode == CompressionMode::WynerZiv) {
    for (const auto& s : all_subsets(ch.num_rrhs)) out.push_back(build_constraint(s, ch, aux, power, noise, caps_nats));
  } else {
    for (int l = 0; l < ch.num_rrhs; ++l) out.push_back(build_p2p_constraint(l, ch, aux, power, noise, caps_nats));
  }
  return out;
}

double evaluate_surrogate(const SurrogateObjective& obj, const CMat& theta_bar, const QuantNoise& omega) {
  if (theta_bar.rows() != obj.psi.rows()) throw DimensionError("evaluate_surrogate: lifted dimension mismatch");
  double v = real_trace_product(obj.psi, theta_bar) + obj.j1;
  for (int l = 0; l < omega.num_rrhs(); ++l) v += real_trace_product(obj.omega_block(l), omega.blocks[static_cast<std::size_t>(l)]);
  if (!std::isfinite(v)) throw NumericalError("evaluate_surrogate: non-finite objective");
  return v;
}

double evaluate_surrogate(const SurrogateConstraint& con, const CMat& theta_bar, const QuantNoise& omega) {
  if (theta_bar.rows() != con.upsilon.rows()) throw DimensionError("evaluate_surrogate: lifted dimension mismatch");
  double v = real_trace_product(con.upsilon, theta_bar) + con.j2;
  for (int l = 0; l < omega.num_rrhs(); ++l)
    v += real_trace_product(con.linear[static_cast<std::size_t>(l)], omega.blocks[static_cast<std::size_t>(l)]);
  for (const auto& t : con.logdets) {
    CMat x = omega.blocks[static_cast<std::size_t>(t.rrh)];
    x.diagonal().array() += t.shift;
    double ld = 0.0;
    if (!try_logdet_hpd(x, ld)) throw NumericalError("evaluate_surrogate: non-finite log-det");
    v -= ld;
  }
  return v;
}

}  // namespace cranirs
