// SPDX-License-Identifier: Apache-2.0

#include "cranirs/auxiliary.hpp"

#include <cmath>

namespace cranirs {

CMat update_E(const CMat& v, const CMat& omega, double power, double noise) {
  if (omega.rows() != v.rows() || omega.cols() != v.rows()) throw DimensionError("update_E: Omega does not match V");
  CMat e = power * v * v.adjoint() + omega;
  e.diagonal().array() += noise;
  return hermitian_part(e);
}

MmseFilter update_w_sigma(const CMat& v, const CMat& omega, double power, double noise) {
  const CMat gamma = update_E(v, omega, power, noise);
  Eigen::LLT<CMat> llt(gamma);
  if (llt.info() != Eigen::Success) throw NumericalError("update_w_sigma: singular Gram matrix");
  const double sp = std::sqrt(power);
  MmseFilter f;
  f.w = sp * llt.solve(v).adjoint();
  CMat sigma = -sp * f.w * v;
  sigma.diagonal().array() += 1.0;
  f.sigma = hermitian_part(sigma);
  return f;
}

MmseFilter update_subset_aux(const SubsetIndex& complement, const CMat& v_l, const QuantNoise& omega, double power,
                             double noise) {
  if (complement.mask == 0) throw DimensionError("update_subset_aux: empty complement has no auxiliary");
  const CMat v = select_rows(v_l, complement.rows(omega.antennas()));
  return update_w_sigma(v, block_diagonal(select_blocks(omega, complement)), power, noise);
}

AuxiliaryState build_auxiliary(CompressionMode mode, const CMat& v_l, const QuantNoise& omega, double power,
                               double noise) {
  AuxiliaryState aux;
  aux.mode = mode;
  const CMat o = omega.assembled();
  aux.full = update_w_sigma(v_l, o, power, noise);
  const int n_r = omega.antennas();
  const int num_rrhs = omega.num_rrhs();
  if (mode == CompressionMode::WynerZiv) {
    aux.e_l = update_E(v_l, o, power, noise);
    aux.e_l_inv = inverse_hpd(aux.e_l);
    for (const auto& s : all_subsets(num_rrhs)) {
      const SubsetIndex sc = s.complement();
      if (sc.mask == 0 || aux.complements.count(sc.mask)) continue;
      aux.complements.emplace(sc.mask, update_subset_aux(sc, v_l, omega, power, noise));
    }
  } else {
    for (int l = 0; l < num_rrhs; ++l) {
      const CMat e = update_E(v_l.middleRows(l * n_r, n_r), omega.blocks[static_cast<std::size_t>(l)], power, noise);
      aux.e_rrh.push_back(e);
      aux.e_rrh_inv.push_back(inverse_hpd(e));
    }
  }
  return aux;
}

}  // namespace cranirs
