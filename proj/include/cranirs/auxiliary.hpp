// SPDX-License-Identifier: Apache-2.0
//
// Closed-form auxiliary updates: the linear MMSE posterior (W, Sigma) of the
// normalized user symbols given the compressed signals, the tangent point
// E_L of the log-det upper bound, and the per-complement posteriors used by
// the Wyner-Ziv constraints.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cranirs/linalg.hpp"
#include "cranirs/rates.hpp"

namespace cranirs {

/// Posterior CN(W y_hat, Sigma) of x / sqrt(P).
struct MmseFilter {
  CMat w;      // K x rows
  CMat sigma;  // K x K
};

/// W = sqrt(P) V^H (P V V^H + s2 I + Omega)^-1, Sigma = I - sqrt(P) W V.
MmseFilter update_w_sigma(const CMat& v, const CMat& omega, double power, double noise);

/// E = P V V^H + s2 I + Omega (the tangent point of log|.| <= log|E| + Tr(E^-1 .) - n).
CMat update_E(const CMat& v, const CMat& omega, double power, double noise);

/// MMSE filter restricted to the rows of the complement set.
MmseFilter update_subset_aux(const SubsetIndex& complement, const CMat& v_l, const QuantNoise& omega, double power,
                             double noise);

struct AuxiliaryState {
  CompressionMode mode = CompressionMode::WynerZiv;
  MmseFilter full;
  // WZ: E_L over all L*N_R antennas.
  CMat e_l;
  CMat e_l_inv;
  // P2P: one E_l per RRH.
  std::vector<CMat> e_rrh;
  std::vector<CMat> e_rrh_inv;
  // WZ: keyed by the complement mask, nonempty proper complements only.
  std::map<std::uint32_t, MmseFilter> complements;
};

AuxiliaryState build_auxiliary(CompressionMode mode, const CMat& v_l, const QuantNoise& omega, double power,
                               double noise);

}  // namespace cranirs
