// SPDX-License-Identifier: Apache-2.0
//
// Exact Gaussian evaluators for the uplink sum rate and the fronthaul
// compression rates (point-to-point and Wyner-Ziv). All values are in nats.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cranirs/linalg.hpp"
#include "cranirs/scenario.hpp"

namespace cranirs {

/// Per-RRH quantization noise covariances Omega_l (N_R x N_R each).
struct QuantNoise {
  std::vector<CMat> blocks;

  static QuantNoise uniform(int num_rrhs, int antennas, double beta);
  static QuantNoise from_betas(const std::vector<double>& betas, int antennas);

  int num_rrhs() const { return static_cast<int>(blocks.size()); }
  int antennas() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows()); }
  /// Omega_L = diag(Omega_1, ..., Omega_L)
  CMat assembled() const { return block_diagonal(blocks); }
  QuantNoise scaled(double gamma) const;

  /// Hermitian to 1e-10 and eigenvalues >= -1e-10; throws NumericalError otherwise.
  void validate() const;
};

/// Nonempty subset S of the RRH index set, stored as a bit mask (bit l = RRH l).
struct SubsetIndex {
  std::uint32_t mask = 0;
  int num_rrhs = 0;

  bool contains(int rrh) const { return (mask >> rrh) & 1u; }
  bool is_full() const { return mask == full_mask(num_rrhs); }
  SubsetIndex complement() const { return {full_mask(num_rrhs) & ~mask, num_rrhs}; }
  std::vector<int> members() const;
  /// Antenna row indices of the member RRHs, in RRH order.
  std::vector<int> rows(int antennas) const;
  /// "{1,2}" with 1-based RRH labels.
  std::string label() const;

  static std::uint32_t full_mask(int num_rrhs) { return (num_rrhs >= 32) ? ~0u : ((1u << num_rrhs) - 1u); }
};

/// All 2^L - 1 nonempty subsets in increasing mask order.
std::vector<SubsetIndex> all_subsets(int num_rrhs);

CMat select_rows(const CMat& m, const std::vector<int>& rows);
std::vector<CMat> select_blocks(const QuantNoise& omega, const SubsetIndex& s);

/// log|P V V^H + s2 I + Omega_L| - log|s2 I + Omega_L|
double sum_rate(const CMat& v_l, const QuantNoise& omega, double power, double noise);

/// log|P V_l V_l^H + s2 I + Omega_l| - log|Omega_l + floor I|.
/// Throws InfiniteRateError when Omega_l + floor I is singular.
double p2p_lhs(const CMat& v_rrh, const CMat& omega_rrh, double power, double noise, double floor = 0.0);

/// log|Gamma_L| - log|Omega_S + floor I| - log|P V_Sc V_Sc^H + s2 I + Omega_Sc|,
/// the last term vanishing when the complement is empty.
double wz_lhs(const SubsetIndex& s, const CMat& v_l, const QuantNoise& omega, double power, double noise,
              double floor = 0.0);

struct FronthaulSlack {
  std::string id;     // "S={1,2}" or "l=1"
  std::uint32_t mask; // subset mask (P2P: single RRH)
  double slack;       // capacity - lhs, nats
};

/// WZ: one slack per nonempty subset; P2P: one per RRH. Capacities in nats.
std::vector<FronthaulSlack> all_fronthaul_slacks(CompressionMode mode, const CMat& v_l, const QuantNoise& omega,
                                                 const std::vector<double>& caps_nats, double power, double noise);

double min_slack(const std::vector<FronthaulSlack>& slacks);

}  // namespace cranirs
