// SPDX-License-Identifier: Apache-2.0
//
// Convex surrogate of the sum-rate maximization at fixed auxiliaries.
//
// With theta_bar = [theta; 1] and Theta_bar = theta_bar theta_bar^H the
// negative sum rate is majorized by
//     Tr(Psi Theta_bar) + Tr(W^H Sigma^-1 W Omega_L) + J1,
// and each fronthaul constraint by
//     Tr(Upsilon Theta_bar) + sum_l Tr(Lin_l Omega_l)
//         - sum_terms log|Omega_l + shift I| + J2 <= rhs.
// All surrogates are tight at the point the auxiliaries were built from.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cranirs/auxiliary.hpp"
#include "cranirs/channel.hpp"
#include "cranirs/linalg.hpp"
#include "cranirs/rates.hpp"

namespace cranirs {

/// [[A o B^T, z], [z^H, 0]] with the appended coordinate last.
CMat lift_quadratic(const CMat& a, const CMat& b, const CVec& z);

struct SurrogateObjective {
  CMat a;            // G^H W^H Sigma^-1 W G
  CMat b;            // P H_RM H_RM^H
  CVec z;            // linear phase coefficient
  CMat psi;          // lifted quadratic form
  CMat omega_coeff;  // W^H Sigma^-1 W, (L*N_R) square
  double j1 = 0.0;
  int antennas_per_rrh = 0;

  /// Diagonal N_R x N_R block of omega_coeff for RRH l.
  CMat omega_block(int rrh) const;
};

struct LogDetTerm {
  int rrh = 0;
  double shift = 0.0;  // log|Omega_rrh + shift I|
};

struct SurrogateConstraint {
  std::string id;
  std::uint32_t mask = 0;  // S (WZ) or the single RRH (P2P)
  CMat a;
  CVec z;
  CMat upsilon;
  std::vector<CMat> linear;  // per RRH
  std::vector<LogDetTerm> logdets;
  double j2 = 0.0;
  double rhs = 0.0;  // capacity, nats
};

SurrogateObjective build_objective(const ChannelSet& ch, const AuxiliaryState& aux, double power, double noise);

/// Wyner-Ziv surrogate for subset S.
SurrogateConstraint build_constraint(const SubsetIndex& s, const ChannelSet& ch, const AuxiliaryState& aux, double power,
                                     double noise, const std::vector<double>& caps_nats);

/// Point-to-point surrogate for RRH `rrh`.
SurrogateConstraint build_p2p_constraint(int rrh, const ChannelSet& ch, const AuxiliaryState& aux, double power,
                                         double noise, const std::vector<double>& caps_nats);

/// Every constraint of the active compression mode (2^L - 1 for WZ, L for P2P).
std::vector<SurrogateConstraint> build_constraints(const ChannelSet& ch, const AuxiliaryState& aux, double power,
                                                   double noise, const std::vector<double>& caps_nats);

double evaluate_surrogate(const SurrogateObjective& obj, const CMat& theta_bar, const QuantNoise& omega);

/// Left-hand side of the constraint; compare against `con.rhs`.
double evaluate_surrogate(const SurrogateConstraint& con, const CMat& theta_bar, const QuantNoise& omega);

}  // namespace cranirs
