// SPDX-License-Identifier: Apache-2.0
//
// One Monte Carlo realization of the IRS-aided uplink channel and the
// effective channel V_L = H_L + G_L diag(theta) H_RM it induces.

#pragma once

#include <iosfwd>
#include <vector>

#include "cranirs/linalg.hpp"
#include "cranirs/scenario.hpp"

namespace cranirs {

/// Stacked channel matrices. Rows of h_l and g_l are ordered RRH by RRH,
/// N_R rows each; columns of g_l / rows of h_rm are ordered IRS by IRS.
struct ChannelSet {
  CMat h_l;   // (L*N_R) x K, users -> RRHs
  CMat g_l;   // (L*N_R) x (M*N_I), IRSs -> RRHs
  CMat h_rm;  // (M*N_I) x K, users -> IRSs
  int num_rrhs = 0;
  int antennas_per_rrh = 0;

  int num_users() const { return static_cast<int>(h_l.cols()); }
  int num_elements() const { return static_cast<int>(h_rm.rows()); }

  /// Throws DimensionError / NumericalError if shapes disagree or entries are not finite.
  void validate() const;
};

/// IRS phase vector (unit modulus entries) and its lifted form.
struct PhaseConfig {
  CVec theta;

  static PhaseConfig ones(int n);
  static PhaseConfig random(int n, RngStream& rng);
  static PhaseConfig from_angles(const RVec& angles);

  /// theta_bar = [theta; 1]
  CVec extended() const;
  /// theta_bar theta_bar^H
  CMat lifted() const;
  double max_modulus_error() const;
};

struct EffectiveChannel {
  CMat v;  // (L*N_R) x K
  int num_rrhs = 0;
  int antennas_per_rrh = 0;

  CMat block(int rrh) const { return v.middleRows(rrh * antennas_per_rrh, antennas_per_rrh); }
};

/// Half-wavelength-style ULA response along the x axis; `cos_angle` is the
/// cosine between the array axis and the propagation direction.
CVec ula_response(int n, double cos_angle, double spacing_wavelengths);

ChannelSet draw_channels(const ScenarioConfig& cfg, const std::vector<Point2>& users, RngStream& rng);

/// Positions and channels of Monte Carlo drop `drop`, from the config seed.
struct Drop {
  std::vector<Point2> users;
  ChannelSet channels;
};
Drop draw_drop(const ScenarioConfig& cfg, std::uint64_t drop);

EffectiveChannel effective_channel(const ChannelSet& ch, const PhaseConfig& phases);

/// Same channel with the IRS links removed (G_L = 0).
ChannelSet without_irs(const ChannelSet& ch);

/// Text dump: a header line with the dimensions, then one
/// `name,row,col,re,im` line per entry of H_L, G_L and H_RM.
void write_channel_csv(std::ostream& out, const ChannelSet& ch);
ChannelSet read_channel_csv(std::istream& in);

}  // namespace cranirs
