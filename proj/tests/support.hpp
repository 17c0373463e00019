// SPDX-License-Identifier: Apache-2.0
//
// Random instances shared by the unit and acceptance tests. Channels are
// i.i.d. CN(0, 1) with P = sigma^2 = 1 unless stated otherwise.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "cranirs/channel.hpp"
#include "cranirs/rates.hpp"
#include "cranirs/scenario.hpp"

namespace cranirs::testing {

struct Dims {
  int num_rrhs = 2;
  int antennas = 2;
  int users = 2;
  int elements = 8;  // M * N_I
};

inline CMat random_complex(int rows, int cols, RngStream& rng, double scale = 1.0) {
  CMat m(rows, cols);
  const double s = scale / std::sqrt(2.0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cd(s * rng.normal(), s * rng.normal());
  return m;
}

inline ChannelSet random_channels(const Dims& d, RngStream& rng, double irs_gain = 1.0) {
  ChannelSet ch;
  ch.num_rrhs = d.num_rrhs;
  ch.antennas_per_rrh = d.antennas;
  ch.h_l = random_complex(d.num_rrhs * d.antennas, d.users, rng);
  ch.g_l = random_complex(d.num_rrhs * d.antennas, d.elements, rng, irs_gain);
  ch.h_rm = random_complex(d.elements, d.users, rng, irs_gain);
  return ch;
}

/// Hermitian positive definite, eigenvalues roughly in [floor, floor + 2 scale].
inline CMat random_hpd(int n, RngStream& rng, double scale = 1.0, double floor = 0.05) {
  const CMat a = random_complex(n, n, rng, std::sqrt(scale / n));
  CMat out = a * a.adjoint();
  out.diagonal().array() += floor;
  return hermitian_part(out);
}

inline QuantNoise random_noise(const Dims& d, RngStream& rng, double scale = 1.0) {
  QuantNoise q;
  for (int l = 0; l < d.num_rrhs; ++l) q.blocks.push_back(random_hpd(d.antennas, rng, scale));
  return q;
}

/// Unit-diagonal Hermitian PSD matrix of full rank.
inline CMat random_unit_diag_psd(int n, RngStream& rng) {
  const CMat a = random_complex(n, n + 2, rng);
  CMat x = a * a.adjoint();
  const RVec d = x.diagonal().real().cwiseSqrt().cwiseInverse();
  x = d.cast<cd>().asDiagonal() * x * d.cast<cd>().asDiagonal();
  return hermitian_part(x);
}

inline std::vector<double> caps_nats(int num_rrhs, double bits) {
  return std::vector<double>(static_cast<std::size_t>(num_rrhs), units::bits_to_nats(bits));
}

}  // namespace cranirs::testing
