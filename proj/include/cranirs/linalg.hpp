// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra helpers shared by every module: Hermitian
// log-determinants, block assembly, and the complex-to-real embedding.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cranirs {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value or malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-PSD input, failed factorization or non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// log|Omega| diverges because a quantization covariance is singular.
class InfiniteRateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

/// log|A| for Hermitian positive definite A through a Cholesky factor.
/// A 0x0 matrix has determinant 1. Throws NumericalError if A is not PD.
double logdet_hpd(const CMat& a);

/// Same as logdet_hpd but returns false instead of throwing.
bool try_logdet_hpd(const CMat& a, double& out);

/// Inverse of a Hermitian PD matrix via Cholesky.
CMat inverse_hpd(const CMat& a);

/// Smallest eigenvalue of the Hermitian part of A.
double min_eigenvalue(const CMat& a);

/// ||A - A^H||_max
double hermitian_defect(const CMat& a);

/// Block-diagonal assembly diag(blocks[0], blocks[1], ...).
CMat block_diagonal(const std::vector<CMat>& blocks);

/// Re Tr(A B). For Hermitian A and B this is the real inner product
/// used throughout the solver.
double real_trace_product(const CMat& a, const CMat& b);

/// Real symmetric embedding [[Re X, -Im X], [Im X, Re X]].
/// For Hermitian X, Y: Tr(XY) = Tr(emb(X) emb(Y)) / 2 and
/// log|emb(X)| = 2 log|X|.
RMat embed_real(const CMat& x);

}  // namespace cranirs
