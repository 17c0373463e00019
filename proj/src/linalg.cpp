// SPDX-License-Identifier: Apache-2.0

#include "cranirs/linalg.hpp"

#include <cmath>

namespace cranirs {

bool try_logdet_hpd(const CMat& a, double& out) {
  if (a.rows() != a.cols()) return false;
  if (a.rows() == 0) {
    out = 0.0;
    return true;
  }
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) return false;
  const CMat& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double d = l(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    acc += std::log(d);
  }
  out = 2.0 * acc;
  return std::isfinite(out);
}

double logdet_hpd(const CMat& a) {
  if (a.rows() != a.cols()) throw DimensionError("logdet_hpd: matrix is not square");
  double v = 0.0;
  if (!try_logdet_hpd(a, v)) throw NumericalError("logdet_hpd: matrix is not positive definite");
  return v;
}

CMat inverse_hpd(const CMat& a) {
  if (a.rows() == 0) return CMat(0, 0);
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw NumericalError("inverse_hpd: matrix is not positive definite");
  return hermitian_part(llt.solve(CMat::Identity(a.rows(), a.cols())));
}

double min_eigenvalue(const CMat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double hermitian_defect(const CMat& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMat block_diagonal(const std::vector<CMat>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMat out = CMat::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

double real_trace_product(const CMat& a, const CMat& b) {
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum().real();
}

RMat embed_real(const CMat& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  RMat out(2 * n, 2 * m);
  out.topLeftCorner(n, m) = x.real();
  out.topRightCorner(n, m) = -x.imag();
  out.bottomLeftCorner(n, m) = x.imag();
  out.bottomRightCorner(n, m) = x.real();
  return out;
}

}  // namespace cranirs
