// SPDX-License-Identifier: Apache-2.0

#include "cranirs/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

namespace cranirs {

ConicProblem make_conic_problem(SurrogateObjective objective, std::vector<SurrogateConstraint> constraints,
                                CovarianceMode covariance) {
  ConicProblem p;
  p.covariance = covariance;
  p.antennas = objective.antennas_per_rrh;
  p.num_rrhs = p.antennas > 0 ? static_cast<int>(objective.omega_coeff.rows()) / p.antennas : 0;
  p.objective = std::move(objective);
  p.constraints = std::move(constraints);
  for (const auto& c : p.constraints) {
    if (c.upsilon.rows() != p.objective.psi.rows()) throw DimensionError("make_conic_problem: lifted dimension mismatch");
    if (static_cast<int>(c.linear.size()) != p.num_rrhs) throw DimensionError("make_conic_problem: RRH count mismatch");
  }
  return p;
}

ConicEvaluation evaluate_problem(const ConicProblem& prob, const CMat& theta_bar, const QuantNoise& omega) {
  ConicEvaluation ev;
  ev.objective = evaluate_surrogate(prob.objective, theta_bar, omega);
  for (const auto& c : prob.constraints) ev.lhs.push_back(evaluate_surrogate(c, theta_bar, omega));
  return ev;
}

namespace {

double embedded_trace(const CMat& a, const CMat& b) { return 0.5 * (embed_real(a) * embed_real(b)).trace(); }

double embedded_logdet(const CMat& x) {
  Eigen::LLT<RMat> llt(embed_real(hermitian_part(x)));
  if (llt.info() != Eigen::Success) throw NumericalError("evaluate_embedded: log-det argument not PD");
  return llt.matrixLLT().diagonal().array().log().sum();  // = 0.5 * log|emb(x)|
}

}  // namespace

ConicEvaluation evaluate_embedded(const ConicProblem& prob, const CMat& theta_bar, const QuantNoise& omega) {
  ConicEvaluation ev;
  ev.objective = embedded_trace(prob.objective.psi, theta_bar) + prob.objective.j1;
  for (int l = 0; l < omega.num_rrhs(); ++l)
    ev.objective += embedded_trace(prob.objective.omega_block(l), omega.blocks[static_cast<std::size_t>(l)]);
  for (const auto& c : prob.constraints) {
    double v = embedded_trace(c.upsilon, theta_bar) + c.j2;
    for (int l = 0; l < omega.num_rrhs(); ++l)
      v += embedded_trace(c.linear[static_cast<std::size_t>(l)], omega.blocks[static_cast<std::size_t>(l)]);
    for (const auto& t : c.logdets) {
      CMat x = omega.blocks[static_cast<std::size_t>(t.rrh)];
      x.diagonal().array() += t.shift;
      v -= embedded_logdet(x);
    }
    ev.lhs.push_back(v);
  }
  return ev;
}

HypographFactor hypograph_factor(const CMat& omega) {
  const CMat o = hermitian_part(omega);
  Eigen::LLT<CMat> llt(o);
  if (llt.info() != Eigen::Success) throw NumericalError("hypograph_factor: matrix is not PD");
  const CMat r = llt.matrixL();
  HypographFactor hf;
  hf.z = r * r.diagonal().asDiagonal();
  const Eigen::Index n = o.rows();
  for (Eigen::Index i = 0; i < n; ++i) hf.logdet += std::log(hf.z(i, i).real());
  Eigen::SelfAdjointEigenSolver<CMat> es(o, Eigen::EigenvaluesOnly);
  hf.direct_logdet = es.eigenvalues().array().log().sum();
  CMat block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = o;
  block.topRightCorner(n, n) = hf.z;
  block.bottomLeftCorner(n, n) = hf.z.adjoint();
  block.bottomRightCorner(n, n) = hf.z.diagonal().asDiagonal();
  const double scale = std::max(1e-300, block.cwiseAbs().maxCoeff());
  hf.min_block_eig = min_eigenvalue(block) / scale;
  return hf;
}

namespace {

// Real coordinates for the Omega blocks: Omega_l = reshape(T_l * w_l).
struct OmegaBasis {
  std::vector<CMat> t;
  std::vector<int> offset;
  std::vector<int> size;
  int total = 0;
  int n = 0;
};

OmegaBasis make_basis(CovarianceMode mode, int num_rrhs, int n) {
  OmegaBasis b;
  b.n = n;
  CMat t;
  if (mode == CovarianceMode::ScalarBeta) {
    t = CMat::Zero(n * n, 1);
    for (int i = 0; i < n; ++i) t(i + n * i, 0) = 1.0;
  } else {
    t = CMat::Zero(n * n, n * n);
    int col = 0;
    const double r = std::sqrt(0.5);
    for (int i = 0; i < n; ++i) t(i + n * i, col++) = 1.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        t(i + n * j, col) = r;
        t(j + n * i, col) = r;
        ++col;
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        t(i + n * j, col) = cd(0.0, r);
        t(j + n * i, col) = cd(0.0, -r);
        ++col;
      }
  }
  for (int l = 0; l < num_rrhs; ++l) {
    b.t.push_back(t);
    b.offset.push_back(b.total);
    b.size.push_back(static_cast<int>(t.cols()));
    b.total += static_cast<int>(t.cols());
  }
  return b;
}

CMat unvec(const CVec& v, int n) { return hermitian_part(Eigen::Map<const CMat>(v.data(), n, n)); }

CVec vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

RVec to_coordinates(const OmegaBasis& b, const QuantNoise& omega) {
  RVec w(b.total);
  for (std::size_t l = 0; l < b.t.size(); ++l) {
    const CMat& t = b.t[l];
    const RMat gram = (t.adjoint() * t).real();
    const RVec rhs = (t.adjoint() * vec(hermitian_part(omega.blocks[l]))).real();
    w.segment(b.offset[l], b.size[l]) = gram.ldlt().solve(rhs);
  }
  return w;
}

CMat block_of(const OmegaBasis& b, const RVec& w, std::size_t l) {
  const CVec v = b.t[l] * w.segment(b.offset[l], b.size[l]).cast<cd>();
  return unvec(v, b.n);
}

QuantNoise from_coordinates(const OmegaBasis& b, const RVec& w) {
  QuantNoise q;
  for (std::size_t l = 0; l < b.t.size(); ++l) q.blocks.push_back(block_of(b, w, l));
  return q;
}

// P0(R) = X (R - Diag(nu)) X with |X|^2 nu = diag(X R X): the inverse of the
// log-det Hessian restricted to directions with zero diagonal.
class DiagonalProjector {
 public:
  explicit DiagonalProjector(const CMat& x) : x_(x) {
    const RMat s = x.cwiseAbs2();
    ldlt_.compute(s);
  }

  CMat apply(const CMat& r) const {
    CMat xr = x_ * r;
    const RVec diag = (xr.array() * x_.transpose().array()).rowwise().sum().real();
    const RVec nu = ldlt_.solve(diag);
    xr -= x_ * nu.cast<cd>().asDiagonal();
    CMat out = xr * x_;
    return hermitian_part(out);
  }

 private:
  const CMat& x_;
  Eigen::LDLT<RMat> ldlt_;
};

struct Point {
  CMat x;          // empty when Theta_bar is fixed
  RVec w;          // Omega coordinates
  RVec r;          // one hypograph variable per log-det term, r_k <= log|Omega_l + shift_k I|
  double s = 0.0;  // phase I slack variable
};

// Primal barrier method on
//   min  t f0 - sum_j log(-f_j) - log|X| - sum_k [log(log|Omega_l(k) + s_k I| - r_k) + log|Omega_l(k) + s_k I|]
// with every f_j linear in (X, w, r). X keeps a unit diagonal throughout.
class BarrierSolver {
 public:
  static constexpr double kDualGap = 1e-6;
  static constexpr int kInnerCap = 1000;

  BarrierSolver(const ConicProblem& prob, const CMat* fixed_theta, const SolverOptions& opts)
      : prob_(prob), opts_(opts), phase_free_(fixed_theta == nullptr) {
    basis_ = make_basis(prob.covariance, prob.num_rrhs, prob.antennas);
    m_ = static_cast<int>(prob.constraints.size());
    d_ = prob.lifted_dim();
    p_ = basis_.total;

    c0_ = RVec::Zero(p_);
    k0_ = prob.objective.j1;
    for (int l = 0; l < prob.num_rrhs; ++l)
      c0_.segment(basis_.offset[l], basis_.size[l]) =
          (basis_.t[l].adjoint() * vec(prob.objective.omega_block(l))).real();
    if (!phase_free_) k0_ += real_trace_product(prob.objective.psi, *fixed_theta);

    for (const auto& con : prob.constraints) {
      RVec c = RVec::Zero(p_);
      for (int l = 0; l < prob.num_rrhs; ++l)
        c.segment(basis_.offset[l], basis_.size[l]) =
            (basis_.t[l].adjoint() * vec(con.linear[static_cast<std::size_t>(l)])).real();
      c_.push_back(c);
      double k = con.j2 - con.rhs;
      if (!phase_free_) k += real_trace_product(con.upsilon, *fixed_theta);
      k_.push_back(k);
      std::vector<int> terms;
      for (const auto& t : con.logdets) {
        int idx = 0;
        while (idx < static_cast<int>(terms_.size()) && !(terms_[idx].rrh == t.rrh && terms_[idx].shift == t.shift)) ++idx;
        if (idx == static_cast<int>(terms_.size())) terms_.push_back(t);
        terms.push_back(idx);
      }
      con_terms_.push_back(std::move(terms));
    }
    for (int l = 0; l < prob.num_rrhs; ++l) {
      bool covered = false;
      for (const auto& t : terms_) covered = covered || (t.rrh == l && t.shift == 0.0);
      if (!covered) psd_only_.push_back(l);
    }
    nt_ = static_cast<int>(terms_.size());
    const int n = prob.antennas;
    nu_ = m_ + (phase_free_ ? d_ : 0) + nt_ * (n + 1) + static_cast<int>(psd_only_.size()) * n;
  }

  RelaxationResult solve(const CMat* theta_start, const QuantNoise& omega_start) {
    Point pt;
    if (phase_free_) {
      pt.x = (1.0 - opts_.start_mixing) * hermitian_part(*theta_start);
      pt.x.diagonal().array() += opts_.start_mixing;
      reset_diagonal(pt.x);
    }
    pt.w = to_coordinates(basis_, omega_start);
    find_interior(pt);

    double t = initial_t(pt);
    double gap = nu_ / t;
    std::vector<double> duals;
    for (;;) {
      center(pt, t, false);
      gap = nu_ / t;
      const double scale = std::max(1.0, std::abs(objective(pt)));
      // 1/(t slack) loses accuracy as the slacks shrink; keep the first well-resolved estimate
      if (duals.empty() && gap <= kDualGap * scale) duals = dual_estimate(pt, t);
      if (gap <= opts_.tol * scale) break;
      t *= opts_.barrier_growth;
    }
    RelaxationResult res = finish(pt, gap);
    res.duals = duals.empty() ? dual_estimate(pt, t) : std::move(duals);
    return res;
  }

 private:
  struct Local {
    std::vector<CMat> term_inv;  // (Omega + shift I)^-1 per term
    RVec term_logdet;
    std::vector<CMat> psd_inv;   // Omega^-1 for RRHs without a shift-0 term
    RVec psd_logdet;
  };

  struct Direction {
    CMat dx;
    RVec dy;
    double decrement_sq = 0.0;
  };

  static void reset_diagonal(CMat& x) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, i) = 1.0;
  }

  static bool factor(const CMat& a, CMat* inv, double& logdet) {
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) return false;
    const auto& lm = llt.matrixLLT();
    logdet = 0.0;
    for (Eigen::Index i = 0; i < lm.rows(); ++i) {
      const double di = lm(i, i).real();
      if (!(di > 0.0) || !std::isfinite(di)) return false;
      logdet += 2.0 * std::log(di);
    }
    if (inv) *inv = hermitian_part(llt.solve(CMat::Identity(a.rows(), a.cols())));
    return true;
  }

  bool local_factors(const RVec& w, Local& loc, bool need_inverse) const {
    std::vector<CMat> blocks;
    for (int l = 0; l < prob_.num_rrhs; ++l) blocks.push_back(block_of(basis_, w, static_cast<std::size_t>(l)));
    loc.term_inv.assign(static_cast<std::size_t>(nt_), CMat());
    loc.term_logdet.resize(nt_);
    for (int k = 0; k < nt_; ++k) {
      CMat a = blocks[static_cast<std::size_t>(terms_[k].rrh)];
      a.diagonal().array() += terms_[k].shift;
      if (!factor(a, need_inverse ? &loc.term_inv[k] : nullptr, loc.term_logdet(k))) return false;
    }
    loc.psd_inv.assign(psd_only_.size(), CMat());
    loc.psd_logdet.resize(static_cast<Eigen::Index>(psd_only_.size()));
    for (std::size_t i = 0; i < psd_only_.size(); ++i)
      if (!factor(blocks[static_cast<std::size_t>(psd_only_[i])], need_inverse ? &loc.psd_inv[i] : nullptr,
                  loc.psd_logdet(static_cast<Eigen::Index>(i))))
        return false;
    return true;
  }

  double objective(const Point& pt) const {
    double v = c0_.dot(pt.w) + k0_;
    if (phase_free_) v += real_trace_product(prob_.objective.psi, pt.x);
    return v;
  }

  // f_j with the log-dets replaced by either the hypograph variables or the true values
  std::vector<double> constraint_values(const Point& pt, const RVec& logs) const {
    std::vector<double> f(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j) {
      double v = c_[static_cast<std::size_t>(j)].dot(pt.w) + k_[static_cast<std::size_t>(j)];
      if (phase_free_) v += real_trace_product(prob_.constraints[static_cast<std::size_t>(j)].upsilon, pt.x);
      for (int k : con_terms_[static_cast<std::size_t>(j)]) v -= logs(k);
      f[static_cast<std::size_t>(j)] = v;
    }
    return f;
  }

  bool barrier_value(const Point& pt, double t, bool phase1, double& phi) const {
    double ld_x = 0.0;
    if (phase_free_ && !try_logdet_hpd(pt.x, ld_x)) return false;
    Local loc;
    if (!local_factors(pt.w, loc, false)) return false;
    double acc = t * (phase1 ? pt.s : objective(pt)) - ld_x;
    for (int k = 0; k < nt_; ++k) {
      const double psi = loc.term_logdet(k) - pt.r(k);
      if (!(psi > 0.0)) return false;
      acc -= std::log(psi) + loc.term_logdet(k);
    }
    acc -= loc.psd_logdet.sum();
    for (double f : constraint_values(pt, pt.r)) {
      const double sl = phase1 ? pt.s - f : -f;
      if (!(sl > 0.0)) return false;
      acc -= std::log(sl);
    }
    if (!std::isfinite(acc)) return false;
    phi = acc;
    return true;
  }

  // gradient and Hessian of log|A| in the w coordinates of one RRH block, A^-1 = y
  void logdet_derivatives(int rrh, const CMat& y, RVec& grad, RMat& hess) const {
    const CMat& tl = basis_.t[static_cast<std::size_t>(rrh)];
    const int n = basis_.n;
    grad = (tl.adjoint() * vec(y)).real();
    CMat kron(n * n, n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int e = 0; e < n; ++e) kron(a + n * b, c + n * e) = y(a, c) * y(e, b);
    hess = (tl.adjoint() * kron * tl).real();  // Hessian of -log|A|
  }

  Direction direction(const Point& pt, double t, bool phase1) const {
    Local loc;
    if (!local_factors(pt.w, loc, true)) throw SolverError("conic: iterate left the domain");
    const auto f = constraint_values(pt, pt.r);
    const int q = p_ + nt_ + (phase1 ? 1 : 0);

    RMat h_local = RMat::Zero(q, q);
    RVec g_y = RVec::Zero(q);
    if (phase1) g_y(q - 1) = t;
    else g_y.head(p_) = t * c0_;
    for (int k = 0; k < nt_; ++k) {
      const int l = terms_[k].rrh;
      const int off = basis_.offset[static_cast<std::size_t>(l)];
      const int sz = basis_.size[static_cast<std::size_t>(l)];
      RVec g;
      RMat h;
      logdet_derivatives(l, loc.term_inv[static_cast<std::size_t>(k)], g, h);
      const double inv_psi = 1.0 / (loc.term_logdet(k) - pt.r(k));
      g_y.segment(off, sz) -= (1.0 + inv_psi) * g;
      g_y(p_ + k) += inv_psi;
      h_local.block(off, off, sz, sz) += (1.0 + inv_psi) * h;
      RVec a = RVec::Zero(q);
      a.segment(off, sz) = g;
      a(p_ + k) = -1.0;
      h_local += (inv_psi * inv_psi) * a * a.transpose();
    }
    for (std::size_t i = 0; i < psd_only_.size(); ++i) {
      const int l = psd_only_[i];
      const int off = basis_.offset[static_cast<std::size_t>(l)];
      const int sz = basis_.size[static_cast<std::size_t>(l)];
      RVec g;
      RMat h;
      logdet_derivatives(l, loc.psd_inv[i], g, h);
      g_y.segment(off, sz) -= g;
      h_local.block(off, off, sz, sz) += h;
    }

    std::vector<double> wgt(static_cast<std::size_t>(m_));
    RMat u_tilde(q, m_);
    for (int j = 0; j < m_; ++j) {
      const double sl = phase1 ? pt.s - f[static_cast<std::size_t>(j)] : -f[static_cast<std::size_t>(j)];
      const double wj = 1.0 / sl;
      wgt[static_cast<std::size_t>(j)] = wj;
      RVec u = RVec::Zero(q);
      u.head(p_) = c_[static_cast<std::size_t>(j)];
      for (int k : con_terms_[static_cast<std::size_t>(j)]) u(p_ + k) -= 1.0;
      if (phase1) u(q - 1) = -1.0;
      g_y += wj * u;
      u_tilde.col(j) = wj * u;
    }

    Direction dir;
    if (!phase_free_) {
      const RMat s_y = h_local + u_tilde * u_tilde.transpose();
      dir.dy = s_y.ldlt().solve(-g_y);
      dir.decrement_sq = -g_y.dot(dir.dy);
      return dir;
    }

    Eigen::LLT<CMat> xllt(pt.x);
    if (xllt.info() != Eigen::Success) throw SolverError("conic: Theta_bar left the PSD cone");
    CMat g_x = -hermitian_part(xllt.solve(CMat::Identity(d_, d_)));
    if (!phase1) g_x += t * prob_.objective.psi;
    for (int j = 0; j < m_; ++j)
      g_x += wgt[static_cast<std::size_t>(j)] * prob_.constraints[static_cast<std::size_t>(j)].upsilon;

    const DiagonalProjector proj(pt.x);
    std::vector<CMat> pu;
    pu.reserve(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j)
      pu.push_back(wgt[static_cast<std::size_t>(j)] * proj.apply(prob_.constraints[static_cast<std::size_t>(j)].upsilon));
    const CMat pg = proj.apply(g_x);

    RMat im = RMat::Identity(m_, m_);
    RVec b(m_);
    for (int i = 0; i < m_; ++i) {
      const CMat& ups = prob_.constraints[static_cast<std::size_t>(i)].upsilon;
      const double wi = wgt[static_cast<std::size_t>(i)];
      for (int j = 0; j < m_; ++j) im(i, j) += wi * real_trace_product(ups, pu[static_cast<std::size_t>(j)]);
      b(i) = wi * real_trace_product(ups, pg);
    }
    im = 0.5 * (im + im.transpose());
    const Eigen::LDLT<RMat> im_ldlt(im);
    const RVec beta = im_ldlt.solve(b);
    const RMat im_inv_ut = im_ldlt.solve(u_tilde.transpose());

    const RMat s_y = h_local + u_tilde * im_inv_ut;
    const RVec rhs = -g_y + u_tilde * beta;
    dir.dy = s_y.ldlt().solve(rhs);
    const RVec gamma = u_tilde.transpose() * dir.dy;
    const RVec coeff = beta - im_ldlt.solve(gamma);

    dir.dx = -pg;
    for (int i = 0; i < m_; ++i) dir.dx += coeff(i) * pu[static_cast<std::size_t>(i)];
    dir.dx = hermitian_part(dir.dx);
    dir.dx.diagonal().setZero();
    dir.decrement_sq = -(real_trace_product(g_x, dir.dx) + g_y.dot(dir.dy));
    return dir;
  }

  Point step(const Point& pt, const Direction& dir, double alpha, bool phase1) const {
    Point out = pt;
    if (phase_free_) {
      out.x += alpha * dir.dx;
      reset_diagonal(out.x);
    }
    out.w += alpha * dir.dy.head(p_);
    out.r += alpha * dir.dy.segment(p_, nt_);
    if (phase1) out.s += alpha * dir.dy(p_ + nt_);
    return out;
  }

  // Damped Newton centering. In phase I, returns as soon as s < stop_below.
  void center(Point& pt, double t, bool phase1, double stop_below = -std::numeric_limits<double>::infinity()) {
    double phi = 0.0;
    if (!barrier_value(pt, t, phase1, phi)) throw SolverError("conic: centering started outside the domain");
    for (int inner = 0; inner < kInnerCap; ++inner) {
      if (phase1 && pt.s < stop_below) return;
      const Direction dir = direction(pt, t, phase1);
      if (!(dir.decrement_sq >= 0.0) || dir.decrement_sq * 0.5 <= 1e-10) return;
      if (++newton_steps_ > opts_.max_newton_steps) throw SolverError("conic: maximum Newton steps exceeded");
      // quadratic region: full steps only need to stay in the domain
      const bool local = dir.decrement_sq < 0.1;
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const Point trial = step(pt, dir, alpha, phase1);
        double phi_trial = 0.0;
        if (barrier_value(trial, t, phase1, phi_trial) &&
            (local || phi_trial <= phi - 0.01 * alpha * dir.decrement_sq)) {
          pt = trial;
          phi = phi_trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) return;
    }
  }

  // t minimizing the Newton decrement of t f0 + barrier at pt; the decrement is
  // quadratic in t, so three evaluations fix it
  double initial_t(const Point& pt) const {
    const double d0 = direction(pt, 0.0, false).decrement_sq;
    const double d1 = direction(pt, 1.0, false).decrement_sq;
    const double d2 = direction(pt, 2.0, false).decrement_sq;
    const double a = 0.5 * (d2 - 2.0 * d1 + d0);
    const double b = 0.5 * (d1 - d0 - a);
    const double fallback = nu_ / std::max(1.0, std::abs(objective(pt)));
    if (!(a > 0.0) || !(b < 0.0)) return fallback;
    return std::clamp(-b / a, 1e-3 * fallback, 1e3 * fallback);
  }

  void find_interior(Point& pt) {
    if (phase_free_) {
      double ld = 0.0;
      if (!try_logdet_hpd(pt.x, ld)) throw SolverError("conic: starting Theta_bar is not PD");
    }
    Local loc;
    if (!local_factors(pt.w, loc, false)) throw SolverError("conic: starting Omega is not PD");
    const auto f_true = constraint_values(pt, loc.term_logdet);
    const double worst = *std::max_element(f_true.begin(), f_true.end());
    const double target = 1e-4;
    std::size_t max_terms = 1;
    for (const auto& ct : con_terms_) max_terms = std::max(max_terms, ct.size());
    if (worst < -target) {
      // hypograph margin small enough to keep every constraint strictly feasible
      pt.r = loc.term_logdet.array() - std::min(1.0, -worst / (2.0 * static_cast<double>(max_terms)));
      return;
    }
    pt.r = loc.term_logdet.array() - 1.0;
    const auto f = constraint_values(pt, pt.r);
    pt.s = *std::max_element(f.begin(), f.end()) + 1.0;
    const double nu1 = nu_ + 1.0;
    double t = 1.0;
    for (int outer = 0; outer < 60; ++outer) {
      center(pt, t, true, -target);
      if (pt.s < -target) break;
      if (nu1 / t < 1e-12) break;
      t *= opts_.barrier_growth;
    }
    const auto f_end = constraint_values(pt, pt.r);
    if (!(*std::max_element(f_end.begin(), f_end.end()) < 0.0))
      throw InfeasibleError("conic: relaxed problem is infeasible");
  }

  std::vector<double> dual_estimate(const Point& pt, double t) const {
    std::vector<double> out;
    for (double f : constraint_values(pt, pt.r)) out.push_back(1.0 / (t * -f));
    return out;
  }

  RelaxationResult finish(const Point& pt, double gap) const {
    RelaxationResult res;
    res.omega = from_coordinates(basis_, pt.w);
    res.objective = objective(pt);
    res.duality_gap = gap;
    res.newton_steps = newton_steps_;
    Local loc;
    if (!local_factors(pt.w, loc, false)) throw SolverError("conic: final iterate outside the domain");
    const auto f = constraint_values(pt, loc.term_logdet);
    for (int j = 0; j < m_; ++j) res.lhs.push_back(f[static_cast<std::size_t>(j)] + prob_.constraints[static_cast<std::size_t>(j)].rhs);
    for (const auto& term : terms_) {
      CMat a = res.omega.blocks[static_cast<std::size_t>(term.rrh)];
      a.diagonal().array() += term.shift;
      const HypographFactor hf = hypograph_factor(a);
      res.hypograph_error = std::max(res.hypograph_error, std::abs(hf.logdet - hf.direct_logdet));
    }
    if (phase_free_) {
      res.theta_bar = pt.x;
      Eigen::SelfAdjointEigenSolver<CMat> es(pt.x, Eigen::EigenvaluesOnly);
      const RVec ev = es.eigenvalues().cwiseMax(0.0);
      res.rank_one_ratio = ev.maxCoeff() / std::max(1e-300, ev.sum());
      for (Eigen::Index i = 0; i < d_; ++i)
        res.max_diag_error = std::max(res.max_diag_error, std::abs(pt.x(i, i) - 1.0));
    }
    return res;
  }

  const ConicProblem& prob_;
  SolverOptions opts_;
  bool phase_free_;
  OmegaBasis basis_;
  int m_ = 0;
  int d_ = 0;
  int p_ = 0;
  int nt_ = 0;
  std::vector<RVec> c_;
  std::vector<double> k_;
  std::vector<LogDetTerm> terms_;
  std::vector<std::vector<int>> con_terms_;
  std::vector<int> psd_only_;
  RVec c0_;
  double k0_ = 0.0;
  double nu_ = 0.0;
  int newton_steps_ = 0;
};

}  // namespace

RelaxationResult solve_relaxation(const ConicProblem& prob, const CMat& theta_start, const QuantNoise& omega_start,
                                  const SolverOptions& opts) {
  if (theta_start.rows() != prob.lifted_dim()) throw DimensionError("solve_relaxation: Theta_bar dimension mismatch");
  BarrierSolver solver(prob, nullptr, opts);
  return solver.solve(&theta_start, omega_start);
}

RelaxationResult solve_omega_only(const ConicProblem& prob, const CMat& theta_fixed, const QuantNoise& omega_start,
                                  const SolverOptions& opts) {
  if (theta_fixed.rows() != prob.lifted_dim()) throw DimensionError("solve_omega_only: Theta_bar dimension mismatch");
  BarrierSolver solver(prob, &theta_fixed, opts);
  RelaxationResult res = solver.solve(nullptr, omega_start);
  res.theta_bar = theta_fixed;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(theta_fixed), Eigen::EigenvaluesOnly);
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  res.rank_one_ratio = ev.maxCoeff() / std::max(1e-300, ev.sum());
  return res;
}

RelaxationResult solve_scalar_beta(const ConicProblem& prob, const CMat& theta_start, const QuantNoise& omega_start,
                                   const SolverOptions& opts) {
  if (prob.covariance != CovarianceMode::ScalarBeta)
    throw ConfigError("solve_scalar_beta: problem is not in scalar-beta mode");
  return solve_relaxation(prob, theta_start, omega_start, opts);
}

std::vector<double> betas_of(const QuantNoise& omega) {
  std::vector<double> out;
  for (const auto& b : omega.blocks) out.push_back(b.diagonal().real().mean());
  return out;
}

RoundingResult randomize_round(const ConicProblem& prob, const RelaxationResult& relaxed, int num_candidates,
                               RngStream& rng, const SolverOptions& opts, const std::vector<PhaseConfig>& extra) {
  if (num_candidates < 1) throw ConfigError("randomize_round: need at least one candidate");
  const int d = prob.lifted_dim();
  const int m = static_cast<int>(prob.constraints.size());
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(relaxed.theta_bar));
  RVec lam = es.eigenvalues();
  const double lam_floor = 1e-12 * std::max(1.0, lam.maxCoeff());
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > lam_floor ? std::sqrt(lam(i)) : 0.0;
  const CMat factor = es.eigenvectors() * lam.cast<cd>().asDiagonal();

  // tau* and the Omega part of the relaxed objective for the Lagrangian bound
  std::vector<double> tau_star(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    tau_star[static_cast<std::size_t>(j)] = real_trace_product(prob.constraints[static_cast<std::size_t>(j)].upsilon, relaxed.theta_bar);
  const double omega_part =
      relaxed.objective - real_trace_product(prob.objective.psi, relaxed.theta_bar) - prob.objective.j1;

  struct Candidate {
    PhaseConfig phases;
    double bound;
  };
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(num_candidates) + extra.size());
  auto add = [&](PhaseConfig ph) {
    const CVec ext = ph.extended();
    double bound = (ext.adjoint() * prob.objective.psi * ext)(0, 0).real() + prob.objective.j1 + omega_part;
    for (int j = 0; j < m; ++j) {
      const double tau = (ext.adjoint() * prob.constraints[static_cast<std::size_t>(j)].upsilon * ext)(0, 0).real();
      bound += relaxed.duals[static_cast<std::size_t>(j)] * (tau - tau_star[static_cast<std::size_t>(j)]);
    }
    cands.push_back({std::move(ph), bound});
  };
  for (int c = 0; c < num_candidates; ++c) {
    CVec r(d);
    for (int i = 0; i < d; ++i) r(i) = cd(rng.normal(), rng.normal()) * std::sqrt(0.5);
    CVec v = factor * r;
    for (int i = 0; i < d; ++i) {
      const double a = std::abs(v(i));
      v(i) = a > 0.0 ? v(i) / a : cd(1.0, 0.0);
    }
    v *= std::conj(v(d - 1));
    v(d - 1) = 1.0;
    add(PhaseConfig{v.head(d - 1)});
  }
  for (const auto& ph : extra) {
    if (ph.theta.size() != d - 1) throw DimensionError("randomize_round: extra candidate has the wrong length");
    add(ph);
  }
  std::vector<int> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cands[a].bound < cands[b].bound; });

  RoundingResult best;
  best.objective = std::numeric_limits<double>::infinity();
  best.candidates = static_cast<int>(cands.size());
  bool found = false;
  for (int idx : order) {
    const Candidate& cand = cands[static_cast<std::size_t>(idx)];
    if (found && cand.bound >= best.objective - 1e-6 * (1.0 + std::abs(best.objective))) break;
    RelaxationResult sol;
    try {
      ++best.resolves;
      sol = solve_omega_only(prob, cand.phases.lifted(), relaxed.omega, opts);
    } catch (const InfeasibleError&) {
      continue;
    }
    if (sol.objective < best.objective) {
      best.objective = sol.objective;
      best.phases = cand.phases;
      best.omega = sol.omega;
      best.slacks.clear();
      for (int j = 0; j < m; ++j)
        best.slacks.push_back(prob.constraints[static_cast<std::size_t>(j)].rhs - sol.lhs[static_cast<std::size_t>(j)]);
      found = true;
    }
  }
  if (!found) throw InfeasibleError("randomize_round: no candidate admits a feasible Omega");
  return best;
}

PhaseConfig project_discrete(const PhaseConfig& phases, int bits) {
  if (bits < 1 || bits > 52) throw ConfigError("project_discrete: bits must be in [1, 52]");
  const double levels = std::ldexp(1.0, bits);
  const double step = 2.0 * std::numbers::pi / levels;
  PhaseConfig out;
  out.theta.resize(phases.theta.size());
  for (Eigen::Index i = 0; i < phases.theta.size(); ++i) {
    double ang = std::arg(phases.theta(i));
    if (ang < 0.0) ang += 2.0 * std::numbers::pi;
    double k = std::nearbyint(ang / step);
    if (k >= levels) k -= levels;
    out.theta(i) = std::polar(1.0, k * step);
  }
  return out;
}

ScaledNoise scale_to_feasible(CompressionMode mode, const CMat& v_l, const QuantNoise& omega,
                              const std::vector<double>& caps_nats, double power, double noise, double tol) {
  auto feasible = [&](double g) {
    return min_slack(all_fronthaul_slacks(mode, v_l, omega.scaled(g), caps_nats, power, noise)) >= 0.0;
  };
  if (feasible(1.0)) return {omega, 1.0};
  double lo = 1.0;
  double hi = 2.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw SolverError("scale_to_feasible: no feasible scaling found");
  }
  while (hi - lo > tol * lo) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return {omega.scaled(hi), hi};
}

namespace {

void write_entries(std::ostream& out, const std::string& prefix, const CMat& coeff) {
  const RMat e = 0.5 * embed_real(coeff);
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = i; j < e.cols(); ++j)
      if (e(i, j) != 0.0) out << prefix << ' ' << i << ' ' << j << ' ' << e(i, j) << '\n';
}

}  // namespace

void write_conic_problem(std::ostream& out, const ConicProblem& prob) {
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  const int d = prob.lifted_dim();
  out << "# cranirs-conic v1\n";
  out << "# real symmetric embedding; <C, X> = sum over listed upper-triangle entries, off-diagonals counted twice\n";
  out << "mode " << to_string(prob.covariance) << '\n';
  out << "blocks " << 1 + prob.num_rrhs << '\n';
  out << "block 0 theta " << 2 * d << '\n';
  for (int l = 0; l < prob.num_rrhs; ++l) out << "block " << l + 1 << " omega " << 2 * prob.antennas << '\n';
  out << "equality diag block 0 value 1\n";
  out << "objective const " << prob.objective.j1 << '\n';
  write_entries(out, "objective coef 0", prob.objective.psi);
  for (int l = 0; l < prob.num_rrhs; ++l)
    write_entries(out, "objective coef " + std::to_string(l + 1), prob.objective.omega_block(l));
  for (const auto& c : prob.constraints) {
    out << "constraint " << c.id << " rhs " << c.rhs << " const " << c.j2 << '\n';
    write_entries(out, "  coef 0", c.upsilon);
    for (int l = 0; l < prob.num_rrhs; ++l)
      write_entries(out, "  coef " + std::to_string(l + 1), c.linear[static_cast<std::size_t>(l)]);
    for (const auto& t : c.logdets)
      out << "  neglogdet block " << t.rrh + 1 << " shift " << t.shift << " weight 0.5\n";
  }
  out << "end\n";
  out.precision(old_prec);
}

}  // namespace cranirs
