// SPDX-License-Identifier: Apache-2.0
//
// The relaxed convex subproblem over (Theta_bar, Omega) and the rounding
// back to a unit-modulus phase vector.
//
// The relaxation is solved by a primal barrier interior-point method that
// keeps the -log det terms as they are. The Newton system is never formed in
// full: the Theta_bar block is Theta_bar^-1 (x) Theta_bar^-1 plus one rank-one
// term per constraint, its unit-diagonal equalities reduce to a d x d real
// system with matrix |Theta_bar|^2 (entrywise), and the low-rank part is
// handled with the Woodbury identity. One Newton step costs O(m d^3) for m
// constraints and lifted dimension d = M N_I + 1.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cranirs/channel.hpp"
#include "cranirs/linalg.hpp"
#include "cranirs/rates.hpp"
#include "cranirs/surrogate.hpp"

namespace cranirs {

/// The relaxed problem is infeasible from the given data.
class InfeasibleError : public SolverError {
 public:
  using SolverError::SolverError;
};

struct SolverOptions {
  double tol = 1e-7;             // relative duality gap
  double barrier_growth = 20.0;  // t <- growth * t between centerings
  int max_newton_steps = 3000;
  double start_mixing = 0.05;    // Theta_bar start = (1-a) Theta_start + a I
};

/// min  Tr(Psi Theta_bar) + Tr(C Omega) + J1
/// s.t. every surrogate constraint, Theta_bar >= 0, diag(Theta_bar) = 1, Omega_l >= 0.
/// In scalar-beta mode Omega_l = beta_l I and the variables are the beta_l.
struct ConicProblem {
  SurrogateObjective objective;
  std::vector<SurrogateConstraint> constraints;
  CovarianceMode covariance = CovarianceMode::Full;
  int num_rrhs = 0;
  int antennas = 0;

  int lifted_dim() const { return static_cast<int>(objective.psi.rows()); }
};

ConicProblem make_conic_problem(SurrogateObjective objective, std::vector<SurrogateConstraint> constraints,
                                CovarianceMode covariance);

struct ConicEvaluation {
  double objective = 0.0;
  std::vector<double> lhs;  // per constraint
};

ConicEvaluation evaluate_problem(const ConicProblem& prob, const CMat& theta_bar, const QuantNoise& omega);

/// Same values computed through the real symmetric embedding of every
/// Hermitian matrix (traces halved, log-dets halved).
ConicEvaluation evaluate_embedded(const ConicProblem& prob, const CMat& theta_bar, const QuantNoise& omega);

/// Triangular factor Z certifying log|Omega| >= sum_i log Z_ii through
/// [[Omega, Z], [Z^H, Diag(Z)]] >= 0. At Z = R Diag(diag R) with R the
/// Cholesky factor the bound is tight.
struct HypographFactor {
  CMat z;
  double logdet = 0.0;          // sum_i log Z_ii
  double direct_logdet = 0.0;   // sum of log eigenvalues
  double min_block_eig = 0.0;   // smallest eigenvalue of the coupling block, relative to ||Omega||
};
HypographFactor hypograph_factor(const CMat& omega);

struct RelaxationResult {
  CMat theta_bar;
  QuantNoise omega;
  double objective = 0.0;
  std::vector<double> lhs;    // constraint left-hand sides at the solution
  std::vector<double> duals;  // 1 / (t * slack) at the first centering with relative gap <= 1e-6
  double duality_gap = 0.0;   // nu / t at exit
  int newton_steps = 0;
  double hypograph_error = 0.0;  // max |hypograph log-det - direct log-det| over all log-det terms
  double rank_one_ratio = 1.0;   // lambda_1 / sum(lambda)
  double max_diag_error = 0.0;   // max_i |Theta_bar_ii - 1|
};

/// Joint solve over Theta_bar and Omega. Throws InfeasibleError or SolverError.
RelaxationResult solve_relaxation(const ConicProblem& prob, const CMat& theta_start, const QuantNoise& omega_start,
                                  const SolverOptions& opts = {});

/// Solve over Omega with Theta_bar held fixed.
RelaxationResult solve_omega_only(const ConicProblem& prob, const CMat& theta_fixed, const QuantNoise& omega_start,
                                  const SolverOptions& opts = {});

/// Joint solve with Omega_l = beta_l I; `prob.covariance` must be ScalarBeta.
RelaxationResult solve_scalar_beta(const ConicProblem& prob, const CMat& theta_start, const QuantNoise& omega_start,
                                   const SolverOptions& opts = {});

std::vector<double> betas_of(const QuantNoise& omega);

struct RoundingResult {
  PhaseConfig phases;
  QuantNoise omega;
  double objective = 0.0;          // surrogate objective of the chosen candidate
  std::vector<double> slacks;      // surrogate constraint slacks, rhs - lhs
  int candidates = 0;              // random draws plus extras
  int resolves = 0;                // Omega re-solves actually run
};

/// Gaussian randomization: candidates theta_bar = exp(j arg(U Lambda^1/2 r)),
/// rotated so the last entry is 1. Each candidate's Omega is re-solved with
/// its phases fixed; the candidate with the smallest surrogate objective wins.
/// Candidates are visited in order of a Lagrangian lower bound on their
/// re-solved objective; the scan stops once no remaining candidate can beat
/// the incumbent by more than 1e-6 (1 + |objective|).
/// `extra` phase vectors join the candidate pool after the random draws.
RoundingResult randomize_round(const ConicProblem& prob, const RelaxationResult& relaxed, int num_candidates,
                               RngStream& rng, const SolverOptions& opts = {},
                               const std::vector<PhaseConfig>& extra = {});

/// Snap every phase to the nearest point of {2 pi k / 2^bits}.
PhaseConfig project_discrete(const PhaseConfig& phases, int bits);

struct ScaledNoise {
  QuantNoise omega;
  double gamma = 1.0;
};

/// Smallest gamma >= 1 (bisection to `tol`) for which gamma * Omega satisfies
/// every true fronthaul constraint.
ScaledNoise scale_to_feasible(CompressionMode mode, const CMat& v_l, const QuantNoise& omega,
                              const std::vector<double>& caps_nats, double power, double noise, double tol = 1e-6);

/// Sparse text dump of the embedded real problem (format in README).
void write_conic_problem(std::ostream& out, const ConicProblem& prob);

}  // namespace cranirs
