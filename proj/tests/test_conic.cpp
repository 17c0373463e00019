// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "cranirs/conic.hpp"
#include "support.hpp"

using namespace cranirs;
using namespace cranirs::testing;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Setup {
  ChannelSet ch;
  PhaseConfig phases;
  QuantNoise omega;  // feasible for the true constraints
  std::vector<double> caps;
  ConicProblem prob;
};

Setup make_setup(const Dims& d, CompressionMode mode, CovarianceMode cov, double cap_bits, RngStream& rng,
                 double irs_gain = 0.5) {
  Setup s;
  s.ch = random_channels(d, rng, irs_gain);
  s.phases = PhaseConfig::random(d.elements, rng);
  s.caps = caps_nats(d.num_rrhs, cap_bits);
  const CMat v = effective_channel(s.ch, s.phases).v;
  const QuantNoise start = QuantNoise::uniform(d.num_rrhs, d.antennas, 0.1);
  s.omega = scale_to_feasible(mode, v, start, s.caps, 1.0, 1.0).omega;
  const AuxiliaryState aux = build_auxiliary(mode, v, s.omega, 1.0, 1.0);
  s.prob = make_conic_problem(build_objective(s.ch, aux, 1.0, 1.0), build_constraints(s.ch, aux, 1.0, 1.0, s.caps), cov);
  return s;
}

bool feasible(const ConicProblem& prob, const ConicEvaluation& ev, double tol) {
  for (std::size_t j = 0; j < prob.constraints.size(); ++j)
    if (ev.lhs[j] > prob.constraints[j].rhs + tol) return false;
  return true;
}

double wrap(double a) { return a - kTwoPi * std::floor(a / kTwoPi); }

}  // namespace

TEST_CASE("relaxation invariants") {
  RngStream rng(51, 0, StreamPurpose::Test);
  for (auto mode : {CompressionMode::WynerZiv, CompressionMode::PointToPoint}) {
    const Setup s = make_setup({2, 2, 2, 6}, mode, CovarianceMode::Full, 3.0, rng);
    const RelaxationResult r = solve_relaxation(s.prob, s.phases.lifted(), s.omega);
    CHECK(r.max_diag_error <= 1e-7);
    CHECK(r.hypograph_error <= 1e-7);
    CHECK(r.duality_gap <= 1e-6 * (1.0 + std::abs(r.objective)));
    CHECK(min_eigenvalue(r.theta_bar) > -1e-9);
    for (const auto& b : r.omega.blocks) CHECK(min_eigenvalue(b) > 0.0);
    const ConicEvaluation ev = evaluate_problem(s.prob, r.theta_bar, r.omega);
    CHECK(std::abs(ev.objective - r.objective) < 1e-9);
    CHECK(feasible(s.prob, ev, 1e-9));
    for (double y : r.duals) CHECK(y >= 0.0);
    // the expansion point is feasible, so the relaxation can only improve on it
    CHECK(r.objective <= evaluate_problem(s.prob, s.phases.lifted(), s.omega).objective + 1e-8);
  }
}

TEST_CASE("Omega-only solve never worsens the fixed-phase point") {
  RngStream rng(52, 0, StreamPurpose::Test);
  for (int trial = 0; trial < 3; ++trial) {
    const Setup s = make_setup({2, 2, 2, 6}, CompressionMode::WynerZiv, CovarianceMode::Full, 4.0, rng);
    const CMat x = s.phases.lifted();
    const double before = evaluate_problem(s.prob, x, s.omega).objective;
    const RelaxationResult r = solve_omega_only(s.prob, x, s.omega);
    CHECK(r.objective <= before + 1e-8);
    CHECK(r.theta_bar == x);
    CHECK(feasible(s.prob, evaluate_problem(s.prob, x, r.omega), 1e-9));
  }
}

TEST_CASE("scalar relaxation against a phase and noise grid") {
  RngStream rng(53, 0, StreamPurpose::Test);
  const Setup s = make_setup({1, 1, 1, 1}, CompressionMode::WynerZiv, CovarianceMode::Full, 2.0, rng, 1.0);
  const RelaxationResult r = solve_relaxation(s.prob, s.phases.lifted(), s.omega);

  double best = std::numeric_limits<double>::infinity(), best_a = 0.0, best_lw = 0.0;
  double a_lo = 0.0, a_hi = kTwoPi, lw_lo = -12.0, lw_hi = 6.0;
  for (int level = 0; level < 4; ++level) {
    for (int i = 0; i < 128; ++i)
      for (int j = 0; j < 200; ++j) {
        const double a = a_lo + (a_hi - a_lo) * (i + 0.5) / 128.0;
        const double lw = lw_lo + (lw_hi - lw_lo) * (j + 0.5) / 200.0;
        RVec ang(1);
        ang(0) = a;
        const QuantNoise om = QuantNoise::uniform(1, 1, std::exp(lw));
        const ConicEvaluation ev = evaluate_problem(s.prob, PhaseConfig::from_angles(ang).lifted(), om);
        if (feasible(s.prob, ev, 0.0) && ev.objective < best) {
          best = ev.objective;
          best_a = a;
          best_lw = lw;
        }
      }
    const double da = 2.0 * (a_hi - a_lo) / 128.0, dl = 2.0 * (lw_hi - lw_lo) / 200.0;
    a_lo = best_a - da;
    a_hi = best_a + da;
    lw_lo = best_lw - dl;
    lw_hi = best_lw + dl;
  }
  REQUIRE(std::isfinite(best));
  CHECK(std::abs(r.objective - best) < 1e-3);
  CHECK(r.rank_one_ratio > 1.0 - 1e-6);
}

TEST_CASE("embedded evaluation matches complex evaluation") {
  RngStream rng(54, 0, StreamPurpose::Test);
  const Setup s = make_setup({2, 2, 2, 6}, CompressionMode::WynerZiv, CovarianceMode::Full, 3.0, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const CMat x = random_unit_diag_psd(7, rng);
    const QuantNoise om = random_noise({2, 2, 2, 6}, rng);
    const ConicEvaluation a = evaluate_problem(s.prob, x, om), b = evaluate_embedded(s.prob, x, om);
    CHECK(std::abs(a.objective - b.objective) < 1e-10);
    for (std::size_t j = 0; j < a.lhs.size(); ++j) CHECK(std::abs(a.lhs[j] - b.lhs[j]) < 1e-10);
  }
}

TEST_CASE("hypograph factor") {
  RngStream rng(55, 0, StreamPurpose::Test);
  for (int n : {1, 2, 4}) {
    const CMat o = random_hpd(n, rng);
    const HypographFactor hf = hypograph_factor(o);
    CHECK(std::abs(hf.logdet - logdet_hpd(o)) < 1e-12);
    CHECK(std::abs(hf.direct_logdet - logdet_hpd(o)) < 1e-12);
    CHECK(hf.min_block_eig > -1e-12);
    CHECK(hf.z.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm() == 0.0);
  }
  CHECK_THROWS_AS(hypograph_factor(-CMat::Identity(2, 2)), NumericalError);
}

TEST_CASE("discrete projection") {
  RngStream rng(56, 0, StreamPurpose::Test);
  const PhaseConfig p = PhaseConfig::random(64, rng);
  const PhaseConfig fine = project_discrete(p, 30);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(std::arg(fine.theta(i) * std::conj(p.theta(i)))) < 1e-8);

  const PhaseConfig one = project_discrete(p, 1);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::abs(one.theta(i).imag()) < 1e-15);
    CHECK(std::abs(std::abs(one.theta(i).real()) - 1.0) < 1e-15);
  }

  for (int bits : {1, 2, 3}) {
    const PhaseConfig q = project_discrete(p, bits);
    const double step = kTwoPi / std::ldexp(1.0, bits);
    for (int i = 0; i < 64; ++i) {
      // nearest level
      const double err = std::abs(std::arg(q.theta(i) * std::conj(p.theta(i))));
      CHECK(err <= 0.5 * step + 1e-12);
      const double k = wrap(std::arg(q.theta(i))) / step;
      CHECK(std::abs(k - std::nearbyint(k)) < 1e-9);
    }
    const PhaseConfig again = project_discrete(q, bits);
    CHECK((again.theta - q.theta).norm() < 1e-12);
  }
  CHECK_THROWS_AS(project_discrete(p, 0), ConfigError);
}

TEST_CASE("smallest feasible noise scaling") {
  RngStream rng(57, 0, StreamPurpose::Test);
  const Dims d{2, 2, 2, 4};
  for (auto mode : {CompressionMode::WynerZiv, CompressionMode::PointToPoint}) {
    const CMat v = random_complex(4, 2, rng, 3.0);
    const QuantNoise om = random_noise(d, rng, 1e-3);
    const auto caps = caps_nats(2, 2.0);
    const ScaledNoise sn = scale_to_feasible(mode, v, om, caps, 1.0, 1.0);
    CHECK(sn.gamma > 1.0);
    CHECK(min_slack(all_fronthaul_slacks(mode, v, sn.omega, caps, 1.0, 1.0)) >= 0.0);
    CHECK(min_slack(all_fronthaul_slacks(mode, v, om.scaled(sn.gamma / (1.0 + 2e-6)), caps, 1.0, 1.0)) < 0.0);
    const ScaledNoise again = scale_to_feasible(mode, v, sn.omega, caps, 1.0, 1.0);
    CHECK(again.gamma == 1.0);
  }
}

TEST_CASE("randomized rounding") {
  RngStream rng(58, 0, StreamPurpose::Test);
  const Setup s = make_setup({2, 2, 2, 6}, CompressionMode::WynerZiv, CovarianceMode::Full, 3.0, rng);

  SUBCASE("rank-one input is a fixed point") {
    RelaxationResult rel;
    rel.theta_bar = s.phases.lifted();
    rel.omega = solve_omega_only(s.prob, rel.theta_bar, s.omega).omega;
    rel.objective = evaluate_problem(s.prob, rel.theta_bar, rel.omega).objective;
    rel.duals.assign(s.prob.constraints.size(), 0.0);
    RngStream r(1, 0, StreamPurpose::Rounding);
    const RoundingResult rr = randomize_round(s.prob, rel, 5, r);
    CHECK((rr.phases.theta - s.phases.theta).norm() < 1e-10);
    CHECK(std::abs(rr.objective - rel.objective) < 1e-7);
  }

  SUBCASE("more candidates never hurt") {
    const RelaxationResult rel = solve_relaxation(s.prob, s.phases.lifted(), s.omega);
    RngStream r1(2, 0, StreamPurpose::Rounding), r200(2, 0, StreamPurpose::Rounding);
    const RoundingResult one = randomize_round(s.prob, rel, 1, r1);
    const RoundingResult many = randomize_round(s.prob, rel, 200, r200);
    CHECK(many.candidates == 200);
    // candidates whose Lagrangian bound is within 1e-6 of the incumbent are pruned
    CHECK(many.objective <= one.objective + 1e-6 * (1.0 + std::abs(one.objective)));
    CHECK(many.objective >= rel.objective - 1e-7);
    for (double sl : many.slacks) CHECK(sl >= -1e-9);
    CHECK(many.phases.max_modulus_error() < 1e-12);
  }
}

TEST_CASE("rounding on two elements against an exhaustive phase grid") {
  RngStream rng(59, 0, StreamPurpose::Test);
  const Setup s = make_setup({1, 1, 1, 2}, CompressionMode::WynerZiv, CovarianceMode::Full, 2.0, rng, 1.0);
  const RelaxationResult rel = solve_relaxation(s.prob, s.phases.lifted(), s.omega);
  RngStream r(3, 0, StreamPurpose::Rounding);
  const RoundingResult rr = randomize_round(s.prob, rel, 50, r);

  double grid = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      RVec ang(2);
      ang << kTwoPi * i / 64.0, kTwoPi * j / 64.0;
      // far from the expansion point the surrogate constraints may admit no Omega at all
      try {
        grid = std::min(grid, solve_omega_only(s.prob, PhaseConfig::from_angles(ang).lifted(), s.omega).objective);
      } catch (const InfeasibleError&) {
      }
    }
  CHECK(rr.objective <= grid + 0.05 * std::abs(grid));
}

TEST_CASE("scalar noise mode with one antenna matches the full mode") {
  RngStream rng(60, 0, StreamPurpose::Test);
  Setup s = make_setup({2, 1, 2, 4}, CompressionMode::WynerZiv, CovarianceMode::Full, 3.0, rng);
  const RelaxationResult full = solve_relaxation(s.prob, s.phases.lifted(), s.omega);
  s.prob.covariance = CovarianceMode::ScalarBeta;
  const RelaxationResult scalar = solve_scalar_beta(s.prob, s.phases.lifted(), s.omega);
  CHECK(std::abs(full.objective - scalar.objective) < 1e-6 * (1.0 + std::abs(full.objective)));
  for (double b : betas_of(scalar.omega)) CHECK(b > 0.0);

  s.prob.covariance = CovarianceMode::Full;
  CHECK_THROWS_AS(solve_scalar_beta(s.prob, s.phases.lifted(), s.omega), ConfigError);
}

TEST_CASE("scalar noise mode keeps Omega proportional to the identity") {
  RngStream rng(61, 0, StreamPurpose::Test);
  const Setup s = make_setup({2, 3, 2, 4}, CompressionMode::PointToPoint, CovarianceMode::ScalarBeta, 3.0, rng);
  const RelaxationResult r = solve_scalar_beta(s.prob, s.phases.lifted(), s.omega);
  const auto betas = betas_of(r.omega);
  for (int l = 0; l < 2; ++l) {
    CHECK(betas[static_cast<std::size_t>(l)] > 0.0);
    CHECK((r.omega.blocks[static_cast<std::size_t>(l)] - betas[static_cast<std::size_t>(l)] * CMat::Identity(3, 3)).norm() <
          1e-12);
  }
  CHECK(feasible(s.prob, evaluate_problem(s.prob, r.theta_bar, r.omega), 1e-9));
}

TEST_CASE("loose fronthaul drives the noise toward zero") {
  RngStream rng(62, 0, StreamPurpose::Test);
  const Setup s = make_setup({2, 2, 2, 4}, CompressionMode::WynerZiv, CovarianceMode::Full, 300.0, rng);
  const RelaxationResult rel = solve_relaxation(s.prob, s.phases.lifted(), s.omega);
  for (const auto& b : rel.omega.blocks) CHECK(b.norm() < 1e-4);

  // principal eigenvector phases as the comparison heuristic
  Eigen::SelfAdjointEigenSolver<CMat> es(rel.theta_bar);
  const CVec u = es.eigenvectors().col(es.eigenvalues().size() - 1);
  CVec th = u.head(u.size() - 1) * std::conj(u(u.size() - 1));
  for (Eigen::Index i = 0; i < th.size(); ++i) th(i) /= std::abs(th(i));
  const double eig = solve_omega_only(s.prob, PhaseConfig{th}.lifted(), rel.omega).objective;
  RngStream r(4, 0, StreamPurpose::Rounding);
  const RoundingResult rr = randomize_round(s.prob, rel, 100, r);
  CHECK(rr.objective <= eig + 0.05 * std::abs(eig));
  CHECK(rr.objective >= rel.objective - 1e-7);
}

TEST_CASE("conic problem dump evaluates to the same values") {
  RngStream rng(63, 0, StreamPurpose::Test);
  const Setup s = make_setup({2, 2, 2, 3}, CompressionMode::WynerZiv, CovarianceMode::Full, 3.0, rng);
  std::stringstream ss;
  write_conic_problem(ss, s.prob);

  const CMat x = random_unit_diag_psd(4, rng);
  const QuantNoise om = random_noise({2, 2, 2, 3}, rng);
  std::vector<RMat> blocks{embed_real(x)};
  for (const auto& b : om.blocks) blocks.push_back(embed_real(b));

  std::string line, header;
  std::getline(ss, header);
  CHECK(header == "# cranirs-conic v1");
  double objective = 0.0;
  std::vector<double> lhs;
  std::vector<double> rhs;
  bool in_constraint = false, ended = false;
  auto inner = [&](int blk, int i, int j, double c) {
    const double e = blocks[static_cast<std::size_t>(blk)](i, j);
    return (i == j ? 1.0 : 2.0) * c * e;
  };
  while (std::getline(ss, line)) {
    std::istringstream ls(line);
    std::string w;
    ls >> w;
    if (w.empty() || w[0] == '#') continue;
    if (w == "objective") {
      std::string kind;
      ls >> kind;
      if (kind == "const") {
        double c;
        ls >> c;
        objective += c;
      } else {
        int blk, i, j;
        double c;
        ls >> blk >> i >> j >> c;
        objective += inner(blk, i, j, c);
      }
    } else if (w == "constraint") {
      std::string id, tag;
      double r, c;
      ls >> id >> tag >> r >> tag >> c;
      lhs.push_back(c);
      rhs.push_back(r);
      in_constraint = true;
    } else if (w == "coef" && in_constraint) {
      int blk, i, j;
      double c;
      ls >> blk >> i >> j >> c;
      lhs.back() += inner(blk, i, j, c);
    } else if (w == "neglogdet") {
      std::string tag;
      int blk;
      double shift, weight;
      ls >> tag >> blk >> tag >> shift >> tag >> weight;
      RMat m = blocks[static_cast<std::size_t>(blk)];
      m.diagonal().array() += shift;
      Eigen::LLT<RMat> llt(m);
      REQUIRE(llt.info() == Eigen::Success);
      lhs.back() -= weight * 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    } else if (w == "end") {
      ended = true;
    }
  }
  CHECK(ended);
  const ConicEvaluation ev = evaluate_problem(s.prob, x, om);
  CHECK(std::abs(objective - ev.objective) < 1e-9);
  REQUIRE(lhs.size() == ev.lhs.size());
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    CHECK(std::abs(lhs[j] - ev.lhs[j]) < 1e-9);
    CHECK(rhs[j] == s.prob.constraints[j].rhs);
  }
}
