#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "heatsym/bvp.hpp"
#include "heatsym/errors.hpp"
#include "heatsym/similarity.hpp"

using namespace heatsym;

namespace {

// mpmath at 40 digits: (tau, q0, omega, F) on the branch.
struct Reference {
  double tau, q0, omega, F;
};
const Reference kReference[] = {
    {0.01, -1, 12108.007854009642, 2.7557256405333561e-6},
    {0.1, -1, 413.65443166429474, 0.00025714454369053539},
    {1, -1, 22.953309902479684, 0.015184459807617477},
    {10, -1, 4.3711617627820512, 0.23028143081087941},
    {100, -1, 1.99681930637542, 1.0132201803283633},
    {1e-6, -1, 12000010800.000077, 2.7777755555572698e-14},
    {1e6, -1, 0.60597767805745055, 10.892991688414989},
    {0.01, -2, 1513.5009817512052, 4.4091610248533697e-5},
    {1, -2, 2.8691637378099605, 0.24295135692187964},
    {100, -2, 0.2496024132969275, 16.211522885253813},
    {1e6, -2, 0.075747209757181319, 174.28786701463983},
    {0.1, -0.5, 3309.2354533143579, 1.6071533980658462e-5},
    {10, -0.5, 34.96929410225641, 0.014392589425679963},
    {1e-6, -0.5, 96000086400.000617, 1.7361097222232936e-15},
};

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return v;
}

// Derivatives in omega along the branch, from five-point differences in tau
// (no root finding involved).
struct BranchDerivatives {
  double omega, F, F_w, F_ww;
};
BranchDerivatives branch_derivatives(double tau, double q0) {
  const double h = 1e-3 * tau;
  double w[5], f[5];
  for (int i = 0; i < 5; ++i) {
    const auto p = eval_parametric(tau + (i - 2) * h, q0);
    w[i] = p.omega;
    f[i] = p.F;
  }
  auto d1 = [h](const double* y) { return (y[0] - 8 * y[1] + 8 * y[3] - y[4]) / (12 * h); };
  auto d2 = [h](const double* y) {
    return (-y[0] + 16 * y[1] - 30 * y[2] + 16 * y[3] - y[4]) / (12 * h * h);
  };
  const double wt = d1(w), wtt = d2(w), ft = d1(f), ftt = d2(f);
  return {w[2], f[2], ft / wt, (ftt * wt - ft * wtt) / (wt * wt * wt)};
}

// Normalized residual of u_t = (u^k u_x)_x from fourth-order differences.
double pde_residual(double k, const std::function<double(double, double)>& u, double t, double x) {
  const double ht = 1e-3 * t, hx = 1e-3 * x;
  auto D1 = [](double m2, double m1, double p1, double p2, double h) {
    return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h);
  };
  const double v = u(t, x);
  const double um2 = u(t, x - 2 * hx), um1 = u(t, x - hx), up1 = u(t, x + hx), up2 = u(t, x + 2 * hx);
  const double ut = D1(u(t - 2 * ht, x), u(t - ht, x), u(t + ht, x), u(t + 2 * ht, x), ht);
  const double ux = D1(um2, um1, up1, up2, hx);
  const double uxx = (-um2 + 16 * um1 - 30 * v + 16 * up1 - up2) / (12 * hx * hx);
  const double a = k * std::pow(v, k - 1) * ux * ux, b = std::pow(v, k) * uxx;
  return std::fabs(ut - a - b) / (std::fabs(ut) + std::fabs(a) + std::fabs(b));
}

}  // namespace

TEST(Ansatz, Exponents) {
  auto e = ansatz_exponents(1);
  EXPECT_DOUBLE_EQ(e.alpha, 1.0 / 3);
  EXPECT_DOUBLE_EQ(e.beta, 2.0 / 3);
  e = ansatz_exponents(-1.5);
  EXPECT_DOUBLE_EQ(e.alpha, 2);
  EXPECT_DOUBLE_EQ(e.beta, -1);
  e = ansatz_exponents(0);
  EXPECT_DOUBLE_EQ(e.alpha, 0.5);
  EXPECT_DOUBLE_EQ(e.beta, 0.5);
  EXPECT_THROW(ansatz_exponents(-2), std::invalid_argument);
}

TEST(ReducedResidual, CoefficientsAndConventions) {
  // k = -3/2: (F^{-3/2}F')' - omega F' - 2F
  const double F = 2, Fw = -0.3, Fww = 0.7, w = 1.7;
  const double expect =
      -1.5 * std::pow(F, -2.5) * Fw * Fw + std::pow(F, -1.5) * Fww - w * Fw - 2 * F;
  EXPECT_NEAR(reduced_residual(-1.5, w, F, Fw, Fww), expect, 1e-15);
  EXPECT_EQ(reduced_residual(2, 3, 0, 0, 0), 0);
  EXPECT_THROW(reduced_residual(-1.5, 1, -1, 0, 0), DomainError);
  // F = A omega^{2/k} with A^k = -k/(2(k+2)) is an exact power solution.
  for (double k : {-1.5, -1.0, -0.5}) {
    const double A = std::pow(-k / (2 * (k + 2)), 1 / k), m = 2 / k;
    for (double w2 : {0.5, 3.0, 20.0}) {
      const double Fp = A * std::pow(w2, m);
      const double r = reduced_residual(k, w2, Fp, m * Fp / w2, m * (m - 1) * Fp / (w2 * w2));
      EXPECT_LT(std::fabs(r), 1e-12 * (1 + Fp)) << k << " " << w2;
    }
  }
}

TEST(Parametric, AgreesWithExtendedPrecision) {
  for (const auto& r : kReference) {
    const auto p = eval_parametric(r.tau, r.q0);
    EXPECT_LT(rel(p.omega, r.omega), 1e-13) << r.tau << " " << r.q0;
    EXPECT_LT(rel(p.F, r.F), 1e-12) << r.tau << " " << r.q0;
  }
  EXPECT_THROW(eval_parametric(0, -1), DomainError);
  EXPECT_THROW(eval_parametric(-1, -1), DomainError);
  EXPECT_THROW(eval_parametric(1, 1), DomainError);
}

TEST(Parametric, GeneralFormSpecializes) {
  for (double q0 : {-1.0, -2.0, -0.5}) {
    for (double tau : logspace(0.01, 100, 101)) {
      const auto a = eval_general_parametric(tau, 2 / q0, 0);
      const auto b = eval_parametric(tau, q0);
      EXPECT_LT(rel(a.omega, b.omega), 1e-12) << tau;
      EXPECT_LT(rel(a.F, b.F), 1e-12) << tau;
    }
  }
  // E = 1 when C2 = ln(1 + sqrt 2) at tau = 1.
  const auto p = eval_general_parametric(1, 2, std::log(1 + std::sqrt(2.0)));
  EXPECT_NEAR(p.omega, 4 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(p.F, 0.25, 1e-15);
  EXPECT_GE(eval_general_parametric(0.3, 1.5, 2.0).F, 0);
  EXPECT_THROW(eval_general_parametric(0, 2, 0), DomainError);
}

TEST(Parametric, SatisfiesReducedEquation) {
  double worst = 0;
  for (double tau : logspace(0.01, 100, 200)) {
    const auto d = branch_derivatives(tau, -1);
    const double r = reduced_residual(-1.5, d.omega, d.F, d.F_w, d.F_ww);
    worst = std::max(worst, std::fabs(r));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Parametric, MonotoneBranch) {
  double prev_w = INFINITY, prev_F = 0;
  for (double tau : logspace(1e-4, 1e4, 2000)) {
    const auto p = eval_parametric(tau, -1);
    EXPECT_GT(p.omega, 0);
    EXPECT_LT(p.omega, prev_w) << tau;
    EXPECT_GT(p.F, prev_F) << tau;  // so F decreases in omega
    prev_w = p.omega;
    prev_F = p.F;
  }
  // tau -> 0: omega -> inf, F -> 0; tau -> inf: omega -> 0, F -> inf.
  EXPECT_GT(eval_parametric(1e-10, -1).omega, 1e14);
  EXPECT_LT(eval_parametric(1e-10, -1).F, 1e-20);
  // omega ~ 4 / ln(4 tau) is slow to reach zero
  EXPECT_LT(eval_parametric(1e200, -1).omega, 0.02);
  EXPECT_GT(eval_parametric(1e200, -1).F, 1e4);
}

TEST(Parametric, FluxLimitIsQ0) {
  for (double q0 : {-1.0, -2.0}) {
    const auto prof = SimilarityProfile::exact(q0);
    EXPECT_LT(rel(prof.P(1e-6), q0), 1e-3);
    // the same limit from the tau-differences
    const auto d = branch_derivatives(1e12, q0);
    EXPECT_LT(rel(std::pow(d.F, -1.5) * d.F_w, q0), 1e-3);
  }
}

TEST(SolveTau, InvertsTheBranch) {
  EXPECT_NEAR(solve_tau(22.9533, -1), 1, 1e-4);
  for (double q0 : {-1.0, -3.0}) {
    for (double tau : {0.1, 1.0, 10.0}) {
      EXPECT_LT(rel(solve_tau(eval_parametric(tau, q0).omega, q0), tau), 1e-11);
    }
  }
  EXPECT_LT(solve_tau(1e4, -1), solve_tau(10, -1));
  EXPECT_THROW(solve_tau(0, -1), DomainError);
  EXPECT_THROW(solve_tau(1, 1), DomainError);
}

TEST(ExactSolution, ValuesAndScaling) {
  EXPECT_LT(rel(eval_solution(1, 22.9533, -1), 0.0151844), 1e-4);
  for (double w0 : {0.3, 2.0, 17.0}) {
    EXPECT_LT(rel(eval_solution(0.5, 2 * w0, -1), 0.25 * eval_solution(1, w0, -1)), 1e-13);
  }
  for (double x : logspace(1e-3, 1e3, 30)) EXPECT_GT(eval_solution(0.7, x, -1), 0);
  EXPECT_THROW(eval_solution(0, 1, -1), DomainError);
  EXPECT_THROW(eval_solution(1, 0, -1), DomainError);
}

TEST(ExactSolution, JetAndPde) {
  const double h = 1e-4;
  for (double t : {0.5, 1.0, 5.0}) {
    for (double x : {0.2, 1.0, 7.0}) {
      const auto j = eval_solution_jet(t, x, -1);
      const double ut = (eval_solution(t + h, x, -1) - eval_solution(t - h, x, -1)) / (2 * h);
      const double ux = (eval_solution(t, x + h, -1) - eval_solution(t, x - h, -1)) / (2 * h);
      EXPECT_LT(std::fabs(j.u_t - ut), 1e-6 * (std::fabs(ut) + j.u));
      EXPECT_LT(std::fabs(j.u_x - ux), 1e-6 * (std::fabs(ux) + j.u));
      EXPECT_LT(pde_residual(-1.5, [](double tt, double xx) { return eval_solution(tt, xx, -1); },
                             t, x),
                1e-6);
    }
  }
}

TEST(Profile, TableAndExact) {
  EXPECT_THROW(SimilarityProfile::from_table(-1, -1, {{1, 2, 0}, {0.5, 1, 0}}), std::invalid_argument);
  EXPECT_THROW(SimilarityProfile::exact(1), DomainError);
  const auto ex = SimilarityProfile::exact(-1);
  EXPECT_TRUE(ex.is_exact());
  const auto p = eval_parametric(1, -1);
  EXPECT_LT(rel(ex.F(p.omega), p.F), 1e-12);
  // a table sampled from an exact power solution interpolates it
  const double k = -1, A = std::pow(-k / (2 * (k + 2)), 1 / k);
  std::vector<ProfileNode> nodes;
  for (double w : logspace(0.1, 10, 200)) {
    const double F = A / (w * w);
    nodes.push_back({w, F, std::pow(F, k) * (-2 * F / w)});
  }
  const auto tab = SimilarityProfile::from_table(k, -1, nodes);
  for (double w : {0.13, 1.0, 4.4}) {
    EXPECT_LT(rel(tab.F(w), A / (w * w)), 1e-8);
    EXPECT_LT(rel(tab.dF(w), -2 * A / (w * w * w)), 1e-5);
  }
  EXPECT_THROW(tab.F(20), DomainError);
  EXPECT_THROW(tab.F(0.01), DomainError);
  EXPECT_EQ(profile_csv(tab).substr(0, 10), "omega,F,P\n");
}

TEST(Shoot, MatchesExactBranch) {
  ShootReport rep;
  const auto prof = shoot(-1.5, -1, 40, 1e-10, {}, &rep);
  EXPECT_LT(rel(rep.flux_at_omega0, -1), 1e-9);
  double worst = 0;
  for (double w : logspace(1, 10, 50)) {
    const double exact = eval_parametric(solve_tau(w, -1), -1).F;
    worst = std::max(worst, rel(prof.F(w), exact));
  }
  EXPECT_LE(worst, 1e-3);
  const auto& tab = prof.table();
  for (std::size_t i = 1; i < tab.size(); ++i) EXPECT_LT(tab[i].F, tab[i - 1].F);
  EXPECT_LT(rep.decay_ratio, 1e-6);
}

TEST(Shoot, OtherExponents) {
  for (double k : {-1.0, -0.5}) {
    ShootReport rep;
    const auto prof = shoot(k, -1, 20, 1e-10, {}, &rep);
    EXPECT_LT(rel(rep.flux_at_omega0, -1), 1e-9) << k;
    const auto& tab = prof.table();
    for (std::size_t i = 1; i < tab.size(); ++i) ASSERT_LT(tab[i].F, tab[i - 1].F);
    // reduced equation on the interpolant
    for (double w : {0.05, 0.5, 2.0, 10.0}) {
      const double h = 1e-3 * w;
      const double f0 = prof.F(w);
      const double fw = prof.dF(w), fww = (prof.dF(w + h) - prof.dF(w - h)) / (2 * h);
      const double r = reduced_residual(k, w, f0, fw, fww);
      const double scale = std::fabs(k * std::pow(f0, k - 1) * fw * fw) +
                           std::fabs(std::pow(f0, k) * fww) + std::fabs(w * fw) + f0;
      EXPECT_LT(std::fabs(r) / scale, 1e-5) << k << " " << w;
    }
  }
}

TEST(Shoot, AlgebraicSolutionForKMinusOne) {
  // k = -1: (ln F)'' = F, decaying algebraically as F = 2/(omega + c)^2 with
  // P = -2/(omega + c); P(omega0) = -1 fixes c = 2 - omega0.
  ShootOptions opt;
  const auto prof = shoot(-1, -1, 40, 1e-10, opt);
  const double c = 2 - opt.omega0;
  for (double w : {1e-3, 0.1, 1.0, 10.0, 40.0}) {
    EXPECT_LT(rel(prof.F(w), 2 / ((w + c) * (w + c))), 1e-6) << w;
    EXPECT_LT(rel(prof.P(w), -2 / (w + c)), 1e-6) << w;
  }
}

TEST(Shoot, RejectsBadInput) {
  EXPECT_THROW(shoot(-1.5, 1, 40), BracketError);
  EXPECT_THROW(shoot(0.5, -1, 40), std::invalid_argument);
  EXPECT_THROW(shoot(-1.5, 0, 40), std::invalid_argument);
  EXPECT_THROW(shoot(-1.5, -1, 1e-4), std::invalid_argument);
}

TEST(Shoot, ScalesUnderNormalization) {
  const double k = -1.5;
  const BVPSpec spec{Power{1, k}, Const{-2}, 0};
  const auto [normalized, g] = normalize_q0(spec);
  ASSERT_EQ(flux_amplitude(normalized.q), -1);
  const auto p2 = shoot(k, -2, 40);
  const auto p1 = shoot(k, -1, 40);
  const auto mapped = map_solution(g, [&](double t, double x) { return lift(p2, t, x); });
  for (double x : {1.0, 3.0, 10.0}) {
    EXPECT_LT(rel(mapped(1, x), lift(p1, 1, x)), 1e-5) << x;
  }
}

TEST(Lift, IdentityExactAndPde) {
  const auto prof = shoot(-1.5, -1, 40);
  for (double x : {0.01, 1.0, 30.0}) EXPECT_EQ(lift(prof, 1, x), prof.F(x));
  for (double x : {0.2, 0.5, 1.0, 2.0}) {
    EXPECT_LT(rel(lift(prof, 5, x), eval_solution(5, x, -1)), 1e-4) << x;
  }
  EXPECT_THROW(lift(prof, 1, 100), DomainError);

  for (double k : {-1.5, -1.0}) {
    const auto pk = k == -1.5 ? prof : shoot(k, -1, 40);
    auto u = [&](double t, double x) { return lift(pk, t, x); };
    for (double t : {1.0, 2.0}) {
      for (double x : {0.1, 0.5, 2.0, 5.0}) {
        EXPECT_LE(pde_residual(k, u, t, x), 1e-4) << k << " " << t << " " << x;
      }
    }
    // d(u) u_x at small x reproduces q0
    const double t = 1.5, beta = ansatz_exponents(k).beta;
    const double x = 3e-3 * std::pow(t, beta), h = 1e-3 * x;
    const double ux = (u(t, x + h) - u(t, x - h)) / (2 * h);
    EXPECT_LT(rel(std::pow(u(t, x), k) * ux, -1), 1e-3) << k;
  }
}
