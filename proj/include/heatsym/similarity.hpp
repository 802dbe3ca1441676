#pragma once

// Similarity reduction of the power-law problem d(u) = u^k with constant flux:
//   u = t^alpha F(omega),  omega = x t^-beta,  alpha = 1/(k+2), beta = (k+1)/(k+2),
//   (F^k F')' + beta omega F' - alpha F = 0,  F^k F'(0) = q0,  F(inf) = 0,
// the exact parametric solution for k = -3/2, and a shooting solver for
// general k in (-2, 0).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace heatsym {

struct AnsatzExponents {
  double alpha;
  double beta;
};

// Throws std::invalid_argument for k = -2.
AnsatzExponents ansatz_exponents(double k);

// (F^k F')' + ((k+1)/(k+2)) omega F' - F/(k+2), with
// (F^k F')' = k F^{k-1} F'^2 + F^k F''.
double reduced_residual(double k, double omega, double F, double F_w, double F_ww);

struct BranchPoint {
  double omega;
  double F;
};

// General solution for k = -3/2:
//   E = 1 + r (C2 - asinh(sqrt(tau))),  r = sqrt((tau + 1)/tau),
//   omega = (C1^3 / 2) r / E,  F = 4 C1^-4 E^2.
// Throws DomainError for tau <= 0 or E = 0.
BranchPoint eval_general_parametric(double tau, double C1, double C2);

// The solution of the problem (C1 = 2/q0, C2 = 0). Requires q0 < 0.
BranchPoint eval_parametric(double tau, double q0);

// The tau > 0 with eval_parametric(tau, q0).omega = omega, by bisection to
// |d tau / tau| <= tol.
double solve_tau(double omega, double q0, double tol = 1e-12);

// u = t^2 F(x t) on the exact branch.
double eval_solution(double t, double x, double q0);

struct ExactJet {
  double u, u_t, u_x;
};
ExactJet eval_solution_jet(double t, double x, double q0);

struct ProfileNode {
  double omega;
  double F;
  double P;  // F^k F'
};

// A solution F(omega) of the reduced problem: either a table from shooting,
// interpolated by quintic Hermite polynomials with derivatives from the ODE, or the
// exact k = -3/2 branch.
class SimilarityProfile {
 public:
  static SimilarityProfile from_table(double k, double q0, std::vector<ProfileNode> nodes);
  static SimilarityProfile exact(double q0);

  double k() const noexcept { return k_; }
  double q0() const noexcept { return q0_; }
  bool is_exact() const noexcept { return nodes_.empty(); }
  const std::vector<ProfileNode>& table() const noexcept { return nodes_; }
  double omega_min() const;
  double omega_max() const;

  // Throws DomainError outside [omega_min, omega_max].
  double F(double omega) const;
  double dF(double omega) const;
  double P(double omega) const;

 private:
  SimilarityProfile(double k, double q0, std::vector<ProfileNode> nodes)
      : k_(k), q0_(q0), nodes_(std::move(nodes)) {}
  std::size_t locate(double omega) const;

  double k_;
  double q0_;
  std::vector<ProfileNode> nodes_;
};

struct ShootOptions {
  double omega0 = 1e-3;     // matching point for the flux condition
  double far_factor = 100;  // the far-field data are imposed at far_factor * omega_max
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step_rel = 0.02;
  int max_iterations = 200;
  long max_steps = 100'000;  // per trajectory
};

struct ShootReport {
  double amplitude = 0;       // far-field coefficient of omega^{2/k}
  double flux_at_omega0 = 0;  // P(omega0)
  double decay_ratio = 0;     // F(omega_max) / F(omega0)
  int iterations = 0;
  long steps = 0;
  int brackets = 0;  // sign changes found in the amplitude scan
};

// Solves the reduced problem for k in (-2, 0) and q0 < 0 on [omega0, omega_max]
// by shooting from the far field, where F ~ A omega^{2/k}, on A until
// |P(omega0) - q0| <= tol |q0|. When several amplitudes match the flux, the
// most strongly decaying solution is returned. Throws BracketError when no
// amplitude brackets the flux (in particular for q0 > 0).
SimilarityProfile shoot(double k, double q0, double omega_max, double tol = 1e-10,
                        const ShootOptions& opt = {}, ShootReport* report = nullptr);

// u = t^alpha F(x t^-beta)
double lift(const SimilarityProfile& profile, double t, double x);

std::string profile_csv(const SimilarityProfile& profile);

}  // namespace heatsym
