#include "heatsym/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "heatsym/errors.hpp"
#include "heatsym/ode.hpp"
#include "heatsym/symfun.hpp"

namespace heatsym {

AnsatzExponents ansatz_exponents(double k) {
  if (k == -2) throw std::invalid_argument("ansatz_exponents: k = -2 has no scaling ansatz");
  return {1 / (k + 2), (k + 1) / (k + 2)};
}

double reduced_residual(double k, double omega, double F, double F_w, double F_ww) {
  if (F == 0 && F_w == 0 && F_ww == 0 && k > 0) return 0;
  if (F < 0 && std::floor(k) != k) {
    throw DomainError("reduced_residual: F = " + format_number(F) + " with fractional k");
  }
  if (F == 0 && k < 1) throw DomainError("reduced_residual: F = 0 with k < 1");
  const auto [alpha, beta] = ansatz_exponents(k);
  const double Fk = std::pow(F, k);
  return k * std::pow(F, k - 1) * F_w * F_w + Fk * F_ww + beta * omega * F_w - alpha * F;
}

namespace {

// The k = -3/2 branch in the variable s = asinh(sqrt(tau)):
//   omega = W / g(s),  g = s - tanh s,          W = 4/|q0|^3,
//   F     = Q h(s)^2,  h = s coth s - 1,        Q = q0^4/4.
// Series below s = 0.05 avoid the cancellation in g and h.
constexpr double kSeriesLimit = 0.05;

double branch_g(double s) {
  if (s < kSeriesLimit) {
    const double s2 = s * s;
    return s * s2 *
           (1.0 / 3 +
            s2 * (-2.0 / 15 + s2 * (17.0 / 315 + s2 * (-62.0 / 2835 + s2 * 1382.0 / 155925))));
  }
  return s - std::tanh(s);
}

double branch_dg(double s) {
  const double th = std::tanh(s);
  return th * th;
}

double branch_h(double s) {
  if (s < kSeriesLimit) {
    const double s2 = s * s;
    return s2 * (1.0 / 3 + s2 * (-1.0 / 45 + s2 * (2.0 / 945 - s2 / 4725)));
  }
  return s / std::tanh(s) - 1;
}

double branch_dh(double s) {
  if (s < kSeriesLimit) {
    const double s2 = s * s;
    return s * (2.0 / 3 + s2 * (-4.0 / 45 + s2 * (12.0 / 945 - s2 * 8.0 / 4725)));
  }
  const double sh = std::sinh(s);
  return 1 / std::tanh(s) - s / (sh * sh);
}

void require_physical(double q0) {
  if (!(q0 < 0)) {
    throw DomainError("the exact branch needs q0 < 0 (outward flux), got q0 = " +
                      format_number(q0));
  }
}

struct BranchScales {
  double W, Q;
  explicit BranchScales(double q0) {
    const double a = std::fabs(q0);
    W = 4 / (a * a * a);
    Q = a * a * a * a / 4;
  }
};

// s with W / g(s) = omega; bisection on log s until |d tau / tau| <= tol.
double branch_parameter(double omega, double q0, double tol) {
  require_physical(q0);
  if (!(omega > 0) || !std::isfinite(omega)) {
    throw DomainError("exact branch needs 0 < omega < inf, got " + format_number(omega));
  }
  const BranchScales b(q0);
  const double target = b.W / omega;
  // g(s) <= s^3/3 and g(s) >= s - 1 bound the root (with a margin: tanh
  // rounds to 1 for large s).
  double lo = std::cbrt(3 * target);
  double hi = target + 2;
  if (lo > hi) std::swap(lo, hi);
  if (!(branch_g(lo) <= target && branch_g(hi) >= target)) {
    throw BracketError("solve_tau: no bracket for omega = " + format_number(omega) +
                       " (g(lo) = " + format_number(branch_g(lo)) +
                       ", g(hi) = " + format_number(branch_g(hi)) +
                       ", target = " + format_number(target) + ")");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (branch_g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double s = std::sqrt(lo * hi);
    // d tau / tau = 2 s coth(s) ds / s
    const double scoth = s < kSeriesLimit ? 1 + branch_h(s) : s / std::tanh(s);
    if (2 * scoth * (hi - lo) / lo <= tol) break;
  }
  return std::sqrt(lo * hi);
}

struct BranchState {
  double omega, F, F_w;
};

BranchState branch_state(double s, double q0) {
  const BranchScales b(q0);
  const double g = branch_g(s), h = branch_h(s);
  const double F = b.Q * h * h;
  const double dF = 2 * b.Q * h * branch_dh(s);
  const double domega = -b.W * branch_dg(s) / (g * g);
  return {b.W / g, F, dF / domega};
}

}  // namespace

BranchPoint eval_general_parametric(double tau, double C1, double C2) {
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw DomainError("parametric solution needs tau > 0, got " + format_number(tau));
  }
  const double r = std::sqrt((tau + 1) / tau);
  const double L = std::log(std::sqrt(tau) + std::sqrt(tau + 1));
  const double E = 1 + r * (C2 - L);
  if (E == 0) throw DomainError("parametric solution has a pole (E = 0) at tau = " + format_number(tau));
  const double c2 = C1 * C1;
  return {C1 * c2 / 2 * r / E, 4 / (c2 * c2) * E * E};
}

BranchPoint eval_parametric(double tau, double q0) {
  require_physical(q0);
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw DomainError("parametric solution needs tau > 0, got " + format_number(tau));
  }
  const BranchState st = branch_state(std::asinh(std::sqrt(tau)), q0);
  return {st.omega, st.F};
}

double solve_tau(double omega, double q0, double tol) {
  const double sh = std::sinh(branch_parameter(omega, q0, tol));
  return sh * sh;
}

double eval_solution(double t, double x, double q0) { return eval_solution_jet(t, x, q0).u; }

ExactJet eval_solution_jet(double t, double x, double q0) {
  if (!(t > 0) || !(x > 0)) {
    throw DomainError("exact solution needs t > 0 and x > 0, got t = " + format_number(t) +
                      ", x = " + format_number(x));
  }
  const double omega = x * t;
  const BranchState st = branch_state(branch_parameter(omega, q0, 1e-14), q0);
  // u = t^2 F(x t)
  return {t * t * st.F, 2 * t * st.F + t * t * x * st.F_w, t * t * t * st.F_w};
}

SimilarityProfile SimilarityProfile::from_table(double k, double q0, std::vector<ProfileNode> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("profile table needs at least two nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i].omega > nodes[i - 1].omega)) {
      throw std::invalid_argument("profile table must have strictly increasing omega");
    }
  }
  ansatz_exponents(k);
  return SimilarityProfile(k, q0, std::move(nodes));
}

SimilarityProfile SimilarityProfile::exact(double q0) {
  require_physical(q0);
  return SimilarityProfile(-1.5, q0, {});
}

double SimilarityProfile::omega_min() const { return is_exact() ? 0.0 : nodes_.front().omega; }

double SimilarityProfile::omega_max() const {
  return is_exact() ? std::numeric_limits<double>::infinity() : nodes_.back().omega;
}

std::size_t SimilarityProfile::locate(double omega) const {
  if (!(omega >= nodes_.front().omega && omega <= nodes_.back().omega)) {
    throw DomainError("omega = " + format_number(omega) + " outside the profile range [" +
                      format_number(nodes_.front().omega) + ", " +
                      format_number(nodes_.back().omega) + "]");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), omega,
                             [](double w, const ProfileNode& n) { return w < n.omega; });
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  return std::min(i == 0 ? 0 : i - 1, nodes_.size() - 2);
}

namespace {

// First and second derivatives of (F, P) from the reduced system.
struct Derivs {
  double F, P, FF, PP;
};
Derivs reduced_derivs(double k, double omega, double F, double P) {
  const auto [alpha, beta] = ansatz_exponents(k);
  const double Fk = std::pow(F, -k);
  const double dF = Fk * P;
  const double dP = alpha * F - beta * omega * dF;
  const double ddF = -k * Fk / F * dF * P + Fk * dP;
  return {dF, dP, ddF, (alpha - beta) * dF - beta * omega * ddF};
}

struct Hermite {
  double value, slope;
};
// Quintic Hermite interpolation from values, slopes and second derivatives.
Hermite hermite(double x0, double x1, double y0, double y1, double d0, double d1, double dd0,
                double dd1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double c[6] = {y0, h * d0, h * h * dd0, y1, h * d1, h * h * dd1};
  const double H[6] = {1 - 10 * s3 + 15 * s4 - 6 * s5,   s - 6 * s3 + 8 * s4 - 3 * s5,
                       0.5 * (s2 - 3 * s3 + 3 * s4 - s5), 10 * s3 - 15 * s4 + 6 * s5,
                       -4 * s3 + 7 * s4 - 3 * s5,         0.5 * (s3 - 2 * s4 + s5)};
  const double dH[6] = {-30 * s2 + 60 * s3 - 30 * s4,    1 - 18 * s2 + 32 * s3 - 15 * s4,
                        0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4), 30 * s2 - 60 * s3 + 30 * s4,
                        -12 * s2 + 28 * s3 - 15 * s4,    0.5 * (3 * s2 - 8 * s3 + 5 * s4)};
  double value = 0, slope = 0;
  for (int i = 0; i < 6; ++i) {
    value += H[i] * c[i];
    slope += dH[i] * c[i];
  }
  return {value, slope / h};
}

}  // namespace

double SimilarityProfile::F(double omega) const {
  if (is_exact()) return branch_state(branch_parameter(omega, q0_, 1e-14), q0_).F;
  const std::size_t i = locate(omega);
  const auto& a = nodes_[i];
  const auto& b = nodes_[i + 1];
  const Derivs da = reduced_derivs(k_, a.omega, a.F, a.P), db = reduced_derivs(k_, b.omega, b.F, b.P);
  return hermite(a.omega, b.omega, a.F, b.F, da.F, db.F, da.FF, db.FF, omega).value;
}

double SimilarityProfile::dF(double omega) const {
  if (is_exact()) return branch_state(branch_parameter(omega, q0_, 1e-14), q0_).F_w;
  const std::size_t i = locate(omega);
  const auto& a = nodes_[i];
  const auto& b = nodes_[i + 1];
  const Derivs da = reduced_derivs(k_, a.omega, a.F, a.P), db = reduced_derivs(k_, b.omega, b.F, b.P);
  return hermite(a.omega, b.omega, a.F, b.F, da.F, db.F, da.FF, db.FF, omega).slope;
}

double SimilarityProfile::P(double omega) const {
  if (is_exact()) {
    const BranchState st = branch_state(branch_parameter(omega, q0_, 1e-14), q0_);
    return std::pow(st.F, k_) * st.F_w;
  }
  const std::size_t i = locate(omega);
  const auto& a = nodes_[i];
  const auto& b = nodes_[i + 1];
  const Derivs da = reduced_derivs(k_, a.omega, a.F, a.P), db = reduced_derivs(k_, b.omega, b.F, b.P);
  return hermite(a.omega, b.omega, a.P, b.P, da.P, db.P, da.PP, db.PP, omega).value;
}

namespace {

struct Trajectory {
  bool ok = false;
  std::string failure;
  double flux0 = 0;
  double decay = 0;  // F(omega_max) / F(omega0)
  long steps = 0;
  std::vector<ProfileNode> nodes;  // descending omega
};

Trajectory integrate_inward(double k, double amplitude, double omega_max, const ShootOptions& opt,
                            bool keep) {
  const double m = -2 / k;
  const auto [alpha, beta] = ansatz_exponents(k);
  auto rhs = [k, alpha = alpha, beta = beta](double w, const std::array<double, 2>& y) {
    const double F = y[0];
    if (!(F > 0)) return std::array<double, 2>{NAN, NAN};
    const double dF = std::pow(F, -k) * y[1];
    return std::array<double, 2>{dF, alpha * F - beta * w * dF};
  };
  OdeOptions ode;
  ode.rtol = opt.rtol;
  ode.atol = opt.atol;
  ode.max_step_rel = opt.max_step_rel;
  ode.max_steps = opt.max_steps;

  const double far = opt.far_factor * omega_max;
  const double F_far = amplitude * std::pow(far, -m);
  std::array<double, 2> y{F_far, std::pow(F_far, k) * (-m * F_far / far)};

  Trajectory tr;
  auto describe = [](OdeStatus s) {
    switch (s) {
      case OdeStatus::step_underflow:
        return "step size underflow";
      case OdeStatus::max_steps:
        return "step limit reached";
      case OdeStatus::non_finite:
        return "F reached zero or the state became non-finite";
      default:
        return "stopped";
    }
  };
  if (far > omega_max) {
    const auto leg = integrate_dp45(rhs, far, omega_max, y, ode);
    tr.steps += leg.steps;
    if (leg.status != OdeStatus::done) {
      tr.failure = std::string(describe(leg.status)) + " at omega = " + format_number(leg.t);
      return tr;
    }
    y = leg.y;
  }
  const double F_max = y[0];
  if (keep) tr.nodes.push_back({omega_max, y[0], y[1]});
  const auto leg = integrate_dp45(rhs, omega_max, opt.omega0, y, ode,
                                  [&](double w, const std::array<double, 2>& s) {
                                    if (keep) tr.nodes.push_back({w, s[0], s[1]});
                                    return true;
                                  });
  tr.steps += leg.steps;
  if (leg.status != OdeStatus::done) {
    tr.failure = std::string(describe(leg.status)) + " at omega = " + format_number(leg.t);
    return tr;
  }
  tr.ok = true;
  tr.flux0 = leg.y[1];
  tr.decay = F_max / leg.y[0];
  return tr;
}

}  // namespace

SimilarityProfile shoot(double k, double q0, double omega_max, double tol, const ShootOptions& opt,
                        ShootReport* report) {
  if (!(k > -2 && k < 0)) {
    throw std::invalid_argument("shoot supports -2 < k < 0, got k = " + format_number(k));
  }
  if (q0 == 0 || !std::isfinite(q0)) throw std::invalid_argument("shoot needs q0 != 0");
  if (!(omega_max > opt.omega0)) {
    throw std::invalid_argument("shoot needs omega_max > omega0 = " + format_number(opt.omega0));
  }
  // F = A omega^{2/k} solves the reduced equation exactly; the decaying
  // solutions with finite flux at the origin have a larger amplitude.
  const double base = std::pow(-k / (2 * (k + 2)), 1 / k);

  std::ostringstream diag;
  auto flux_minus_q0 = [&](double theta, Trajectory& tr) {
    tr = integrate_inward(k, base * (1 + theta), omega_max, opt, false);
    if (!tr.ok) {
      diag << "  A/A* - 1 = " << format_number(theta) << ": " << tr.failure << "\n";
      return std::numeric_limits<double>::quiet_NaN();
    }
    diag << "  A/A* - 1 = " << format_number(theta) << ": P(omega0) = " << format_number(tr.flux0)
         << "\n";
    return tr.flux0 - q0;
  };

  // The correction to the power tail may have either sign (for k = -3/2 the
  // branch lies above A* omega^{2/k}, for k = -1 below), so A/A* - 1 is
  // scanned over +-10^j, ordered by amplitude, and the first sign change of
  // P(omega0) - q0 is bisected in z = asinh(theta / 1e-15).
  std::vector<double> grid;
  for (int j = -1; j >= -14; --j) grid.push_back(-std::pow(10.0, j));
  for (int j = -14; j <= 8; ++j) grid.push_back(std::pow(10.0, j));
  auto to_z = [](double theta) { return std::asinh(theta / 1e-15); };
  auto to_theta = [](double z) { return 1e-15 * std::sinh(z); };

  // Each sign change brackets a solution. Several may exist (for k = -3/2 a
  // solution regular at the origin besides the singular one); the bracket
  // whose trajectories decay most, F(omega_max) / F(omega0), is refined.
  struct Bracket {
    double lo, hi;
    bool lo_negative;
    double decay;
  };
  std::vector<Bracket> brackets;
  double prev_theta = 0, prev_r = NAN, prev_decay = 0;
  long steps = 0;
  Trajectory tr;
  for (double theta : grid) {
    const double r = flux_minus_q0(theta, tr);
    steps += tr.steps;
    if (std::isnan(r)) {
      prev_r = NAN;
      continue;
    }
    if (!std::isnan(prev_r) && (r >= 0) != (prev_r >= 0)) {
      brackets.push_back({to_z(prev_theta), to_z(theta), prev_r < 0, std::max(prev_decay, tr.decay)});
    }
    prev_theta = theta;
    prev_r = r;
    prev_decay = tr.decay;
  }
  if (brackets.empty()) {
    throw BracketError("shoot: no far-field amplitude brackets P(omega0) = " + format_number(q0) +
                       " (k = " + format_number(k) + ")\n" + diag.str());
  }
  const Bracket best = *std::min_element(brackets.begin(), brackets.end(),
                                         [](const Bracket& a, const Bracket& b) { return a.decay < b.decay; });
  double lo = best.lo, hi = best.hi;
  const bool lo_negative = best.lo_negative;

  int iterations = 0;
  double theta = to_theta(0.5 * (lo + hi));
  double r = NAN;
  for (; iterations < opt.max_iterations; ++iterations) {
    const double mid = 0.5 * (lo + hi);
    theta = to_theta(mid);
    r = flux_minus_q0(theta, tr);
    steps += tr.steps;
    if (std::isnan(r)) {
      throw SolverAbort("shoot: trajectory failed inside the bracket\n" + diag.str());
    }
    if (std::fabs(r) <= tol * std::fabs(q0)) break;
    if ((r < 0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(hi)) || to_theta(hi) == to_theta(lo)) break;
  }

  Trajectory final_tr = integrate_inward(k, base * (1 + theta), omega_max, opt, true);
  if (!final_tr.ok) throw SolverAbort("shoot: final trajectory failed: " + final_tr.failure);
  std::reverse(final_tr.nodes.begin(), final_tr.nodes.end());
  if (report) {
    report->amplitude = base * (1 + theta);
    report->flux_at_omega0 = final_tr.flux0;
    report->decay_ratio = final_tr.nodes.back().F / final_tr.nodes.front().F;
    report->iterations = iterations;
    report->brackets = static_cast<int>(brackets.size());
    report->steps = steps + final_tr.steps;
  }
  return SimilarityProfile::from_table(k, q0, std::move(final_tr.nodes));
}

double lift(const SimilarityProfile& profile, double t, double x) {
  if (!(t > 0)) throw DomainError("lift needs t > 0");
  const auto [alpha, beta] = ansatz_exponents(profile.k());
  return std::pow(t, alpha) * profile.F(x * std::pow(t, -beta));
}

std::string profile_csv(const SimilarityProfile& profile) {
  std::ostringstream out;
  out << "omega,F,P\n";
  for (const auto& n : profile.table()) {
    out << format_number(n.omega) << "," << format_number(n.F) << "," << format_number(n.P) << "\n";
  }
  return out.str();
}

}  // namespace heatsym
