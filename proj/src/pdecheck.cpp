#include "heatsym/pdecheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heatsym/errors.hpp"
#include "heatsym/similarity.hpp"

namespace heatsym {

const Snapshot& GridSolution::at(double t) const {
  for (const auto& s : snapshots) {
    if (s.t == t) return s;
  }
  throw std::out_of_range("no snapshot at t = " + format_number(t));
}

namespace {

double ipow(double b, int n) {
  double r = 1;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}

template <class Diffusivity>
GridSolution run(Diffusivity dfun, const std::function<double(double)>& initial,
                 const BoundaryCondition& left, const BoundaryCondition& right, double t0,
                 double t1, double x_min, double L, const EvolveOptions& opt) {
  const int n = opt.nx;
  GridSolution sol;
  sol.dx = (L - x_min) / (n - 1);
  const double dx = sol.dx;
  sol.x.resize(n);
  for (int i = 0; i < n; ++i) sol.x[i] = i == n - 1 ? L : x_min + i * dx;

  std::vector<double> u(n), face(n - 1);
  for (int i = 0; i < n; ++i) u[i] = initial(sol.x[i]);

  const bool left_flux = left.kind == BoundaryCondition::Kind::flux;
  const bool right_flux = right.kind == BoundaryCondition::Kind::flux;
  auto mass = [&] {
    double m = 0;
    for (int i = 1; i < n - 1; ++i) m += u[i];
    if (left_flux) m += 0.5 * u[0];
    if (right_flux) m += 0.5 * u[n - 1];
    return m * dx;
  };
  auto check = [&](double t) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(u[i]) || (opt.require_positive && !(u[i] > 0))) {
        throw SolverAbort("evolve: u = " + format_number(u[i]) + " at x = " +
                          format_number(sol.x[i]) + ", t = " + format_number(t) + " after " +
                          std::to_string(sol.steps) + " steps");
      }
    }
  };
  check(t0);

  std::vector<double> outputs;
  for (double t : opt.output_times) {
    if (t > t0 && t < t1) outputs.push_back(t);
  }
  outputs.push_back(t1);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());

  double inflow = 0;
  sol.snapshots.push_back({t0, u, mass(), 0});
  sol.dt_min = std::numeric_limits<double>::infinity();
  double t = t0;
  const double inv_dx = 1 / dx;
  for (double target : outputs) {
    while (t < target) {
      double dmax = 0;
      for (int i = 0; i < n - 1; ++i) {
        const double D = dfun(0.5 * (u[i] + u[i + 1]));
        dmax = std::max(dmax, D);
        face[i] = D * (u[i + 1] - u[i]) * inv_dx;
      }
      if (!std::isfinite(dmax) || !(dmax > 0)) {
        throw SolverAbort("evolve: interface diffusivity " + format_number(dmax) + " at t = " +
                          format_number(t));
      }
      double dt = opt.cfl * dx * dx / (2 * dmax);
      bool last = false;
      if (t + dt >= target) {
        dt = target - t;
        last = true;
      }
      if (dt < opt.dt_min && !last) {
        throw SolverAbort("evolve: dt = " + format_number(dt) + " below " +
                          format_number(opt.dt_min) + " at t = " + format_number(t) +
                          " (max d = " + format_number(dmax) + ")");
      }
      if (++sol.steps > opt.max_steps) {
        throw SolverAbort("evolve: more than " + std::to_string(opt.max_steps) + " steps");
      }
      const double fl = left_flux ? left.value(t) : face[0];
      const double fr = right_flux ? right.value(t) : face[n - 2];
      const double r = dt * inv_dx;
      for (int i = 1; i < n - 1; ++i) u[i] += r * (face[i] - face[i - 1]);
      const double tn = last ? target : t + dt;
      if (left_flux) {
        u[0] += 2 * r * (face[0] - fl);
      } else {
        u[0] = left.value(tn);
      }
      if (right_flux) {
        u[n - 1] += 2 * r * (fr - face[n - 2]);
      } else {
        u[n - 1] = right.value(tn);
      }
      inflow += dt * (fr - fl);
      if (dt > 0) sol.dt_min = std::min(sol.dt_min, dt);
      sol.dt_max = std::max(sol.dt_max, dt);
      t = tn;
      check(t);
    }
    sol.snapshots.push_back({target, u, mass(), inflow});
  }
  if (sol.steps == 0) sol.dt_min = 0;
  return sol;
}

}  // namespace

GridSolution evolve(const FuncForm& d, const std::function<double(double)>& initial,
                    const BoundaryCondition& left, const BoundaryCondition& right, double t0,
                    double t1, double x_min, double L, const EvolveOptions& opt) {
  if (opt.nx < 3) throw std::invalid_argument("evolve needs at least 3 nodes");
  if (!(L > x_min)) throw std::invalid_argument("evolve needs L > x_min");
  if (!(t1 >= t0)) throw std::invalid_argument("evolve needs t1 >= t0");
  if (!(opt.cfl > 0 && opt.cfl <= 1)) throw std::invalid_argument("evolve needs 0 < cfl <= 1");
  if (!left.value || !right.value) throw std::invalid_argument("evolve: missing boundary data");

  // Fast paths for the forms used in validation runs.
  if (d.is<Power>()) {
    const auto p = d.as<Power>();
    const double twice = 2 * p.a;
    if (twice == std::round(twice) && std::fabs(twice) <= 8) {
      const int m = static_cast<int>(std::fabs(twice));
      if (twice < 0) {
        return run([c = p.c, m](double s) { return c / ipow(std::sqrt(s), m); }, initial, left,
                   right, t0, t1, x_min, L, opt);
      }
      return run([c = p.c, m](double s) { return c * ipow(std::sqrt(s), m); }, initial, left, right,
                 t0, t1, x_min, L, opt);
    }
    return run([c = p.c, a = p.a](double s) { return c * std::pow(s, a); }, initial, left, right,
               t0, t1, x_min, L, opt);
  }
  if (d.is<Exp>()) {
    const auto e = d.as<Exp>();
    return run([c = e.c, r = e.rate](double s) { return c * std::exp(r * s); }, initial, left,
               right, t0, t1, x_min, L, opt);
  }
  return run([&d](double s) { return eval(d, s); }, initial, left, right, t0, t1, x_min, L, opt);
}

GridSolution evolve_bvp(const BVPSpec& spec, const std::function<double(double)>& initial,
                        double t0, double t1, double L, const EvolveOptions& opt) {
  validate(spec);
  const FuncForm q = spec.q;
  const double u_inf = spec.u_inf;
  return evolve(spec.d, initial, BoundaryCondition::flux([q](double t) { return eval(q, t); }),
                BoundaryCondition::dirichlet([u_inf](double) { return u_inf; }), t0, t1, 0, L, opt);
}

namespace {

// Cubic Hermite table in t of the exact solution at a fixed x.
TimeFunction exact_trace(double x, double q0, double t0, double t1) {
  const int n = 4000;
  std::vector<double> ts(n + 1), us(n + 1), uts(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = i == n ? t1 : t0 + (t1 - t0) * i / n;
    const auto j = eval_solution_jet(ts[i], x, q0);
    us[i] = j.u;
    uts[i] = j.u_t;
  }
  return [=](double t) {
    const double pos = (t - t0) / (t1 - t0) * n;
    const int i = std::clamp(static_cast<int>(pos), 0, n - 1);
    const double h = ts[i + 1] - ts[i];
    const double s = (t - ts[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * us[i] + (s3 - 2 * s2 + s) * h * uts[i] +
           (-2 * s3 + 3 * s2) * us[i + 1] + (s3 - s2) * h * uts[i + 1];
  };
}

}  // namespace

GridSolution evolve_exact(double q0, double t0, double t1, double x_min, double L, int nx) {
  if (!(q0 < 0)) throw DomainError("exact runs need q0 < 0, got " + format_number(q0));
  if (!(t0 > 0) || !(t1 >= t0)) throw std::invalid_argument("exact runs need 0 < t0 <= t1");
  if (!(x_min > 0)) throw DomainError("exact runs need x_min > 0 (the solution blows up at 0)");
  EvolveOptions opt;
  opt.nx = nx;
  BoundaryCondition left = BoundaryCondition::dirichlet([](double) { return 0.0; });
  BoundaryCondition right = left;
  if (t1 > t0) {
    left.value = exact_trace(x_min, q0, t0, t1);
    right.value = exact_trace(L, q0, t0, t1);
  }
  return evolve(Power{1, -1.5}, [&](double x) { return eval_solution(t0, x, q0); }, left, right,
                t0, t1, x_min, L, opt);
}

namespace {

struct Errors {
  double l2, linf;
};
// Relative errors at t1 over every `stride`-th node.
Errors exact_errors(const GridSolution& sol, double q0, int stride) {
  const auto& snap = sol.snapshots.back();
  double num = 0, den = 0, emax = 0, umax = 0;
  for (std::size_t i = 0; i < snap.u.size(); i += stride) {
    const double exact = eval_solution(snap.t, sol.x[i], q0);
    const double e = snap.u[i] - exact;
    num += e * e;
    den += exact * exact;
    emax = std::max(emax, std::fabs(e));
    umax = std::max(umax, std::fabs(exact));
  }
  return {std::sqrt(num / den), emax / umax};
}

}  // namespace

ExactValidation validate_exact(double q0, double t0, double t1, double x_min, double L, int nx,
                               double tol) {
  const GridSolution sol = evolve_exact(q0, t0, t1, x_min, L, nx);
  ExactValidation v{q0, t0, t1, x_min, L, nx, tol};
  const Errors e = exact_errors(sol, q0, 1);
  v.l2_rel = e.l2;
  v.linf_rel = e.linf;
  v.steps = sol.steps;
  v.dt_min = sol.dt_min;
  v.pass = v.l2_rel <= tol;
  return v;
}

ConvergenceStudy convergence_exact(double q0, double t0, double t1, double x_min, double L,
                                   int coarse_nx, int levels) {
  if (coarse_nx < 3 || levels < 2) throw std::invalid_argument("convergence needs 2+ levels");
  ConvergenceStudy c;
  for (int j = 0; j < levels; ++j) {
    const int stride = 1 << j;
    const int nx = (coarse_nx - 1) * stride + 1;
    const GridSolution sol = evolve_exact(q0, t0, t1, x_min, L, nx);
    c.levels.push_back({nx, sol.dx, exact_errors(sol, q0, 1).l2, exact_errors(sol, q0, stride).l2,
                        sol.steps});
  }
  for (std::size_t j = 1; j < c.levels.size(); ++j) {
    c.order_all.push_back(std::log2(c.levels[j - 1].l2_all / c.levels[j].l2_all));
    c.order_common.push_back(std::log2(c.levels[j - 1].l2_common / c.levels[j].l2_common));
  }
  return c;
}

std::string format_convergence(const ConvergenceStudy& c) {
  std::ostringstream out;
  out << "nx,dx,l2_all,l2_common,order_all,order_common,steps\n";
  for (std::size_t j = 0; j < c.levels.size(); ++j) {
    const auto& l = c.levels[j];
    out << l.nx << "," << format_number(l.dx) << "," << format_number(l.l2_all) << ","
        << format_number(l.l2_common) << ",";
    if (j > 0) out << format_number(c.order_all[j - 1]) << "," << format_number(c.order_common[j - 1]);
    else out << ",";
    out << "," << l.steps << "\n";
  }
  return out.str();
}

std::string format_validation(const ExactValidation& v) {
  std::ostringstream out;
  out << "q0: " << format_number(v.q0) << "\n"
      << "t0: " << format_number(v.t0) << "\n"
      << "t1: " << format_number(v.t1) << "\n"
      << "domain: [" << format_number(v.x_min) << ", " << format_number(v.L) << "]\n"
      << "nx: " << v.nx << "\n"
      << "tol: " << format_number(v.tol) << "\n"
      << "l2_rel: " << format_number(v.l2_rel) << "\n"
      << "linf_rel: " << format_number(v.linf_rel) << "\n"
      << "steps: " << v.steps << "\n"
      << "dt_min: " << format_number(v.dt_min) << "\n"
      << "verdict: " << (v.pass ? "pass" : "fail") << "\n";
  return out.str();
}

std::string snapshot_csv(const GridSolution& sol, const Snapshot& snap) {
  std::ostringstream out;
  out << "# t = " << format_number(snap.t) << "\n"
      << "# dx = " << format_number(sol.dx) << ", steps = " << sol.steps << "\n"
      << "x,u\n";
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    out << format_number(sol.x[i]) << "," << format_number(snap.u[i]) << "\n";
  }
  return out.str();
}

}  // namespace heatsym
