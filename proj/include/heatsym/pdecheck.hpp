#pragma once

// Explicit finite-volume solver for u_t = (d(u) u_x)_x on [x_min, L], used to
// cross-validate invariant solutions and the solution-mapping property.

#include <functional>
#include <string>
#include <vector>

#include "heatsym/bvp.hpp"
#include "heatsym/symfun.hpp"

namespace heatsym {

using TimeFunction = std::function<double(double t)>;

// Either u = value(t) at the end node, or d(u) u_x = value(t) there (applied
// through a ghost node, i.e. a half cell).
struct BoundaryCondition {
  enum class Kind { dirichlet, flux };
  Kind kind;
  TimeFunction value;

  static BoundaryCondition dirichlet(TimeFunction f) { return {Kind::dirichlet, std::move(f)}; }
  static BoundaryCondition flux(TimeFunction q) { return {Kind::flux, std::move(q)}; }
};

struct EvolveOptions {
  int nx = 800;  // nodes, including both ends
  double cfl = 0.9;
  // Snapshot times in (t0, t1]; t1 is always recorded.
  std::vector<double> output_times;
  bool require_positive = true;
  double dt_min = 1e-14;
  long max_steps = 50'000'000;
};

struct Snapshot {
  double t;
  std::vector<double> u;
  // mass: sum of w_i u_i dx with w = 0 at Dirichlet ends, 1/2 at flux ends,
  // 1 inside. inflow: time integral of the net flux through the ends.
  double mass;
  double inflow;
};

struct GridSolution {
  std::vector<double> x;
  double dx = 0;
  std::vector<Snapshot> snapshots;  // t0 first
  long steps = 0;
  double dt_min = 0;
  double dt_max = 0;

  const Snapshot& at(double t) const;  // exact match required
};

// Throws SolverAbort on a non-finite or (with require_positive) non-positive
// value, on dt below opt.dt_min, or after opt.max_steps.
GridSolution evolve(const FuncForm& d, const std::function<double(double x)>& initial,
                    const BoundaryCondition& left, const BoundaryCondition& right, double t0,
                    double t1, double x_min, double L, const EvolveOptions& opt = {});

// Flux d(u) u_x = q(t) at x = 0 and u = u_inf at x = L.
GridSolution evolve_bvp(const BVPSpec& spec, const std::function<double(double x)>& initial,
                        double t0, double t1, double L, const EvolveOptions& opt = {});

// The k = -3/2 exact solution for q0 evolved from t0 to t1 on [x_min, L]
// with exact Dirichlet data at both ends.
GridSolution evolve_exact(double q0, double t0, double t1, double x_min, double L, int nx);

struct ExactValidation {
  double q0, t0, t1, x_min, L;
  int nx;
  double tol;
  double l2_rel = 0;   // ||u_h - u|| / ||u|| over the nodes at t1
  double linf_rel = 0;  // max |u_h - u| / max |u|
  long steps = 0;
  double dt_min = 0;
  bool pass = false;
};

// Evolves the k = -3/2 exact solution from t0 to t1 with exact Dirichlet data
// at both ends and compares with it at t1. Pass iff l2_rel <= tol.
ExactValidation validate_exact(double q0, double t0, double t1, double x_min = 0.2,
                               double L = 40, int nx = 800, double tol = 1e-2);

std::string format_validation(const ExactValidation& v);

// Runs on nested grids, nx_j = (coarse_nx - 1) 2^j + 1, so dx halves per
// level. Errors are relative L2 at t1, both over all nodes and over the
// coarse-grid nodes shared by every level; order = log2 of successive ratios.
struct ConvergenceLevel {
  int nx;
  double dx;
  double l2_all;
  double l2_common;
  long steps;
};
struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  std::vector<double> order_all;
  std::vector<double> order_common;
};
ConvergenceStudy convergence_exact(double q0, double t0, double t1, double x_min, double L,
                                   int coarse_nx, int levels);

std::string format_convergence(const ConvergenceStudy& c);

// `x,u` rows for one snapshot, preceded by `#` metadata lines.
std::string snapshot_csv(const GridSolution& sol, const Snapshot& snap);

}  // namespace heatsym
