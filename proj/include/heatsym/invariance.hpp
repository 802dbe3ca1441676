#pragma once

// Invariance of a BVP under a one-parameter group, checked on sampled jets:
//  - the equation manifold u_t = d'(u) u_x^2 + d(u) u_xx,
//  - the boundary curve x = 0 and the flux manifold {x = 0, d(u) u_x = q(t)},
//  - the condition at infinity (x* -> +inf, u* -> u_inf), symbolically.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatsym/bvp.hpp"
#include "heatsym/groups.hpp"

namespace heatsym {

struct CheckConfig {
  std::vector<double> eps_grid{-1, -0.5, -0.1, 0.1, 0.5, 1};
  int n = 200;
  std::uint64_t seed = 1;
  // Bound on residuals normalized by 1 + the magnitudes of their terms.
  double tol = 1e-9;
};

enum class Verdict { invariant, not_invariant, undecided };
std::string to_string(Verdict v);

struct Witness {
  std::string criterion;  // equation, boundary_curve, flux, infinity
  double eps = 0;
  std::optional<Jet> jet;
  double residual = 0;
  std::optional<double> limit;  // x* or u* limit for the infinity check
};

struct CheckCounts {
  long equation = 0;
  long flux = 0;
  long boundary_curve = 0;
  long infinity = 0;
  long skipped = 0;  // samples whose transformed jet left the domain of d or q
};

struct InvarianceReport {
  std::string group;
  Verdict verdict = Verdict::invariant;
  double max_residual = 0;
  std::optional<Witness> witness;
  CheckCounts checks;
  std::vector<std::string> diagnostics;
};

// Text form with stable `key: value` fields.
std::string format_report(const InvarianceReport& r);

// Jets on the equation manifold: t in [0.1, 10], x in [0, 10], u in [0.2, 10],
// u_x, u_xx in [-5, 5] and u_t = d'(u) u_x^2 + d(u) u_xx.
std::vector<Jet> sample_manifold_jets(const BVPSpec& spec, int n, std::uint64_t seed);

InvarianceReport check_equation_invariance(const BVPSpec& spec, const GroupFamily& g,
                                           const CheckConfig& cfg = {});
InvarianceReport check_flux_invariance(const BVPSpec& spec, const GroupFamily& g,
                                       const CheckConfig& cfg = {});
InvarianceReport check_infinity_invariance(const BVPSpec& spec, const GroupFamily& g,
                                           const CheckConfig& cfg = {});
InvarianceReport check_bvp_invariance(const BVPSpec& spec, const GroupFamily& g,
                                      const CheckConfig& cfg = {});

// T_t, T_x, T_d, T_e, T_c plus the power-law families whose parameters match
// the spec: T_k(k) for d = c u^k, T_kp(k, p) for q = q0 t^p or q0 (p = 0),
// T_ke(k) for q = q0 e^t, each excluding the degenerate k = -2, p = -1/2.
std::vector<GroupFamily> default_catalogue(const BVPSpec& spec);

struct Classification {
  std::vector<std::string> admitted;
  std::vector<InvarianceReport> reports;  // one per catalogue entry, in order
};

Classification classify_detailed(const BVPSpec& spec, const std::vector<GroupFamily>& catalogue,
                                 const CheckConfig& cfg = {});
std::vector<std::string> classify(const BVPSpec& spec, const std::vector<GroupFamily>& catalogue,
                                  const CheckConfig& cfg = {});
std::vector<std::string> classify(const BVPSpec& spec, const CheckConfig& cfg = {});

// Rows of the classification table whose conditions the spec meets.
struct TableRow {
  int row;
  std::vector<std::string> groups;
};
std::vector<TableRow> match_table_rows(const BVPSpec& spec);

// Union of the matched rows' groups, in catalogue order.
std::vector<std::string> expected_groups(const BVPSpec& spec);

// e o g o e^-1 with t~ = e1 t + t0, x~ = e2 x, u~ = e3 u + u0. The result is
// named after the catalogue group it is proportional to, if any.
GroupFamily conjugate(const GroupFamily& g, const EquivalenceTransform& e);

}  // namespace heatsym
