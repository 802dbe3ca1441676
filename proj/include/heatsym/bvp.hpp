#pragma once

// Boundary value problems
//   u_t = (d(u) u_x)_x,   x > 0, t > 0,
//   d(u) u_x = q(t)       at x = 0,
//   u -> u_inf            as x -> +inf,
// and the equivalence group acting on them:
//   t~ = e1 t + t0,  x~ = e2 x,  u~ = e3 u + u0.

#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "heatsym/symfun.hpp"

namespace heatsym {

struct BVPSpec {
  FuncForm d;
  FuncForm q;
  double u_inf = 0;

  bool operator==(const BVPSpec&) const = default;
};

// Throws UnsupportedForm if d is not a positive power law, exponential or
// random-smooth form, or q lies outside the forms the toolkit can transform.
void validate(const BVPSpec& spec);

struct EquivalenceTransform {
  double e1 = 1, e2 = 1, e3 = 1;
  double t0 = 0, u0 = 0;

  bool operator==(const EquivalenceTransform&) const = default;
};

// Throws std::invalid_argument unless e2 > 0 and e1 e3 != 0.
void validate(const EquivalenceTransform& g);

// `second` after `first`.
EquivalenceTransform compose(const EquivalenceTransform& second, const EquivalenceTransform& first);
EquivalenceTransform inverse(const EquivalenceTransform& g);

// d~(u~) = (e2^2/e1) d((u~ - u0)/e3),  q~(t~) = (e2 e3/e1) q((t~ - t0)/e1),
// u~_inf = e3 u_inf + u0.
// A power law d = c u^k keeps its coefficient: the transform must satisfy
// (e2^2/e1) e3^-k = 1 and u0 = 0, else ConstraintError.
// With PowerCoefficient::rescale the power law becomes c (e2^2/e1) e3^-k u^k
// instead.
enum class PowerCoefficient { keep, rescale };
BVPSpec apply_equivalence(const BVPSpec& spec, const EquivalenceTransform& g,
                          PowerCoefficient coefficient = PowerCoefficient::keep);

// Amplitude q0 of the boundary flux (the constant factor of q).
double flux_amplitude(const FuncForm& q);

// Equivalent spec with flux amplitude +-1 and the transform that produces it.
// Power-law d keeps its coefficient; other d use e3 = 1.
// With keep, d = c u^-2 and q = q0 t^-1/2 or q0 e^t raise ConstraintError: the
// amplitude is invariant there. rescale falls back to e2 = 1/|q0| in those
// cases and changes c.
std::pair<BVPSpec, EquivalenceTransform> normalize_q0(
    const BVPSpec& spec, PowerCoefficient coefficient = PowerCoefficient::keep);

using SolutionSurface = std::function<double(double t, double x)>;

// u~(t~, x~) = e3 u((t~ - t0)/e1, x~/e2) + u0
SolutionSurface map_solution(const EquivalenceTransform& g, SolutionSurface u);

// Spec files: one `key = value` per line for d, q and u_inf; `#` starts a
// comment.
BVPSpec parse_spec(std::string_view text);
BVPSpec load_spec(const std::string& path);
std::string format_spec(const BVPSpec& spec);

std::string format_transform(const EquivalenceTransform& g);

}  // namespace heatsym
