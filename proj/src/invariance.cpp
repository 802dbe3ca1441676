#include "heatsym/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heatsym/errors.hpp"
#include "heatsym/random.hpp"

namespace heatsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream of seeds for the sub-checks, derived from the configured seed.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed * 0x9E3779B97F4A7C15ull + salt;
}

double normalized(double value, std::initializer_list<double> terms) {
  double scale = 1;
  for (double t : terms) scale += std::fabs(t);
  return std::fabs(value) / scale;
}

// Tracks the worst sample of one criterion.
struct Tally {
  std::string criterion;
  double tol;
  double max_residual = 0;
  std::optional<Witness> worst;
  long evaluated = 0;
  long skipped = 0;

  void record(double residual, double eps, const std::optional<Jet>& jet,
              std::optional<double> limit = std::nullopt) {
    ++evaluated;
    if (std::isnan(residual)) residual = kInf;
    if (residual > max_residual) {
      max_residual = residual;
      if (residual > tol) worst = Witness{criterion, eps, jet, residual, limit};
    }
  }
};

void merge(InvarianceReport& report, const Tally& tally) {
  report.max_residual = std::max(report.max_residual, tally.max_residual);
  report.checks.skipped += tally.skipped;
  if (tally.worst) {
    report.verdict = Verdict::not_invariant;
    if (!report.witness) report.witness = tally.worst;
  } else if (tally.evaluated == 0 && report.verdict == Verdict::invariant) {
    report.verdict = Verdict::undecided;
    report.diagnostics.push_back(tally.criterion + ": no sample could be evaluated");
  }
}

std::vector<PointMap> maps_for(const GroupFamily& g, const std::vector<double>& grid) {
  std::vector<PointMap> maps;
  maps.reserve(grid.size());
  for (double eps : grid) maps.push_back(g.at(eps));
  return maps;
}

InvarianceReport start_report(const GroupFamily& g) {
  InvarianceReport r;
  r.group = g.name();
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::invariant:
      return "invariant";
    case Verdict::not_invariant:
      return "not_invariant";
    case Verdict::undecided:
      return "undecided";
  }
  return "undecided";
}

std::string format_report(const InvarianceReport& r) {
  std::ostringstream out;
  const auto n = format_number;
  out << "group: " << r.group << "\n";
  out << "verdict: " << to_string(r.verdict) << "\n";
  out << "max_residual: " << n(r.max_residual) << "\n";
  out << "checks.equation: " << r.checks.equation << "\n";
  out << "checks.boundary_curve: " << r.checks.boundary_curve << "\n";
  out << "checks.flux: " << r.checks.flux << "\n";
  out << "checks.infinity: " << r.checks.infinity << "\n";
  out << "checks.skipped: " << r.checks.skipped << "\n";
  if (r.witness) {
    const Witness& w = *r.witness;
    out << "witness.criterion: " << w.criterion << "\n";
    out << "witness.eps: " << n(w.eps) << "\n";
    if (w.jet) {
      const Jet& j = *w.jet;
      out << "witness.jet: t=" << n(j.t) << " x=" << n(j.x) << " u=" << n(j.u)
          << " u_t=" << n(j.u_t) << " u_x=" << n(j.u_x) << " u_xx=" << n(j.u_xx) << "\n";
    }
    out << "witness.residual: " << n(w.residual) << "\n";
    if (w.limit) out << "witness.limit: " << n(*w.limit) << "\n";
  }
  for (const auto& d : r.diagnostics) out << "diagnostic: " << d << "\n";
  return out.str();
}

std::vector<Jet> sample_manifold_jets(const BVPSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_manifold_jets: n must be at least 1");
  validate(spec);
  const FuncForm dprime = derivative(spec.d);
  UniformSampler rng(seed);
  std::vector<Jet> jets;
  jets.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Jet j;
    j.t = rng(0.1, 10);
    j.x = rng(0, 10);
    j.u = rng(0.2, 10);
    j.u_x = rng(-5, 5);
    j.u_xx = rng(-5, 5);
    j.u_t = eval(dprime, j.u) * j.u_x * j.u_x + eval(spec.d, j.u) * j.u_xx;
    jets.push_back(j);
  }
  return jets;
}

InvarianceReport check_equation_invariance(const BVPSpec& spec, const GroupFamily& g,
                                           const CheckConfig& cfg) {
  InvarianceReport report = start_report(g);
  const FuncForm dprime = derivative(spec.d);
  const auto jets = sample_manifold_jets(spec, cfg.n, sub_seed(cfg.seed, 1));
  const auto maps = maps_for(g, cfg.eps_grid);
  Tally tally{"equation", cfg.tol};
  long singular = 0;
  for (const Jet& j : jets) {
    for (std::size_t e = 0; e < maps.size(); ++e) {
      try {
        const Jet s = prolong2(maps[e], j);
        const double a = s.u_t;
        const double b = eval(dprime, s.u) * s.u_x * s.u_x;
        const double c = eval(spec.d, s.u) * s.u_xx;
        tally.record(normalized(a - b - c, {a, b, c}), cfg.eps_grid[e], j);
      } catch (const SingularTransform&) {
        ++singular;
      } catch (const DomainError&) {
        ++tally.skipped;
      }
    }
  }
  report.checks.equation = tally.evaluated;
  if (singular > 0) {
    report.diagnostics.push_back("equation: prolongation singular at " + std::to_string(singular) +
                                 " samples");
  }
  merge(report, tally);
  if (singular > 0 && report.verdict == Verdict::invariant) report.verdict = Verdict::undecided;
  return report;
}

InvarianceReport check_flux_invariance(const BVPSpec& spec, const GroupFamily& g,
                                       const CheckConfig& cfg) {
  InvarianceReport report = start_report(g);
  const auto maps = maps_for(g, cfg.eps_grid);
  UniformSampler rng(sub_seed(cfg.seed, 2));

  // (i) the boundary curve x = 0 must be mapped to itself.
  Tally curve{"boundary_curve", cfg.tol};
  for (int i = 0; i < cfg.n; ++i) {
    const double t = rng(0.1, 10), u = rng(0.2, 10);
    for (std::size_t e = 0; e < maps.size(); ++e) {
      double residual = kInf;
      try {
        residual = std::fabs(maps[e](Point{t, 0, u}).x);
      } catch (const DomainError&) {
      }
      curve.record(residual, cfg.eps_grid[e], Jet{t, 0, u});
    }
  }

  // (ii) d(u*) u*_x* = q(t*) on {x = 0, d(u) u_x = q(t)}.
  Tally flux{"flux", cfg.tol};
  constexpr int kMaxRedraws = 100;
  for (int i = 0; i < cfg.n; ++i) {
    const double u = rng(0.2, 10);
    for (std::size_t e = 0; e < maps.size(); ++e) {
      bool done = false;
      for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
        const double t = rng(0.1, 10);
        double qt = 0, qs = 0;
        Jet j{t, 0, u};
        Jet s;
        try {
          qt = eval(spec.q, t);
          j.u_x = qt / eval(spec.d, u);
          s = prolong2(maps[e], j);
          qs = eval(spec.q, s.t);
        } catch (const DomainError&) {
          continue;  // q undefined at t or t*: draw another time
        } catch (const SingularTransform&) {
          break;
        }
        done = true;
        try {
          const double lhs = eval(spec.d, s.u) * s.u_x;
          flux.record(normalized(lhs - qs, {lhs, qs}), cfg.eps_grid[e], j);
        } catch (const DomainError&) {
          ++flux.skipped;
        }
      }
      if (!done) ++flux.skipped;
    }
  }
  report.checks.boundary_curve = curve.evaluated;
  report.checks.flux = flux.evaluated;
  merge(report, curve);
  merge(report, flux);
  return report;
}

InvarianceReport check_infinity_invariance(const BVPSpec& spec, const GroupFamily& g,
                                           const CheckConfig& cfg) {
  InvarianceReport report = start_report(g);
  Tally tally{"infinity", cfg.tol};
  try {
    for (double eps : cfg.eps_grid) {
      const PointMap m = g.at(eps);
      const double xlim = limit_at_pos_infinity(m.space_map);
      if (xlim != kInf) {
        tally.record(kInf, eps, std::nullopt, xlim);
        continue;
      }
      // U(inf, u_inf) = lim A(x) u_inf + lim B(x)
      const double a = spec.u_inf == 0 ? 0.0 : spec.u_inf * limit_at_pos_infinity(m.value_scale);
      const double ulim = a + limit_at_pos_infinity(m.value_shift);
      tally.record(normalized(ulim - spec.u_inf, {spec.u_inf}), eps, std::nullopt, ulim);
    }
  } catch (const UnsupportedForm& e) {
    report.verdict = Verdict::undecided;
    report.diagnostics.push_back(std::string("infinity: ") + e.what());
    report.checks.infinity = tally.evaluated;
    return report;
  }
  report.checks.infinity = tally.evaluated;
  merge(report, tally);
  return report;
}

InvarianceReport check_bvp_invariance(const BVPSpec& spec, const GroupFamily& g,
                                      const CheckConfig& cfg) {
  const InvarianceReport parts[] = {check_equation_invariance(spec, g, cfg),
                                    check_flux_invariance(spec, g, cfg),
                                    check_infinity_invariance(spec, g, cfg)};
  InvarianceReport report = start_report(g);
  bool undecided = false;
  for (const auto& p : parts) {
    report.max_residual = std::max(report.max_residual, p.max_residual);
    report.checks.equation += p.checks.equation;
    report.checks.flux += p.checks.flux;
    report.checks.boundary_curve += p.checks.boundary_curve;
    report.checks.infinity += p.checks.infinity;
    report.checks.skipped += p.checks.skipped;
    report.diagnostics.insert(report.diagnostics.end(), p.diagnostics.begin(),
                              p.diagnostics.end());
    if (p.verdict == Verdict::not_invariant) {
      report.verdict = Verdict::not_invariant;
      if (!report.witness) report.witness = p.witness;
    }
    undecided = undecided || p.verdict == Verdict::undecided;
  }
  if (undecided && report.verdict == Verdict::invariant) report.verdict = Verdict::undecided;
  return report;
}

std::vector<GroupFamily> default_catalogue(const BVPSpec& spec) {
  std::vector<GroupFamily> cat = {groups::time_translation(), groups::space_translation(),
                                  groups::dilation(),         groups::exp_shift(),
                                  groups::conformal()};
  if (!spec.d.is<Power>()) return cat;
  const double k = spec.d.as<Power>().a;
  cat.push_back(groups::power_scaling(k));
  if (k == -2) return cat;
  if (spec.q.is<Power>() && spec.q.as<Power>().a != -0.5) {
    cat.push_back(groups::power_time_scaling(k, spec.q.as<Power>().a));
  } else if (spec.q.is<Const>() && spec.q.as<Const>().c != 0) {
    cat.push_back(groups::power_time_scaling(k, 0));
  } else if (spec.q.is<Exp>() && spec.q.as<Exp>().rate == 1) {
    cat.push_back(groups::power_exp_scaling(k));
  }
  return cat;
}

Classification classify_detailed(const BVPSpec& spec, const std::vector<GroupFamily>& catalogue,
                                 const CheckConfig& cfg) {
  validate(spec);
  Classification out;
  for (const auto& g : catalogue) {
    out.reports.push_back(check_bvp_invariance(spec, g, cfg));
    if (out.reports.back().verdict == Verdict::invariant) out.admitted.push_back(g.name());
  }
  return out;
}

std::vector<std::string> classify(const BVPSpec& spec, const std::vector<GroupFamily>& catalogue,
                                  const CheckConfig& cfg) {
  return classify_detailed(spec, catalogue, cfg).admitted;
}

std::vector<std::string> classify(const BVPSpec& spec, const CheckConfig& cfg) {
  return classify(spec, default_catalogue(spec), cfg);
}

std::vector<TableRow> match_table_rows(const BVPSpec& spec) {
  validate(spec);
  const FuncForm& q = spec.q;
  const bool zero_q = q.is<Zero>() || (q.is<Const>() && q.as<Const>().c == 0) ||
                      (q.is<Power>() && q.as<Power>().c == 0);
  const bool const_q =
      !zero_q && (q.is<Const>() || (q.is<Power>() && q.as<Power>().a == 0));
  const bool power_q = !zero_q && q.is<Power>() && q.as<Power>().a != 0;
  const double p = power_q ? q.as<Power>().a : 0;
  const bool sqrt_q = power_q && p == -0.5;
  const bool exp_q = !zero_q && q.is<Exp>() && q.as<Exp>().rate == 1 && q.as<Exp>().c != 0;

  const bool power_d = spec.d.is<Power>();
  const double k = power_d ? spec.d.as<Power>().a : 0;
  const bool u0 = spec.u_inf == 0;

  const std::string Tt = "T_t", Td = "T_d";
  std::vector<TableRow> rows;
  if (sqrt_q) rows.push_back({1, {Td}});
  if (const_q) rows.push_back({2, {Tt}});
  if (zero_q) rows.push_back({3, {Tt, Td}});
  if (power_d && u0 && k != -2) {
    if (power_q && !sqrt_q) rows.push_back({4, {groups::power_time_scaling_name(k, p)}});
    if (exp_q) rows.push_back({5, {groups::power_exp_scaling_name(k)}});
    if (const_q) rows.push_back({6, {Tt, groups::power_time_scaling_name(k, 0)}});
  }
  if (power_d && u0 && zero_q) rows.push_back({7, {Tt, Td, groups::power_scaling_name(k)}});
  if (power_d && u0 && k == -2) {
    rows.push_back({8, {groups::power_scaling_name(k)}});
    if (sqrt_q) rows.push_back({9, {Td, groups::power_scaling_name(k)}});
  }
  return rows;
}

std::vector<std::string> expected_groups(const BVPSpec& spec) {
  std::vector<std::string> names;
  for (const auto& row : match_table_rows(spec)) {
    for (const auto& g : row.groups) {
      if (std::find(names.begin(), names.end(), g) == names.end()) names.push_back(g);
    }
  }
  // Catalogue order, so the list compares directly with classify().
  std::vector<std::string> ordered;
  for (const auto& g : default_catalogue(spec)) {
    if (std::find(names.begin(), names.end(), g.name()) != names.end()) {
      ordered.push_back(g.name());
    }
  }
  for (const auto& n : names) {
    if (std::find(ordered.begin(), ordered.end(), n) == ordered.end()) ordered.push_back(n);
  }
  return ordered;
}

GroupFamily conjugate(const GroupFamily& g, const EquivalenceTransform& e) {
  validate(e);
  const GeneratorCoefficients& c = g.coefficients();
  if (c.value_conformal != 0 && e.u0 != 0) {
    throw UnsupportedForm("conjugate: a value shift turns " + g.name() +
                          " into an x-dependent shift");
  }
  GeneratorCoefficients out = c;
  out.time_shift = e.e1 * c.time_shift - c.time_scale * e.t0;
  out.space_shift = e.e2 * c.space_shift;
  out.space_conformal = c.space_conformal / e.e2;
  out.value_conformal = c.value_conformal / e.e2;
  out.value_shift = e.e3 * c.value_shift - c.value_scale * e.u0;

  if (out == c) return g;
  if (auto id = identify_group(out, g.params().k)) return *id;
  return GroupFamily("conj(" + g.name() + ")", out, g.params());
}

}  // namespace heatsym
