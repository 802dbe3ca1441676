#include "heatsym/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "heatsym/bvp.hpp"
#include "heatsym/errors.hpp"
#include "heatsym/groups.hpp"
#include "heatsym/invariance.hpp"
#include "heatsym/pdecheck.hpp"
#include "heatsym/similarity.hpp"

namespace heatsym {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string join_numbers(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(format_number(x));
  return join(s, ",");
}

// Collects report lines and failures; printed once the command finishes.
struct Report {
  std::ostringstream body;
  std::vector<std::string> failures;

  template <class T>
  void kv(const std::string& key, const T& value) {
    body << key << ": " << value << "\n";
  }
  void num(const std::string& key, double v) { kv(key, format_number(v)); }
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  std::string text() const {
    std::string s = body.str();
    s += std::string("status: ") + (failures.empty() ? "pass" : "fail") + "\n";
    for (const auto& f : failures) s += "failure: " + f + "\n";
    return s;
  }
};

struct Common {
  std::string spec_path;
  std::string group;
  int n = 200;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out;
  std::vector<double> eps_grid{-1, -0.5, -0.1, 0.1, 0.5, 1};
};

// --seed, then HEATSYM_SEED, then 1.
std::pair<std::uint64_t, std::string> resolve_seed(const Common& c) {
  if (c.seed) return {*c.seed, "flag"};
  if (const char* env = std::getenv("HEATSYM_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return {v, "env"};
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("HEATSYM_SEED is not an unsigned integer: ") + env);
  }
  return {1, "default"};
}

CheckConfig check_config(const Common& c, Report& r) {
  CheckConfig cfg;
  cfg.n = c.n;
  cfg.eps_grid = c.eps_grid;
  const auto [seed, source] = resolve_seed(c);
  cfg.seed = seed;
  if (c.tol) cfg.tol = *c.tol;
  r.kv("config.n", cfg.n);
  r.kv("config.seed", cfg.seed);
  r.kv("config.seed_source", source);
  r.num("config.tol", cfg.tol);
  r.kv("config.eps_grid", join_numbers(cfg.eps_grid));
  return cfg;
}

BVPSpec load_and_echo(const Common& c, Report& r) {
  r.kv("config.spec", c.spec_path);
  const BVPSpec spec = load_spec(c.spec_path);
  r.kv("spec.d", format(spec.d));
  r.kv("spec.q", format(spec.q));
  r.num("spec.u_inf", spec.u_inf);
  return spec;
}

void emit(const Report& r, const Common& c, std::ostream& out) {
  if (c.out.empty()) {
    out << r.text();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << r.text();
  out << "wrote " << c.out << "\n";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

int cmd_classify(const Common& c, std::ostream& out) {
  Report r;
  r.kv("command", "classify");
  const BVPSpec spec = load_and_echo(c, r);
  const CheckConfig cfg = check_config(c, r);
  const auto catalogue = default_catalogue(spec);
  const Classification cl = classify_detailed(spec, catalogue, cfg);
  r.kv("admitted", join(cl.admitted));
  const auto rows = match_table_rows(spec);
  if (rows.empty()) {
    r.kv("case", "none (kernel only)");
  } else {
    const auto& top = rows.back();
    r.body << "case " << top.row << ": " << join(top.groups) << "\n";
    std::vector<std::string> ids;
    for (const auto& row : rows) ids.push_back(std::to_string(row.row));
    r.kv("rows", join(ids));
  }
  for (std::size_t i = 0; i < catalogue.size(); ++i) {
    const auto& rep = cl.reports[i];
    if (rep.verdict == Verdict::invariant) continue;
    std::string note = to_string(rep.verdict);
    if (rep.witness) {
      note += " (" + rep.witness->criterion + ", eps = " + format_number(rep.witness->eps);
      if (rep.witness->limit) note += ", limit = " + format_number(*rep.witness->limit);
      note += ")";
    }
    r.kv("rejected " + catalogue[i].name(), note);
  }
  const auto expected = expected_groups(spec);
  r.require(cl.admitted == expected,
            "admitted {" + join(cl.admitted) + "} differs from the table {" + join(expected) + "}");
  emit(r, c, out);
  return r.failures.empty() ? 0 : 1;
}

int cmd_check(const Common& c, std::ostream& out) {
  Report r;
  r.kv("command", "check");
  const BVPSpec spec = load_and_echo(c, r);
  r.kv("config.group", c.group);
  const CheckConfig cfg = check_config(c, r);
  const GroupFamily g = parse_group(c.group);
  const InvarianceReport rep = check_bvp_invariance(spec, g, cfg);
  r.body << format_report(rep);
  r.require(rep.verdict == Verdict::invariant, g.name() + " is " + to_string(rep.verdict));
  emit(r, c, out);
  return r.failures.empty() ? 0 : 1;
}

struct Reduce {
  std::optional<double> k;
};

int cmd_reduce(const Common& c, const Reduce& o, std::ostream& out) {
  Report r;
  r.kv("command", "reduce");
  double k = 0, coeff = 1;
  std::optional<double> q0;
  if (!c.spec_path.empty()) {
    const BVPSpec spec = load_and_echo(c, r);
    if (!spec.d.is<Power>()) throw UnsupportedForm("reduce needs d = power(c,k)");
    if (!spec.q.is<Const>()) throw UnsupportedForm("reduce needs q = const(q0)");
    if (spec.u_inf != 0) throw UnsupportedForm("reduce needs u_inf = 0");
    k = spec.d.as<Power>().a;
    coeff = spec.d.as<Power>().c;
    q0 = spec.q.as<Const>().c;
  } else if (o.k) {
    k = *o.k;
    r.num("config.k", k);
  } else {
    throw std::invalid_argument("reduce needs --spec or --k");
  }
  const auto [alpha, beta] = ansatz_exponents(k);
  r.num("k", k);
  r.num("alpha", alpha);
  r.num("beta", beta);
  r.kv("ansatz", "u = t^" + format_number(alpha) + " F(omega), omega = x t^" + format_number(-beta));
  const std::string c_txt = coeff == 1 ? "" : format_number(coeff) + " ";
  auto signed_term = [](double coef, const std::string& what) {
    return std::string(coef < 0 ? " - " : " + ") + format_number(std::fabs(coef)) + " " + what;
  };
  r.kv("ode", "(" + c_txt + "F^" + format_number(k) + " F')'" + signed_term(beta, "omega F'") +
                  signed_term(-alpha, "F") + " = 0");
  r.kv("bc.origin", c_txt + "F^" + format_number(k) + " F'(0) = " + (q0 ? format_number(*q0) : "q0"));
  r.kv("bc.infinity", "F(+inf) = 0");
  emit(r, c, out);
  return 0;
}

struct Shoot {
  double k = -1.5;
  double q0 = -1;
  double omega_max = 40;
  std::string csv;
};

int cmd_shoot(const Common& c, const Shoot& o, std::ostream& out) {
  Report r;
  r.kv("command", "shoot");
  const double tol = c.tol.value_or(1e-10);
  ShootOptions opt;
  r.num("config.k", o.k);
  r.num("config.q0", o.q0);
  r.num("config.omega_max", o.omega_max);
  r.num("config.tol", tol);
  r.num("config.omega0", opt.omega0);
  r.num("config.far_factor", opt.far_factor);
  r.num("config.rtol", opt.rtol);
  r.num("config.atol", opt.atol);
  ShootReport rep;
  const SimilarityProfile prof = shoot(o.k, o.q0, o.omega_max, tol, opt, &rep);
  r.num("amplitude", rep.amplitude);
  r.num("flux_at_omega0", rep.flux_at_omega0);
  r.num("decay_ratio", rep.decay_ratio);
  r.kv("iterations", rep.iterations);
  r.kv("brackets", rep.brackets);
  r.kv("steps", rep.steps);
  r.kv("nodes", prof.table().size());
  r.require(std::fabs(rep.flux_at_omega0 - o.q0) <= tol * std::fabs(o.q0), "flux not matched");
  if (o.k == -1.5 && o.omega_max >= 10) {
    double worst = 0;
    for (int i = 0; i <= 100; ++i) {
      const double w = std::pow(10.0, i / 100.0);
      const double exact = eval_parametric(solve_tau(w, o.q0), o.q0).F;
      worst = std::max(worst, std::fabs(prof.F(w) - exact) / exact);
    }
    r.num("exact.max_rel_error_1_10", worst);
    r.require(worst <= 1e-3, "profile differs from the exact branch by " + format_number(worst));
  }
  if (!o.csv.empty()) {
    write_file(o.csv, profile_csv(prof));
    r.kv("profile_csv", o.csv);
  }
  emit(r, c, out);
  return r.failures.empty() ? 0 : 1;
}

struct Exact {
  double q0 = -1;
  std::optional<double> tau, t, x;
};

int cmd_exact(const Common& c, const Exact& o, std::ostream& out) {
  Report r;
  r.kv("command", "exact");
  r.num("config.q0", o.q0);
  if (o.tau) {
    const auto p = eval_parametric(*o.tau, o.q0);
    r.num("tau", *o.tau);
    r.num("omega", p.omega);
    r.num("F", p.F);
  }
  if (o.t && o.x) {
    const auto j = eval_solution_jet(*o.t, *o.x, o.q0);
    r.num("t", *o.t);
    r.num("x", *o.x);
    r.num("omega", *o.x * *o.t);
    r.num("tau", solve_tau(*o.x * *o.t, o.q0));
    r.num("u", j.u);
    r.num("u_t", j.u_t);
    r.num("u_x", j.u_x);
    r.num("flux", std::pow(j.u, -1.5) * j.u_x);
  } else if (!o.tau) {
    throw std::invalid_argument("exact needs --tau or both --t and --x");
  }
  emit(r, c, out);
  return 0;
}

struct Figure1 {
  double q0 = -1;
  std::vector<double> times{0.5, 5};
  double x_min = 0.1;
  double x_max = 10;
  int samples = 201;
};

int cmd_figure1(const Common& c, const Figure1& o, std::ostream& out) {
  Report r;
  r.kv("command", "figure1");
  r.num("config.q0", o.q0);
  r.kv("config.times", join_numbers(o.times));
  r.num("config.x_min", o.x_min);
  r.num("config.x_max", o.x_max);
  r.kv("config.samples", o.samples);
  r.kv("config.grid", "log");
  if (o.samples < 2 || !(o.x_min > 0) || !(o.x_max > o.x_min)) {
    throw std::invalid_argument("figure1 needs samples >= 2 and 0 < x_min < x_max");
  }
  const std::filesystem::path dir = c.out.empty() ? "." : c.out;
  std::filesystem::create_directories(dir);
  std::vector<double> xs(o.samples);
  for (int i = 0; i < o.samples; ++i) {
    xs[i] = i == o.samples - 1 ? o.x_max
                               : o.x_min * std::pow(o.x_max / o.x_min, double(i) / (o.samples - 1));
  }
  std::vector<std::vector<double>> curves;
  for (double t : o.times) {
    std::ostringstream csv;
    csv << "# u(t, x) for d = u^-1.5, q0 = " << format_number(o.q0) << ", t = " << format_number(t)
        << "\n"
        << "x,u\n";
    std::vector<double> u;
    for (double x : xs) {
      u.push_back(eval_solution(t, x, o.q0));
      csv << format_number(x) << "," << format_number(u.back()) << "\n";
    }
    const auto path = dir / ("figure1_t" + format_number(t) + ".csv");
    write_file(path, csv.str());
    r.kv("csv", path.string());

    bool positive = true, decreasing = true;
    double ansatz = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      positive = positive && u[i] > 0;
      if (i) decreasing = decreasing && u[i] < u[i - 1];
      // u = t^2 F(x t), with F from the parametric branch
      const double w = xs[i] * t;
      const double F = eval_parametric(solve_tau(w, o.q0), o.q0).F;
      ansatz = std::max(ansatz, std::fabs(u[i] - t * t * F) / (t * t * F));
    }
    const std::string key = "t=" + format_number(t);
    r.kv(key + ".positive", positive ? "yes" : "no");
    r.kv(key + ".decreasing", decreasing ? "yes" : "no");
    r.num(key + ".ansatz_rel_error", ansatz);
    r.require(positive, key + ": u not strictly positive");
    r.require(decreasing, key + ": u not strictly decreasing");
    r.require(ansatz <= 1e-8, key + ": u differs from t^2 F(x t)");
    curves.push_back(std::move(u));
  }
  // Curves at t1 < t2 are related by u(t2, x) = (t2/t1)^2 u(t1, (t2/t1) x);
  // compared on grid points whose shifted abscissa is again a grid point.
  for (std::size_t a = 0; a < o.times.size(); ++a) {
    for (std::size_t b = 0; b < o.times.size(); ++b) {
      const double ratio = o.times[b] / o.times[a];
      if (!(ratio > 1)) continue;
      const double shift = std::log(ratio) / std::log(o.x_max / o.x_min) * (o.samples - 1);
      const long m = std::lround(shift);
      if (m <= 0 || std::fabs(shift - m) > 1e-9 || m >= o.samples) continue;
      double worst = 0;
      for (long i = 0; i + m < o.samples; ++i) {
        const double want = ratio * ratio * curves[a][i + m];
        worst = std::max(worst, std::fabs(curves[b][i] - want) / want);
      }
      const std::string key = "scaling.t=" + format_number(o.times[b]) + "_vs_t=" +
                              format_number(o.times[a]);
      r.num(key + ".rel_error", worst);
      r.require(worst <= 1e-8, key + ": curves violate the ansatz scaling");
    }
  }
  out << r.text();
  return r.failures.empty() ? 0 : 1;
}

struct Validate {
  double q0 = -1;
  double t0 = 0.5;
  double t1 = 1.0;
  double x_min = 0.2;
  double L = 40;
  int nx = 800;
  int levels = 0;
  int coarse_nx = 200;
};

int cmd_validate(const Common& c, const Validate& o, std::ostream& out) {
  Report r;
  r.kv("command", "validate");
  const double tol = c.tol.value_or(1e-2);
  const ExactValidation v = validate_exact(o.q0, o.t0, o.t1, o.x_min, o.L, o.nx, tol);
  r.body << format_validation(v);
  r.require(v.pass, "relative L2 error " + format_number(v.l2_rel) + " above " + format_number(tol));
  if (o.levels >= 2) {
    const auto study = convergence_exact(o.q0, o.t0, o.t1, o.x_min, o.L, o.coarse_nx, o.levels);
    r.body << "convergence:\n" << format_convergence(study);
    const double p = study.order_common.back();
    r.num("observed_order", p);
    r.require(std::fabs(p - 2) <= 0.2, "observed order " + format_number(p) + " is not 2");
  }
  emit(r, c, out);
  return r.failures.empty() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetry and exact-solution checks for u_t = (d(u) u_x)_x on a half-line"};
  app.name("heatsym");
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* s, bool spec_required) {
    auto* o = s->add_option("--spec", c.spec_path, "BVP spec file (d, q, u_inf)");
    if (spec_required) o->required()->check(CLI::ExistingFile);
    s->add_option("--out", c.out, "output file (figure1: directory)");
  };
  auto sampling = [&](CLI::App* s) {
    s->add_option("--n", c.n, "jets per check")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "sampling seed (fallback: HEATSYM_SEED, then 1)");
    s->add_option("--tol", c.tol, "normalized residual tolerance (default 1e-9)");
    s->add_option("--eps-grid", c.eps_grid, "group parameters")->delimiter(',')->capture_default_str();
  };

  auto* classify = app.add_subcommand("classify", "admitted groups and the matching table row");
  common(classify, true);
  sampling(classify);

  auto* check = app.add_subcommand("check", "invariance of the BVP under one group");
  common(check, true);
  sampling(check);
  check->add_option("--group", c.group, "e.g. Td, Tk(-1.5), Tkp(1,2), lincomb(1,0,1)")->required();

  Reduce red;
  auto* reduce = app.add_subcommand("reduce", "similarity reduction for d = u^k");
  common(reduce, false);
  reduce->add_option("--k", red.k, "exponent (if no --spec)");

  Shoot sh;
  auto* shoot_cmd = app.add_subcommand("shoot", "solve the reduced problem by shooting");
  common(shoot_cmd, false);
  shoot_cmd->add_option("--k", sh.k)->capture_default_str();
  shoot_cmd->add_option("--q0", sh.q0)->capture_default_str();
  shoot_cmd->add_option("--omega-max", sh.omega_max)->capture_default_str();
  shoot_cmd->add_option("--tol", c.tol, "flux tolerance (default 1e-10)");
  shoot_cmd->add_option("--csv", sh.csv, "write the profile table");

  Exact ex;
  auto* exact = app.add_subcommand("exact", "evaluate the k = -3/2 exact solution");
  common(exact, false);
  exact->add_option("--q0", ex.q0)->capture_default_str();
  exact->add_option("--tau", ex.tau);
  exact->add_option("--t", ex.t);
  exact->add_option("--x", ex.x);

  Figure1 fig;
  auto* figure1 = app.add_subcommand("figure1", "CSV curves of the exact solution");
  common(figure1, false);
  figure1->add_option("--q0", fig.q0)->capture_default_str();
  figure1->add_option("--times", fig.times)->delimiter(',')->capture_default_str();
  figure1->add_option("--x-min", fig.x_min)->capture_default_str();
  figure1->add_option("--x-max", fig.x_max)->capture_default_str();
  figure1->add_option("--samples", fig.samples)->capture_default_str();

  Validate val;
  auto* validate_cmd = app.add_subcommand("validate", "evolve the exact solution with the PDE solver");
  common(validate_cmd, false);
  validate_cmd->add_option("--q0", val.q0)->capture_default_str();
  validate_cmd->add_option("--t0", val.t0)->capture_default_str();
  validate_cmd->add_option("--t1", val.t1)->capture_default_str();
  validate_cmd->add_option("--x-min", val.x_min)->capture_default_str();
  validate_cmd->add_option("--L", val.L)->capture_default_str();
  validate_cmd->add_option("--nx", val.nx)->capture_default_str();
  validate_cmd->add_option("--tol", c.tol, "relative L2 tolerance (default 1e-2)");
  validate_cmd->add_option("--levels", val.levels, "nested grids for a convergence study");
  validate_cmd->add_option("--coarse-nx", val.coarse_nx)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*classify) return cmd_classify(c, out);
    if (*check) return cmd_check(c, out);
    if (*reduce) return cmd_reduce(c, red, out);
    if (*shoot_cmd) return cmd_shoot(c, sh, out);
    if (*exact) return cmd_exact(c, ex, out);
    if (*figure1) return cmd_figure1(c, fig, out);
    if (*validate_cmd) return cmd_validate(c, val, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace heatsym
