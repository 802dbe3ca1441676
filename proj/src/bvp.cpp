#include "heatsym/bvp.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "heatsym/errors.hpp"
#include "text.hpp"

namespace heatsym {

namespace {

bool is_integer(double a) { return std::isfinite(a) && std::floor(a) == a; }

bool close_rel(double a, double b, double rel = 1e-12) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

void validate(const BVPSpec& spec) {
  const FuncForm& d = spec.d;
  if (d.is<Power>()) {
    const auto& p = d.as<Power>();
    if (!(p.c > 0) || p.a == 0) {
      throw UnsupportedForm("d(u) = c u^k needs c > 0 and k != 0, got " + format(d));
    }
  } else if (d.is<Exp>()) {
    const auto& e = d.as<Exp>();
    if (!(e.c > 0) || e.rate == 0) {
      throw UnsupportedForm("d(u) = c e^{r u} needs c > 0 and r != 0, got " + format(d));
    }
  } else if (d.is<RandomSmooth>()) {
    const auto& r = d.as<RandomSmooth>();
    if (!(r.gain > 0) || r.order != 0 || !(r.scale != 0)) {
      throw UnsupportedForm("d(u) random form must be positive and underived, got " + format(d));
    }
  } else if (d.is<Zero>() || d.is<Const>()) {
    throw UnsupportedForm("d(u) must not be constant");
  } else {
    throw UnsupportedForm("d(u) must be a power, exponential or random-smooth form, got " +
                          format(d));
  }
  if (spec.q.is<Mobius>() || spec.q.is<Fractional>()) {
    throw UnsupportedForm("unsupported flux form " + format(spec.q));
  }
  if (spec.q.is<RandomSmooth>() && spec.q.as<RandomSmooth>().order != 0) {
    throw UnsupportedForm("unsupported flux form " + format(spec.q));
  }
  if (!std::isfinite(spec.u_inf)) throw std::invalid_argument("u_inf must be finite");
}

void validate(const EquivalenceTransform& g) {
  if (!(g.e2 > 0)) throw std::invalid_argument("equivalence transform needs e2 > 0");
  if (g.e1 == 0 || g.e3 == 0 || !std::isfinite(g.e1 * g.e3) || !std::isfinite(g.t0) ||
      !std::isfinite(g.u0)) {
    throw std::invalid_argument("equivalence transform needs finite e1, e3 != 0");
  }
}

EquivalenceTransform compose(const EquivalenceTransform& second, const EquivalenceTransform& first) {
  return {second.e1 * first.e1, second.e2 * first.e2, second.e3 * first.e3,
          second.e1 * first.t0 + second.t0, second.e3 * first.u0 + second.u0};
}

EquivalenceTransform inverse(const EquivalenceTransform& g) {
  validate(g);
  return {1 / g.e1, 1 / g.e2, 1 / g.e3, -g.t0 / g.e1, -g.u0 / g.e3};
}

namespace {

FuncForm transform_d(const FuncForm& d, const EquivalenceTransform& g, PowerCoefficient coefficient) {
  const double f = g.e2 * g.e2 / g.e1;
  if (d.is<Power>()) {
    const auto& p = d.as<Power>();
    if (g.u0 != 0) throw ConstraintError("a value shift u0 != 0 breaks the power law d = c u^k");
    if (g.e3 < 0 && !is_integer(p.a)) {
      throw ConstraintError("e3 < 0 with a fractional exponent leaves the domain u > 0");
    }
    const double factor = f * std::pow(g.e3, -p.a);
    if (coefficient == PowerCoefficient::rescale) return Power{p.c * factor, p.a};
    if (!close_rel(factor, 1.0)) {
      throw ConstraintError("transform breaks the power law: (e2^2/e1) e3^-k = " +
                            format_number(factor) + " != 1");
    }
    return d;
  }
  if (d.is<Exp>()) {
    const auto& e = d.as<Exp>();
    return Exp{f * e.c * std::exp(-e.rate * g.u0 / g.e3), e.rate / g.e3};
  }
  if (d.is<RandomSmooth>()) {
    RandomSmooth r = d.as<RandomSmooth>();
    r.gain *= f;
    r.shift = g.u0 + g.e3 * r.shift;
    r.scale *= g.e3;
    return r;
  }
  throw UnsupportedForm("cannot transform d(u) = " + format(d));
}

FuncForm transform_q(const FuncForm& q, const EquivalenceTransform& g) {
  const double f = g.e2 * g.e3 / g.e1;
  const double a = 1 / g.e1, b = -g.t0 / g.e1;  // t = a t~ + b
  return std::visit(
      [&](const auto& form) -> FuncForm {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return Zero{};
        } else if constexpr (std::is_same_v<T, Const>) {
          return Const{f * form.c};
        } else if constexpr (std::is_same_v<T, Power>) {
          if (form.a == 0) return Power{f * form.c, 0};
          if (g.t0 != 0) {
            throw UnsupportedForm("a time shift turns q = " + format(q) +
                                  " into a shifted power outside the catalogue");
          }
          return Power{f * form.c * std::pow(a, form.a), form.a};
        } else if constexpr (std::is_same_v<T, Exp>) {
          return Exp{f * form.c * std::exp(form.rate * b), form.rate * a};
        } else if constexpr (std::is_same_v<T, Affine>) {
          return Affine{f * form.a * a, f * (form.a * b + form.b)};
        } else if constexpr (std::is_same_v<T, AffinePower>) {
          return AffinePower{f * form.c, form.a * a, form.a * b + form.b, form.n};
        } else if constexpr (std::is_same_v<T, RandomSmooth>) {
          RandomSmooth r = form;
          r.gain *= f;
          r.shift = g.t0 + g.e1 * r.shift;
          r.scale *= g.e1;
          return r;
        } else {
          throw UnsupportedForm("cannot transform q(t) = " + format(q));
        }
      },
      q.variant());
}

}  // namespace

BVPSpec apply_equivalence(const BVPSpec& spec, const EquivalenceTransform& g,
                          PowerCoefficient coefficient) {
  validate(g);
  if (!(g.e1 > 0)) throw ConstraintError("e1 < 0 makes d(u) negative");
  return {transform_d(spec.d, g, coefficient), transform_q(spec.q, g), g.e3 * spec.u_inf + g.u0};
}

double flux_amplitude(const FuncForm& q) {
  return std::visit(
      [&](const auto& form) -> double {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Const> || std::is_same_v<T, Power> ||
                             std::is_same_v<T, Exp> || std::is_same_v<T, AffinePower>) {
          return form.c;
        } else if constexpr (std::is_same_v<T, RandomSmooth>) {
          return form.gain;
        } else {
          throw UnsupportedForm("flux " + format(q) + " has no single amplitude");
        }
      },
      q.variant());
}

namespace {

void set_amplitude(FuncForm& q, double value) {
  std::visit(
      [&](auto form) {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Const> || std::is_same_v<T, Power> ||
                      std::is_same_v<T, Exp> || std::is_same_v<T, AffinePower>) {
          form.c = value;
          q = form;
        } else if constexpr (std::is_same_v<T, RandomSmooth>) {
          form.gain = value;
          q = form;
        }
      },
      q.variant());
}

}  // namespace

std::pair<BVPSpec, EquivalenceTransform> normalize_q0(const BVPSpec& spec,
                                                       PowerCoefficient coefficient) {
  validate(spec);
  const double c = flux_amplitude(spec.q);
  if (c == 0 || std::fabs(c) == 1) return {spec, EquivalenceTransform{}};
  const double mag = std::fabs(c);

  // Time exponent of q: the amplitude picks up e1^-p from the argument
  // rescaling. Exponential q must keep e1 = 1 to stay normalized.
  const bool exp_q = spec.q.is<Exp>();
  const double p = spec.q.is<Power>() ? spec.q.as<Power>().a : 0.0;

  EquivalenceTransform g;
  if (spec.d.is<Power>()) {
    const double k = spec.d.as<Power>().a;
    if (k != -2) {
      // e1 = 1, e2^2 = e3^k, amplitude factor e2 e3 = e3^{1 + k/2}
      g.e3 = std::pow(mag, -1 / (1 + k / 2));
      g.e2 = std::pow(g.e3, k / 2);
    } else {
      // e2 e3 / e1 with e2^2 = e1 (e3 = 1) gives e1^{-1/2 - p}
      const bool invariant = exp_q || p == -0.5;
      if (invariant && coefficient == PowerCoefficient::keep) {
        throw ConstraintError(
            "for d = u^-2 the flux amplitude is invariant under shape-preserving transforms of " +
            format(spec.q));
      }
      if (invariant) {
        g.e2 = 1 / mag;
      } else {
        g.e1 = std::pow(mag, 1 / (p + 0.5));
        g.e2 = std::sqrt(g.e1);
      }
    }
  } else if (!exp_q && p != -0.5) {
    g.e1 = std::pow(mag, 1 / (p + 0.5));
    g.e2 = std::sqrt(g.e1);
  } else {
    g.e2 = 1 / mag;
  }

  BVPSpec out = apply_equivalence(spec, g, coefficient);
  const double got = flux_amplitude(out.q);
  if (!close_rel(std::fabs(got), 1.0, 1e-12)) {
    throw std::logic_error("normalize_q0: amplitude " + format_number(got) + " after transform");
  }
  set_amplitude(out.q, c > 0 ? 1.0 : -1.0);
  return {out, g};
}

SolutionSurface map_solution(const EquivalenceTransform& g, SolutionSurface u) {
  validate(g);
  return [g, u = std::move(u)](double t, double x) {
    return g.e3 * u((t - g.t0) / g.e1, x / g.e2) + g.u0;
  };
}

BVPSpec parse_spec(std::string_view text) {
  std::optional<FuncForm> d, q;
  std::optional<double> u_inf;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "d") {
        if (d) throw ParseError("duplicate key 'd'");
        d = parse_func_form(value);
      } else if (key == "q") {
        if (q) throw ParseError("duplicate key 'q'");
        q = parse_func_form(value);
      } else if (key == "u_inf") {
        if (u_inf) throw ParseError("duplicate key 'u_inf'");
        u_inf = detail::parse_number(value);
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!d) throw ParseError("missing key 'd'");
  if (!q) throw ParseError("missing key 'q'");
  BVPSpec spec{*d, *q, u_inf.value_or(0.0)};
  validate(spec);
  return spec;
}

BVPSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string format_spec(const BVPSpec& spec) {
  return "d = " + format(spec.d) + "\nq = " + format(spec.q) +
         "\nu_inf = " + format_number(spec.u_inf) + "\n";
}

std::string format_transform(const EquivalenceTransform& g) {
  return "e1=" + format_number(g.e1) + " e2=" + format_number(g.e2) + " e3=" +
         format_number(g.e3) + " t0=" + format_number(g.t0) + " u0=" + format_number(g.u0);
}

}  // namespace heatsym
