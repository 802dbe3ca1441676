#include "heatsym/groups.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "heatsym/errors.hpp"
#include "text.hpp"

namespace heatsym {

namespace {

// (e^{a eps} - 1) / a, continuous at a = 0.
double flow_factor(double a, double eps) { return a == 0.0 ? eps : std::expm1(a * eps) / a; }

struct Mat2 {
  double p11, p12, p21, p22;
};

// exp(eps * M) for M = [[b1/2, b0], [-b2, -b1/2]] (trace free), the matrix
// of the Riccati flow x' = b0 + b1 x + b2 x^2.
Mat2 riccati_flow(double b0, double b1, double b2, double eps) {
  const double half = 0.5 * b1;
  const double disc = half * half - b0 * b2;
  double c = 1.0, s = eps;
  if (disc > 0) {
    const double r = std::sqrt(disc);
    c = std::cosh(r * eps);
    s = std::sinh(r * eps) / r;
  } else if (disc < 0) {
    const double r = std::sqrt(-disc);
    c = std::cos(r * eps);
    s = std::sin(r * eps) / r;
  }
  return {c + s * half, s * b0, -s * b2, c - s * half};
}

}  // namespace

Point PointMap::operator()(const Point& p) const {
  return {eval(time_map, p.t), eval(space_map, p.x),
          eval(value_scale, p.x) * p.u + eval(value_shift, p.x)};
}

GroupFamily::GroupFamily(std::string name, GeneratorCoefficients coefficients, GroupParams params,
                         double eps_scale)
    : name_(std::move(name)), coefficients_(coefficients), params_(params), eps_scale_(eps_scale) {
  const auto& c = coefficients_;
  if (c.value_conformal != 0.0 && c.space_conformal == 0.0) {
    throw UnsupportedForm(name_ + ": x-dependent value scaling needs a conformal space map");
  }
  if (c.value_conformal != 0.0 && c.value_shift != 0.0) {
    throw UnsupportedForm(name_ + ": conformal value scaling combined with a value shift");
  }
}

PointMap GroupFamily::at(double eps) const {
  const auto& c = coefficients_;
  PointMap m;
  m.time_map = Affine{std::exp(c.time_scale * eps), c.time_shift * flow_factor(c.time_scale, eps)};

  if (c.space_conformal == 0.0) {
    m.space_map =
        Affine{std::exp(c.space_scale * eps), c.space_shift * flow_factor(c.space_scale, eps)};
    m.value_scale = Const{std::exp(c.value_scale * eps)};
    m.value_shift = Const{c.value_shift * flow_factor(c.value_scale, eps)};
    return m;
  }

  const Mat2 p = riccati_flow(c.space_shift, c.space_scale, c.space_conformal, eps);
  if (p.p11 == 1.0 && p.p12 == 0.0 && p.p22 == 1.0) {
    m.space_map = Mobius{-p.p21};
  } else {
    m.space_map = Fractional{p.p11, p.p12, p.p21, p.p22};
  }
  if (c.value_conformal == 0.0) {
    m.value_scale = Const{std::exp(c.value_scale * eps)};
    m.value_shift = Const{c.value_shift * flow_factor(c.value_scale, eps)};
  } else {
    // u* = e^{(c1 + n b1/2) eps} (p21 x + p22)^n u with n = -cx / b2
    const double n = -c.value_conformal / c.space_conformal;
    m.value_scale = AffinePower{std::exp((c.value_scale + 0.5 * n * c.space_scale) * eps), p.p21,
                                p.p22, n};
    m.value_shift = Zero{};
  }
  return m;
}

Point apply(const GroupFamily& g, double eps, const Point& p) { return g.at(eps)(p); }

Jet prolong2(const PointMap& m, const Jet& jet) {
  const FuncForm dx1 = derivative(m.space_map);
  const FuncForm dx2 = derivative(dx1);
  const FuncForm da1 = derivative(m.value_scale);
  const FuncForm da2 = derivative(da1);
  const FuncForm db1 = derivative(m.value_shift);
  const FuncForm db2 = derivative(db1);

  const double tp = m.time_map.as<Affine>().a;
  const double xp = eval(dx1, jet.x);
  if (tp == 0.0 || xp == 0.0 || !std::isfinite(xp)) {
    throw SingularTransform("prolong2: vanishing Jacobian at x = " + format_number(jet.x));
  }
  const double xpp = eval(dx2, jet.x);
  const double a = eval(m.value_scale, jet.x);
  const double a1 = eval(da1, jet.x);
  const double a2 = eval(da2, jet.x);
  const double b1 = eval(db1, jet.x);
  const double b2 = eval(db2, jet.x);

  // d/dx of U(x, u(t, x)) = A u + B, differentiated once and twice.
  const double ux_total = a1 * jet.u + b1 + a * jet.u_x;
  const double uxx_total = a2 * jet.u + b2 + 2.0 * a1 * jet.u_x + a * jet.u_xx;

  Jet out;
  out.t = eval(m.time_map, jet.t);
  out.x = eval(m.space_map, jet.x);
  out.u = a * jet.u + eval(m.value_shift, jet.x);
  out.u_t = a * jet.u_t / tp;
  out.u_x = ux_total / xp;
  out.u_xx = (uxx_total * xp - ux_total * xpp) / (xp * xp * xp);
  return out;
}

Jet prolong2(const GroupFamily& g, double eps, const Jet& jet) { return prolong2(g.at(eps), jet); }

VectorField generator(const GroupFamily& g) { return VectorField{g.coefficients()}; }

namespace groups {

std::string power_scaling_name(double k) { return "T_k(" + format_number(k) + ")"; }
std::string power_time_scaling_name(double k, double p) {
  return "T_kp(" + format_number(k) + "," + format_number(p) + ")";
}
std::string power_exp_scaling_name(double k) { return "T_ke(" + format_number(k) + ")"; }

GroupFamily time_translation() {
  GeneratorCoefficients c;
  c.time_shift = 1;
  return {"T_t", c};
}

GroupFamily space_translation() {
  GeneratorCoefficients c;
  c.space_shift = 1;
  return {"T_x", c};
}

GroupFamily dilation() {
  GeneratorCoefficients c;
  c.time_scale = 2;
  c.space_scale = 1;
  return {"T_d", c};
}

GroupFamily power_scaling(double k) {
  GeneratorCoefficients c;
  c.space_scale = k;
  c.value_scale = 2;
  GroupParams params;
  params.k = k;
  return {power_scaling_name(k), c, params};
}

GroupFamily power_time_scaling(double k, double p) {
  GeneratorCoefficients c;
  c.time_scale = k + 2;
  c.space_scale = k * (p + 1) + 1;
  c.value_scale = 2 * p + 1;
  GroupParams params;
  params.k = k;
  params.p = p;
  return {power_time_scaling_name(k, p), c, params};
}

GroupFamily power_exp_scaling(double k) {
  GeneratorCoefficients c;
  c.time_shift = k + 2;
  c.space_scale = k;
  c.value_scale = 2;
  GroupParams params;
  params.k = k;
  return {power_exp_scaling_name(k), c, params};
}

GroupFamily exp_shift() {
  GeneratorCoefficients c;
  c.space_scale = 1;
  c.value_shift = 2;
  return {"T_e", c};
}

GroupFamily conformal() {
  GeneratorCoefficients c;
  c.space_conformal = 1;
  c.value_conformal = -3;
  return {"T_c", c};
}

}  // namespace groups

GroupFamily linear_combination_group(const LinearCombination& lc) {
  if (lc.l1 == 0 && lc.l2 == 0 && lc.l3 == 0 && lc.l4 == 0 && !lc.conformal) {
    throw std::invalid_argument("linear_combination_group: all coefficients are zero");
  }
  GeneratorCoefficients c;
  c.time_shift = lc.l1;
  c.time_scale = 2 * lc.l3;
  c.space_shift = lc.l2;
  c.space_scale = lc.l3 + lc.l4 * lc.k;
  c.value_scale = 2 * lc.l4;
  if (lc.conformal) {
    c.space_conformal = 1;
    c.value_conformal = -3;
  }

  GroupParams params;
  params.lambda1 = lc.l1;
  params.lambda2 = lc.l2;
  params.lambda3 = lc.l3;
  std::string name;
  if (lc.conformal) {
    params.lambda4 = lc.l4;
    params.k = lc.k;
    name = "T_Z";
  } else if (lc.l4 == 0) {
    if (lc.l3 != 0) {
      name = "T_X";
    } else {
      name = lc.l2 == 0 ? "T_t" : "T_xt";
    }
  } else {
    params.lambda4 = lc.l4;
    params.k = lc.k;
    if (lc.l3 == 0) {
      name = "T_3";
    } else {
      name = lc.l3 + lc.k * lc.l4 != 0 ? "T_1" : "T_2";
    }
  }
  return {name, c, params};
}

namespace {

std::array<double, 8> as_array(const GeneratorCoefficients& c) {
  return {c.time_shift,  c.time_scale,  c.space_shift,  c.space_scale,
          c.space_conformal, c.value_shift, c.value_scale, c.value_conformal};
}

// s with c = s * ref, if one exists.
std::optional<double> proportionality(const GeneratorCoefficients& c,
                                      const GeneratorCoefficients& ref) {
  const auto a = as_array(c);
  const auto b = as_array(ref);
  std::size_t lead = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (std::fabs(b[i]) > std::fabs(b[lead])) lead = i;
  }
  if (b[lead] == 0.0) return std::nullopt;
  const double s = a[lead] / b[lead];
  if (s == 0.0) return std::nullopt;
  double scale = 0;
  for (double v : a) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i] - s * b[i]) > 1e-12 * scale) return std::nullopt;
  }
  return s;
}

}  // namespace

std::optional<GroupFamily> identify_group(const GeneratorCoefficients& c,
                                          std::optional<double> k_hint) {
  std::vector<GroupFamily> candidates = {groups::time_translation(), groups::space_translation(),
                                         groups::dilation(), groups::exp_shift(),
                                         groups::conformal()};
  // Exponents recoverable from the generator itself.
  const bool pure_scaling = c.time_shift == 0 && c.time_scale == 0 && c.space_shift == 0 &&
                            c.space_conformal == 0 && c.value_shift == 0 &&
                            c.value_conformal == 0 && c.value_scale != 0;
  if (pure_scaling) candidates.push_back(groups::power_scaling(2 * c.space_scale / c.value_scale));
  const bool exp_type = c.time_scale == 0 && c.time_shift != 0 && c.space_shift == 0 &&
                        c.space_conformal == 0 && c.value_shift == 0 &&
                        c.value_conformal == 0 && c.value_scale != 0;
  if (exp_type) {
    const double k = 2 * c.space_scale / c.value_scale;
    if (k != -2) candidates.push_back(groups::power_exp_scaling(k));
  }
  if (k_hint && *k_hint != -2 && c.time_scale != 0) {
    // T_kp(k, p) has value scale (2p + 1) relative to time scale (k + 2).
    const double k = *k_hint;
    const double p = (c.value_scale * (k + 2) / c.time_scale - 1) / 2;
    candidates.push_back(groups::power_time_scaling(k, p));
  }
  if (k_hint) candidates.push_back(groups::power_scaling(*k_hint));

  for (const auto& g : candidates) {
    if (auto s = proportionality(c, g.coefficients())) {
      return GroupFamily(g.name(), c, g.params(), *s);
    }
  }
  return std::nullopt;
}

GroupFamily parse_group(std::string_view text) {
  const auto call = detail::split_call(text);
  std::string name;
  for (char ch : call.name) {
    if (ch != '_') name.push_back(ch);
  }
  std::vector<double> args;
  for (auto a : call.args) args.push_back(detail::parse_number(a));
  auto expect = [&](std::size_t n) {
    if (args.size() != n) {
      throw ParseError("group '" + std::string(text) + "' expects " + std::to_string(n) +
                       " arguments");
    }
  };
  if (name == "td") return expect(0), groups::dilation();
  if (name == "tt") return expect(0), groups::time_translation();
  if (name == "tx") return expect(0), groups::space_translation();
  if (name == "te") return expect(0), groups::exp_shift();
  if (name == "tc") return expect(0), groups::conformal();
  if (name == "tk") return expect(1), groups::power_scaling(args[0]);
  if (name == "tkp") return expect(2), groups::power_time_scaling(args[0], args[1]);
  if (name == "tke") return expect(1), groups::power_exp_scaling(args[0]);
  if (name == "lincomb") {
    if (args.size() != 3 && args.size() != 5) {
      throw ParseError("lincomb expects 3 or 5 arguments");
    }
    LinearCombination lc{args[0], args[1], args[2]};
    if (args.size() == 5) {
      lc.l4 = args[3];
      lc.k = args[4];
      lc.conformal = std::fabs(lc.k + 4.0 / 3.0) < 1e-12;
    }
    return linear_combination_group(lc);
  }
  throw ParseError("unknown group '" + std::string(text) + "'");
}

}  // namespace heatsym
