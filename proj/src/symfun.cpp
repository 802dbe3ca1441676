#include "heatsym/symfun.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "heatsym/errors.hpp"
#include "text.hpp"

namespace heatsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_integer(double a) { return std::isfinite(a) && std::floor(a) == a; }

double ipow(double s, long long n) {
  if (n < 0) return 1.0 / ipow(s, -n);
  double result = 1.0;
  double base = s;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

// s^a with the integer and half-integer exponents (the common power laws)
// evaluated without std::pow.
double real_pow(double s, double a) {
  if (a == 0.0) return 1.0;
  if (is_integer(a) && std::fabs(a) < 64) return ipow(s, static_cast<long long>(a));
  const double twice = 2.0 * a;
  if (is_integer(twice) && std::fabs(a) < 64 && s > 0) {
    const long long whole = static_cast<long long>(std::floor(a));
    return ipow(s, whole) * std::sqrt(s);
  }
  return std::pow(s, a);
}

double checked_pow(double base, double a, const char* what) {
  if (a == 0.0) return 1.0;
  if (base < 0 && !is_integer(a)) {
    throw DomainError(std::string(what) + ": negative base " + format_number(base) +
                      " with fractional exponent " + format_number(a));
  }
  if (base == 0 && a < 0) {
    throw DomainError(std::string(what) + ": pole at zero base for exponent " + format_number(a));
  }
  return real_pow(base, a);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Probabilists' Hermite polynomial He_n(z); d^n/dz^n e^{-z^2/2} = (-1)^n He_n(z) e^{-z^2/2}.
double hermite_he(int n, double z) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < n; ++k) {
    const double next = z * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_random_smooth(const RandomSmooth& r, double s) {
  const double sigma = (s - r.shift) / r.scale;
  double sum = r.order == 0 ? r.floor : 0.0;
  for (const auto& b : r.bumps) {
    const double z = (sigma - b.center) / b.width;
    const double bump = b.amplitude * std::exp(-0.5 * z * z);
    if (r.order == 0) {
      sum += bump;
    } else {
      const double sign = (r.order % 2 == 0) ? 1.0 : -1.0;
      sum += sign * hermite_he(r.order, z) * bump / std::pow(b.width, r.order);
    }
  }
  return r.gain * sum / std::pow(r.scale, r.order);
}

double signed_infinity(double sign) { return sign > 0 ? kInf : -kInf; }

}  // namespace

RandomSmooth RandomSmooth::make(std::uint64_t seed, double floor) {
  if (!(floor > 0)) throw std::invalid_argument("randsmooth floor must be positive");
  RandomSmooth r{seed, floor};
  std::mt19937_64 rng(seed);
  for (auto& b : r.bumps) {
    b.center = 0.5 + 7.5 * unit_uniform(rng);
    b.width = 0.3 + 1.7 * unit_uniform(rng);
    b.amplitude = 0.1 + 0.9 * unit_uniform(rng);
  }
  return r;
}

FuncForm::FuncForm(RandomSmooth r) {
  // Bumps are a pure function of the seed; rebuild them so that two forms
  // with the same parameters always compare and evaluate identically.
  RandomSmooth built = RandomSmooth::make(r.seed, r.floor);
  built.gain = r.gain;
  built.shift = r.shift;
  built.scale = r.scale;
  built.order = r.order;
  if (!(built.scale != 0) || !std::isfinite(built.scale)) {
    throw std::invalid_argument("randsmooth scale must be finite and nonzero");
  }
  if (built.order < 0) throw std::invalid_argument("randsmooth order must be >= 0");
  form_ = built;
}

double FuncForm::operator()(double s) const { return eval(*this, s); }

double eval(const FuncForm& f, double s) {
  return std::visit(
      Overloaded{
          [](const Zero&) { return 0.0; },
          [](const Const& c) { return c.c; },
          [s](const Power& p) { return p.c * checked_pow(s, p.a, "power"); },
          [s](const Exp& e) { return e.c * std::exp(e.rate * s); },
          [s](const Affine& a) { return a.a * s + a.b; },
          [s](const Mobius& m) {
            const double denom = 1.0 - m.eps * s;
            if (denom == 0.0) throw DomainError("mobius: pole at s = 1/eps = " + format_number(s));
            return s / denom;
          },
          [s](const Fractional& f) {
            const double denom = f.c * s + f.d;
            if (denom == 0.0) throw DomainError("frac: pole at s = " + format_number(s));
            return (f.a * s + f.b) / denom;
          },
          [s](const AffinePower& p) { return p.c * checked_pow(p.a * s + p.b, p.n, "affpow"); },
          [s](const RandomSmooth& r) { return eval_random_smooth(r, s); },
      },
      f.variant());
}

FuncForm derivative(const FuncForm& f) {
  return std::visit(
      Overloaded{
          [](const Zero&) -> FuncForm { return Zero{}; },
          [](const Const&) -> FuncForm { return Zero{}; },
          [](const Power& p) -> FuncForm {
            if (p.a == 0.0 || p.c == 0.0) return Zero{};
            return Power{p.c * p.a, p.a - 1.0};
          },
          [](const Exp& e) -> FuncForm {
            if (e.rate == 0.0 || e.c == 0.0) return Zero{};
            return Exp{e.c * e.rate, e.rate};
          },
          [](const Affine& a) -> FuncForm { return Const{a.a}; },
          [](const Mobius& m) -> FuncForm { return AffinePower{1.0, -m.eps, 1.0, -2.0}; },
          [](const Fractional& f) -> FuncForm {
            return AffinePower{f.a * f.d - f.b * f.c, f.c, f.d, -2.0};
          },
          [](const AffinePower& p) -> FuncForm {
            if (p.n == 0.0 || p.c == 0.0 || p.a == 0.0) return Zero{};
            return AffinePower{p.c * p.n * p.a, p.a, p.b, p.n - 1.0};
          },
          [](const RandomSmooth& r) -> FuncForm {
            RandomSmooth d = r;
            d.order += 1;
            return d;
          },
      },
      f.variant());
}

double limit_at_pos_infinity(const FuncForm& f) {
  return std::visit(
      Overloaded{
          [](const Zero&) { return 0.0; },
          [](const Const& c) { return c.c; },
          [](const Power& p) {
            if (p.c == 0.0) return 0.0;
            if (p.a > 0) return signed_infinity(p.c);
            if (p.a == 0) return p.c;
            return 0.0;
          },
          [](const Exp& e) {
            if (e.c == 0.0) return 0.0;
            if (e.rate > 0) return signed_infinity(e.c);
            if (e.rate == 0) return e.c;
            return 0.0;
          },
          [](const Affine& a) {
            if (a.a != 0) return signed_infinity(a.a);
            return a.b;
          },
          [](const Mobius& m) {
            if (m.eps == 0.0) return kInf;
            return -1.0 / m.eps;
          },
          [](const Fractional& f) {
            if (f.c != 0.0) return f.a / f.c;
            if (f.d == 0.0) throw DomainError("frac: identically singular form");
            if (f.a != 0.0) return signed_infinity(f.a / f.d);
            return f.b / f.d;
          },
          [](const AffinePower& p) {
            if (p.c == 0.0) return 0.0;
            if (p.n == 0.0) return p.c;
            if (p.a == 0.0) return p.c * checked_pow(p.b, p.n, "affpow");
            if (p.a > 0) return p.n > 0 ? signed_infinity(p.c) : 0.0;
            // base -> -infinity
            if (!is_integer(p.n)) throw DomainError("affpow: negative base with fractional exponent at infinity");
            if (p.n < 0) return 0.0;
            const bool odd = static_cast<long long>(p.n) % 2 != 0;
            return signed_infinity(odd ? -p.c : p.c);
          },
          [](const RandomSmooth&) -> double {
            throw UnsupportedForm("limit_at_pos_infinity: randsmooth has no closed-form limit");
          },
      },
      f.variant());
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format(const FuncForm& f) {
  const auto n = format_number;
  return std::visit(
      Overloaded{
          [](const Zero&) { return std::string("zero"); },
          [&](const Const& c) { return "const(" + n(c.c) + ")"; },
          [&](const Power& p) { return "power(" + n(p.c) + "," + n(p.a) + ")"; },
          [&](const Exp& e) { return "exp(" + n(e.c) + "," + n(e.rate) + ")"; },
          [&](const Affine& a) { return "affine(" + n(a.a) + "," + n(a.b) + ")"; },
          [&](const Mobius& m) { return "mobius(" + n(m.eps) + ")"; },
          [&](const Fractional& f) {
            return "frac(" + n(f.a) + "," + n(f.b) + "," + n(f.c) + "," + n(f.d) + ")";
          },
          [&](const AffinePower& p) {
            return "affpow(" + n(p.c) + "," + n(p.a) + "," + n(p.b) + "," + n(p.n) + ")";
          },
          [&](const RandomSmooth& r) {
            std::string out = "randsmooth(" + std::to_string(r.seed) + "," + n(r.floor);
            if (r.gain != 1.0 || r.shift != 0.0 || r.scale != 1.0 || r.order != 0) {
              out += "," + n(r.gain) + "," + n(r.shift) + "," + n(r.scale) + "," +
                     std::to_string(r.order);
            }
            return out + ")";
          },
      },
      f.variant());
}

FuncForm parse_func_form(std::string_view text) {
  auto call = detail::split_call(text);
  const std::string& name = call.name;
  const auto& args = call.args;
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ParseError("'" + name + "' expects " + std::to_string(lo) +
                       (hi != lo ? ".." + std::to_string(hi) : std::string()) + " arguments, got " +
                       std::to_string(args.size()));
    }
  };
  auto num = [&](std::size_t i) { return detail::parse_number(args[i]); };

  // a bare number is a constant
  if (!name.empty() && text.find('(') == std::string_view::npos &&
      (std::isdigit(static_cast<unsigned char>(name.front())) || name.front() == '-' ||
       name.front() == '+' || name.front() == '.')) {
    const double c = detail::parse_number(name);
    if (c == 0) return Zero{};
    return Const{c};
  }
  if (name == "zero") {
    expect(0, 0);
    return Zero{};
  }
  if (name == "const") {
    expect(1, 1);
    return Const{num(0)};
  }
  if (name == "power") {
    expect(2, 2);
    return Power{num(0), num(1)};
  }
  if (name == "exp") {
    expect(2, 2);
    return Exp{num(0), num(1)};
  }
  if (name == "affine") {
    expect(2, 2);
    return Affine{num(0), num(1)};
  }
  if (name == "mobius") {
    expect(1, 1);
    return Mobius{num(0)};
  }
  if (name == "frac") {
    expect(4, 4);
    return Fractional{num(0), num(1), num(2), num(3)};
  }
  if (name == "affpow") {
    expect(4, 4);
    return AffinePower{num(0), num(1), num(2), num(3)};
  }
  if (name == "randsmooth") {
    if (args.size() != 2 && args.size() != 6) {
      throw ParseError("'randsmooth' expects 2 or 6 arguments, got " + std::to_string(args.size()));
    }
    RandomSmooth r{detail::parse_unsigned(args[0]), num(1)};
    if (!(r.floor > 0)) throw ParseError("randsmooth floor must be positive");
    if (args.size() == 6) {
      r.gain = num(2);
      r.shift = num(3);
      r.scale = num(4);
      r.order = static_cast<int>(detail::parse_unsigned(args[5]));
    }
    return r;
  }
  throw ParseError("unknown function form '" + std::string(text) + "'");
}

}  // namespace heatsym
