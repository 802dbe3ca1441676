#pragma once

// Closed catalogue of scalar function forms used for d(u), q(t) and the
// component maps of the point transformations.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace heatsym {

struct Zero {
  bool operator==(const Zero&) const = default;
};

struct Const {
  double c;
  bool operator==(const Const&) const = default;
};

// c * s^a
struct Power {
  double c;
  double a;
  bool operator==(const Power&) const = default;
};

// c * exp(rate * s)
struct Exp {
  double c;
  double rate;
  bool operator==(const Exp&) const = default;
};

// a * s + b
struct Affine {
  double a;
  double b;
  bool operator==(const Affine&) const = default;
};

// s / (1 - eps * s)
struct Mobius {
  double eps;
  bool operator==(const Mobius&) const = default;
};

// (a * s + b) / (c * s + d)
struct Fractional {
  double a, b, c, d;
  bool operator==(const Fractional&) const = default;
};

// c * (a * s + b)^n
struct AffinePower {
  double c, a, b, n;
  bool operator==(const AffinePower&) const = default;
};

// gain * (floor + sum_i amp_i * exp(-z_i^2 / 2)),  z_i = ((s - shift) / scale - center_i) / width_i,
// differentiated `order` times. The bumps are drawn from `seed` alone.
struct RandomSmooth {
  static constexpr int kBumps = 4;
  struct Bump {
    double center, width, amplitude;
    bool operator==(const Bump&) const = default;
  };

  std::uint64_t seed;
  double floor;
  double gain = 1.0;
  double shift = 0.0;
  double scale = 1.0;
  int order = 0;
  std::array<Bump, kBumps> bumps{};

  static RandomSmooth make(std::uint64_t seed, double floor = 0.5);
  bool operator==(const RandomSmooth&) const = default;
};

class FuncForm {
 public:
  using Variant =
      std::variant<Zero, Const, Power, Exp, Affine, Mobius, Fractional, AffinePower, RandomSmooth>;

  FuncForm() : form_(Zero{}) {}
  FuncForm(Zero z) : form_(z) {}
  FuncForm(Const c) : form_(c) {}
  FuncForm(Power p) : form_(p) {}
  FuncForm(Exp e) : form_(e) {}
  FuncForm(Affine a) : form_(a) {}
  FuncForm(Mobius m) : form_(m) {}
  FuncForm(Fractional f) : form_(f) {}
  FuncForm(AffinePower p) : form_(p) {}
  FuncForm(RandomSmooth r);

  const Variant& variant() const noexcept { return form_; }

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(form_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(form_);
  }

  double operator()(double s) const;

  bool operator==(const FuncForm&) const = default;

 private:
  Variant form_;
};

// Exact value at s; throws DomainError outside the domain of the form.
double eval(const FuncForm& f, double s);

// Closed-form derivative. RandomSmooth returns the same bump set with the
// derivative order raised by one.
FuncForm derivative(const FuncForm& f);

// Limit as s -> +inf, +/-infinity encoded as IEEE infinities.
// Throws UnsupportedForm for RandomSmooth.
double limit_at_pos_infinity(const FuncForm& f);

// Text form, e.g. "power(1,-1.5)". Numbers use the shortest representation
// that parses back to the same double.
std::string format(const FuncForm& f);
FuncForm parse_func_form(std::string_view text);

std::string format_number(double v);

}  // namespace heatsym
