#pragma once

// One-parameter groups of point transformations
//   t* = T(t; eps),  x* = X(x; eps),  u* = A(x; eps) * u + B(x; eps)
// for the nonlinear heat equation, their second-order prolongation and
// infinitesimal generators.
//
// Every group in the catalogue is the flow of a generator
//   xi_t = a0 + a1 t,  xi_x = b0 + b1 x + b2 x^2,  eta = (c1 + cx x) u + c0,
// and the finite maps are the closed-form exponentials of that flow.

#include <optional>
#include <string>
#include <string_view>

#include "heatsym/symfun.hpp"

namespace heatsym {

struct Point {
  double t = 0, x = 0, u = 0;
};

// Second-order jet (t, x, u, u_t, u_x, u_xx).
struct Jet {
  double t = 0, x = 0, u = 0;
  double u_t = 0, u_x = 0, u_xx = 0;
};

struct GeneratorCoefficients {
  double time_shift = 0;       // a0
  double time_scale = 0;       // a1
  double space_shift = 0;      // b0
  double space_scale = 0;      // b1
  double space_conformal = 0;  // b2
  double value_shift = 0;      // c0
  double value_scale = 0;      // c1
  double value_conformal = 0;  // cx

  bool operator==(const GeneratorCoefficients&) const = default;
};

struct VectorField {
  GeneratorCoefficients c;

  double xi_t(double t, double /*x*/) const { return c.time_shift + c.time_scale * t; }
  double xi_x(double /*t*/, double x) const {
    return c.space_shift + (c.space_scale + c.space_conformal * x) * x;
  }
  double eta(double /*t*/, double x, double u) const {
    return (c.value_scale + c.value_conformal * x) * u + c.value_shift;
  }
};

// The group element at a fixed parameter value.
struct PointMap {
  FuncForm time_map;     // always Affine
  FuncForm space_map;    // Affine, Mobius or Fractional
  FuncForm value_scale;  // A(x)
  FuncForm value_shift;  // B(x)

  Point operator()(const Point& p) const;
};

// Parameters of the power-law families and of linear combinations; unused
// entries stay empty.
struct GroupParams {
  std::optional<double> k;
  std::optional<double> p;
  std::optional<double> lambda1, lambda2, lambda3, lambda4;
};

class GroupFamily {
 public:
  GroupFamily(std::string name, GeneratorCoefficients coefficients, GroupParams params = {},
              double eps_scale = 1.0);

  const std::string& name() const noexcept { return name_; }
  const GeneratorCoefficients& coefficients() const noexcept { return coefficients_; }
  const GroupParams& params() const noexcept { return params_; }
  // This family at eps equals the named catalogue group at eps_scale * eps.
  double eps_scale() const noexcept { return eps_scale_; }

  PointMap at(double eps) const;

 private:
  std::string name_;
  GeneratorCoefficients coefficients_;
  GroupParams params_;
  double eps_scale_;
};

Point apply(const GroupFamily& g, double eps, const Point& p);

Jet prolong2(const PointMap& m, const Jet& jet);
Jet prolong2(const GroupFamily& g, double eps, const Jet& jet);

VectorField generator(const GroupFamily& g);

namespace groups {

GroupFamily time_translation();        // T_t
GroupFamily space_translation();       // T_x
GroupFamily dilation();                // T_d
GroupFamily power_scaling(double k);   // T_k
GroupFamily power_time_scaling(double k, double p);  // T_kp
GroupFamily power_exp_scaling(double k);             // T_ke
GroupFamily exp_shift();               // T_e
GroupFamily conformal();               // T_c

std::string power_scaling_name(double k);
std::string power_time_scaling_name(double k, double p);
std::string power_exp_scaling_name(double k);

}  // namespace groups

// Generator
//   (l1 + 2 l3 t) d_t + (l2 + (l3 + l4 k) x + [x^2]) d_x + ((2 l4 - [3x]) u) d_u
// where the bracketed conformal terms are present when `conformal` is set.
// l4 = 1 gives the operator Y of the power-law case, l4 = 0 the operator X of
// the kernel algebra, and conformal = true with k = -4/3 the operator Z.
struct LinearCombination {
  double l1 = 0, l2 = 0, l3 = 0, l4 = 0;
  double k = 0;
  bool conformal = false;
};

GroupFamily linear_combination_group(const LinearCombination& lc);

// Catalogue member whose generator is proportional to `c`, if any. `k_hint`
// resolves the exponent of T_kp, which is not determined by the generator
// alone.
std::optional<GroupFamily> identify_group(const GeneratorCoefficients& c,
                                          std::optional<double> k_hint = std::nullopt);

// Group names accepted on the command line:
//   Td, Tt, Tx, Tk(k), Tkp(k,p), Tke(k), Te, Tc, lincomb(l1,l2,l3[,l4,k])
GroupFamily parse_group(std::string_view text);

}  // namespace heatsym
