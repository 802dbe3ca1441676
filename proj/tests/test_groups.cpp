#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "heatsym/errors.hpp"
#include "heatsym/groups.hpp"
#include "heatsym/random.hpp"

using namespace heatsym;

namespace {

void expect_point_near(const Point& a, const Point& b, double rel) {
  auto close = [rel](double x, double y) { return std::fabs(x - y) <= rel * std::max(1.0, std::fabs(y)); };
  EXPECT_TRUE(close(a.t, b.t) && close(a.x, b.x) && close(a.u, b.u))
      << "(" << a.t << "," << a.x << "," << a.u << ") vs (" << b.t << "," << b.x << "," << b.u << ")";
}

std::vector<GroupFamily> catalogue() {
  return {groups::time_translation(),
          groups::space_translation(),
          groups::dilation(),
          groups::power_scaling(-1.5),
          groups::power_scaling(-2),
          groups::power_time_scaling(1, 0),
          groups::power_time_scaling(-1.5, 0.5),
          groups::power_exp_scaling(-1.5),
          groups::exp_shift(),
          groups::conformal(),
          linear_combination_group({1, 0.5, 0.3}),
          linear_combination_group({0.4, 0.2, 0.7, 1, -1.5}),
          linear_combination_group({0.4, 0.2, 1.5, 1, -1.5}),
          linear_combination_group({0.4, 0.2, 0, 1, -1.5}),
          linear_combination_group({0.2, 0, 0.5, 0.3, -4.0 / 3.0, true}),
          linear_combination_group({0, 0.4, 0.5, 0.3, -4.0 / 3.0, true}),
          linear_combination_group({0, 5, 0, 0, -4.0 / 3.0, true})};
}

// Smooth test surfaces with analytic derivatives.
struct Surface {
  std::function<double(double, double)> u;
  std::function<Jet(double, double)> jet;
};

// Numerical jet: first derivatives by central differences at h = 1e-5, the
// second by the five-point stencil (a plain central second difference at that
// step is dominated by roundoff).
Jet numerical_jet(const std::function<double(double, double)>& u, double t, double x) {
  const double h = 1e-5, h2 = 1e-3;
  Jet j{t, x, u(t, x)};
  j.u_t = (u(t + h, x) - u(t - h, x)) / (2 * h);
  j.u_x = (u(t, x + h) - u(t, x - h)) / (2 * h);
  j.u_xx = (-u(t, x + 2 * h2) + 16 * u(t, x + h2) - 30 * j.u + 16 * u(t, x - h2) -
            u(t, x - 2 * h2)) /
           (12 * h2 * h2);
  return j;
}

}  // namespace

TEST(Apply, CatalogueExamples) {
  expect_point_near(apply(groups::dilation(), std::log(2.0), {1, 1, 5}), {4, 2, 5}, 1e-15);
  const double e = std::exp(1.0);
  expect_point_near(apply(groups::power_time_scaling(1, 0), 1, {1, 1, 1}), {e * e * e, e * e, e},
                    1e-15);
  const Point p{0.7, 2.0, 3.0};
  for (const auto& g : catalogue()) {
    const Point q = apply(g, 0, p);
    EXPECT_EQ(q.t, p.t) << g.name();
    EXPECT_EQ(q.x, p.x) << g.name();
    EXPECT_EQ(q.u, p.u) << g.name();
  }
}

TEST(Apply, MatchesPublishedClosedForms) {
  const Point p{1.3, 0.8, 2.1};
  for (double eps : {-0.7, 0.2, 1.1}) {
    for (double k : {-1.5, -4.0 / 3.0, 1.0}) {
      expect_point_near(apply(groups::power_scaling(k), eps, p),
                        {p.t, p.x * std::exp(k * eps), p.u * std::exp(2 * eps)}, 1e-14);
      for (double pp : {-1.0, 0.0, 0.5}) {
        expect_point_near(apply(groups::power_time_scaling(k, pp), eps, p),
                          {p.t * std::exp((k + 2) * eps), p.x * std::exp((k * (pp + 1) + 1) * eps),
                           p.u * std::exp((2 * pp + 1) * eps)},
                          1e-14);
      }
      expect_point_near(apply(groups::power_exp_scaling(k), eps, p),
                        {p.t + (k + 2) * eps, p.x * std::exp(k * eps), p.u * std::exp(2 * eps)},
                        1e-14);
    }
    expect_point_near(apply(groups::time_translation(), eps, p), {p.t + eps, p.x, p.u}, 1e-15);
    expect_point_near(apply(groups::space_translation(), eps, p), {p.t, p.x + eps, p.u}, 1e-15);
    expect_point_near(apply(groups::exp_shift(), eps, p),
                      {p.t, p.x * std::exp(eps), p.u + 2 * eps}, 1e-14);
    expect_point_near(apply(groups::conformal(), eps, p),
                      {p.t, p.x / (1 - eps * p.x), p.u * std::pow(1 - eps * p.x, 3)}, 1e-14);
  }
}

TEST(LinearCombination, PatternsAndClosedForms) {
  EXPECT_EQ(linear_combination_group({1, 0, 0}).name(), "T_t");
  EXPECT_EQ(linear_combination_group({1, 2, 0}).name(), "T_xt");
  EXPECT_EQ(linear_combination_group({1, 0, 2}).name(), "T_X");
  EXPECT_EQ(linear_combination_group({1, 0, 2, 1, -1}).name(), "T_1");
  EXPECT_EQ(linear_combination_group({1, 0, 1, 1, -1}).name(), "T_2");
  EXPECT_EQ(linear_combination_group({1, 0, 0, 1, -1}).name(), "T_3");
  EXPECT_EQ(linear_combination_group({0, 0, 1, 1, -4.0 / 3.0, true}).name(), "T_Z");
  EXPECT_THROW(linear_combination_group({0, 0, 0}), std::invalid_argument);

  const Point p{1.3, 0.8, 2.1};
  const double l1 = 0.4, l2 = 0.3, l3 = 0.6, k = -1.5;
  for (double eps : {-0.5, 0.25, 1.0}) {
    // T_xt
    expect_point_near(apply(linear_combination_group({l1, l2, 0}), eps, p),
                      {p.t + l1 * eps, p.x + l2 * eps, p.u}, 1e-14);
    // T_X
    const double e2 = std::exp(2 * l3 * eps), e1 = std::exp(l3 * eps);
    expect_point_near(apply(linear_combination_group({l1, l2, l3}), eps, p),
                      {p.t * e2 + l1 / (2 * l3) * (e2 - 1), p.x * e1 + l2 / l3 * (e1 - 1), p.u},
                      1e-14);
    // T_1
    const double ek = std::exp((l3 + k) * eps);
    expect_point_near(apply(linear_combination_group({l1, l2, l3, 1, k}), eps, p),
                      {p.t * e2 + l1 / (2 * l3) * (e2 - 1), p.x * ek + l2 / (l3 + k) * (ek - 1),
                       p.u * std::exp(2 * eps)},
                      1e-14);
    // T_2 (l3 = -k)
    const double em = std::exp(-2 * k * eps);
    expect_point_near(apply(linear_combination_group({l1, l2, -k, 1, k}), eps, p),
                      {p.t * em - l1 / (2 * k) * (em - 1), p.x + l2 * eps, p.u * std::exp(2 * eps)},
                      1e-14);
    // T_3
    const double e3 = std::exp(k * eps);
    expect_point_near(apply(linear_combination_group({l1, l2, 0, 1, k}), eps, p),
                      {p.t + l1 * eps, p.x * e3 + l2 / k * (e3 - 1), p.u * std::exp(2 * eps)},
                      1e-14);
    // Z with l2 = 0: x* = m x e^{m eps} / (x (1 - e^{m eps}) + m), m = l3 - 4 l4 / 3
    const double l4 = 0.9, m = l3 - 4 * l4 / 3, em2 = std::exp(m * eps);
    const Point z = apply(linear_combination_group({l1, 0, l3, l4, -4.0 / 3.0, true}), eps, p);
    EXPECT_NEAR(z.x, m * p.x * em2 / (p.x * (1 - em2) + m), 1e-13);
    EXPECT_NEAR(z.t, p.t * e2 + l1 / (2 * l3) * (e2 - 1), 1e-13);
  }
}

TEST(GroupLaw, ComposesAdditively) {
  UniformSampler rng(11);
  for (const auto& g : catalogue()) {
    for (double e1 : {-1.0, -0.5, 0.1, 0.7}) {
      for (double e2 : {-1.0, -0.5, 0.1, 0.7}) {
        for (int i = 0; i < 50; ++i) {
          // Keep x small enough that conformal maps stay clear of their pole.
          const Point p{rng(0.1, 10), rng(0, 0.2), rng(0.2, 10)};
          const Point two = apply(g, e2, apply(g, e1, p));
          const Point one = apply(g, e1 + e2, p);
          expect_point_near(two, one, 1e-10);
        }
      }
    }
  }
}

TEST(GroupLaw, ConformalFixesOrigin) {
  for (double eps : {-2.0, -0.3, 0.5, 4.0}) {
    const Point q = apply(groups::conformal(), eps, {1.7, 0, 2.5});
    EXPECT_EQ(q.t, 1.7);
    EXPECT_EQ(q.x, 0);
    EXPECT_EQ(q.u, 2.5);
  }
  EXPECT_THROW(apply(groups::conformal(), 0.5, {1, 2, 1}), DomainError);
}

TEST(Generator, MatchesNumericalEpsDerivative) {
  const double h = 1e-6;
  UniformSampler rng(5);
  for (const auto& g : catalogue()) {
    const VectorField v = generator(g);
    for (int i = 0; i < 20; ++i) {
      const Point p{rng(0.1, 10), rng(0, 0.5), rng(0.2, 10)};
      const Point plus = apply(g, h, p), minus = apply(g, -h, p);
      const double dt = (plus.t - minus.t) / (2 * h);
      const double dx = (plus.x - minus.x) / (2 * h);
      const double du = (plus.u - minus.u) / (2 * h);
      EXPECT_NEAR(v.xi_t(p.t, p.x), dt, 1e-6 * std::max(1.0, std::fabs(dt))) << g.name();
      EXPECT_NEAR(v.xi_x(p.t, p.x), dx, 1e-6 * std::max(1.0, std::fabs(dx))) << g.name();
      EXPECT_NEAR(v.eta(p.t, p.x, p.u), du, 1e-6 * std::max(1.0, std::fabs(du))) << g.name();
    }
  }
  const double t = 1.5, x = 2, u = 3, k = -1.5;
  const VectorField vd = generator(groups::dilation());
  EXPECT_EQ(vd.xi_t(t, x), 2 * t);
  EXPECT_EQ(vd.xi_x(t, x), x);
  EXPECT_EQ(vd.eta(t, x, u), 0);
  const VectorField vk = generator(groups::power_scaling(k));
  EXPECT_EQ(vk.xi_t(t, x), 0);
  EXPECT_EQ(vk.xi_x(t, x), k * x);
  EXPECT_EQ(vk.eta(t, x, u), 2 * u);
  const VectorField vc = generator(groups::conformal());
  EXPECT_EQ(vc.xi_x(t, x), x * x);
  EXPECT_EQ(vc.eta(t, x, u), -3 * x * u);
}

TEST(Prolong, IdentityAndFluxFactor) {
  const Jet j{1.2, 0.4, 2, 0.3, 3, -1.1};
  for (const auto& g : catalogue()) {
    const Jet p = prolong2(g, 0, j);
    EXPECT_DOUBLE_EQ(p.u_t, j.u_t) << g.name();
    EXPECT_DOUBLE_EQ(p.u_x, j.u_x) << g.name();
    EXPECT_DOUBLE_EQ(p.u_xx, j.u_xx) << g.name();
  }
  // u^-2 u_x is preserved by T_k(-2).
  const Jet p = prolong2(groups::power_scaling(-2), 1, j);
  EXPECT_NEAR(std::pow(p.u, -2) * p.u_x, 0.75, 1e-14);
  // (u*)^k u*_x* = e^{(k+2) eps} u^k u_x
  const Jet q = prolong2(groups::power_scaling(-1.5), 0.7, j);
  EXPECT_NEAR(std::pow(q.u, -1.5) * q.u_x, std::exp(0.5 * 0.7) * std::pow(2, -1.5) * 3, 1e-13);
}

// Transform the surface pointwise and differentiate it numerically in the new
// variables: u*(t*, x*) = A(x) u(t, x) + B(x) with t = T^{-1}(t*), x = X^{-1}(x*).
TEST(Prolong, AgreesWithTransformedSurface) {
  const std::vector<Surface> surfaces = {
      {[](double t, double x) { return 1 + 0.5 * t + 0.3 * x * x - 0.1 * t * x * x * x; },
       [](double t, double x) {
         return Jet{t,
                    x,
                    1 + 0.5 * t + 0.3 * x * x - 0.1 * t * x * x * x,
                    0.5 - 0.1 * x * x * x,
                    0.6 * x - 0.3 * t * x * x,
                    0.6 - 0.6 * t * x};
       }},
      {[](double t, double x) { return 0.5 + std::exp(-(x - 0.3) * (x - 0.3) / (0.5 + t)); },
       [](double t, double x) {
         const double w = 0.5 + t, y = x - 0.3, g = std::exp(-y * y / w);
         return Jet{t, x, 0.5 + g, g * y * y / (w * w), -2 * y / w * g,
                    (4 * y * y / (w * w) - 2 / w) * g};
       }},
  };
  for (const auto& g : catalogue()) {
    for (double eps : {-0.4, 0.3}) {
      const PointMap m = g.at(eps);
      const PointMap inv = g.at(-eps);
      for (const auto& s : surfaces) {
        auto star = [&](double ts, double xs) {
          const double t = eval(inv.time_map, ts);
          const double x = eval(inv.space_map, xs);
          return eval(m.value_scale, x) * s.u(t, x) + eval(m.value_shift, x);
        };
        for (double x : {0.1, 0.35}) {
          const double t = 1.1;
          const Jet pj = prolong2(m, s.jet(t, x));
          const Jet fd = numerical_jet(star, pj.t, pj.x);
          EXPECT_NEAR(pj.u, fd.u, 1e-12 * std::max(1.0, std::fabs(fd.u))) << g.name();
          EXPECT_NEAR(pj.u_t, fd.u_t, 1e-6 * std::max(1.0, std::fabs(fd.u_t))) << g.name();
          EXPECT_NEAR(pj.u_x, fd.u_x, 1e-6 * std::max(1.0, std::fabs(fd.u_x))) << g.name();
          EXPECT_NEAR(pj.u_xx, fd.u_xx, 1e-6 * std::max(1.0, std::fabs(fd.u_xx))) << g.name();
        }
      }
    }
  }
}

TEST(Identify, RecognisesCatalogueUpToRescaling) {
  auto id = identify_group(linear_combination_group({0, 0, 3}).coefficients());
  ASSERT_TRUE(id);
  EXPECT_EQ(id->name(), "T_d");
  EXPECT_DOUBLE_EQ(id->eps_scale(), 3);

  auto tk = identify_group(groups::power_scaling(-1.5).coefficients());
  ASSERT_TRUE(tk);
  EXPECT_EQ(tk->name(), "T_k(-1.5)");

  auto ke = identify_group(linear_combination_group({1, 0, 0, 2, -1.5}).coefficients());
  ASSERT_TRUE(ke);
  EXPECT_EQ(ke->name(), "T_ke(-1.5)");
  EXPECT_DOUBLE_EQ(ke->eps_scale(), 2);

  auto kp = identify_group(groups::power_time_scaling(-1.5, -1.0 / 3.0).coefficients(), -1.5);
  ASSERT_TRUE(kp);
  EXPECT_EQ(kp->name(), groups::power_time_scaling_name(-1.5, -1.0 / 3.0));

  EXPECT_FALSE(identify_group(linear_combination_group({1, 0, 2}).coefficients()));
}

TEST(Parse, CommandLineNames) {
  EXPECT_EQ(parse_group("Td").name(), "T_d");
  EXPECT_EQ(parse_group("T_t").name(), "T_t");
  EXPECT_EQ(parse_group("Tk(-1.5)").name(), "T_k(-1.5)");
  EXPECT_EQ(parse_group("Tkp(1,0)").name(), "T_kp(1,0)");
  EXPECT_EQ(parse_group("Tke(-1.5)").name(), "T_ke(-1.5)");
  EXPECT_EQ(parse_group("lincomb(1,0,0)").name(), "T_t");
  EXPECT_EQ(parse_group("lincomb(0,0,1,1,-1.3333333333333333)").name(), "T_Z");
  EXPECT_THROW(parse_group("Tq"), ParseError);
  EXPECT_THROW(parse_group("Tk"), ParseError);
}
