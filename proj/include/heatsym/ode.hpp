#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>

namespace heatsym {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0;  // 0: chosen from the problem scale
  double max_step = std::numeric_limits<double>::infinity();
  // Step bound relative to |t|, for problems spanning several decades.
  double max_step_rel = std::numeric_limits<double>::infinity();
  long max_steps = 1'000'000;
};

enum class OdeStatus { done, stopped, step_underflow, max_steps, non_finite };

template <std::size_t N>
struct OdeResult {
  OdeStatus status = OdeStatus::done;
  double t = 0;
  std::array<double, N> y{};
  long steps = 0;
  long rejected = 0;
};

// Integrates y' = f(t, y) from t0 towards t1 (either direction). After every
// accepted step `observe(t, y)` is called; returning false stops the
// integration with OdeStatus::stopped.
template <std::size_t N, class Rhs, class Observer>
OdeResult<N> integrate_dp45(Rhs&& f, double t0, double t1, std::array<double, N> y,
                            const OdeOptions& opt, Observer&& observe) {
  using State = std::array<double, N>;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeResult<N> res;
  res.t = t0;
  res.y = y;
  const double span = t1 - t0;
  if (span == 0) return res;
  const double dir = span > 0 ? 1.0 : -1.0;

  auto combine = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (const auto& [w, k] : terms) {
      if (w == 0) continue;
      for (std::size_t i = 0; i < N; ++i) out[i] += h * w * (*k)[i];
    }
    return out;
  };
  auto finite = [](const State& s) {
    for (double v : s) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  };
  auto step_bound = [&](double t) {
    return std::min(opt.max_step, opt.max_step_rel * std::max(std::fabs(t), 1e-300));
  };

  double t = t0;
  State k1 = f(t, y);
  if (!finite(k1)) {
    res.status = OdeStatus::non_finite;
    return res;
  }
  double h = opt.initial_step > 0 ? opt.initial_step : std::fabs(span) * 1e-3;
  h = std::min(h, step_bound(t));

  while (true) {
    if (res.steps >= opt.max_steps) {
      res.status = OdeStatus::max_steps;
      break;
    }
    const double remaining = std::fabs(t1 - t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h <= 1e-14 * std::max(std::fabs(t), 1.0) && !last) {
      res.status = OdeStatus::step_underflow;
      break;
    }
    const double hs = dir * h;
    const State k2 = f(t + c2 * hs, combine(y, hs, {{a21, &k1}}));
    const State k3 = f(t + c3 * hs, combine(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + c4 * hs, combine(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 =
        f(t + c5 * hs, combine(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(t + hs, combine(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                               {a65, &k5}}));
    const State ynew =
        combine(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const double tnew = last ? t1 : t + hs;
    State k7{};
    bool ok = finite(ynew);
    if (ok) {
      k7 = f(tnew, ynew);
      ok = finite(k7);
    }
    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      double sum = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
        sum += (e / sc) * (e / sc);
      }
      err = std::sqrt(sum / N);
    }
    if (err <= 1.0) {
      t = tnew;
      y = ynew;
      k1 = k7;
      ++res.steps;
      res.t = t;
      res.y = y;
      if (!observe(t, y)) {
        res.status = OdeStatus::stopped;
        return res;
      }
      if (last) return res;
      const double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * factor, step_bound(t));
    } else {
      ++res.rejected;
      if (!ok && h <= 1e-14 * std::max(std::fabs(t), 1.0)) {
        res.status = OdeStatus::non_finite;
        break;
      }
      const double factor = ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.1;
      h *= factor;
    }
  }
  return res;
}

template <std::size_t N, class Rhs>
OdeResult<N> integrate_dp45(Rhs&& f, double t0, double t1, std::array<double, N> y,
                            const OdeOptions& opt = {}) {
  return integrate_dp45(f, t0, t1, y, opt, [](double, const std::array<double, N>&) { return true; });
}

}  // namespace heatsym
