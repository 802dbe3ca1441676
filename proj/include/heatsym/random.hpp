#pragma once

#include <cstdint>
#include <random>

namespace heatsym {

// Uniform draws built directly on mt19937_64 output so sequences are
// reproducible across standard library implementations.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace heatsym
