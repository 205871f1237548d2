#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nngpkl {

// Deterministic random helpers on top of std::mt19937_64. The raw engine is
// bit-specified by the standard, but std::uniform_real_distribution and
// std::normal_distribution are implementation-defined, so seeded experiment
// output would not be reproducible across toolchains. The mappings below are
// fully specified instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method; one spare per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Uniform on {0, ..., n-1} by rejection, bias-free.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = engine_();
      r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace nngpkl
