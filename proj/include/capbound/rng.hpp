#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace capbound {

// Seeded generator with hand-rolled distributions so that streams are
// identical across standard libraries. Every randomized routine in the
// library takes one of these (or a raw seed) explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1}.
  int uniform_int(int n) {
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  double normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cache_ = radius * std::sin(angle);
    has_cache_ = true;
    return radius * std::cos(angle);
  }

  // Independent child stream; used to hand each work item its own state.
  Rng spawn() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 gen_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace capbound
