#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qcdj/matrix.hpp"

namespace qcdj {

inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Deterministic random stream. Gaussian samples come from an explicit
/// Box-Muller transform so reruns do not depend on the standard library's
/// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix_seed(seed)) {}

  /// Independent child stream; `salt` distinguishes siblings.
  Rng child(std::uint64_t salt) const { return Rng(mix_seed(seed_ ^ (salt * 0x9e3779b97f4a7c15ULL + 1))); }

  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cx cgauss() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qcdj
