#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams: every (seed, stream, counter) triple maps to
// an independent value, so spectra can be generated bin-parallel and are
// byte-identical across platforms (no implementation-defined distributions).
namespace xduce {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : state_(mix(seed, stream)) {}

  double uniform() {  // in (0, 1)
    state_ = splitmix64(state_);
    return ((state_ >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, one value per pair of uniforms
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Mean-1 averaged periodogram deviate: chi^2 with 2M degrees of freedom
  // scaled to unit mean; Gaussian approximation above M = 50.
  double periodogram(int M) {
    if (M >= 50) {
      double v = 1.0 + normal() / std::sqrt((double)M);
      return v > 0.0 ? v : 0.0;
    }
    double sum = 0.0;
    for (int i = 0; i < M; ++i) sum += -std::log(uniform());  // Exp(1) pairs
    return sum / M;
  }

 private:
  static uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ull));
  }
  uint64_t state_;
};

}  // namespace xduce
