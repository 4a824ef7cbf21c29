#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cfmimo {

// SplitMix64 finalizer, used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for (master, stream, index). Samples generated from distinct
/// (stream, index) pairs can be produced in any order or in parallel.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t index) {
  std::uint64_t h = splitmix64(master ^ 0x7f4a7c15ca62c943ULL);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  return h;
}

// mt19937_64 engine with self-contained double/normal draws. The raw engine
// output sequence is fixed by the standard; the std:: distributions are not,
// so the mappings below are implemented here to keep draws portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n >= 1. Lemire multiply-shift.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly-symmetric complex normal CN(0, variance).
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = s * normal();
    const double im = s * normal();
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cfmimo
