#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace otcp {

// Seedable generator used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Variates are produced by the transforms below rather than the
// <random> distributions, whose algorithms are implementation-defined, so a
// given seed yields the same stream with every standard library:
//   uniform      53 high bits of one engine output, scaled to [0, 1)
//   normal       Marsaglia polar method, second variate cached
//   exponential  -log(1 - u)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  double Uniform();                          // [0, 1)
  double Uniform(double lo, double hi);      // [lo, hi)
  double Normal();                           // N(0, 1)
  double Exponential();                      // Exp(1)
  std::size_t Index(std::size_t n);          // uniform on {0..n-1}

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t Mix64(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);
// Seed derived from the bit patterns of a query vector.
std::uint64_t DeriveSeed(std::uint64_t base, std::span<const double> key);

}  // namespace otcp
