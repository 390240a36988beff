#include "otcp/random.hpp"

#include <bit>
#include <cmath>

namespace otcp {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * Uniform() - 1.0;
    v = 2.0 * Uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::Exponential() { return -std::log1p(-Uniform()); }

std::size_t Rng::Index(std::size_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  return Mix64(Mix64(base) ^ Mix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t DeriveSeed(std::uint64_t base, std::span<const double> key) {
  std::uint64_t h = Mix64(base);
  for (double v : key) {
    // +0.0 and -0.0 hash alike.
    const double canonical = (v == 0.0) ? 0.0 : v;
    h = Mix64(h ^ std::bit_cast<std::uint64_t>(canonical));
  }
  return h;
}

}  // namespace otcp
