#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "otcp/point_set.hpp"
#include "otcp/random.hpp"
#include "otcp/reference_ranks.hpp"

namespace otcp::testing {

inline PointSet GaussianPoints(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  PointSet p(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) p(i, k) = scale * rng.Normal();
  return p;
}

inline PointSet UniformPoints(std::size_t n, std::size_t d, std::uint64_t seed, double lo = 0.0,
                              double hi = 1.0) {
  Rng rng(seed);
  PointSet p(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) p(i, k) = rng.Uniform(lo, hi);
  return p;
}

// Student-t with 1 degree of freedom (Cauchy) coordinates.
inline PointSet HeavyTailedPoints(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  PointSet p(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) p(i, k) = rng.Normal() / rng.Normal();
  return p;
}

// Tight clusters around a few far-apart centers.
inline PointSet ClusteredPoints(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t clusters = 3;
  PointSet centers(clusters, d);
  for (std::size_t c = 0; c < clusters; ++c)
    for (std::size_t k = 0; k < d; ++k) centers(c, k) = 20.0 * rng.Normal();
  PointSet p(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = rng.Index(clusters);
    for (std::size_t k = 0; k < d; ++k) p(i, k) = centers(c, k) + 1e-3 * rng.Normal();
  }
  return p;
}

inline double SquaredCost(const PointSet& s, const PointSet& u, std::size_t i, std::size_t j) {
  return SquaredDistance(s.row(i), u.row(j));
}

// Exhaustive minimum of sum_i ||S_i - U_perm(i)||^2 over all permutations.
inline double BruteForceMinCost(const PointSet& s, const PointSet& u) {
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += SquaredCost(s, u, i, perm[i]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::string TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "otcp_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace otcp::testing
