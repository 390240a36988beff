#include "otcp/reference_ranks.hpp"

#include <cmath>
#include <string>

#include "otcp/error.hpp"
#include "otcp/random.hpp"

namespace otcp {
namespace {

void CheckShape(std::size_t n, std::size_t d) {
  if (d == 0) Fail(ErrorCode::kInvalidDimension, "reference dimension must be >= 1");
  if (n == 0) Fail(ErrorCode::kInvalidDimension, "reference size must be >= 1");
}

std::vector<double> Levels(std::size_t n) {
  std::vector<double> levels(n);
  for (std::size_t i = 0; i < n; ++i) {
    levels[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  }
  return levels;
}

}  // namespace

std::string_view ReferenceKindName(ReferenceKind kind) {
  return kind == ReferenceKind::kSpherical ? "sphere" : "orthant";
}

ReferenceKind ParseReferenceKind(std::string_view name) {
  if (name == "sphere" || name == "spherical") return ReferenceKind::kSpherical;
  if (name == "orthant" || name == "positive-orthant") return ReferenceKind::kPositiveOrthant;
  Fail(ErrorCode::kInvalidConfig, "unknown reference kind '" + std::string(name) + "'");
}

ReferenceRanks SphericalReference(std::size_t n, std::size_t d, std::uint64_t seed) {
  CheckShape(n, d);
  Rng rng(seed);
  ReferenceRanks ref{PointSet(n, d), ReferenceKind::kSpherical, seed, Levels(n)};
  std::vector<double> theta(d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& t : theta) {
        t = rng.Normal();
        norm2 += t * t;
      }
    } while (norm2 == 0.0);
    const double scale = ref.levels[i] / std::sqrt(norm2);
    auto out = ref.vectors.row(i);
    for (std::size_t k = 0; k < d; ++k) out[k] = theta[k] * scale;
  }
  return ref;
}

ReferenceRanks PositiveOrthantReference(std::size_t n, std::size_t d, std::uint64_t seed) {
  CheckShape(n, d);
  Rng rng(seed);
  ReferenceRanks ref{PointSet(n, d), ReferenceKind::kPositiveOrthant, seed, Levels(n)};
  std::vector<double> e(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = ref.vectors.row(i);
    if (d == 1) {
      out[0] = ref.levels[i];
      continue;
    }
    // Normalized exponentials are uniform on the simplex.
    double sum = 0.0;
    do {
      sum = 0.0;
      for (auto& x : e) {
        x = rng.Exponential();
        sum += x;
      }
    } while (sum == 0.0);
    const double scale = ref.levels[i] / sum;
    for (std::size_t k = 0; k < d; ++k) out[k] = e[k] * scale;
  }
  return ref;
}

ReferenceRanks MakeReference(ReferenceKind kind, std::size_t n, std::size_t d,
                             std::uint64_t seed) {
  return kind == ReferenceKind::kSpherical ? SphericalReference(n, d, seed)
                                           : PositiveOrthantReference(n, d, seed);
}

ReferenceRanks ReferenceFromVectors(ReferenceKind kind, std::uint64_t seed, PointSet vectors) {
  RequireFiniteNonEmpty(vectors, "reference vectors");
  const std::size_t n = vectors.size();
  ReferenceRanks ref{std::move(vectors), kind, seed, Levels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    auto u = ref.vectors.row(i);
    double norm = 0.0;
    if (kind == ReferenceKind::kSpherical) {
      norm = std::sqrt(SquaredNorm(u));
    } else {
      for (double x : u) {
        if (x < 0.0) Fail(ErrorCode::kMalformedData, "orthant reference has a negative coordinate");
        norm += x;
      }
    }
    if (std::abs(norm - ref.levels[i]) > 1e-9 * ref.levels[i]) {
      Fail(ErrorCode::kMalformedData,
           "reference vector " + std::to_string(i) + " does not have norm " +
               std::to_string(ref.levels[i]));
    }
  }
  return ref;
}

}  // namespace otcp
