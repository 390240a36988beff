#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "otcp/point_set.hpp"

namespace otcp {

enum class ReferenceKind {
  // U_i = (i/n) theta_i, theta_i uniform on the unit sphere. Center-outward
  // ordering, used for signed scores such as regression residuals.
  kSpherical,
  // U_i = (i/n) theta_i, theta_i uniform on the probability simplex.
  // Left-to-right ordering, used for nonnegative scores.
  kPositiveOrthant,
};

std::string_view ReferenceKindName(ReferenceKind kind);
ReferenceKind ParseReferenceKind(std::string_view name);

// Target points of the rank transport. Vector i (0-based) has nominal level
// levels[i] = (i + 1) / n, so the index order is the rank order.
struct ReferenceRanks {
  PointSet vectors;
  ReferenceKind kind = ReferenceKind::kSpherical;
  std::uint64_t seed = 0;
  std::vector<double> levels;

  std::size_t size() const noexcept { return vectors.size(); }
  std::size_t dim() const noexcept { return vectors.dim(); }
};

// These take no score input: reference draws must stay independent of the
// calibration scores.
ReferenceRanks SphericalReference(std::size_t n, std::size_t d, std::uint64_t seed);
ReferenceRanks PositiveOrthantReference(std::size_t n, std::size_t d, std::uint64_t seed);
ReferenceRanks MakeReference(ReferenceKind kind, std::size_t n, std::size_t d,
                             std::uint64_t seed);

// Rebuilds a reference from stored vectors (artifact loading); validates the
// norm ladder.
ReferenceRanks ReferenceFromVectors(ReferenceKind kind, std::uint64_t seed, PointSet vectors);

}  // namespace otcp
