#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otcp/point_set.hpp"

namespace otcp {

// Per-feature affine map applied before neighbor distances.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardization Identity(std::size_t p);
  // Mean and population standard deviation; constant features get scale 1.
  static Standardization Fit(const PointSet& features);

  std::vector<double> Apply(std::span<const double> x) const;
};

// Brute-force Euclidean k-nearest-neighbor search over standardized
// features. Equal distances are broken by the smaller stored index.
class KnnIndex {
 public:
  KnnIndex() = default;
  KnnIndex(PointSet features, bool standardize);
  KnnIndex(PointSet features, Standardization standardization);

  // Indices of the k nearest stored points, nearest first.
  std::vector<std::size_t> Query(std::span<const double> x, std::size_t k) const;
  // Same, excluding one stored index (leave-one-out queries).
  std::vector<std::size_t> QueryExcluding(std::span<const double> x, std::size_t k,
                                          std::size_t excluded) const;

  std::size_t size() const noexcept { return features_.size(); }
  std::size_t dim() const noexcept { return features_.dim(); }
  const PointSet& features() const noexcept { return features_; }
  const Standardization& standardization() const noexcept { return standardization_; }

 private:
  PointSet features_;  // raw
  PointSet standardized_;
  Standardization standardization_;
};

}  // namespace otcp
