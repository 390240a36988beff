#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "otcp/point_set.hpp"

namespace otcp {

// Membership flags are 0/1 bytes, one per test point.
using CoverageFlags = std::span<const std::uint8_t>;

// Fraction of flags set. EmptyTestSet on empty input.
double MarginalCoverage(CoverageFlags covered);

struct WorstSetResult {
  double worst_coverage = 0.0;
  std::vector<double> set_coverage;
  // Fraction of set memberships that are repeats: the kNN sets need not be
  // disjoint.
  double overlap_fraction = 0.0;
};

// J centroids drawn without replacement from the test points; set j holds
// the ceil(fraction n) test points nearest to centroid j (standardized
// features). Returns the smallest within-set coverage.
WorstSetResult WorstSetCoverage(const PointSet& features, CoverageFlags covered, std::size_t sets,
                                double fraction, std::uint64_t seed);

struct WorstSlabOptions {
  std::size_t directions = 1000;
  std::size_t thresholds = 50;
  double min_mass = 0.1;
};

// Smallest coverage over slabs {a <= <v, z> <= b} with random unit
// directions v, endpoints on a grid of empirical quantiles of the
// projection, and at least min_mass of the test points inside.
double WorstSlabCoverage(const PointSet& features, CoverageFlags covered,
                         const WorstSlabOptions& options, std::uint64_t seed);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  double Volume() const;
  std::size_t dim() const noexcept { return lo.size(); }
};

// Axis-aligned hull of the points, widened by `margin` times the side
// length on each side.
Box BoundingBox(const PointSet& points, double margin = 0.1);

struct VolumeEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  // The estimate is the volume of region intersected with the box.
  bool box_restricted = true;
};

// Box volume times the member fraction of uniform samples in the box, with
// binomial standard error. Samples are drawn in fixed-size blocks seeded
// from (seed, block), so the result does not depend on the thread count.
VolumeEstimate RegionVolumeMonteCarlo(const std::function<bool(std::span<const double>)>& member,
                                      const Box& box, std::size_t samples, std::uint64_t seed);

struct LabelSetStats {
  std::size_t count = 0;
  double coverage = 0.0;
  double avg_size = 0.0;
  double informativeness = 0.0;
};

struct SetMetrics {
  double coverage = 0.0;
  double avg_size = 0.0;
  double informativeness = 0.0;     // fraction of singleton sets
  std::vector<LabelSetStats> per_label;  // indexed by true label
};

SetMetrics ClassificationSetMetrics(const std::vector<std::vector<std::size_t>>& sets,
                                    std::span<const std::size_t> labels, std::size_t num_classes);

struct BinCoverage {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double coverage = 0.0;
};

// Coverage within equal-width bins of a scalar covariate over [lo, hi]; the
// last bin is closed. Points outside [lo, hi] are ignored.
std::vector<BinCoverage> BinnedCoverage(std::span<const double> x, CoverageFlags covered,
                                        std::size_t bins, double lo, double hi);

}  // namespace otcp
