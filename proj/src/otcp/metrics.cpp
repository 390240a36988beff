#include "otcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otcp/error.hpp"
#include "otcp/knn.hpp"
#include "otcp/parallel.hpp"
#include "otcp/random.hpp"

namespace otcp {
namespace {

constexpr std::size_t kVolumeBlock = 4096;

void CheckSizes(const PointSet& features, CoverageFlags covered) {
  if (covered.empty()) Fail(ErrorCode::kEmptyTestSet, "no test points");
  if (features.size() != covered.size()) {
    Fail(ErrorCode::kDimensionMismatch, "feature and coverage counts differ");
  }
}

}  // namespace

double MarginalCoverage(CoverageFlags covered) {
  if (covered.empty()) Fail(ErrorCode::kEmptyTestSet, "no test points");
  std::size_t hits = 0;
  for (auto c : covered) hits += c ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(covered.size());
}

WorstSetResult WorstSetCoverage(const PointSet& features, CoverageFlags covered, std::size_t sets,
                                double fraction, std::uint64_t seed) {
  CheckSizes(features, covered);
  if (sets == 0 || !(fraction > 0.0 && fraction <= 1.0) ||
      static_cast<double>(sets) * fraction > 1.0 + 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "need sets >= 1, 0 < fraction and sets * fraction <= 1");
  }
  const std::size_t n = covered.size();
  const std::size_t set_size = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (n < sets || set_size < 1) {
    Fail(ErrorCode::kTooFewTestPoints,
         std::to_string(n) + " test points cannot form " + std::to_string(sets) + " sets");
  }
  // Partial Fisher-Yates for distinct centroids.
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = 0; j < sets; ++j) std::swap(order[j], order[j + rng.Index(n - j)]);

  KnnIndex index(features, /*standardize=*/true);
  WorstSetResult result;
  result.set_coverage.resize(sets);
  std::vector<std::size_t> uses(n, 0);
  for (std::size_t j = 0; j < sets; ++j) {
    const auto members = index.Query(features.row(order[j]), set_size);
    std::size_t hits = 0;
    for (auto i : members) {
      hits += covered[i] ? 1 : 0;
      ++uses[i];
    }
    result.set_coverage[j] = static_cast<double>(hits) / static_cast<double>(set_size);
  }
  result.worst_coverage = *std::min_element(result.set_coverage.begin(), result.set_coverage.end());
  std::size_t repeats = 0;
  for (auto u : uses) repeats += u > 1 ? u - 1 : 0;
  result.overlap_fraction = static_cast<double>(repeats) / static_cast<double>(sets * set_size);
  return result;
}

double WorstSlabCoverage(const PointSet& features, CoverageFlags covered,
                         const WorstSlabOptions& options, std::uint64_t seed) {
  CheckSizes(features, covered);
  if (options.directions == 0 || options.thresholds < 2 ||
      !(options.min_mass > 0.0 && options.min_mass <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "invalid worst-slab options");
  }
  const std::size_t n = covered.size(), p = features.dim();
  const Standardization st = Standardization::Fit(features);
  PointSet z(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    auto zi = st.Apply(features.row(i));
    std::copy(zi.begin(), zi.end(), z.row(i).begin());
  }
  const std::size_t min_count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(options.min_mass * n - 1e-9)));
  const std::size_t T = options.thresholds;

  std::vector<double> per_direction(options.directions, 1.0);
  ParallelFor(options.directions, [&](std::size_t dir) {
    Rng rng(DeriveSeed(seed, dir));
    std::vector<double> v(p);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& c : v) norm2 += (c = rng.Normal()) * c;
    } while (norm2 == 0.0);
    std::vector<std::pair<double, std::size_t>> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = {Dot(v, z.row(i)), i};
    std::sort(proj.begin(), proj.end());
    std::vector<std::size_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (covered[proj[i].second] ? 1 : 0);
    // Grid of cut positions in sorted order, from 0 to n.
    std::vector<std::size_t> cut(T);
    for (std::size_t t = 0; t < T; ++t) cut[t] = (t * n) / (T - 1);
    double worst = 1.0;
    for (std::size_t a = 0; a < T; ++a) {
      for (std::size_t b = a + 1; b < T; ++b) {
        const std::size_t count = cut[b] - cut[a];
        if (count < min_count) continue;
        worst = std::min(worst, static_cast<double>(prefix[cut[b]] - prefix[cut[a]]) / count);
      }
    }
    per_direction[dir] = worst;
  });
  return *std::min_element(per_direction.begin(), per_direction.end());
}

double Box::Volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

Box BoundingBox(const PointSet& points, double margin) {
  RequireFiniteNonEmpty(points, "points");
  const std::size_t d = points.dim();
  Box box{std::vector<double>(points.row(0).begin(), points.row(0).end()),
          std::vector<double>(points.row(0).begin(), points.row(0).end())};
  for (std::size_t i = 1; i < points.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      box.lo[k] = std::min(box.lo[k], points(i, k));
      box.hi[k] = std::max(box.hi[k], points(i, k));
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double pad = margin * (box.hi[k] - box.lo[k]);
    box.lo[k] -= pad;
    box.hi[k] += pad;
  }
  return box;
}

VolumeEstimate RegionVolumeMonteCarlo(const std::function<bool(std::span<const double>)>& member,
                                      const Box& box, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = box.dim();
  if (d == 0 || box.hi.size() != d) Fail(ErrorCode::kDegenerateBox, "box has no dimensions");
  for (std::size_t k = 0; k < d; ++k) {
    if (!(box.hi[k] > box.lo[k]) || !std::isfinite(box.hi[k] - box.lo[k])) {
      Fail(ErrorCode::kDegenerateBox, "box side " + std::to_string(k) + " is empty or infinite");
    }
  }
  if (samples == 0) Fail(ErrorCode::kInvalidArgument, "need at least one sample");
  const std::size_t blocks = (samples + kVolumeBlock - 1) / kVolumeBlock;
  std::vector<std::size_t> hits(blocks, 0);
  ParallelFor(blocks, [&](std::size_t b) {
    Rng rng(DeriveSeed(seed, b));
    const std::size_t count = std::min(kVolumeBlock, samples - b * kVolumeBlock);
    std::vector<double> point(d);
    std::size_t h = 0;
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t k = 0; k < d; ++k) point[k] = rng.Uniform(box.lo[k], box.hi[k]);
      h += member(point) ? 1 : 0;
    }
    hits[b] = h;
  });
  const std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  const double frac = static_cast<double>(total) / static_cast<double>(samples);
  const double volume = box.Volume();
  VolumeEstimate est;
  est.estimate = volume * frac;
  est.stderr_ = volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

SetMetrics ClassificationSetMetrics(const std::vector<std::vector<std::size_t>>& sets,
                                    std::span<const std::size_t> labels, std::size_t num_classes) {
  if (sets.empty()) Fail(ErrorCode::kEmptyTestSet, "no prediction sets");
  if (labels.size() != sets.size()) Fail(ErrorCode::kDimensionMismatch, "label count differs");
  SetMetrics m;
  m.per_label.resize(num_classes);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (labels[i] >= num_classes) Fail(ErrorCode::kInvalidLabel, "label out of range");
    const auto& s = sets[i];
    const bool hit = std::find(s.begin(), s.end(), labels[i]) != s.end();
    const double size = static_cast<double>(s.size());
    const double single = s.size() == 1 ? 1.0 : 0.0;
    m.coverage += hit;
    m.avg_size += size;
    m.informativeness += single;
    auto& pl = m.per_label[labels[i]];
    ++pl.count;
    pl.coverage += hit;
    pl.avg_size += size;
    pl.informativeness += single;
  }
  const double n = static_cast<double>(sets.size());
  m.coverage /= n;
  m.avg_size /= n;
  m.informativeness /= n;
  for (auto& pl : m.per_label) {
    if (pl.count == 0) continue;
    const double c = static_cast<double>(pl.count);
    pl.coverage /= c;
    pl.avg_size /= c;
    pl.informativeness /= c;
  }
  return m;
}

std::vector<BinCoverage> BinnedCoverage(std::span<const double> x, CoverageFlags covered,
                                        std::size_t bins, double lo, double hi) {
  if (x.size() != covered.size()) Fail(ErrorCode::kDimensionMismatch, "covariate count differs");
  if (covered.empty()) Fail(ErrorCode::kEmptyTestSet, "no test points");
  if (bins == 0 || !(hi > lo)) Fail(ErrorCode::kInvalidArgument, "invalid binning");
  std::vector<BinCoverage> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = (b + 1 == bins) ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    std::size_t b = static_cast<std::size_t>((x[i] - lo) / width);
    if (b >= bins) b = bins - 1;
    ++out[b].count;
    out[b].coverage += covered[i] ? 1.0 : 0.0;
  }
  for (auto& b : out) {
    if (b.count > 0) b.coverage /= static_cast<double>(b.count);
  }
  return out;
}

}  // namespace otcp
