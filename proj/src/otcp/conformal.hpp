#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "otcp/knn.hpp"
#include "otcp/point_set.hpp"
#include "otcp/rank_map.hpp"
#include "otcp/reference_ranks.hpp"

namespace otcp {

// ceil(x), except that values at most 1e-9 above an integer round down to
// it. Decimal levels such as 0.9 make products like (1 + 1/n) 0.9 n land a
// few ulps above the intended integer.
std::size_t GuardedCeil(double x);

// Number of calibration ranks kept at coverage level alpha: ceil((n+1) alpha).
std::size_t ConformalRankCount(std::size_t n, double alpha);

// Q_n(beta) = { s : level index of R_n(s) <= m }, m = ceil(beta n).
// Exactly m calibration scores are members when the map's duals are strict.
class QuantileRegion {
 public:
  // Throws LevelOutOfRange unless 0 < beta and ceil(beta n) <= n.
  static QuantileRegion Build(std::shared_ptr<const RankMap> map, double beta);
  // Region keeping the m innermost ranks (1 <= m <= n).
  static QuantileRegion WithThreshold(std::shared_ptr<const RankMap> map, std::size_t m,
                                      double beta);

  bool Contains(std::span<const double> s) const;

  std::size_t threshold_count() const noexcept { return threshold_; }
  double nominal_level() const noexcept { return beta_; }
  const RankMap& rank_map() const noexcept { return *map_; }
  const std::shared_ptr<const RankMap>& shared_map() const noexcept { return map_; }

 private:
  QuantileRegion(std::shared_ptr<const RankMap> map, std::size_t m, double beta)
      : map_(std::move(map)), threshold_(m), beta_(beta) {}

  std::shared_ptr<const RankMap> map_;
  std::size_t threshold_;
  double beta_;
};

// Multivariate score functions usable with the transport-based predictors.
enum class ScoreKind { kResidual, kAbsOneHot };
std::string_view ScoreKindName(ScoreKind kind);

// Split-conformal predictor with a single quantile region at level
// beta = (1 + 1/n) alpha, i.e. threshold ceil((n+1) alpha).
class MarginalPredictor {
 public:
  // Throws CalibrationTooSmall if ceil((n+1) alpha) > n.
  static MarginalPredictor Fit(ScoreKind score, ScoreMatrix scores, double alpha,
                               ReferenceKind reference, std::uint64_t seed);

  MarginalPredictor(ScoreKind score, double alpha, QuantileRegion region);

  bool Contains(std::span<const double> score) const { return region_.Contains(score); }
  // Regression membership of candidate y given the point prediction fhat(x).
  bool ContainsRegression(std::span<const double> fhat, std::span<const double> y) const;
  // Classification set: labels whose abs-one-hot score is a member.
  std::vector<std::size_t> PredictSet(std::span<const double> pi) const;

  ScoreKind score_kind() const noexcept { return score_; }
  double alpha() const noexcept { return alpha_; }
  const QuantileRegion& region() const noexcept { return region_; }

 private:
  ScoreKind score_;
  double alpha_;
  QuantileRegion region_;
};

MarginalPredictor FitMarginalRegression(const PointSet& fhat, const PointSet& y, double alpha,
                                        std::uint64_t seed,
                                        ReferenceKind reference = ReferenceKind::kSpherical);
MarginalPredictor FitMarginalClassification(const PointSet& probs,
                                            std::span<const std::size_t> labels, double alpha,
                                            std::uint64_t seed,
                                            ReferenceKind reference = ReferenceKind::kPositiveOrthant);

// ceil(0.1 n), at least 1.
std::size_t DefaultNeighborCount(std::size_t n);

struct ConditionalOptions {
  std::size_t k = 0;
  double alpha = 0.9;
  std::uint64_t seed = 0;
  bool standardize = true;
};

// OT-CP+: per query x, transports the scores of the k nearest calibration
// inputs onto a fresh spherical reference of size k and keeps the
// ceil((k+1) alpha) innermost ranks. The reference seed is derived from the
// predictor seed and the bits of x, so a query is reproducible.
class ConditionalPredictor {
 public:
  // Throws InvalidArgument unless 1 <= k <= n, NeighborCountTooSmall if
  // ceil((k+1) alpha) > k.
  static ConditionalPredictor Fit(PointSet features, ScoreMatrix scores,
                                  const ConditionalOptions& options);
  // Restores a predictor with a stored standardization.
  ConditionalPredictor(KnnIndex index, ScoreMatrix scores, const ConditionalOptions& options);

  QuantileRegion RegionAt(std::span<const double> x) const;
  bool ContainsRegression(std::span<const double> x, std::span<const double> fhat,
                          std::span<const double> y) const;

  std::size_t threshold_count() const noexcept { return threshold_; }
  const ConditionalOptions& options() const noexcept { return options_; }
  const KnnIndex& index() const noexcept { return index_; }
  const ScoreMatrix& scores() const noexcept { return scores_; }

 private:
  KnnIndex index_;
  ScoreMatrix scores_;
  ConditionalOptions options_;
  std::size_t threshold_ = 0;
};

}  // namespace otcp
