#include "otcp/conformal.hpp"

#include <cmath>
#include <string>

#include "otcp/error.hpp"
#include "otcp/random.hpp"
#include "otcp/scores.hpp"

namespace otcp {
namespace {

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

std::size_t GuardedCeil(double x) {
  const double nearest = std::round(x);
  if (x > nearest && x - nearest <= 1e-9) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

std::size_t ConformalRankCount(std::size_t n, double alpha) {
  return GuardedCeil(static_cast<double>(n + 1) * alpha);
}

QuantileRegion QuantileRegion::Build(std::shared_ptr<const RankMap> map, double beta) {
  const std::size_t n = map->size();
  if (!(beta > 0.0)) Fail(ErrorCode::kLevelOutOfRange, "beta must be positive");
  const std::size_t m = GuardedCeil(beta * static_cast<double>(n));
  if (m > n) {
    Fail(ErrorCode::kLevelOutOfRange,
         "ceil(beta n) = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
  }
  return QuantileRegion(std::move(map), std::max<std::size_t>(m, 1), beta);
}

QuantileRegion QuantileRegion::WithThreshold(std::shared_ptr<const RankMap> map, std::size_t m,
                                             double beta) {
  if (m < 1 || m > map->size()) {
    Fail(ErrorCode::kLevelOutOfRange, "threshold " + std::to_string(m) + " outside [1, " +
                                          std::to_string(map->size()) + "]");
  }
  return QuantileRegion(std::move(map), m, beta);
}

bool QuantileRegion::Contains(std::span<const double> s) const {
  return map_->ArgmaxIndex(s) < threshold_;
}

std::string_view ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kResidual ? "residual" : "abs-onehot";
}

MarginalPredictor MarginalPredictor::Fit(ScoreKind score, ScoreMatrix scores, double alpha,
                                         ReferenceKind reference, std::uint64_t seed) {
  CheckAlpha(alpha);
  RequireFiniteNonEmpty(scores, "calibration scores");
  const std::size_t n = scores.size();
  const std::size_t m = ConformalRankCount(n, alpha);
  if (m > n) {
    Fail(ErrorCode::kCalibrationTooSmall,
         "ceil((n+1) alpha) = " + std::to_string(m) + " > n = " + std::to_string(n));
  }
  const std::size_t d = scores.dim();
  auto map = std::make_shared<const RankMap>(
      RankMap::Fit(std::move(scores), MakeReference(reference, n, d, seed)));
  const double beta = (1.0 + 1.0 / static_cast<double>(n)) * alpha;
  return MarginalPredictor(score, alpha, QuantileRegion::WithThreshold(std::move(map), m, beta));
}

MarginalPredictor::MarginalPredictor(ScoreKind score, double alpha, QuantileRegion region)
    : score_(score), alpha_(alpha), region_(std::move(region)) {}

bool MarginalPredictor::ContainsRegression(std::span<const double> fhat,
                                           std::span<const double> y) const {
  return region_.Contains(SignedResidual(y, fhat));
}

std::vector<std::size_t> MarginalPredictor::PredictSet(std::span<const double> pi) const {
  if (pi.size() != region_.rank_map().dim()) {
    Fail(ErrorCode::kDimensionMismatch, "probability vector has " + std::to_string(pi.size()) +
                                            " classes, predictor expects " +
                                            std::to_string(region_.rank_map().dim()));
  }
  std::vector<std::size_t> labels;
  for (std::size_t y = 0; y < pi.size(); ++y) {
    if (region_.Contains(AbsOneHotScore(y, pi))) labels.push_back(y);
  }
  return labels;
}

MarginalPredictor FitMarginalRegression(const PointSet& fhat, const PointSet& y, double alpha,
                                        std::uint64_t seed, ReferenceKind reference) {
  return MarginalPredictor::Fit(ScoreKind::kResidual, ResidualScores(fhat, y), alpha, reference,
                                seed);
}

MarginalPredictor FitMarginalClassification(const PointSet& probs,
                                            std::span<const std::size_t> labels, double alpha,
                                            std::uint64_t seed, ReferenceKind reference) {
  return MarginalPredictor::Fit(ScoreKind::kAbsOneHot, AbsOneHotScores(probs, labels), alpha,
                                reference, seed);
}

std::size_t DefaultNeighborCount(std::size_t n) {
  return std::max<std::size_t>(1, GuardedCeil(0.1 * static_cast<double>(n)));
}

ConditionalPredictor ConditionalPredictor::Fit(PointSet features, ScoreMatrix scores,
                                               const ConditionalOptions& options) {
  KnnIndex index(std::move(features), options.standardize);
  return ConditionalPredictor(std::move(index), std::move(scores), options);
}

ConditionalPredictor::ConditionalPredictor(KnnIndex index, ScoreMatrix scores,
                                           const ConditionalOptions& options)
    : index_(std::move(index)), scores_(std::move(scores)), options_(options) {
  CheckAlpha(options_.alpha);
  RequireFiniteNonEmpty(scores_, "calibration scores");
  const std::size_t n = scores_.size();
  if (index_.size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "feature and score counts differ");
  }
  if (options_.k < 1 || options_.k > n) {
    Fail(ErrorCode::kInvalidArgument,
         "k = " + std::to_string(options_.k) + " outside [1, " + std::to_string(n) + "]");
  }
  threshold_ = ConformalRankCount(options_.k, options_.alpha);
  if (threshold_ > options_.k) {
    Fail(ErrorCode::kNeighborCountTooSmall, "ceil((k+1) alpha) = " + std::to_string(threshold_) +
                                                " > k = " + std::to_string(options_.k));
  }
}

QuantileRegion ConditionalPredictor::RegionAt(std::span<const double> x) const {
  const std::size_t k = options_.k;
  const auto neighbors = index_.Query(x, k);
  ScoreMatrix local = scores_.Select(neighbors);
  ReferenceRanks reference = SphericalReference(k, scores_.dim(), DeriveSeed(options_.seed, x));
  auto map = std::make_shared<const RankMap>(RankMap::Fit(std::move(local), std::move(reference)));
  const double beta = (1.0 + 1.0 / static_cast<double>(k)) * options_.alpha;
  return QuantileRegion::WithThreshold(std::move(map), threshold_, beta);
}

bool ConditionalPredictor::ContainsRegression(std::span<const double> x,
                                              std::span<const double> fhat,
                                              std::span<const double> y) const {
  return RegionAt(x).Contains(SignedResidual(y, fhat));
}

}  // namespace otcp
