#include "otcp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "otcp/conformal.hpp"
#include "otcp/error.hpp"
#include "otcp/random.hpp"

namespace otcp {
namespace {

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

Eigen::Map<const Eigen::VectorXd> AsVector(std::span<const double> s) {
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace

std::size_t GuardedFloor(double x) {
  const double nearest = std::round(x);
  if (x < nearest && nearest - x <= 1e-9) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(x));
}

double SplitConformalUpper(std::vector<double> values, double level) {
  const std::size_t n = values.size();
  if (n == 0) Fail(ErrorCode::kCalibrationTooSmall, "no calibration values");
  const std::size_t k = std::max<std::size_t>(1, ConformalRankCount(n, level));
  if (k > n) {
    Fail(ErrorCode::kCalibrationTooSmall,
         "need order statistic " + std::to_string(k) + " of " + std::to_string(n) + " values");
  }
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

double SplitConformalLower(std::vector<double> values, double level) {
  const std::size_t n = values.size();
  const std::size_t k = GuardedFloor(static_cast<double>(n + 1) * level);
  if (k == 0) return -std::numeric_limits<double>::infinity();
  if (k > n) Fail(ErrorCode::kCalibrationTooSmall, "lower order statistic exceeds n");
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

std::string_view BaselineKindName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kBall: return "ball";
    case BaselineKind::kHyperrect: return "rect";
    case BaselineKind::kEllipsoid: return "ellipsoid";
    case BaselineKind::kAdaptiveEllipsoid: return "adaptive-ellipsoid";
  }
  return "?";
}

BallRegion BallRegion::Fit(const ScoreMatrix& residuals, double alpha) {
  CheckAlpha(alpha);
  RequireFiniteNonEmpty(residuals, "residuals");
  std::vector<double> norms(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    norms[i] = std::sqrt(SquaredNorm(residuals.row(i)));
  }
  return BallRegion(SplitConformalUpper(std::move(norms), alpha));
}

bool BallRegion::Contains(std::span<const double> s) const {
  return std::sqrt(SquaredNorm(s)) <= radius_;
}

HyperrectRegion HyperrectRegion::Fit(const ScoreMatrix& residuals, double alpha) {
  CheckAlpha(alpha);
  RequireFiniteNonEmpty(residuals, "residuals");
  const std::size_t d = residuals.dim();
  const double miss = PerCoordinateMiscoverage(alpha, d);
  std::vector<Interval> intervals(d);
  std::vector<double> column(residuals.size());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < residuals.size(); ++i) column[i] = residuals(i, k);
    intervals[k] = {SplitConformalLower(column, miss / 2.0),
                    SplitConformalUpper(column, 1.0 - miss / 2.0)};
  }
  return HyperrectRegion(std::move(intervals));
}

HyperrectRegion::HyperrectRegion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (!(iv.lo <= iv.hi)) Fail(ErrorCode::kInvalidArgument, "empty interval");
  }
}

bool HyperrectRegion::Contains(std::span<const double> s) const {
  if (s.size() != intervals_.size()) Fail(ErrorCode::kDimensionMismatch, "score dimension differs");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] < intervals_[k].lo || s[k] > intervals_[k].hi) return false;
  }
  return true;
}

Moments EstimateMoments(const PointSet& points, bool regularize) {
  const std::size_t n = points.size(), d = points.dim();
  Moments m{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)),
            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))};
  for (std::size_t i = 0; i < n; ++i) m.mean += AsVector(points.row(i));
  m.mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd c = AsVector(points.row(i)) - m.mean;
    m.covariance.noalias() += c * c.transpose();
  }
  m.covariance /= static_cast<double>(n > 1 ? n - 1 : 1);
  if (regularize) {
    const double lambda = 1e-6 * m.covariance.trace() / static_cast<double>(d);
    m.covariance.diagonal().array() += lambda;
  }
  return m;
}

EllipsoidRegion EllipsoidRegion::Fit(const ScoreMatrix& residuals, double alpha,
                                     const EllipsoidOptions& options) {
  CheckAlpha(alpha);
  RequireFiniteNonEmpty(residuals, "residuals");
  Moments m = EstimateMoments(residuals, options.regularize);
  EllipsoidRegion shape(m.mean, m.covariance, 0.0);
  std::vector<double> distances(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) distances[i] = shape.Mahalanobis(residuals.row(i));
  shape.radius_ = SplitConformalUpper(std::move(distances), alpha);
  return shape;
}

EllipsoidRegion::EllipsoidRegion(Eigen::VectorXd center, Eigen::MatrixXd covariance, double radius)
    : center_(std::move(center)), covariance_(std::move(covariance)), factor_(covariance_), radius_(radius) {
  if (factor_.info() != Eigen::Success || covariance_.trace() <= 0.0) {
    Fail(ErrorCode::kSingularCovariance, "covariance is not positive definite");
  }
  // LLT succeeds on some near-singular matrices; reject a collapsed factor.
  const Eigen::VectorXd diag = factor_.matrixLLT().diagonal();
  if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
    Fail(ErrorCode::kSingularCovariance, "covariance is numerically singular");
  }
}

double EllipsoidRegion::Mahalanobis(std::span<const double> s) const {
  if (s.size() != static_cast<std::size_t>(center_.size())) {
    Fail(ErrorCode::kDimensionMismatch, "score dimension differs from ellipsoid");
  }
  const Eigen::VectorXd diff = AsVector(s) - center_;
  const Eigen::VectorXd w = factor_.matrixL().solve(diff);
  return w.norm();
}

bool EllipsoidRegion::Contains(std::span<const double> s) const { return Mahalanobis(s) <= radius_; }

AdaptiveEllipsoidPredictor AdaptiveEllipsoidPredictor::Fit(PointSet features, ScoreMatrix residuals,
                                                           double alpha, std::size_t k,
                                                           bool standardize) {
  CheckAlpha(alpha);
  RequireFiniteNonEmpty(residuals, "residuals");
  if (features.size() != residuals.size()) {
    Fail(ErrorCode::kDimensionMismatch, "feature and residual counts differ");
  }
  if (k < 2 || k >= residuals.size()) {
    Fail(ErrorCode::kInvalidArgument, "adaptive ellipsoid needs 2 <= k < n");
  }
  AdaptiveEllipsoidPredictor pred(KnnIndex(std::move(features), standardize), std::move(residuals), k, 0.0);
  std::vector<double> distances(pred.residuals_.size());
  for (std::size_t i = 0; i < distances.size(); ++i) {
    const auto nb = pred.index_.QueryExcluding(pred.index_.features().row(i), k, i);
    distances[i] = pred.LocalShape(nb, 0.0).Mahalanobis(pred.residuals_.row(i));
  }
  pred.radius_ = SplitConformalUpper(std::move(distances), alpha);
  return pred;
}

AdaptiveEllipsoidPredictor::AdaptiveEllipsoidPredictor(KnnIndex index, ScoreMatrix residuals,
                                                       std::size_t k, double radius)
    : index_(std::move(index)), residuals_(std::move(residuals)), k_(k), radius_(radius) {
  if (index_.size() != residuals_.size()) {
    Fail(ErrorCode::kDimensionMismatch, "feature and residual counts differ");
  }
}

EllipsoidRegion AdaptiveEllipsoidPredictor::LocalShape(std::span<const std::size_t> neighbors,
                                                       double radius) const {
  Moments m = EstimateMoments(residuals_.Select(neighbors), /*regularize=*/true);
  return EllipsoidRegion(std::move(m.mean), std::move(m.covariance), radius);
}

EllipsoidRegion AdaptiveEllipsoidPredictor::RegionAt(std::span<const double> x) const {
  return LocalShape(index_.Query(x, k_), radius_);
}

bool AdaptiveEllipsoidPredictor::ContainsRegression(std::span<const double> x,
                                                    std::span<const double> fhat,
                                                    std::span<const double> y) const {
  return RegionAt(x).Contains(SignedResidual(y, fhat));
}

ScalarScorePredictor ScalarScorePredictor::Fit(ScalarScoreKind kind, const PointSet& probs,
                                               std::span<const std::size_t> labels, double alpha,
                                               bool randomized, std::uint64_t seed) {
  CheckAlpha(alpha);
  if (labels.size() != probs.size()) Fail(ErrorCode::kDimensionMismatch, "label count differs");
  const bool use_u = randomized && kind == ScalarScoreKind::kAdaptive;
  Rng rng(seed);
  std::vector<double> scores(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    std::optional<double> u;
    if (use_u) u = rng.Uniform();
    scores[i] = ScalarScore(kind, labels[i], probs.row(i), u);
  }
  return ScalarScorePredictor(kind, SplitConformalUpper(std::move(scores), alpha), use_u, seed);
}

ScalarScorePredictor::ScalarScorePredictor(ScalarScoreKind kind, double threshold, bool randomized,
                                           std::uint64_t seed)
    : kind_(kind), threshold_(threshold), randomized_(randomized), seed_(seed) {}

std::vector<std::size_t> ScalarScorePredictor::PredictSet(std::span<const double> pi,
                                                          std::uint64_t query_id) const {
  std::optional<double> u;
  if (randomized_) u = Rng(DeriveSeed(seed_, query_id)).Uniform();
  std::vector<std::size_t> labels;
  for (std::size_t y = 0; y < pi.size(); ++y) {
    if (ScalarScore(kind_, y, pi, u) <= threshold_) labels.push_back(y);
  }
  return labels;
}

}  // namespace otcp
