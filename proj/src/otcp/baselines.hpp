#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "otcp/knn.hpp"
#include "otcp/point_set.hpp"
#include "otcp/scores.hpp"

namespace otcp {

// Scalar split-conformal quantiles. Upper: the k-th smallest value with
// k = ceil((n+1) level), CalibrationTooSmall if k > n. Lower: the k-th
// smallest with k = floor((n+1) level), -infinity if k = 0.
double SplitConformalUpper(std::vector<double> values, double level);
double SplitConformalLower(std::vector<double> values, double level);
std::size_t GuardedFloor(double x);

enum class BaselineKind { kBall, kHyperrect, kEllipsoid, kAdaptiveEllipsoid };
std::string_view BaselineKindName(BaselineKind kind);

// Scores are regression residuals; the prediction region at x is the
// translate fhat(x) + region.

// Euclidean ball of the split-conformal radius of ||residual||.
class BallRegion {
 public:
  static BallRegion Fit(const ScoreMatrix& residuals, double alpha);
  explicit BallRegion(double radius) : radius_(radius) {}

  bool Contains(std::span<const double> s) const;
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

struct Interval {
  double lo;
  double hi;
};

// Product of per-coordinate equal-tailed split-conformal intervals; each
// coordinate gets miscoverage (1 - alpha) / d (Bonferroni).
class HyperrectRegion {
 public:
  static HyperrectRegion Fit(const ScoreMatrix& residuals, double alpha);
  explicit HyperrectRegion(std::vector<Interval> intervals);

  bool Contains(std::span<const double> s) const;
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  static double PerCoordinateMiscoverage(double alpha, std::size_t d) { return (1.0 - alpha) / d; }

 private:
  std::vector<Interval> intervals_;
};

struct EllipsoidOptions {
  // Adds lambda I with lambda = 1e-6 trace(Sigma) / d.
  bool regularize = true;
};

// Ellipsoid {s : (s - c)^T Sigma^{-1} (s - c) <= r^2} with c, Sigma the
// empirical mean and covariance and r the split-conformal quantile of the
// Mahalanobis distances.
class EllipsoidRegion {
 public:
  static EllipsoidRegion Fit(const ScoreMatrix& residuals, double alpha,
                             const EllipsoidOptions& options = {});
  EllipsoidRegion(Eigen::VectorXd center, Eigen::MatrixXd covariance, double radius);

  double Mahalanobis(std::span<const double> s) const;
  bool Contains(std::span<const double> s) const;

  const Eigen::VectorXd& center() const noexcept { return center_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  double radius() const noexcept { return radius_; }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd covariance_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  double radius_;
};

// Mean and (regularized) covariance of a set of points; SingularCovariance
// if the result is not positive definite.
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
Moments EstimateMoments(const PointSet& points, bool regularize);

// Ellipsoid whose center and shape are re-estimated per input from the
// residuals of its k nearest calibration inputs. Calibration scores use
// leave-one-out neighborhoods so they are computed like test scores.
class AdaptiveEllipsoidPredictor {
 public:
  static AdaptiveEllipsoidPredictor Fit(PointSet features, ScoreMatrix residuals, double alpha,
                                        std::size_t k, bool standardize = true);
  AdaptiveEllipsoidPredictor(KnnIndex index, ScoreMatrix residuals, std::size_t k, double radius);

  // Local ellipsoid at x, sized by the calibrated radius.
  EllipsoidRegion RegionAt(std::span<const double> x) const;
  bool ContainsRegression(std::span<const double> x, std::span<const double> fhat,
                          std::span<const double> y) const;

  std::size_t k() const noexcept { return k_; }
  double radius() const noexcept { return radius_; }
  const KnnIndex& index() const noexcept { return index_; }
  const ScoreMatrix& residuals() const noexcept { return residuals_; }

 private:
  EllipsoidRegion LocalShape(std::span<const std::size_t> neighbors, double radius) const;

  KnnIndex index_;
  ScoreMatrix residuals_;
  std::size_t k_;
  double radius_;
};

// Split-conformal label sets from a scalar classification score:
// { y : score(x, y) <= q } with q the ceil((n+1) alpha)-th calibration score.
class ScalarScorePredictor {
 public:
  // `randomized` only applies to the adaptive score; the uniform tie-break
  // draws come from `seed`.
  static ScalarScorePredictor Fit(ScalarScoreKind kind, const PointSet& probs,
                                  std::span<const std::size_t> labels, double alpha,
                                  bool randomized = false, std::uint64_t seed = 0);
  ScalarScorePredictor(ScalarScoreKind kind, double threshold, bool randomized,
                       std::uint64_t seed);

  // `query_id` seeds the randomized variant per query.
  std::vector<std::size_t> PredictSet(std::span<const double> pi, std::uint64_t query_id = 0) const;

  ScalarScoreKind kind() const noexcept { return kind_; }
  double threshold() const noexcept { return threshold_; }
  bool randomized() const noexcept { return randomized_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  ScalarScoreKind kind_;
  double threshold_;
  bool randomized_;
  std::uint64_t seed_;
};

}  // namespace otcp
