#include <gtest/gtest.h>

#include <cmath>

#include "otcp/baselines.hpp"
#include "otcp/error.hpp"
#include "otcp/scores.hpp"
#include "otcp/synthetic.hpp"
#include "test_util.hpp"

namespace otcp {
namespace {

using V = std::vector<double>;

TEST(Scores, SignedResidual) {
  EXPECT_EQ(SignedResidual(V{3, 1}, V{2, 2}), (V{1, -1}));
  EXPECT_EQ(SignedResidual(V{4, 5}, V{4, 5}), (V{0, 0}));
  try {
    SignedResidual(V{1, 2}, V{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Scores, AbsOneHotExamples) {
  EXPECT_EQ(AbsOneHotScore(1, V{0, 1, 0}), (V{0, 0, 0}));
  const auto a = AbsOneHotScore(1, V{0.6, 0.4, 0.0});
  const auto b = AbsOneHotScore(1, V{0.0, 0.4, 0.6});
  EXPECT_NEAR(a[0], 0.6, 1e-15);
  EXPECT_NEAR(a[1], 0.6, 1e-15);
  EXPECT_EQ(a[2], 0.0);
  EXPECT_NE(a, b);
  EXPECT_DOUBLE_EQ(InverseProbabilityScore(1, V{0.6, 0.4, 0.0}), InverseProbabilityScore(1, V{0.0, 0.4, 0.6}));
  try {
    AbsOneHotScore(3, V{0.2, 0.3, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidLabel);
  }
}

TEST(Scores, AbsOneHotIsInUnitCubeWithL1TwiceIp) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t K = 2 + rng.Index(6);
    V pi(K);
    double sum = 0.0;
    for (auto& p : pi) sum += (p = rng.Exponential());
    for (auto& p : pi) p /= sum;
    const std::size_t y = rng.Index(K);
    const auto s = AbsOneHotScore(y, pi);
    double l1 = 0.0;
    for (double v : s) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      l1 += v;
    }
    EXPECT_NEAR(l1, 2.0 * InverseProbabilityScore(y, pi), 1e-12);
  }
}

TEST(Scores, ScalarExamples) {
  const V onehot = {0, 0, 1};
  EXPECT_EQ(InverseProbabilityScore(2, onehot), 0.0);
  EXPECT_EQ(MarginScore(2, onehot), -1.0);
  EXPECT_EQ(AdaptivePredictionSetScore(2, onehot), 1.0);
  EXPECT_NEAR(InverseProbabilityScore(1, V{0.6, 0.4, 0.0}), 0.6, 1e-15);
  EXPECT_NEAR(MarginScore(1, V{0.6, 0.4, 0.0}), 0.2, 1e-15);
  EXPECT_NEAR(AdaptivePredictionSetScore(2, V{0.5, 0.3, 0.2}), 1.0, 1e-15);
  EXPECT_NEAR(AdaptivePredictionSetScore(0, V{0.5, 0.3, 0.2}), 0.5, 1e-15);
  EXPECT_NEAR(AdaptivePredictionSetScore(1, V{0.5, 0.3, 0.2}, 0.5), 0.65, 1e-15);
}

// Direct transcriptions of the score formulas, enumerated over small K.
TEST(Scores, ScalarFormulasMatchOracle) {
  Rng rng(9);
  for (std::size_t K = 2; K <= 4; ++K) {
    for (int t = 0; t < 200; ++t) {
      V pi(K);
      double sum = 0.0;
      for (auto& p : pi) sum += (p = std::floor(rng.Uniform() * 5.0) + 0.5);  // coarse grid gives ties
      for (auto& p : pi) p /= sum;
      for (std::size_t y = 0; y < K; ++y) {
        double other = -1.0, aps = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          if (k != y) other = std::max(other, pi[k]);
          if (pi[k] > pi[y] || (pi[k] == pi[y] && k <= y)) aps += pi[k];
        }
        EXPECT_DOUBLE_EQ(InverseProbabilityScore(y, pi), 1.0 - pi[y]);
        EXPECT_DOUBLE_EQ(MarginScore(y, pi), other - pi[y]);
        EXPECT_NEAR(AdaptivePredictionSetScore(y, pi), aps, 1e-15);
      }
    }
  }
}

TEST(Scores, ProbabilityNormalization) {
  const auto p = NormalizeProbabilities(V{0.2, 0.3, 0.5000004});
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
  try {
    NormalizeProbabilities(V{0.2, 0.3, 0.6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedData);
  }
  EXPECT_THROW(NormalizeProbabilities(V{-0.1, 1.1}), Error);
}

TEST(SplitConformal, OrderStatistics) {
  V v = {5, 3, 9, 1, 7, 2, 8, 4, 10, 6};
  EXPECT_EQ(SplitConformalUpper(v, 0.9), 10.0);  // k = ceil(11 * 0.9) = 10
  EXPECT_EQ(SplitConformalUpper(v, 0.5), 6.0);   // k = 6
  EXPECT_EQ(SplitConformalLower(v, 0.5), 5.0);   // k = floor(5.5) = 5
  EXPECT_TRUE(std::isinf(SplitConformalLower(v, 0.05)));
  try {
    SplitConformalUpper(v, 0.95);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCalibrationTooSmall);
  }
}

TEST(Baselines, BonferroniSplit) {
  EXPECT_NEAR(HyperrectRegion::PerCoordinateMiscoverage(0.9, 2), 0.05, 1e-15);
  EXPECT_NEAR(HyperrectRegion::PerCoordinateMiscoverage(0.9, 4), 0.025, 1e-15);
}

TEST(Baselines, BallAndEllipsoidAgreeOnIsotropicResiduals) {
  const auto r = testing::GaussianPoints(10000, 2, 3);
  const double ball = BallRegion::Fit(r, 0.9).radius();
  const double ell = EllipsoidRegion::Fit(r, 0.9).radius();
  EXPECT_NEAR(ell / ball, 1.0, 0.05);
}

TEST(Baselines, EllipsoidAffineInvariance) {
  const auto r = testing::GaussianPoints(500, 2, 5);
  const auto q = testing::GaussianPoints(2000, 2, 6, 1.5);
  const double A[2][2] = {{2.0, 0.7}, {-0.3, 0.5}};
  auto transform = [&](const PointSet& p) {
    PointSet out(p.size(), 2);
    for (std::size_t i = 0; i < p.size(); ++i) {
      out(i, 0) = A[0][0] * p(i, 0) + A[0][1] * p(i, 1) + 1.0;
      out(i, 1) = A[1][0] * p(i, 0) + A[1][1] * p(i, 1) - 2.0;
    }
    return out;
  };
  EllipsoidOptions raw{false};
  const auto e1 = EllipsoidRegion::Fit(r, 0.9, raw);
  const auto e2 = EllipsoidRegion::Fit(transform(r), 0.9, raw);
  const auto tq = transform(q);
  int disagreements = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    // Skip points within rounding distance of the boundary.
    if (std::abs(e1.Mahalanobis(q.row(i)) - e1.radius()) < 1e-9) continue;
    disagreements += e1.Contains(q.row(i)) != e2.Contains(tq.row(i));
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Baselines, SingularCovariance) {
  PointSet r(50, 2);
  for (std::size_t i = 0; i < 50; ++i) r(i, 0) = r(i, 1) = static_cast<double>(i);
  try {
    EllipsoidRegion::Fit(r, 0.9, EllipsoidOptions{false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCovariance);
  }
  EXPECT_NO_THROW(EllipsoidRegion::Fit(r, 0.9));  // the ridge makes it definite
}

TEST(Baselines, MarginalCoverageAtLeastAlpha) {
  const auto data = GenerateMixtureRegression(2000, 20000, 11);
  const auto res = ResidualScores(data.calibration.fhat, data.calibration.y);
  const auto ball = BallRegion::Fit(res, 0.9);
  const auto rect = HyperrectRegion::Fit(res, 0.9);
  const auto ell = EllipsoidRegion::Fit(res, 0.9);
  const auto ada = AdaptiveEllipsoidPredictor::Fit(data.calibration.features, res, 0.9, 200, true);
  std::size_t hb = 0, hr = 0, he = 0, ha = 0;
  const std::size_t n = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = SignedResidual(data.test.y.row(i), data.test.fhat.row(i));
    hb += ball.Contains(s);
    hr += rect.Contains(s);
    he += ell.Contains(s);
    ha += ada.ContainsRegression(data.test.features.row(i), data.test.fhat.row(i), data.test.y.row(i));
  }
  // Calibration-conditional spread is about 0.007 at n = 2000; allow 3 sd.
  for (std::size_t h : {hb, hr, he, ha}) EXPECT_GE(static_cast<double>(h) / n, 0.9 - 0.025);
}

TEST(Baselines, ScalarScorePredictorSets) {
  GmmClassificationOptions opt;
  const auto data = GenerateGmmClassification(1000, 200, opt, 12);
  for (auto kind : {ScalarScoreKind::kInverseProbability, ScalarScoreKind::kMargin, ScalarScoreKind::kAdaptive}) {
    const auto pred = ScalarScorePredictor::Fit(kind, data.calibration.probs, data.calibration.labels, 0.9, false, 1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto set = pred.PredictSet(data.test.probs.row(i), i);
      for (auto y : set) EXPECT_LT(y, 3u);
      hits += std::find(set.begin(), set.end(), data.test.labels[i]) != set.end();
    }
    EXPECT_GE(hits, 160u);
  }
  const auto rnd = ScalarScorePredictor::Fit(ScalarScoreKind::kAdaptive, data.calibration.probs,
                                             data.calibration.labels, 0.9, true, 3);
  EXPECT_EQ(rnd.PredictSet(data.test.probs.row(0), 7), rnd.PredictSet(data.test.probs.row(0), 7));
}

}  // namespace
}  // namespace otcp
