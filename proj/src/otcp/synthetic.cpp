#include "otcp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "otcp/error.hpp"

namespace otcp {
namespace {

enum class Noise { kHomoscedastic, kSqrtX };

RegressionData SampleRegression(std::size_t n, const GaussianMixture& zeta, Noise noise, Rng& rng) {
  RegressionData data{PointSet(n, 1), PointSet(n, 2), PointSet(n, 2)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.Uniform(0.0, 2.0);
    const Eigen::Vector2d f = RegressionPredictor(x);
    Eigen::VectorXd r = zeta.Sample(rng);
    if (noise == Noise::kSqrtX) r *= std::sqrt(x);
    data.features(i, 0) = x;
    for (int k = 0; k < 2; ++k) {
      data.fhat(i, k) = f[k];
      data.y(i, k) = f[k] + r[k];
    }
  }
  return data;
}

DataSplit<RegressionData> GenerateRegression(std::size_t n_cal, std::size_t n_test,
                                             std::uint64_t seed, Noise noise) {
  if (n_cal == 0 || n_test == 0) Fail(ErrorCode::kInvalidArgument, "sample sizes must be >= 1");
  const GaussianMixture zeta = RegressionResidualMixture();
  Rng cal_rng(DeriveSeed(seed, 0));
  Rng test_rng(DeriveSeed(seed, 1));
  return {SampleRegression(n_cal, zeta, noise, cal_rng), SampleRegression(n_test, zeta, noise, test_rng)};
}

std::vector<Eigen::Vector2d> ClassMeans(const GmmClassificationOptions& options) {
  std::vector<Eigen::Vector2d> means;
  const std::size_t K = options.num_classes;
  if (K == 3) {
    means = {{0.0, 0.0}, {3.0, 0.0}, {0.0, 3.0}};
  } else {
    for (std::size_t k = 0; k < K; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(K);
      means.emplace_back(3.0 * std::cos(a), 3.0 * std::sin(a));
    }
  }
  for (auto& m : means) m *= options.separation;
  return means;
}

ClassificationData SampleClassification(std::size_t n, const GmmClassificationOptions& options,
                                        const std::vector<Eigen::Vector2d>& means, Rng& rng) {
  const std::size_t K = options.num_classes;
  ClassificationData data{PointSet(n, 2), PointSet(n, K), std::vector<std::size_t>(n)};
  std::vector<double> logp(K);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = rng.Index(K);
    const Eigen::Vector2d x = means[label] + Eigen::Vector2d(rng.Normal(), rng.Normal());
    data.labels[i] = label;
    data.features(i, 0) = x[0];
    data.features(i, 1) = x[1];
    // Equal weights and shared isotropic covariance: the posterior is a
    // softmax of -||x - m_k||^2 / (2 c).
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      logp[k] = -(x - means[k]).squaredNorm() / (2.0 * options.posterior_cov_scale);
      top = std::max(top, logp[k]);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) total += (logp[k] = std::exp(logp[k] - top));
    for (std::size_t k = 0; k < K; ++k) data.probs(i, k) = logp[k] / total;
  }
  return data;
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  if (weights_.empty() || weights_.size() != means_.size() || means_.size() != covariances_.size()) {
    Fail(ErrorCode::kInvalidArgument, "mixture parts have inconsistent sizes");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) Fail(ErrorCode::kInvalidArgument, "mixture weights must sum to 1");
  for (const auto& c : covariances_) {
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success || !c.isApprox(c.transpose())) {
      Fail(ErrorCode::kInvalidArgument, "mixture covariance is not symmetric positive definite");
    }
    factors_.push_back(llt.matrixL());
  }
}

Eigen::VectorXd GaussianMixture::Sample(Rng& rng) const {
  const double u = rng.Uniform();
  std::size_t c = 0;
  double cumulative = weights_[0];
  while (u >= cumulative && c + 1 < weights_.size()) cumulative += weights_[++c];
  Eigen::VectorXd z(means_[c].size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.Normal();
  return means_[c] + factors_[c] * z;
}

Eigen::VectorXd GaussianMixture::Mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(means_[0].size());
  for (std::size_t c = 0; c < weights_.size(); ++c) m += weights_[c] * means_[c];
  return m;
}

Eigen::MatrixXd GaussianMixture::Covariance() const {
  const Eigen::VectorXd mu = Mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mu.size(), mu.size());
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    const Eigen::VectorXd dm = means_[c] - mu;
    cov += weights_[c] * (covariances_[c] + dm * dm.transpose());
  }
  return cov;
}

GaussianMixture RegressionResidualMixture() {
  Eigen::MatrixXd s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 4, -3, -3, 4;
  s2 << 4, 3, 3, 4;
  s3 << 3, 0, 0, 1;
  Eigen::VectorXd m1(2), m2(2), m3(2);
  m1 << 5, 0;
  m2 << -5, 0;
  m3 << 0, 0;
  return GaussianMixture({3.0 / 8.0, 3.0 / 8.0, 1.0 / 4.0}, {m1, m2, m3}, {s1, s2, s3});
}

Eigen::Vector2d RegressionPredictor(double x) { return {2.0 * x * x, (x + 1.0) * (x + 1.0)}; }

DataSplit<RegressionData> GenerateMixtureRegression(std::size_t n_cal, std::size_t n_test,
                                                    std::uint64_t seed) {
  return GenerateRegression(n_cal, n_test, seed, Noise::kHomoscedastic);
}

DataSplit<RegressionData> GenerateHeteroscedastic(std::size_t n_cal, std::size_t n_test,
                                                  std::uint64_t seed) {
  return GenerateRegression(n_cal, n_test, seed, Noise::kSqrtX);
}

DataSplit<ClassificationData> GenerateGmmClassification(std::size_t n_cal, std::size_t n_test,
                                                        const GmmClassificationOptions& options,
                                                        std::uint64_t seed) {
  if (n_cal == 0 || n_test == 0) Fail(ErrorCode::kInvalidArgument, "sample sizes must be >= 1");
  if (options.num_classes < 3) Fail(ErrorCode::kInvalidArgument, "classification needs K >= 3");
  if (!(options.separation > 0.0) || !(options.posterior_cov_scale > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "separation and posterior scale must be positive");
  }
  const auto means = ClassMeans(options);
  Rng cal_rng(DeriveSeed(seed, 0));
  Rng test_rng(DeriveSeed(seed, 1));
  return {SampleClassification(n_cal, options, means, cal_rng),
          SampleClassification(n_test, options, means, test_rng)};
}

std::string_view ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kMixtureRegression: return "mixture-regression";
    case Scenario::kHeteroscedasticRegression: return "heteroscedastic";
    case Scenario::kGmmClassification: return "gmm-classification";
  }
  return "?";
}

Scenario ParseScenario(std::string_view name) {
  if (name == "mixture-regression" || name == "mixture") return Scenario::kMixtureRegression;
  if (name == "heteroscedastic" || name == "heteroscedastic-regression") {
    return Scenario::kHeteroscedasticRegression;
  }
  if (name == "gmm-classification" || name == "gmm") return Scenario::kGmmClassification;
  Fail(ErrorCode::kInvalidConfig, "unknown scenario '" + std::string(name) + "'");
}

}  // namespace otcp
