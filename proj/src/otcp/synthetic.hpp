#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "otcp/point_set.hpp"
#include "otcp/random.hpp"

namespace otcp {

struct RegressionData {
  PointSet features;  // n x p
  PointSet fhat;      // n x d, point predictions
  PointSet y;         // n x d, observed responses
  std::size_t size() const noexcept { return y.size(); }
};

struct ClassificationData {
  PointSet features;                // n x p
  PointSet probs;                   // n x K, predicted class probabilities
  std::vector<std::size_t> labels;  // 0-based
  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_classes() const noexcept { return probs.dim(); }
};

template <class Data>
struct DataSplit {
  Data calibration;
  Data test;
};

class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                  std::vector<Eigen::MatrixXd> covariances);

  Eigen::VectorXd Sample(Rng& rng) const;
  // Mixture mean and covariance.
  Eigen::VectorXd Mean() const;
  Eigen::MatrixXd Covariance() const;

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const noexcept { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const noexcept { return covariances_; }

 private:
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::MatrixXd> factors_;
};

// Residual law of the regression scenarios: weights (3/8, 3/8, 1/4), means
// (5,0), (-5,0), (0,0), covariances [[4,-3],[-3,4]], [[4,3],[3,4]],
// [[3,0],[0,1]].
GaussianMixture RegressionResidualMixture();

// fhat(x) = (2 x^2, (x + 1)^2).
Eigen::Vector2d RegressionPredictor(double x);

// X ~ Unif[0, 2], y = fhat(X) + zeta.
DataSplit<RegressionData> GenerateMixtureRegression(std::size_t n_cal, std::size_t n_test,
                                                    std::uint64_t seed);
// X ~ Unif[0, 2], y = fhat(X) + sqrt(X) zeta.
DataSplit<RegressionData> GenerateHeteroscedastic(std::size_t n_cal, std::size_t n_test,
                                                  std::uint64_t seed);

struct GmmClassificationOptions {
  std::size_t num_classes = 3;
  // Multiplies the component means; 1 gives (0,0), (3,0), (0,3) for K = 3.
  double separation = 1.0;
  // Covariance multiplier assumed by the classifier; 1 gives the exact
  // Bayes posterior, other values a miscalibrated one.
  double posterior_cov_scale = 1.0;
};

// K-component isotropic Gaussian mixture in R^2 with equal weights and
// identity covariances. K = 3 uses means (0,0), (3,0), (0,3); larger K
// places the means on the circle of radius 3. Probabilities are posterior
// class probabilities under the mixture.
DataSplit<ClassificationData> GenerateGmmClassification(std::size_t n_cal, std::size_t n_test,
                                                        const GmmClassificationOptions& options,
                                                        std::uint64_t seed);

enum class Scenario { kMixtureRegression, kHeteroscedasticRegression, kGmmClassification };
std::string_view ScenarioName(Scenario s);
Scenario ParseScenario(std::string_view name);

}  // namespace otcp
