#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "otcp/baselines.hpp"
#include "otcp/conformal.hpp"
#include "otcp/csv.hpp"

namespace otcp {

enum class Method {
  kOtcp,
  kOtcpPlus,
  kBall,
  kHyperrect,
  kEllipsoid,
  kAdaptiveEllipsoid,
  kInverseProbability,
  kMargin,
  kAdaptive,
};

std::string_view MethodName(Method m);
Method ParseMethod(std::string_view name);
bool SupportsTask(Method m, DataKind task);
// Methods evaluated by default for a task.
std::vector<Method> DefaultMethods(DataKind task);

struct ModelParams {
  Method method = Method::kOtcp;
  double alpha = 0.9;
  std::uint64_t seed = 0;
  std::size_t k = 0;  // neighbors for otcp-plus / adaptive-ellipsoid; 0 means ceil(0.1 n)
  ReferenceKind reference = ReferenceKind::kSpherical;
  bool reference_set = false;  // false: sphere for regression, orthant for classification
  bool randomized = false;     // randomized APS
  bool standardize = true;     // feature standardization for neighbor search
};

// A fitted predictor of any method, with the task shape it was fitted on.
class CalibratedModel {
 public:
  using Body = std::variant<MarginalPredictor, ConditionalPredictor, BallRegion, HyperrectRegion,
                            EllipsoidRegion, AdaptiveEllipsoidPredictor, ScalarScorePredictor>;

  static CalibratedModel FitRegression(const ModelParams& params, const RegressionData& data);
  static CalibratedModel FitClassification(const ModelParams& params,
                                           const ClassificationData& data);

  CalibratedModel(ModelParams params, DataKind task, std::size_t features, std::size_t outputs,
                  std::size_t n_calibration, Body body);

  // Regression: is candidate y in the region at (x, fhat)?
  bool ContainsRegression(std::span<const double> x, std::span<const double> fhat,
                          std::span<const double> y) const;
  // Classification: 0-based label set. `query_id` seeds randomized scores.
  std::vector<std::size_t> PredictSet(std::span<const double> x, std::span<const double> pi,
                                      std::uint64_t query_id) const;

  // Score-space membership for the methods with one global region
  // (otcp, ball, rect, ellipsoid); InvalidConfig otherwise.
  bool ContainsScore(std::span<const double> s) const;
  bool HasGlobalRegion() const;

  // Calibration ranks kept: ceil((n+1) alpha) for otcp, ceil((k+1) alpha)
  // per query for otcp-plus, 0 for other methods.
  std::size_t threshold_count() const;

  const ModelParams& params() const noexcept { return params_; }
  DataKind task() const noexcept { return task_; }
  std::size_t features() const noexcept { return features_; }
  std::size_t outputs() const noexcept { return outputs_; }
  std::size_t n_calibration() const noexcept { return n_calibration_; }
  const Body& body() const noexcept { return body_; }

 private:
  void CheckQuery(std::span<const double> x, std::span<const double> out) const;

  ModelParams params_;
  DataKind task_;
  std::size_t features_;
  std::size_t outputs_;
  std::size_t n_calibration_;
  Body body_;
};

}  // namespace otcp
