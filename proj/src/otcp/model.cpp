#include "otcp/model.hpp"

#include <string>

#include "otcp/error.hpp"
#include "otcp/scores.hpp"

namespace otcp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireTask(Method m, DataKind task) {
  if (!SupportsTask(m, task)) {
    Fail(ErrorCode::kInvalidConfig,
         "method '" + std::string(MethodName(m)) + "' does not apply to " +
             (task == DataKind::kRegression ? "regression" : "classification") + " data");
  }
}

std::size_t ResolveK(const ModelParams& p, std::size_t n) {
  return p.k == 0 ? DefaultNeighborCount(n) : p.k;
}

ReferenceKind ResolveReference(const ModelParams& p, DataKind task) {
  if (p.reference_set) return p.reference;
  return task == DataKind::kRegression ? ReferenceKind::kSpherical : ReferenceKind::kPositiveOrthant;
}

ScalarScoreKind ScalarKindOf(Method m) {
  switch (m) {
    case Method::kInverseProbability: return ScalarScoreKind::kInverseProbability;
    case Method::kMargin: return ScalarScoreKind::kMargin;
    default: return ScalarScoreKind::kAdaptive;
  }
}

}  // namespace

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kOtcp: return "otcp";
    case Method::kOtcpPlus: return "otcp-plus";
    case Method::kBall: return "ball";
    case Method::kHyperrect: return "rect";
    case Method::kEllipsoid: return "ellipsoid";
    case Method::kAdaptiveEllipsoid: return "adaptive-ellipsoid";
    case Method::kInverseProbability: return "ip";
    case Method::kMargin: return "ms";
    case Method::kAdaptive: return "aps";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kOtcp, Method::kOtcpPlus, Method::kBall, Method::kHyperrect,
                   Method::kEllipsoid, Method::kAdaptiveEllipsoid, Method::kInverseProbability,
                   Method::kMargin, Method::kAdaptive}) {
    if (MethodName(m) == name) return m;
  }
  Fail(ErrorCode::kInvalidConfig, "unknown method '" + std::string(name) + "'");
}

bool SupportsTask(Method m, DataKind task) {
  switch (m) {
    case Method::kOtcp:
    case Method::kOtcpPlus: return true;
    case Method::kBall:
    case Method::kHyperrect:
    case Method::kEllipsoid:
    case Method::kAdaptiveEllipsoid: return task == DataKind::kRegression;
    case Method::kInverseProbability:
    case Method::kMargin:
    case Method::kAdaptive: return task == DataKind::kClassification;
  }
  return false;
}

std::vector<Method> DefaultMethods(DataKind task) {
  if (task == DataKind::kRegression) {
    return {Method::kOtcp, Method::kOtcpPlus, Method::kBall, Method::kHyperrect, Method::kEllipsoid,
            Method::kAdaptiveEllipsoid};
  }
  return {Method::kOtcp, Method::kInverseProbability, Method::kMargin, Method::kAdaptive};
}

CalibratedModel CalibratedModel::FitRegression(const ModelParams& params, const RegressionData& data) {
  RequireTask(params.method, DataKind::kRegression);
  RequireFiniteNonEmpty(data.y, "calibration responses");
  PointSet residuals = ResidualScores(data.fhat, data.y);
  const std::size_t n = data.size();
  auto make = [&](Body body) {
    return CalibratedModel(params, DataKind::kRegression, data.features.dim(), data.y.dim(), n,
                           std::move(body));
  };
  switch (params.method) {
    case Method::kOtcp:
      return make(MarginalPredictor::Fit(ScoreKind::kResidual, std::move(residuals), params.alpha,
                                         ResolveReference(params, DataKind::kRegression), params.seed));
    case Method::kOtcpPlus: {
      ConditionalOptions opt{ResolveK(params, n), params.alpha, params.seed, params.standardize};
      return make(ConditionalPredictor::Fit(data.features, std::move(residuals), opt));
    }
    case Method::kBall: return make(BallRegion::Fit(residuals, params.alpha));
    case Method::kHyperrect: return make(HyperrectRegion::Fit(residuals, params.alpha));
    case Method::kEllipsoid: return make(EllipsoidRegion::Fit(residuals, params.alpha));
    case Method::kAdaptiveEllipsoid:
      return make(AdaptiveEllipsoidPredictor::Fit(data.features, std::move(residuals), params.alpha,
                                                  ResolveK(params, n), params.standardize));
    default: break;
  }
  Fail(ErrorCode::kInvalidConfig, "unsupported regression method");
}

CalibratedModel CalibratedModel::FitClassification(const ModelParams& params,
                                                   const ClassificationData& data) {
  RequireTask(params.method, DataKind::kClassification);
  if (data.labels.size() != data.probs.size()) {
    Fail(ErrorCode::kMalformedData, "classification calibration data needs labels");
  }
  const PointSet probs = NormalizeProbabilityRows(data.probs);
  const std::size_t n = data.size();
  auto make = [&](Body body) {
    return CalibratedModel(params, DataKind::kClassification, data.features.dim(), probs.dim(), n,
                           std::move(body));
  };
  switch (params.method) {
    case Method::kOtcp:
      return make(MarginalPredictor::Fit(ScoreKind::kAbsOneHot, AbsOneHotScores(probs, data.labels),
                                         params.alpha,
                                         ResolveReference(params, DataKind::kClassification),
                                         params.seed));
    case Method::kOtcpPlus: {
      ConditionalOptions opt{ResolveK(params, n), params.alpha, params.seed, params.standardize};
      return make(ConditionalPredictor::Fit(data.features, AbsOneHotScores(probs, data.labels), opt));
    }
    case Method::kInverseProbability:
    case Method::kMargin:
    case Method::kAdaptive:
      return make(ScalarScorePredictor::Fit(ScalarKindOf(params.method), probs, data.labels,
                                            params.alpha, params.randomized, params.seed));
    default: break;
  }
  Fail(ErrorCode::kInvalidConfig, "unsupported classification method");
}

CalibratedModel::CalibratedModel(ModelParams params, DataKind task, std::size_t features,
                                 std::size_t outputs, std::size_t n_calibration, Body body)
    : params_(params),
      task_(task),
      features_(features),
      outputs_(outputs),
      n_calibration_(n_calibration),
      body_(std::move(body)) {
  RequireTask(params_.method, task_);
}

void CalibratedModel::CheckQuery(std::span<const double> x, std::span<const double> out) const {
  if (x.size() != features_) {
    Fail(ErrorCode::kDimensionMismatch, "query has " + std::to_string(x.size()) +
                                            " features, model expects " + std::to_string(features_));
  }
  if (out.size() != outputs_) {
    Fail(ErrorCode::kDimensionMismatch, "query has " + std::to_string(out.size()) +
                                            " outputs, model expects " + std::to_string(outputs_));
  }
}

bool CalibratedModel::ContainsRegression(std::span<const double> x, std::span<const double> fhat,
                                         std::span<const double> y) const {
  if (task_ != DataKind::kRegression) Fail(ErrorCode::kInvalidConfig, "model is not a regression model");
  CheckQuery(x, fhat);
  if (y.size() != outputs_) Fail(ErrorCode::kDimensionMismatch, "candidate dimension differs");
  return std::visit(
      Overloaded{
          [&](const MarginalPredictor& p) { return p.ContainsRegression(fhat, y); },
          [&](const ConditionalPredictor& p) { return p.ContainsRegression(x, fhat, y); },
          [&](const AdaptiveEllipsoidPredictor& p) { return p.ContainsRegression(x, fhat, y); },
          [&](const ScalarScorePredictor&) -> bool {
            Fail(ErrorCode::kInvalidConfig, "scalar score model on regression query");
          },
          [&](const auto& region) { return region.Contains(SignedResidual(y, fhat)); },
      },
      body_);
}

std::vector<std::size_t> CalibratedModel::PredictSet(std::span<const double> x,
                                                     std::span<const double> pi,
                                                     std::uint64_t query_id) const {
  if (task_ != DataKind::kClassification) {
    Fail(ErrorCode::kInvalidConfig, "model is not a classification model");
  }
  CheckQuery(x, pi);
  const std::vector<double> p = NormalizeProbabilities(pi);
  return std::visit(
      Overloaded{
          [&](const MarginalPredictor& m) { return m.PredictSet(p); },
          [&](const ConditionalPredictor& c) {
            const QuantileRegion region = c.RegionAt(x);
            std::vector<std::size_t> labels;
            for (std::size_t y = 0; y < p.size(); ++y) {
              if (region.Contains(AbsOneHotScore(y, p))) labels.push_back(y);
            }
            return labels;
          },
          [&](const ScalarScorePredictor& s) { return s.PredictSet(p, query_id); },
          [&](const auto&) -> std::vector<std::size_t> {
            Fail(ErrorCode::kInvalidConfig, "regression model on classification query");
          },
      },
      body_);
}

bool CalibratedModel::HasGlobalRegion() const {
  return std::holds_alternative<MarginalPredictor>(body_) || std::holds_alternative<BallRegion>(body_) ||
         std::holds_alternative<HyperrectRegion>(body_) || std::holds_alternative<EllipsoidRegion>(body_);
}

bool CalibratedModel::ContainsScore(std::span<const double> s) const {
  if (s.size() != outputs_) Fail(ErrorCode::kDimensionMismatch, "score dimension differs");
  return std::visit(
      Overloaded{
          [&](const MarginalPredictor& p) { return p.Contains(s); },
          [&](const BallRegion& r) { return r.Contains(s); },
          [&](const HyperrectRegion& r) { return r.Contains(s); },
          [&](const EllipsoidRegion& r) { return r.Contains(s); },
          [&](const auto&) -> bool {
            Fail(ErrorCode::kInvalidConfig, "method has no global score region");
          },
      },
      body_);
}

std::size_t CalibratedModel::threshold_count() const {
  if (const auto* p = std::get_if<MarginalPredictor>(&body_)) return p->region().threshold_count();
  if (const auto* c = std::get_if<ConditionalPredictor>(&body_)) return c->threshold_count();
  return 0;
}

}  // namespace otcp
