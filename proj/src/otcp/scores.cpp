#include "otcp/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "otcp/error.hpp"

namespace otcp {
namespace {

void CheckLabel(std::size_t label, std::span<const double> pi) {
  if (label >= pi.size()) {
    Fail(ErrorCode::kInvalidLabel,
         "label " + std::to_string(label) + " out of range for K=" + std::to_string(pi.size()));
  }
}

}  // namespace

std::vector<double> SignedResidual(std::span<const double> y, std::span<const double> fhat) {
  std::vector<double> out(y.size());
  SignedResidual(y, fhat, out);
  return out;
}

void SignedResidual(std::span<const double> y, std::span<const double> fhat, std::span<double> out) {
  if (y.size() != fhat.size() || out.size() != y.size()) {
    Fail(ErrorCode::kDimensionMismatch, "response and prediction dimensions differ");
  }
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = y[k] - fhat[k];
}

std::vector<double> AbsOneHotScore(std::size_t label, std::span<const double> pi) {
  CheckLabel(label, pi);
  std::vector<double> s(pi.size());
  for (std::size_t k = 0; k < pi.size(); ++k) {
    s[k] = std::abs((k == label ? 1.0 : 0.0) - pi[k]);
  }
  return s;
}

double InverseProbabilityScore(std::size_t label, std::span<const double> pi) {
  CheckLabel(label, pi);
  return 1.0 - pi[label];
}

double MarginScore(std::size_t label, std::span<const double> pi) {
  CheckLabel(label, pi);
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (k != label) best_other = std::max(best_other, pi[k]);
  }
  if (pi.size() == 1) best_other = 0.0;
  return best_other - pi[label];
}

double AdaptivePredictionSetScore(std::size_t label, std::span<const double> pi,
                                  std::optional<double> u) {
  CheckLabel(label, pi);
  // Mass of labels ranked strictly ahead of `label`.
  double above = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] > pi[label] || (pi[k] == pi[label] && k < label)) above += pi[k];
  }
  if (u) return above + *u * pi[label];
  return above + pi[label];
}

std::string_view ScalarScoreKindName(ScalarScoreKind kind) {
  switch (kind) {
    case ScalarScoreKind::kInverseProbability: return "ip";
    case ScalarScoreKind::kMargin: return "ms";
    case ScalarScoreKind::kAdaptive: return "aps";
  }
  return "?";
}

double ScalarScore(ScalarScoreKind kind, std::size_t label, std::span<const double> pi,
                   std::optional<double> u) {
  switch (kind) {
    case ScalarScoreKind::kInverseProbability: return InverseProbabilityScore(label, pi);
    case ScalarScoreKind::kMargin: return MarginScore(label, pi);
    case ScalarScoreKind::kAdaptive: return AdaptivePredictionSetScore(label, pi, u);
  }
  return 0.0;
}

std::vector<double> NormalizeProbabilities(std::span<const double> pi) {
  if (pi.empty()) Fail(ErrorCode::kMalformedData, "empty probability row");
  double sum = 0.0;
  for (double p : pi) {
    if (!std::isfinite(p) || p < -kSimplexTolerance) {
      Fail(ErrorCode::kMalformedData, "probability row has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    Fail(ErrorCode::kMalformedData, "probability row sums to " + std::to_string(sum));
  }
  std::vector<double> out(pi.begin(), pi.end());
  double clipped = 0.0;
  for (double& p : out) {
    p = std::max(p, 0.0);
    clipped += p;
  }
  for (double& p : out) p /= clipped;
  return out;
}

PointSet NormalizeProbabilityRows(const PointSet& probs) {
  PointSet out(probs.size(), probs.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    auto row = NormalizeProbabilities(probs.row(i));
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

PointSet ResidualScores(const PointSet& fhat, const PointSet& y) {
  if (fhat.size() != y.size() || fhat.dim() != y.dim()) {
    Fail(ErrorCode::kDimensionMismatch, "prediction and response tables differ in shape");
  }
  PointSet out(y.size(), y.dim());
  for (std::size_t i = 0; i < y.size(); ++i) SignedResidual(y.row(i), fhat.row(i), out.row(i));
  return out;
}

PointSet AbsOneHotScores(const PointSet& probs, std::span<const std::size_t> labels) {
  if (labels.size() != probs.size()) {
    Fail(ErrorCode::kDimensionMismatch, "probability and label counts differ");
  }
  PointSet out(probs.size(), probs.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    auto s = AbsOneHotScore(labels[i], probs.row(i));
    std::copy(s.begin(), s.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace otcp
