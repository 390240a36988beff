#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "otcp/point_set.hpp"

namespace otcp {

// Labels are 0-based in the C++ and C APIs; CSV files use 1..K.

// Multivariate residual y - fhat(x).
std::vector<double> SignedResidual(std::span<const double> y, std::span<const double> fhat);
void SignedResidual(std::span<const double> y, std::span<const double> fhat, std::span<double> out);

// |onehot(label) - pi|, componentwise, in [0, 1]^K. Its l1 norm is
// 2 (1 - pi[label]).
std::vector<double> AbsOneHotScore(std::size_t label, std::span<const double> pi);

// Scalar classification scores.
double InverseProbabilityScore(std::size_t label, std::span<const double> pi);  // 1 - pi_y
double MarginScore(std::size_t label, std::span<const double> pi);  // max_{y' != y} pi_y' - pi_y
// Probability mass of every label ranked at or above `label` (descending
// probability, ties by index). With `u` the randomized variant subtracts
// (1 - u) pi_y, i.e. mass strictly above plus u pi_y.
double AdaptivePredictionSetScore(std::size_t label, std::span<const double> pi,
                                  std::optional<double> u = std::nullopt);

enum class ScalarScoreKind { kInverseProbability, kMargin, kAdaptive };
std::string_view ScalarScoreKindName(ScalarScoreKind kind);
double ScalarScore(ScalarScoreKind kind, std::size_t label, std::span<const double> pi,
                   std::optional<double> u = std::nullopt);

// Probability rows within 1e-6 of the simplex are clipped and renormalized;
// rows further off throw MalformedData.
inline constexpr double kSimplexTolerance = 1e-6;
std::vector<double> NormalizeProbabilities(std::span<const double> pi);
PointSet NormalizeProbabilityRows(const PointSet& probs);

// Residual scores y_i - fhat_i for every row.
PointSet ResidualScores(const PointSet& fhat, const PointSet& y);
// Abs-one-hot scores for every (pi_i, label_i).
PointSet AbsOneHotScores(const PointSet& probs, std::span<const std::size_t> labels);

}  // namespace otcp
