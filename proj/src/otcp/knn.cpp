#include "otcp/knn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "otcp/error.hpp"

namespace otcp {

Standardization Standardization::Identity(std::size_t p) {
  return {std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
}

Standardization Standardization::Fit(const PointSet& features) {
  const std::size_t n = features.size(), p = features.dim();
  Standardization st = Identity(p);
  if (n == 0) return st;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) st.mean[k] += features(i, k);
  }
  for (double& m : st.mean) m /= static_cast<double>(n);
  std::vector<double> var(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      const double t = features(i, k) - st.mean[k];
      var[k] += t * t;
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    const double sd = std::sqrt(var[k] / static_cast<double>(n));
    st.scale[k] = sd > 0.0 ? sd : 1.0;
  }
  return st;
}

std::vector<double> Standardization::Apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    Fail(ErrorCode::kDimensionMismatch, "feature vector has dimension " + std::to_string(x.size()) +
                                            ", expected " + std::to_string(mean.size()));
  }
  std::vector<double> z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - mean[k]) / scale[k];
  return z;
}

KnnIndex::KnnIndex(PointSet features, bool standardize)
    : KnnIndex(features, standardize ? Standardization::Fit(features)
                                     : Standardization::Identity(features.dim())) {}

KnnIndex::KnnIndex(PointSet features, Standardization standardization)
    : features_(std::move(features)), standardization_(std::move(standardization)) {
  RequireFiniteNonEmpty(features_, "features");
  standardized_ = PointSet(features_.size(), features_.dim());
  for (std::size_t i = 0; i < features_.size(); ++i) {
    auto z = standardization_.Apply(features_.row(i));
    std::copy(z.begin(), z.end(), standardized_.row(i).begin());
  }
}

std::vector<std::size_t> KnnIndex::Query(std::span<const double> x, std::size_t k) const {
  return QueryExcluding(x, k, size());
}

std::vector<std::size_t> KnnIndex::QueryExcluding(std::span<const double> x, std::size_t k,
                                                  std::size_t excluded) const {
  const std::size_t available = size() - (excluded < size() ? 1 : 0);
  if (k == 0 || k > available) {
    Fail(ErrorCode::kInvalidArgument, "neighbor count " + std::to_string(k) + " exceeds the " +
                                          std::to_string(available) + " stored points");
  }
  RequireFinite(x, "query features");
  const auto z = standardization_.Apply(x);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == excluded) continue;
    dist.emplace_back(SquaredDistance(z, standardized_.row(i)), i);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = dist[j].second;
  return out;
}

}  // namespace otcp
