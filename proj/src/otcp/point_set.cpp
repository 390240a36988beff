#include "otcp/point_set.hpp"

#include <cmath>
#include <string>

#include "otcp/error.hpp"

namespace otcp {

PointSet::PointSet(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> data)
    : n_(n), d_(d), data_(std::move(data)) {
  if (data_.size() != n * d) {
    Fail(ErrorCode::kDimensionMismatch, "point buffer has " + std::to_string(data_.size()) +
                                            " values, expected " + std::to_string(n * d));
  }
}

PointSet PointSet::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t d = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) Fail(ErrorCode::kDimensionMismatch, "rows have differing dimensions");
    data.insert(data.end(), r.begin(), r.end());
  }
  return PointSet(rows.size(), d, std::move(data));
}

void PointSet::push_back(std::span<const double> point) {
  if (n_ == 0 && d_ == 0) d_ = point.size();
  if (point.size() != d_) Fail(ErrorCode::kDimensionMismatch, "point dimension differs from set");
  data_.insert(data_.end(), point.begin(), point.end());
  ++n_;
}

PointSet PointSet::Select(std::span<const std::size_t> indices) const {
  PointSet out(indices.size(), d_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void RequireFiniteNonEmpty(const PointSet& points, const char* what) {
  if (points.size() == 0 || points.dim() == 0) {
    Fail(ErrorCode::kInvalidDimension, std::string(what) + " must have n >= 1 and d >= 1");
  }
  for (double v : points.data()) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFiniteInput, std::string(what) + " has a non-finite coordinate");
  }
}

void RequireFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) Fail(ErrorCode::kNonFiniteInput, std::string(what) + " has a non-finite coordinate");
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double SquaredNorm(std::span<const double> a) { return Dot(a, a); }

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

}  // namespace otcp
