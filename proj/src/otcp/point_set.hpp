#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace otcp {

// Row-major collection of n points in R^d.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t d);
  PointSet(std::size_t n, std::size_t d, std::vector<double> data);

  static PointSet FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * d_, d_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }

  const std::vector<double>& data() const noexcept { return data_; }

  void push_back(std::span<const double> point);

  // Subset of rows in the given order.
  PointSet Select(std::span<const std::size_t> indices) const;

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

// The n calibration scores, i.e. the support of the empirical score
// distribution.
using ScoreMatrix = PointSet;

// Throws NonFiniteInput if any coordinate is NaN or infinite, and
// InvalidDimension if the set is empty or zero-dimensional.
void RequireFiniteNonEmpty(const PointSet& points, const char* what);
void RequireFinite(std::span<const double> v, const char* what);

double Dot(std::span<const double> a, std::span<const double> b);
double SquaredNorm(std::span<const double> a);
double SquaredDistance(std::span<const double> a, std::span<const double> b);

}  // namespace otcp
