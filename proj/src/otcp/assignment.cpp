#include "otcp/assignment.hpp"

#include <limits>
#include <string>

#include "otcp/error.hpp"

namespace otcp {
namespace {

// Shortest augmenting path solver (Hungarian method with Dijkstra-style
// label updates, the Jonker-Volgenant family). Rows are inserted one at a
// time; each insertion grows an alternating tree from the free row until it
// reaches a free column, keeping the duals feasible throughout. O(n^3).
//
// row_cost(i) must return a pointer to the n costs of row i, valid until the
// next call.
template <class RowCost>
Assignment SolveShortestAugmentingPath(std::size_t n, RowCost&& row_cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based: index 0 is the virtual column holding the row being inserted.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = col_owner[j0];
      const double* costs = row_cost(i0 - 1);
      const double ui0 = u[i0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = costs[j - 1] - ui0 - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result;
  result.permutation.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.permutation[col_owner[j] - 1] = j - 1;
  result.row_duals.assign(u.begin() + 1, u.end());
  result.col_duals.assign(v.begin() + 1, v.end());
  return result;
}

}  // namespace

Assignment SolveLinearAssignment(std::size_t n, std::span<const double> costs) {
  if (n == 0) Fail(ErrorCode::kInvalidDimension, "assignment problem must have n >= 1");
  if (costs.size() != n * n) Fail(ErrorCode::kDimensionMismatch, "cost matrix is not n x n");
  RequireFinite(costs, "cost matrix");
  Assignment a = SolveShortestAugmentingPath(n, [&](std::size_t i) { return costs.data() + i * n; });
  a.total_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) a.total_cost += costs[i * n + a.permutation[i]];
  return a;
}

Assignment SolveAssignment(const ScoreMatrix& scores, const ReferenceRanks& reference) {
  RequireFiniteNonEmpty(scores, "scores");
  RequireFiniteNonEmpty(reference.vectors, "reference");
  if (scores.size() != reference.size() || scores.dim() != reference.dim()) {
    Fail(ErrorCode::kDimensionMismatch,
         "scores are " + std::to_string(scores.size()) + "x" + std::to_string(scores.dim()) +
             " but reference is " + std::to_string(reference.size()) + "x" +
             std::to_string(reference.dim()));
  }
  const std::size_t n = scores.size();
  const PointSet& refs = reference.vectors;

  Assignment a;
  if (n <= kCostMatrixLimit) {
    std::vector<double> costs(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = scores.row(i);
      for (std::size_t j = 0; j < n; ++j) costs[i * n + j] = SquaredDistance(s, refs.row(j));
    }
    a = SolveShortestAugmentingPath(n, [&](std::size_t i) { return costs.data() + i * n; });
  } else {
    std::vector<double> buffer(n);
    std::size_t cached = n;
    a = SolveShortestAugmentingPath(n, [&](std::size_t i) {
      if (i != cached) {
        auto s = scores.row(i);
        for (std::size_t j = 0; j < n; ++j) buffer[j] = SquaredDistance(s, refs.row(j));
        cached = i;
      }
      return buffer.data();
    });
  }
  a.total_cost = AssignmentCost(scores, reference, a.permutation);
  return a;
}

double AssignmentCost(const ScoreMatrix& scores, const ReferenceRanks& reference,
                      std::span<const std::size_t> permutation) {
  double total = 0.0;
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    total += SquaredDistance(scores.row(i), reference.vectors.row(permutation[i]));
  }
  return total;
}

}  // namespace otcp
