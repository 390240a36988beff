#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "otcp/point_set.hpp"
#include "otcp/reference_ranks.hpp"

namespace otcp {

// Above this size the n x n cost matrix is not stored; rows are recomputed
// on demand instead.
inline constexpr std::size_t kCostMatrixLimit = 8000;

// Solution of min_sigma sum_i c(i, sigma(i)).
//
// permutation[i] is the column (reference index) assigned to row i. The
// solver also reports the linear-programming duals, which satisfy
// row_duals[i] + col_duals[j] <= c(i, j) with equality on matched pairs.
struct Assignment {
  std::vector<std::size_t> permutation;
  double total_cost = 0.0;
  std::vector<double> row_duals;
  std::vector<double> col_duals;
};

// Dense square linear assignment problem; costs is row-major n x n.
Assignment SolveLinearAssignment(std::size_t n, std::span<const double> costs);

// Squared Euclidean cost between calibration scores and reference ranks.
// Deterministic for fixed inputs.
Assignment SolveAssignment(const ScoreMatrix& scores, const ReferenceRanks& reference);

// Sum of ||S_i - U_{sigma(i)}||^2 evaluated directly on the inputs.
double AssignmentCost(const ScoreMatrix& scores, const ReferenceRanks& reference,
                      std::span<const std::size_t> permutation);

}  // namespace otcp
