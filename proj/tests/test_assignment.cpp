#include <gtest/gtest.h>

#include <chrono>

#include "otcp/assignment.hpp"
#include "otcp/error.hpp"
#include "test_util.hpp"

namespace otcp {
namespace {

using testing::BruteForceMinCost;
using testing::GaussianPoints;

ReferenceRanks RefFrom(PointSet vectors) {
  ReferenceRanks r;
  r.levels.resize(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) r.levels[i] = (i + 1.0) / vectors.size();
  r.vectors = std::move(vectors);
  return r;
}

TEST(Assignment, SinglePoint) {
  const auto a = SolveAssignment(PointSet::FromRows({{0.5, 0.0}}), RefFrom(PointSet::FromRows({{1.0, 0.0}})));
  ASSERT_EQ(a.permutation.size(), 1u);
  EXPECT_EQ(a.permutation[0], 0u);
  EXPECT_DOUBLE_EQ(a.total_cost, 0.25);
}

TEST(Assignment, IdenticalSetsGiveIdentity) {
  const auto ref = SphericalReference(12, 3, 2);
  const auto a = SolveAssignment(ref.vectors, ref);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(a.permutation[i], i);
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Assignment, FourPointsMatchExhaustiveSearch) {
  const auto s = GaussianPoints(4, 2, 17);
  const auto ref = SphericalReference(4, 2, 18);
  const auto a = SolveAssignment(s, ref);
  EXPECT_NEAR(a.total_cost, BruteForceMinCost(s, ref.vectors), 1e-9 * std::max(1.0, a.total_cost));
  EXPECT_NEAR(a.total_cost, AssignmentCost(s, ref, a.permutation), 1e-9 * std::max(1.0, a.total_cost));
}

TEST(Assignment, SmallInstancesMatchExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 7, d = 1 + seed % 3;
    const auto s = GaussianPoints(n, d, 1000 + seed, 2.0);
    const auto ref = SphericalReference(n, d, 2000 + seed);
    const auto a = SolveAssignment(s, ref);
    const double best = BruteForceMinCost(s, ref.vectors);
    EXPECT_NEAR(a.total_cost, best, 1e-9 * std::max(1.0, best)) << "seed " << seed;
  }
}

TEST(Assignment, DualsAreFeasibleAndTight) {
  const std::size_t n = 25;
  const auto s = GaussianPoints(n, 3, 4);
  const auto ref = SphericalReference(n, 3, 5);
  const auto a = SolveAssignment(s, ref);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c = testing::SquaredCost(s, ref.vectors, i, j);
      EXPECT_LE(a.row_duals[i] + a.col_duals[j], c + 1e-9);
    }
    const double matched = testing::SquaredCost(s, ref.vectors, i, a.permutation[i]);
    EXPECT_NEAR(a.row_duals[i] + a.col_duals[a.permutation[i]], matched, 1e-9);
  }
}

TEST(Assignment, DenseSolverOnIntegerCosts) {
  // Classic 3 x 3 example with optimum 5 (0->1, 1->0, 2->2).
  const std::vector<double> c = {4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto a = SolveLinearAssignment(3, c);
  EXPECT_DOUBLE_EQ(a.total_cost, 5.0);
  EXPECT_EQ(a.permutation, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Assignment, TranslationKeepsUniqueOptimum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = GaussianPoints(30, 2, 300 + seed);
    const auto ref = SphericalReference(30, 2, 400 + seed);
    const auto before = SolveAssignment(s, ref).permutation;
    for (std::size_t i = 0; i < s.size(); ++i) {
      s(i, 0) += 3.5;
      s(i, 1) -= 1.25;
    }
    EXPECT_EQ(SolveAssignment(s, ref).permutation, before) << "seed " << seed;
  }
}

TEST(Assignment, DuplicateScoresStillBijective) {
  const auto s = PointSet::FromRows({{1, 1}, {1, 1}, {1, 1}, {0, 0}});
  const auto ref = SphericalReference(4, 2, 9);
  const auto a = SolveAssignment(s, ref);
  std::vector<std::size_t> sorted = a.permutation;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Assignment, Errors) {
  const auto ref = SphericalReference(3, 2, 1);
  try {
    SolveAssignment(GaussianPoints(4, 2, 1), ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(SolveAssignment(GaussianPoints(3, 3, 1), ref), Error);
  auto bad = GaussianPoints(3, 2, 1);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    SolveAssignment(bad, ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteInput);
  }
}

TEST(Assignment, Deterministic) {
  const auto s = GaussianPoints(200, 2, 77);
  const auto ref = SphericalReference(200, 2, 78);
  const auto a = SolveAssignment(s, ref);
  const auto b = SolveAssignment(s, ref);
  EXPECT_EQ(a.permutation, b.permutation);
  EXPECT_EQ(a.total_cost, b.total_cost);
}

}  // namespace
}  // namespace otcp
