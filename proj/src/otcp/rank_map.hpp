#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <span>
#include <vector>

#include "otcp/assignment.hpp"
#include "otcp/point_set.hpp"
#include "otcp/reference_ranks.hpp"

namespace otcp {

// Relative tolerance for optimality, feasibility and argmax ties. Absolute
// tolerances are this times max(1, magnitude of the compared quantities).
inline constexpr double kRelativeTolerance = 1e-9;

// Potentials of the inner-product (Legendre) form of the transport dual:
//   <S_i, U_j> - psi[j] <= psi_star[i]   for all i, j,
// with equality at j = sigma(i). psi is defined up to an additive constant
// (psi_star moves by the opposite constant); rank evaluation does not depend
// on it.
struct DualPotentials {
  std::vector<double> psi;
  std::vector<double> psi_star;
  // Every unmatched pair is slack by more than the tie tolerance, so each
  // calibration score is the unique argmax of its own matched rank.
  bool strict = false;
};

// max(1, max_ij |<S_i, U_j>|).
double InnerProductScale(const ScoreMatrix& scores, const ReferenceRanks& reference);

// Converts squared-cost assignment duals (u_i, v_j) into Legendre potentials:
//   psi(U_j)   = (||U_j||^2 - v_j) / 2
//   psi*(S_i)  = (||S_i||^2 - u_i) / 2
// and then raises psi, when the instance allows it, so that every unmatched
// pair is strictly slack. If the assignment carries no duals they are
// rebuilt from the permutation alone. Throws InfeasibleDuals if the result
// fails the feasibility check (the assignment was not optimal).
DualPotentials RecoverDuals(const ScoreMatrix& scores, const ReferenceRanks& reference,
                            const Assignment& assignment);

// Max violation of dual feasibility / complementary slackness, relative to
// InnerProductScale. Both are <= kRelativeTolerance on a valid fit.
struct DualCheck {
  double feasibility_violation = 0.0;
  double slackness_violation = 0.0;
  bool ok() const {
    return feasibility_violation <= kRelativeTolerance && slackness_violation <= kRelativeTolerance;
  }
};
DualCheck CheckDuals(const ScoreMatrix& scores, const ReferenceRanks& reference,
                     std::span<const std::size_t> permutation, const DualPotentials& duals);

struct RankEvaluation {
  std::vector<double> rank_vector;
  double rank_norm = 0.0;  // nominal level (index + 1) / n
  std::size_t index = 0;   // 0-based reference index
};

// Empirical Monge-Kantorovich rank map
//   R_n(s) = argmax_j { <U_j, s> - psi(U_j) }.
//
// A calibration score maps to its own matched reference U_sigma(i), which
// the argmax attains by complementary slackness; the lookup keeps that exact
// when neighbouring scores are closer than the tie tolerance. Duplicated
// calibration scores take the smallest of their matched indices, so the
// point belongs to a region whenever any copy does. Elsewhere,
// ties (values within the tie tolerance of the maximum) resolve to the
// reference with the largest level, then the smallest index. Immutable after
// construction; concurrent evaluation is safe.
class RankMap {
 public:
  // Solves the assignment and recovers the duals.
  static RankMap Fit(ScoreMatrix scores, ReferenceRanks reference);

  // Assembles a map from stored parts (e.g. a loaded artifact). Validates
  // shapes, the permutation and dual feasibility.
  RankMap(ReferenceRanks reference, ScoreMatrix scores, Assignment assignment,
          DualPotentials duals);

  std::size_t ArgmaxIndex(std::span<const double> s) const;
  RankEvaluation Evaluate(std::span<const double> s) const;

  // max_j { <U_j, s> - psi_j }.
  double MaxValue(std::span<const double> s) const;

  // Copy with psi shifted by c and psi_star by -c.
  RankMap ShiftPotentials(double c) const;

  std::size_t size() const noexcept { return scores_.size(); }
  std::size_t dim() const noexcept { return scores_.dim(); }
  const ReferenceRanks& reference() const noexcept { return reference_; }
  const ScoreMatrix& scores() const noexcept { return scores_; }
  const Assignment& assignment() const noexcept { return assignment_; }
  const DualPotentials& duals() const noexcept { return duals_; }
  double scale() const noexcept { return scale_; }

 private:
  // Matched reference index of a calibration score equal to s, if any.
  std::optional<std::size_t> SupportIndex(std::span<const double> s) const;

  ReferenceRanks reference_;
  ScoreMatrix scores_;
  Assignment assignment_;
  DualPotentials duals_;
  double scale_ = 1.0;
  // (hash of coordinates, calibration row), sorted.
  std::vector<std::pair<std::uint64_t, std::size_t>> support_;
};

}  // namespace otcp
