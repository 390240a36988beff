#include "otcp/rank_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "otcp/error.hpp"
#include "otcp/random.hpp"

namespace otcp {
namespace {

std::vector<std::size_t> InversePermutation(std::span<const std::size_t> permutation) {
  const std::size_t n = permutation.size();
  std::vector<std::size_t> inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (permutation[i] >= n || inv[permutation[i]] != n) {
      Fail(ErrorCode::kInvalidArgument, "assignment is not a permutation");
    }
    inv[permutation[i]] = i;
  }
  return inv;
}

// Difference constraints on the reference potentials implied by the matching:
// for each score i matched to k = sigma(i) and every j != k,
//   psi[j] >= psi[k] + <S_i, U_j> - <S_i, U_k> + margin.
// Label-correcting relaxation (queue-based Bellman-Ford) from the given psi,
// which only ever raises entries. Returns false if the work cap is hit, i.e.
// the system has (or nearly has) a positive cycle.
bool RaisePotentials(const ScoreMatrix& scores, const PointSet& refs,
                     std::span<const std::size_t> inverse, double margin, double accept,
                     std::vector<double>& psi) {
  const std::size_t n = psi.size();
  const std::size_t work_cap = 64 * n + 1024;
  std::deque<std::size_t> queue;
  std::vector<char> queued(n, 1);
  std::vector<std::size_t> raises(n, 0);
  for (std::size_t k = 0; k < n; ++k) queue.push_back(k);
  std::size_t work = 0;
  while (!queue.empty()) {
    if (++work > work_cap) return false;
    const std::size_t k = queue.front();
    queue.pop_front();
    queued[k] = 0;
    auto s = scores.row(inverse[k]);
    const double base = psi[k] - Dot(s, refs.row(k)) + margin;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const double candidate = base + Dot(s, refs.row(j));
      if (candidate > psi[j] + accept) {
        psi[j] = candidate;
        if (++raises[j] > n) return false;
        if (!queued[j]) {
          queued[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  return true;
}

// Dense Dijkstra over the reduced lengths c(k, j) = psi[j] - psi[k] - w(k, j)
// >= 0, where w(k, j) = <S_k', U_j - U_k> with k' matched to k. Forward
// gives the distances root -> j, otherwise j -> root.
std::vector<double> ReducedDistances(const ScoreMatrix& scores, const PointSet& refs,
                                     std::span<const std::size_t> inverse,
                                     std::span<const double> psi, std::size_t root, bool forward) {
  const std::size_t n = psi.size();
  std::vector<double> matched(n);
  for (std::size_t k = 0; k < n; ++k) matched[k] = Dot(scores.row(inverse[k]), refs.row(k));
  auto length = [&](std::size_t k, std::size_t j) {
    const double w = Dot(scores.row(inverse[k]), refs.row(j)) - matched[k];
    return std::max(0.0, psi[j] - psi[k] - w);
  };
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  dist[root] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!done[j] && (u == n || dist[j] < dist[u])) u = j;
    }
    done[u] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double cand = dist[u] + (forward ? length(u, v) : length(v, u));
      if (cand < dist[v]) dist[v] = cand;
    }
  }
  return dist;
}

// The potentials that certify the matching form a polytope; the boundary
// between two cells can sit anywhere inside the gap the calibration scores
// leave. Moves every psi[j] to the middle of its feasible range relative to
// the innermost reference, which keeps cell boundaries away from both sides
// of each gap instead of pressed against the inner scores.
void CenterPotentials(const ScoreMatrix& scores, const PointSet& refs,
                      std::span<const std::size_t> inverse, std::vector<double>& psi) {
  const std::size_t n = psi.size();
  if (n < 2) return;
  const auto from_root = ReducedDistances(scores, refs, inverse, psi, 0, true);
  const auto to_root = ReducedDistances(scores, refs, inverse, psi, 0, false);
  for (std::size_t j = 0; j < n; ++j) psi[j] += 0.5 * (to_root[j] - from_root[j]);
}

// Equal vectors (under ==) hash equally: -0.0 is folded into +0.0.
std::uint64_t CoordinateHash(std::span<const double> v) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (double x : v) h = Mix64(h ^ std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x));
  return h;
}

}  // namespace

double InnerProductScale(const ScoreMatrix& scores, const ReferenceRanks& reference) {
  double scale = 1.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      scale = std::max(scale, std::abs(Dot(scores.row(i), reference.vectors.row(j))));
    }
  }
  return scale;
}

DualPotentials RecoverDuals(const ScoreMatrix& scores, const ReferenceRanks& reference,
                            const Assignment& assignment) {
  const std::size_t n = scores.size();
  if (reference.size() != n || reference.dim() != scores.dim() ||
      assignment.permutation.size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "scores, reference and assignment sizes differ");
  }
  const auto inverse = InversePermutation(assignment.permutation);
  const PointSet& refs = reference.vectors;
  const double scale = InnerProductScale(scores, reference);

  DualPotentials duals;
  duals.psi.assign(n, 0.0);
  if (assignment.col_duals.size() == n) {
    for (std::size_t j = 0; j < n; ++j) {
      duals.psi[j] = 0.5 * (SquaredNorm(refs.row(j)) - assignment.col_duals[j]);
    }
  } else if (!RaisePotentials(scores, refs, inverse, 0.0, 1e-15 * scale, duals.psi)) {
    Fail(ErrorCode::kInfeasibleDuals, "no potentials exist for this permutation; it is not optimal");
  }
  CenterPotentials(scores, refs, inverse, duals.psi);

  // Solver duals typically leave unmatched pairs tight, which would make
  // calibration scores sit on cell boundaries. Push every unmatched pair at
  // least `margin` into the slack region when the instance admits it.
  for (double factor : {1e-6, 1e-7, 1e-8}) {
    std::vector<double> trial = duals.psi;
    if (RaisePotentials(scores, refs, inverse, factor * scale, 0.0, trial)) {
      duals.psi = std::move(trial);
      duals.strict = true;
      break;
    }
  }
  if (n == 1) duals.strict = true;

  duals.psi_star.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = assignment.permutation[i];
    duals.psi_star[i] = Dot(scores.row(i), refs.row(k)) - duals.psi[k];
  }

  const DualCheck check = CheckDuals(scores, reference, assignment.permutation, duals);
  if (!check.ok()) {
    Fail(ErrorCode::kInfeasibleDuals,
         "recovered potentials violate feasibility by " +
             std::to_string(check.feasibility_violation) + " (relative)");
  }
  return duals;
}

DualCheck CheckDuals(const ScoreMatrix& scores, const ReferenceRanks& reference,
                     std::span<const std::size_t> permutation, const DualPotentials& duals) {
  const std::size_t n = scores.size();
  const double scale = InnerProductScale(scores, reference);
  DualCheck check;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = scores.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double value = Dot(s, reference.vectors.row(j)) - duals.psi[j];
      const double excess = (value - duals.psi_star[i]) / scale;
      check.feasibility_violation = std::max(check.feasibility_violation, excess);
      if (j == permutation[i]) {
        check.slackness_violation = std::max(check.slackness_violation, std::abs(excess));
      }
    }
  }
  return check;
}

RankMap RankMap::Fit(ScoreMatrix scores, ReferenceRanks reference) {
  Assignment assignment = SolveAssignment(scores, reference);
  DualPotentials duals = RecoverDuals(scores, reference, assignment);
  return RankMap(std::move(reference), std::move(scores), std::move(assignment), std::move(duals));
}

RankMap::RankMap(ReferenceRanks reference, ScoreMatrix scores, Assignment assignment,
                 DualPotentials duals)
    : reference_(std::move(reference)),
      scores_(std::move(scores)),
      assignment_(std::move(assignment)),
      duals_(std::move(duals)) {
  RequireFiniteNonEmpty(scores_, "scores");
  const std::size_t n = scores_.size();
  if (reference_.size() != n || reference_.dim() != scores_.dim() ||
      assignment_.permutation.size() != n || duals_.psi.size() != n ||
      duals_.psi_star.size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "rank map parts have inconsistent sizes");
  }
  InversePermutation(assignment_.permutation);
  scale_ = InnerProductScale(scores_, reference_);
  if (!CheckDuals(scores_, reference_, assignment_.permutation, duals_).ok()) {
    Fail(ErrorCode::kInfeasibleDuals, "potentials are not dual feasible for this matching");
  }
  support_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) support_.emplace_back(CoordinateHash(scores_.row(i)), i);
  std::sort(support_.begin(), support_.end());
}

std::optional<std::size_t> RankMap::SupportIndex(std::span<const double> s) const {
  const std::uint64_t h = CoordinateHash(s);
  auto it = std::lower_bound(support_.begin(), support_.end(), std::pair{h, std::size_t{0}});
  std::optional<std::size_t> found;
  for (; it != support_.end() && it->first == h; ++it) {
    auto row = scores_.row(it->second);
    if (!std::equal(row.begin(), row.end(), s.begin())) continue;
    const std::size_t j = assignment_.permutation[it->second];
    if (!found || j < *found) found = j;
  }
  return found;
}

std::size_t RankMap::ArgmaxIndex(std::span<const double> s) const {
  if (s.size() != dim()) {
    Fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(s.size()) +
                                            ", rank map has " + std::to_string(dim()));
  }
  RequireFinite(s, "query score");
  if (const auto j = SupportIndex(s)) return *j;
  const PointSet& refs = reference_.vectors;
  const std::size_t n = refs.size();
  double best = -std::numeric_limits<double>::infinity();
  double magnitude = scale_;
  for (std::size_t j = 0; j < n; ++j) {
    const double ip = Dot(refs.row(j), s);
    magnitude = std::max(magnitude, std::abs(ip));
    best = std::max(best, ip - duals_.psi[j]);
  }
  const double floor = best - kRelativeTolerance * magnitude;
  // Levels increase with the index, so the last tying index has the largest
  // level.
  for (std::size_t j = n; j-- > 0;) {
    if (Dot(refs.row(j), s) - duals_.psi[j] >= floor) return j;
  }
  return n - 1;  // unreachable for finite input
}

RankEvaluation RankMap::Evaluate(std::span<const double> s) const {
  const std::size_t j = ArgmaxIndex(s);
  auto u = reference_.vectors.row(j);
  return RankEvaluation{std::vector<double>(u.begin(), u.end()), reference_.levels[j], j};
}

double RankMap::MaxValue(std::span<const double> s) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < size(); ++j) {
    best = std::max(best, Dot(reference_.vectors.row(j), s) - duals_.psi[j]);
  }
  return best;
}

RankMap RankMap::ShiftPotentials(double c) const {
  DualPotentials shifted = duals_;
  for (double& p : shifted.psi) p += c;
  for (double& p : shifted.psi_star) p -= c;
  return RankMap(reference_, scores_, assignment_, std::move(shifted));
}

}  // namespace otcp
