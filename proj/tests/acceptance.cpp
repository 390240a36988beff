// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "otcp/artifact.hpp"
#include "otcp/assignment.hpp"
#include "otcp/baselines.hpp"
#include "otcp/conformal.hpp"
#include "otcp/metrics.hpp"
#include "otcp/model.hpp"
#include "otcp/rank_map.hpp"
#include "otcp/scores.hpp"
#include "otcp/synthetic.hpp"
#include "test_util.hpp"

namespace otcp {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stats MeanStderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::shared_ptr<const RankMap> Share(RankMap map) { return std::make_shared<const RankMap>(std::move(map)); }

// 1. Solver cost equals the exhaustive minimum on small instances.
Outcome AssignmentOracle() {
  double worst = 0.0;
  int failures = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 7, d = 1 + (t / 7) % 3;
    const auto s = testing::GaussianPoints(n, d, DeriveSeed(1, t), 1.0 + (t % 5));
    const auto ref = t % 2 ? SphericalReference(n, d, DeriveSeed(2, t)) : PositiveOrthantReference(n, d, DeriveSeed(2, t));
    const double best = testing::BruteForceMinCost(s, ref.vectors);
    const double got = SolveAssignment(s, ref).total_cost;
    const double rel = std::abs(got - best) / std::max(1.0, std::abs(best));
    worst = std::max(worst, rel);
    failures += rel > 1e-9;
  }
  return {failures == 0, Fmt("200 instances, %d mismatches, max relative gap %.2e", failures, worst)};
}

// 2. Calibration rank levels are exactly {1/n, ..., 1}, and each calibration
// score attains the argmax value at its matched rank.
Outcome DistributionFreeness() {
  const std::size_t sizes[] = {10, 100, 1000};
  const std::size_t dims[] = {2, 3, 5};
  const char* kinds[] = {"gaussian", "uniform", "heavy-tailed", "clustered"};
  int failures = 0;
  double worst_gap = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const std::size_t n = sizes[t % 3], d = dims[(t / 3) % 3];
    const std::uint64_t seed = DeriveSeed(20, t);
    PointSet s;
    switch (t % 4) {
      case 0: s = testing::GaussianPoints(n, d, seed); break;
      case 1: s = testing::UniformPoints(n, d, seed); break;
      case 2: s = testing::HeavyTailedPoints(n, d, seed); break;
      default: s = testing::ClusteredPoints(n, d, seed); break;
    }
    const auto map = RankMap::Fit(s, SphericalReference(n, d, DeriveSeed(21, t)));
    std::vector<double> levels;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = map.Evaluate(s.row(i));
      levels.push_back(r.rank_norm);
      const double attained = Dot(s.row(i), map.reference().vectors.row(r.index)) - map.duals().psi[r.index];
      worst_gap = std::max(worst_gap, (map.MaxValue(s.row(i)) - attained) / map.scale());
    }
    std::sort(levels.begin(), levels.end());
    bool exact = true;
    for (std::size_t i = 0; i < n; ++i) exact &= levels[i] == static_cast<double>(i + 1) / n;
    if (!exact || worst_gap > kRelativeTolerance) {
      ++failures;
      std::printf("  criterion 2: %s n=%zu d=%zu failed\n", kinds[t % 4], n, d);
    }
  }
  return {failures == 0, Fmt("50 score sets, %d not exact, max relative argmax gap %.2e", failures, worst_gap)};
}

// 3. d = 1 with the orthant reference reproduces sorting ranks.
Outcome OneDimensionalReduction() {
  int failures = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const std::size_t n = 5 + 25 * t;
    const auto s = t % 2 ? testing::GaussianPoints(n, 1, DeriveSeed(30, t)) : testing::HeavyTailedPoints(n, 1, DeriveSeed(30, t));
    const auto map = RankMap::Fit(s, PositiveOrthantReference(n, 1, t));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s(a, 0) < s(b, 0); });
    for (std::size_t r = 0; r < n; ++r) {
      if (map.Evaluate(s.row(order[r])).rank_norm != static_cast<double>(r + 1) / n) {
        ++failures;
        break;
      }
    }
  }
  return {failures == 0, Fmt("20 instances, %d with a rank differing from the sorting rank", failures)};
}

// 4. Mean coverage over 100 trials lies in [alpha - 3 se, alpha + 2/(n+1) + 3 se].
Outcome CoverageBand() {
  const double alphas[] = {0.8, 0.9, 0.95};
  const std::size_t n_cal = 1000, n_test = 2000, trials = 100;
  std::vector<std::vector<double>> coverage(3);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto data = GenerateMixtureRegression(n_cal, n_test, DeriveSeed(40, t));
    auto map = Share(RankMap::Fit(ResidualScores(data.calibration.fhat, data.calibration.y),
                                  SphericalReference(n_cal, 2, DeriveSeed(41, t))));
    std::vector<std::size_t> ranks(n_test);
    for (std::size_t i = 0; i < n_test; ++i) {
      ranks[i] = map->ArgmaxIndex(SignedResidual(data.test.y.row(i), data.test.fhat.row(i)));
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const std::size_t m = ConformalRankCount(n_cal, alphas[a]);
      coverage[a].push_back(std::count_if(ranks.begin(), ranks.end(), [&](auto r) { return r < m; }) /
                            static_cast<double>(n_test));
    }
  }
  bool pass = true;
  std::string detail;
  for (std::size_t a = 0; a < 3; ++a) {
    const auto st = MeanStderr(coverage[a]);
    const double lo = alphas[a] - 3 * st.stderr_, hi = alphas[a] + 2.0 / (n_cal + 1) + 3 * st.stderr_;
    const bool ok = st.mean >= lo && st.mean <= hi;
    pass &= ok;
    detail += Fmt("%salpha=%.2f mean %.4f se %.4f band [%.4f, %.4f]", a ? "; " : "", alphas[a], st.mean, st.stderr_, lo, hi);
  }
  return {pass, detail};
}

// 5. Member count among calibration scores equals the threshold on every region.
Outcome ExactMass() {
  int regions = 0, failures = 0;
  auto check = [&](const QuantileRegion& region) {
    const auto& s = region.rank_map().scores();
    std::size_t members = 0;
    for (std::size_t i = 0; i < s.size(); ++i) members += region.Contains(s.row(i));
    ++regions;
    failures += members != region.threshold_count();
  };
  const double alphas[] = {0.5, 0.8, 0.9, 0.95};
  for (std::uint64_t t = 0; t < 3; ++t) {
    for (auto kind : {ReferenceKind::kSpherical, ReferenceKind::kPositiveOrthant}) {
      const auto mix = GenerateMixtureRegression(500, 1, DeriveSeed(50, t));
      const auto het = GenerateHeteroscedastic(500, 1, DeriveSeed(51, t));
      GmmClassificationOptions opt;
      opt.num_classes = 3 + t;
      const auto gmm = GenerateGmmClassification(500, 1, opt, DeriveSeed(52, t));
      for (double alpha : alphas) {
        check(FitMarginalRegression(mix.calibration.fhat, mix.calibration.y, alpha, t, kind).region());
        check(FitMarginalRegression(het.calibration.fhat, het.calibration.y, alpha, t, kind).region());
        check(FitMarginalClassification(gmm.calibration.probs, gmm.calibration.labels, alpha, t, kind).region());
      }
    }
  }
  // Local regions of the conditional predictor.
  const auto het = GenerateHeteroscedastic(1000, 20, 53);
  const auto cond = ConditionalPredictor::Fit(het.calibration.features,
                                              ResidualScores(het.calibration.fhat, het.calibration.y),
                                              {100, 0.9, 53, true});
  for (std::size_t i = 0; i < 20; ++i) check(cond.RegionAt(het.test.features.row(i)));
  return {failures == 0, Fmt("%d regions over 3 scenarios, 2 references, 4 levels plus 20 local regions; %d mismatches",
                             regions, failures)};
}

// 6. OT-CP volume below the ellipsoid and hyperrectangle volumes.
Outcome VolumeOrdering() {
  const auto data = GenerateMixtureRegression(1000, 1, 60);
  const auto res = ResidualScores(data.calibration.fhat, data.calibration.y);
  const auto otcp = MarginalPredictor::Fit(ScoreKind::kResidual, res, 0.9, ReferenceKind::kSpherical, 60);
  const auto ell = EllipsoidRegion::Fit(res, 0.9);
  const auto rect = HyperrectRegion::Fit(res, 0.9);
  const Box box = BoundingBox(res, 0.1);
  const std::size_t samples = 1000000;
  const auto v_ot = RegionVolumeMonteCarlo([&](auto s) { return otcp.Contains(s); }, box, samples, 61);
  const auto v_el = RegionVolumeMonteCarlo([&](auto s) { return ell.Contains(s); }, box, samples, 62);
  const auto v_re = RegionVolumeMonteCarlo([&](auto s) { return rect.Contains(s); }, box, samples, 63);
  auto separated = [](const VolumeEstimate& a, const VolumeEstimate& b) {
    return b.estimate - a.estimate > 3.0 * std::hypot(a.stderr_, b.stderr_);
  };
  return {separated(v_ot, v_el) && separated(v_ot, v_re),
          Fmt("OT-CP %.2f +- %.2f, ellipsoid %.2f +- %.2f, hyperrect %.2f +- %.2f", v_ot.estimate, v_ot.stderr_,
              v_el.estimate, v_el.stderr_, v_re.estimate, v_re.stderr_)};
}

// 7. Per-bin coverage of OT-CP+ within [0.87, 0.93]; marginal OT-CP leaves it.
Outcome ConditionalCoverage() {
  const std::size_t n_cal = 2000, n_test = 200, trials = 50, bins = 4;
  std::vector<std::size_t> hits_plus(bins, 0), hits_marg(bins, 0), counts(bins, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto data = GenerateHeteroscedastic(n_cal, n_test, DeriveSeed(70, t));
    const auto res = ResidualScores(data.calibration.fhat, data.calibration.y);
    const auto plus = ConditionalPredictor::Fit(data.calibration.features, res, {200, 0.9, DeriveSeed(71, t), true});
    const auto marg = MarginalPredictor::Fit(ScoreKind::kResidual, res, 0.9, ReferenceKind::kSpherical, DeriveSeed(72, t));
    std::vector<std::uint8_t> cp(n_test), cm(n_test);
    std::vector<double> x(n_test);
    for (std::size_t i = 0; i < n_test; ++i) {
      const auto xi = data.test.features.row(i), f = data.test.fhat.row(i), y = data.test.y.row(i);
      x[i] = xi[0];
      cp[i] = plus.ContainsRegression(xi, f, y);
      cm[i] = marg.ContainsRegression(f, y);
    }
    const auto bp = BinnedCoverage(x, cp, bins, 0.0, 2.0);
    const auto bm = BinnedCoverage(x, cm, bins, 0.0, 2.0);
    for (std::size_t b = 0; b < bins; ++b) {
      counts[b] += bp[b].count;
      hits_plus[b] += static_cast<std::size_t>(std::llround(bp[b].coverage * bp[b].count));
      hits_marg[b] += static_cast<std::size_t>(std::llround(bm[b].coverage * bm[b].count));
    }
  }
  bool plus_in = true, marg_out = false;
  std::string plus_s, marg_s;
  for (std::size_t b = 0; b < bins; ++b) {
    const double p = static_cast<double>(hits_plus[b]) / counts[b];
    const double m = static_cast<double>(hits_marg[b]) / counts[b];
    plus_in &= p >= 0.87 && p <= 0.93;
    marg_out |= m < 0.87 || m > 0.93;
    plus_s += Fmt("%s%.3f", b ? " " : "", p);
    marg_s += Fmt("%s%.3f", b ? " " : "", m);
  }
  return {plus_in && marg_out, "OT-CP+ bins [" + plus_s + "], marginal OT-CP bins [" + marg_s + "]"};
}

// 8. ||abs-onehot||_1 = 2 IP.
Outcome AbsOneHotIdentity() {
  Rng rng(80);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t K = 2 + rng.Index(19);
    std::vector<double> pi(K);
    double sum = 0.0;
    for (double& p : pi) sum += (p = rng.Exponential());
    for (double& p : pi) p /= sum;
    const std::size_t y = rng.Index(K);
    const auto s = AbsOneHotScore(y, pi);
    double l1 = 0.0;
    for (double v : s) l1 += std::abs(v);
    worst = std::max(worst, std::abs(l1 - 2.0 * InverseProbabilityScore(y, pi)));
  }
  return {worst <= 1e-12, Fmt("10000 pairs, max |l1 - 2 IP| = %.2e", worst)};
}

// 9. GMM classification: OT-CP coverage, set size and informativeness vs APS.
Outcome ClassificationSets() {
  const std::size_t trials = 20, n_cal = 1000, n_test = 2000;
  std::vector<double> cov, size_ot, size_aps, inf_ot, inf_aps;
  for (std::uint64_t t = 0; t < trials; ++t) {
    GmmClassificationOptions opt;
    const auto data = GenerateGmmClassification(n_cal, n_test, opt, DeriveSeed(90, t));
    const auto ot = FitMarginalClassification(data.calibration.probs, data.calibration.labels, 0.9, DeriveSeed(91, t));
    const auto aps = ScalarScorePredictor::Fit(ScalarScoreKind::kAdaptive, data.calibration.probs,
                                               data.calibration.labels, 0.9);
    std::vector<std::vector<std::size_t>> so, sa;
    for (std::size_t i = 0; i < n_test; ++i) {
      so.push_back(ot.PredictSet(data.test.probs.row(i)));
      sa.push_back(aps.PredictSet(data.test.probs.row(i)));
    }
    const auto mo = ClassificationSetMetrics(so, data.test.labels, 3);
    const auto ma = ClassificationSetMetrics(sa, data.test.labels, 3);
    cov.push_back(mo.coverage);
    size_ot.push_back(mo.avg_size);
    size_aps.push_back(ma.avg_size);
    inf_ot.push_back(mo.informativeness);
    inf_aps.push_back(ma.informativeness);
  }
  const auto c = MeanStderr(cov);
  const double so = MeanStderr(size_ot).mean, sa = MeanStderr(size_aps).mean;
  const double io = MeanStderr(inf_ot).mean, ia = MeanStderr(inf_aps).mean;
  return {c.mean >= 0.9 - 3 * c.stderr_ && so <= sa && io >= ia,
          Fmt("coverage %.4f (se %.4f); size OT-CP %.3f vs APS %.3f; informativeness %.3f vs %.3f", c.mean,
              c.stderr_, so, sa, io, ia)};
}

// 10. Shifting every potential by a constant leaves the argmax unchanged.
Outcome GaugeInvariance() {
  int changed = 0;
  Rng rng(100);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const std::size_t n = 20 + rng.Index(180), d = 1 + rng.Index(4);
    const auto map = RankMap::Fit(testing::GaussianPoints(n, d, DeriveSeed(101, t)),
                                  SphericalReference(n, d, DeriveSeed(102, t)));
    const auto shifted = map.ShiftPotentials(rng.Uniform(-100.0, 100.0));
    const auto queries = testing::GaussianPoints(100, d, DeriveSeed(103, t), 2.0);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      changed += map.ArgmaxIndex(queries.row(q)) != shifted.ArgmaxIndex(queries.row(q));
    }
  }
  return {changed == 0, Fmt("100 maps x 100 queries, %d argmax changes", changed)};
}

// 11. Save/load reproduces membership decisions.
Outcome ArtifactRoundTrip() {
  const std::size_t queries = 10000;
  int mismatches = 0;
  const auto data = GenerateMixtureRegression(1000, queries, 110);
  ModelParams params;
  params.seed = 110;
  const std::string path = testing::TempPath("acceptance_model.json");
  for (Method m : {Method::kOtcp, Method::kEllipsoid, Method::kHyperrect, Method::kBall}) {
    params.method = m;
    const auto model = CalibratedModel::FitRegression(params, data.calibration);
    SaveArtifact(path, model, Provenance{{}, UtcTimestamp()});
    const auto loaded = LoadArtifact(path);
    for (std::size_t i = 0; i < queries; ++i) {
      const auto x = data.test.features.row(i), f = data.test.fhat.row(i), y = data.test.y.row(i);
      mismatches += model.ContainsRegression(x, f, y) != loaded.ContainsRegression(x, f, y);
    }
  }
  GmmClassificationOptions opt;
  const auto cls = GenerateGmmClassification(1000, queries, opt, 111);
  params.method = Method::kOtcp;
  const auto model = CalibratedModel::FitClassification(params, cls.calibration);
  SaveArtifact(path, model, Provenance{{}, UtcTimestamp()});
  const auto loaded = LoadArtifact(path);
  for (std::size_t i = 0; i < queries; ++i) {
    const auto x = cls.test.features.row(i), pi = cls.test.probs.row(i);
    mismatches += model.PredictSet(x, pi, i) != loaded.PredictSet(x, pi, i);
  }
  return {mismatches == 0, Fmt("otcp, ellipsoid, rect, ball (regression) and otcp (classification) x %zu queries; "
                               "%d mismatches", queries, mismatches)};
}

}  // namespace
}  // namespace otcp

int main(int argc, char** argv) {
  using namespace otcp;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"assignment oracle equivalence", AssignmentOracle},
      {"distribution-freeness of calibration ranks", DistributionFreeness},
      {"1-D reduction to sorting ranks", OneDimensionalReduction},
      {"marginal coverage band", CoverageBand},
      {"exact calibration mass", ExactMass},
      {"efficiency ordering of volumes", VolumeOrdering},
      {"conditional coverage of OT-CP+", ConditionalCoverage},
      {"classification score identity", AbsOneHotIdentity},
      {"classification coverage and set metrics", ClassificationSets},
      {"dual gauge invariance", GaugeInvariance},
      {"artifact round-trip", ArtifactRoundTrip},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[c].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", id, criteria[c].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
