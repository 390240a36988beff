#include "otcp/workflow.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "otcp/artifact.hpp"
#include "otcp/csv.hpp"
#include "otcp/metrics.hpp"
#include "otcp/parallel.hpp"
#include "otcp/scores.hpp"

namespace otcp {
namespace {

using nlohmann::json;

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  Fail(ErrorCode::kInvalidConfig, "invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <class T>
T ParseInteger(std::string_view key, std::string_view value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) BadValue(key, value);
  return v;
}

double ParseReal(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
    BadValue(key, value);
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  BadValue(key, value);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto c = s.find(',');
    auto item = TrimView(s.substr(0, c));
    if (!item.empty()) out.push_back(item);
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

void Log(const std::string& msg) { std::cerr << "otcp: " << msg << '\n'; }

void RequireAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    Fail(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1), got " + FormatDouble(alpha));
  }
}

// Applies --score to the method choice for a given task.
ModelParams ResolveParams(const RunConfig& cfg, DataKind task) {
  ModelParams p = cfg.params;
  RequireAlpha(p.alpha);
  if (cfg.score) {
    const std::string& s = *cfg.score;
    if (s == "ip" || s == "ms" || s == "aps") {
      const Method m = ParseMethod(s);
      if (cfg.method_set && p.method != m) {
        Fail(ErrorCode::kInvalidConfig, "score '" + s + "' conflicts with method '" +
                                            std::string(MethodName(p.method)) + "'");
      }
      p.method = m;
    } else if (s == "residual") {
      if (task != DataKind::kRegression) Fail(ErrorCode::kInvalidConfig, "residual score needs regression data");
    } else if (s == "abs-onehot") {
      if (task != DataKind::kClassification) {
        Fail(ErrorCode::kInvalidConfig, "abs-onehot score needs classification data");
      }
      if (p.method != Method::kOtcp && p.method != Method::kOtcpPlus) {
        Fail(ErrorCode::kInvalidConfig, "abs-onehot score is used by otcp and otcp-plus only");
      }
    } else {
      Fail(ErrorCode::kInvalidConfig, "unknown score '" + s + "'");
    }
  }
  if (p.method == Method::kOtcpPlus && p.reference_set && p.reference != ReferenceKind::kSpherical) {
    Fail(ErrorCode::kInvalidConfig, "otcp-plus uses spherical reference ranks only");
  }
  if (!SupportsTask(p.method, task)) {
    Fail(ErrorCode::kInvalidConfig, "method '" + std::string(MethodName(p.method)) + "' does not apply to " +
                                        (task == DataKind::kRegression ? "regression" : "classification") +
                                        " data");
  }
  return p;
}

std::string RequirePath(const std::string& value, const char* what) {
  if (value.empty()) Fail(ErrorCode::kInvalidConfig, std::string("missing ") + what);
  return value;
}

std::string JoinLabels(const std::vector<std::size_t>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(labels[i] + 1);
  }
  return s;
}

double BinomialStderr(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

struct MetricTable {
  json report = json::object();
  std::string csv;
  std::string method;

  void Add(const std::string& metric, double value, std::optional<double> stderr_ = std::nullopt) {
    report[metric] = value;
    csv += method + ',' + metric + ',' + FormatDouble(value) + ',' + (stderr_ ? FormatDouble(*stderr_) : "") + '\n';
  }
};

// Membership oracle of the score region a model uses at test point q.
std::function<bool(std::span<const double>)> LocalOracle(const CalibratedModel& model,
                                                        std::span<const double> x) {
  if (const auto* c = std::get_if<ConditionalPredictor>(&model.body())) {
    auto region = std::make_shared<QuantileRegion>(c->RegionAt(x));
    return [region](std::span<const double> s) { return region->Contains(s); };
  }
  if (const auto* a = std::get_if<AdaptiveEllipsoidPredictor>(&model.body())) {
    auto region = std::make_shared<EllipsoidRegion>(a->RegionAt(x));
    return [region](std::span<const double> s) { return region->Contains(s); };
  }
  return [&model](std::span<const double> s) { return model.ContainsScore(s); };
}

void EvaluateRegression(const RunConfig& cfg, const CalibratedModel& model, const RegressionData& cal,
                        const RegressionData& test, std::uint64_t seed, MetricTable& t) {
  const std::size_t n = test.size();
  std::vector<std::uint8_t> covered(n);
  ParallelFor(n, [&](std::size_t i) {
    covered[i] = model.ContainsRegression(test.features.row(i), test.fhat.row(i), test.y.row(i)) ? 1 : 0;
  });
  const double cov = MarginalCoverage(covered);
  if (cfg.WantsMetric("coverage")) t.Add("marginal_coverage", cov, BinomialStderr(cov, n));
  const bool has_x = test.features.dim() > 0;
  if (has_x && cfg.WantsMetric("worst-set")) {
    const auto ws = WorstSetCoverage(test.features, covered, cfg.worst_sets, cfg.worst_set_fraction,
                                     DeriveSeed(seed, 101));
    t.Add("worst_set_coverage", ws.worst_coverage);
    t.Add("worst_set_overlap", ws.overlap_fraction);
  }
  if (has_x && cfg.WantsMetric("worst-slab")) {
    t.Add("worst_slab_coverage", WorstSlabCoverage(test.features, covered, {}, DeriveSeed(seed, 102)));
  }
  if (has_x && cfg.WantsMetric("bins")) {
    std::vector<double> x1(n);
    double lo = test.features(0, 0), hi = lo;
    for (std::size_t i = 0; i < n; ++i) {
      x1[i] = test.features(i, 0);
      lo = std::min(lo, x1[i]);
      hi = std::max(hi, x1[i]);
    }
    lo = cfg.bin_lo.value_or(lo);
    hi = cfg.bin_hi.value_or(hi);
    if (hi > lo) {
      json bins = json::array();
      const auto binned = BinnedCoverage(x1, covered, cfg.bins, lo, hi);
      for (std::size_t b = 0; b < binned.size(); ++b) {
        const auto& bc = binned[b];
        bins.push_back({{"lo", bc.lo}, {"hi", bc.hi}, {"count", bc.count}, {"coverage", bc.coverage}});
        if (bc.count > 0) {
          t.csv += t.method + ",coverage_bin_" + std::to_string(b + 1) + ',' + FormatDouble(bc.coverage) + ',' +
                   FormatDouble(BinomialStderr(bc.coverage, bc.count)) + '\n';
        }
      }
      t.report["binned_coverage"] = bins;
    }
  }
  if (cfg.WantsMetric("volume")) {
    const Box box = BoundingBox(ResidualScores(cal.fhat, cal.y), 0.1);
    VolumeEstimate vol;
    if (model.HasGlobalRegion()) {
      vol = RegionVolumeMonteCarlo(LocalOracle(model, {}), box, cfg.mc_samples, DeriveSeed(seed, 103));
    } else {
      // Mean volume of the local regions at the first few test inputs.
      const std::size_t q = std::max<std::size_t>(1, std::min(cfg.local_volume_queries, n));
      const std::size_t per = std::max<std::size_t>(1, cfg.mc_samples / q);
      double sum = 0.0, var = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        const auto v = RegionVolumeMonteCarlo(LocalOracle(model, test.features.row(i)), box, per,
                                              DeriveSeed(DeriveSeed(seed, 104), i));
        sum += v.estimate;
        var += v.stderr_ * v.stderr_;
        vol.samples += v.samples;
      }
      vol.estimate = sum / static_cast<double>(q);
      vol.stderr_ = std::sqrt(var) / static_cast<double>(q);
    }
    t.report["volume"] = {{"estimate", vol.estimate},
                          {"stderr", vol.stderr_},
                          {"samples", vol.samples},
                          {"box_restricted", vol.box_restricted},
                          {"local_mean", !model.HasGlobalRegion()},
                          {"box", {{"lo", box.lo}, {"hi", box.hi}}}};
    t.csv += t.method + ",volume," + FormatDouble(vol.estimate) + ',' + FormatDouble(vol.stderr_) + '\n';
  }
}

void EvaluateClassification(const RunConfig& cfg, const CalibratedModel& model, const ClassificationData& test,
                            std::uint64_t seed, MetricTable& t) {
  const std::size_t n = test.size();
  std::vector<std::vector<std::size_t>> sets(n);
  std::vector<std::uint8_t> covered(n);
  ParallelFor(n, [&](std::size_t i) {
    sets[i] = model.PredictSet(test.features.row(i), test.probs.row(i), i);
    covered[i] = std::find(sets[i].begin(), sets[i].end(), test.labels[i]) != sets[i].end();
  });
  const SetMetrics m = ClassificationSetMetrics(sets, test.labels, test.num_classes());
  if (cfg.WantsMetric("coverage")) t.Add("marginal_coverage", m.coverage, BinomialStderr(m.coverage, n));
  if (cfg.WantsMetric("sets")) {
    t.Add("avg_set_size", m.avg_size);
    t.Add("informativeness", m.informativeness);
    json per = json::array();
    for (std::size_t y = 0; y < m.per_label.size(); ++y) {
      const auto& pl = m.per_label[y];
      per.push_back({{"label", y + 1},
                     {"count", pl.count},
                     {"coverage", pl.coverage},
                     {"avg_set_size", pl.avg_size},
                     {"informativeness", pl.informativeness}});
      if (pl.count == 0) continue;
      const std::string suffix = "_label_" + std::to_string(y + 1);
      t.csv += t.method + ",coverage" + suffix + ',' + FormatDouble(pl.coverage) + ",\n";
      t.csv += t.method + ",avg_set_size" + suffix + ',' + FormatDouble(pl.avg_size) + ",\n";
      t.csv += t.method + ",informativeness" + suffix + ',' + FormatDouble(pl.informativeness) + ",\n";
    }
    t.report["per_label"] = per;
  }
  if (test.features.dim() > 0 && cfg.WantsMetric("worst-set")) {
    const auto ws = WorstSetCoverage(test.features, covered, cfg.worst_sets, cfg.worst_set_fraction,
                                     DeriveSeed(seed, 101));
    t.Add("worst_set_coverage", ws.worst_coverage);
    t.Add("worst_set_overlap", ws.overlap_fraction);
  }
  if (test.features.dim() > 0 && cfg.WantsMetric("worst-slab")) {
    t.Add("worst_slab_coverage", WorstSlabCoverage(test.features, covered, {}, DeriveSeed(seed, 102)));
  }
}

}  // namespace

void RunConfig::Set(std::string_view key, std::string_view value) {
  key = TrimView(key);
  value = TrimView(value);
  if (key == "method") {
    params.method = ParseMethod(value);
    method_set = true;
  } else if (key == "methods") {
    methods.clear();
    for (auto m : SplitList(value)) methods.push_back(ParseMethod(m));
  } else if (key == "alpha") {
    params.alpha = ParseReal(key, value);
    RequireAlpha(params.alpha);
  } else if (key == "seed") {
    if (value == "random") {
      seed = std::random_device{}();
      *seed = (*seed << 32) ^ std::random_device{}();
      seed_random = true;
    } else {
      seed = ParseInteger<std::uint64_t>(key, value);
      seed_random = false;
    }
  } else if (key == "k") {
    params.k = ParseInteger<std::size_t>(key, value);
  } else if (key == "reference") {
    try {
      params.reference = ParseReferenceKind(value);
    } catch (const Error&) {
      BadValue(key, value);
    }
    params.reference_set = true;
  } else if (key == "score") {
    score = std::string(value);
  } else if (key == "randomized") {
    params.randomized = ParseBool(key, value);
  } else if (key == "standardize") {
    params.standardize = ParseBool(key, value);
  } else if (key == "in") {
    in = value;
  } else if (key == "test") {
    test = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "artifact") {
    artifact = value;
  } else if (key == "scenario") {
    scenario = ParseScenario(value);
  } else if (key == "n_cal" || key == "n-cal") {
    n_cal = ParseInteger<std::size_t>(key, value);
  } else if (key == "n_test" || key == "n-test") {
    n_test = ParseInteger<std::size_t>(key, value);
  } else if (key == "classes") {
    gmm.num_classes = ParseInteger<std::size_t>(key, value);
  } else if (key == "separation") {
    gmm.separation = ParseReal(key, value);
  } else if (key == "posterior_scale" || key == "posterior-scale") {
    gmm.posterior_cov_scale = ParseReal(key, value);
  } else if (key == "mc_samples" || key == "mc-samples") {
    mc_samples = ParseInteger<std::size_t>(key, value);
  } else if (key == "bins") {
    bins = ParseInteger<std::size_t>(key, value);
  } else if (key == "bin_lo" || key == "bin-lo") {
    bin_lo = ParseReal(key, value);
  } else if (key == "bin_hi" || key == "bin-hi") {
    bin_hi = ParseReal(key, value);
  } else if (key == "worst_sets" || key == "worst-sets") {
    worst_sets = ParseInteger<std::size_t>(key, value);
  } else if (key == "worst_set_fraction" || key == "worst-set-fraction") {
    worst_set_fraction = ParseReal(key, value);
  } else if (key == "local_volume_queries" || key == "local-volume-queries") {
    local_volume_queries = ParseInteger<std::size_t>(key, value);
  } else if (key == "metrics") {
    static const std::set<std::string, std::less<>> known = {"coverage", "worst-set", "worst-slab",
                                                             "volume", "bins", "sets"};
    metrics.clear();
    for (auto m : SplitList(value)) {
      if (!known.count(m)) BadValue(key, m);
      metrics.emplace(m);
    }
  } else {
    Fail(ErrorCode::kInvalidConfig, "unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::LoadFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = TrimView(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kInvalidConfig, path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto value = TrimView(v.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    Set(v.substr(0, eq), value);
  }
}

std::uint64_t RunConfig::RequireSeed() const {
  if (!seed) Fail(ErrorCode::kInvalidConfig, "a seed is required (pass --seed N or --seed random)");
  if (seed_random) Log("using random seed " + std::to_string(*seed));
  return *seed;
}

bool RunConfig::WantsMetric(std::string_view name) const {
  return metrics.empty() || metrics.count(std::string(name)) > 0;
}

std::string RunSimulate(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.RequireSeed();
  const std::string dir = RequirePath(cfg.out, "output directory (--out)");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  std::string cal_csv, test_csv;
  std::size_t n_cal = 0, n_test = 0;
  switch (cfg.scenario) {
    case Scenario::kMixtureRegression:
    case Scenario::kHeteroscedasticRegression: {
      const auto split = cfg.scenario == Scenario::kMixtureRegression
                             ? GenerateMixtureRegression(cfg.n_cal, cfg.n_test, seed)
                             : GenerateHeteroscedastic(cfg.n_cal, cfg.n_test, seed);
      cal_csv = FormatRegressionCsv(split.calibration);
      test_csv = FormatRegressionCsv(split.test);
      n_cal = split.calibration.size();
      n_test = split.test.size();
      break;
    }
    case Scenario::kGmmClassification: {
      const auto split = GenerateGmmClassification(cfg.n_cal, cfg.n_test, cfg.gmm, seed);
      cal_csv = FormatClassificationCsv(split.calibration);
      test_csv = FormatClassificationCsv(split.test);
      n_cal = split.calibration.size();
      n_test = split.test.size();
      break;
    }
  }
  const auto cal_path = (std::filesystem::path(dir) / "calibration.csv").string();
  const auto test_path = (std::filesystem::path(dir) / "test.csv").string();
  WriteTextFileAtomic(cal_path, cal_csv);
  WriteTextFileAtomic(test_path, test_csv);
  Log("wrote " + cal_path + " and " + test_path);
  return "scenario=" + std::string(ScenarioName(cfg.scenario)) + "\ncalibration_rows=" + std::to_string(n_cal) +
         "\ntest_rows=" + std::to_string(n_test) + "\n";
}

std::string RunCalibrate(const RunConfig& cfg) {
  const std::string in = RequirePath(cfg.in, "calibration file (--in)");
  const std::string out = RequirePath(cfg.out, "artifact path (--out)");
  const std::string text = ReadTextFile(in);
  const DataKind task = ParseHeader(std::string_view(text).substr(0, text.find('\n'))).kind;
  ModelParams params = ResolveParams(cfg, task);
  params.seed = cfg.RequireSeed();
  Log("calibrating " + std::string(MethodName(params.method)) + " at alpha " + FormatDouble(params.alpha));
  const CalibratedModel model = task == DataKind::kRegression
                                    ? CalibratedModel::FitRegression(params, ParseRegressionCsv(text))
                                    : CalibratedModel::FitClassification(params, ParseClassificationCsv(text));
  SaveArtifact(out, model, Provenance{{{in, ContentDigest(text)}}, UtcTimestamp()});
  Log("wrote " + out);
  return "method=" + std::string(MethodName(params.method)) + "\nn=" + std::to_string(model.n_calibration()) +
         "\nthreshold_count=" + std::to_string(model.threshold_count()) + "\n";
}

std::string RunPredict(const RunConfig& cfg) {
  const CalibratedModel model = LoadArtifact(RequirePath(cfg.artifact, "artifact (--artifact)"));
  const std::string text = ReadTextFile(RequirePath(cfg.in, "query file (--in)"));
  const std::string out = RequirePath(cfg.out, "output file (--out)");
  const CsvLayout layout = ParseHeader(std::string_view(text).substr(0, text.find('\n')));
  if (layout.kind != model.task()) {
    Fail(ErrorCode::kDimensionMismatch, "query columns do not match the artifact's task");
  }
  std::string csv;
  std::size_t rows = 0;
  if (model.task() == DataKind::kRegression) {
    const RegressionData q = ParseRegressionCsv(text);
    rows = q.size();
    std::vector<std::uint8_t> member(rows);
    if (q.features.dim() != model.features() || q.y.dim() != model.outputs()) {
      Fail(ErrorCode::kDimensionMismatch, "query shape differs from the calibration data");
    }
    ParallelFor(rows, [&](std::size_t i) {
      member[i] = model.ContainsRegression(q.features.row(i), q.fhat.row(i), q.y.row(i));
    });
    csv = "row,member\n";
    for (std::size_t i = 0; i < rows; ++i) csv += std::to_string(i + 1) + (member[i] ? ",true\n" : ",false\n");
  } else {
    const ClassificationData q = ParseClassificationCsv(text, /*require_label=*/false);
    rows = q.size();
    if (q.features.dim() != model.features() || q.probs.dim() != model.outputs()) {
      Fail(ErrorCode::kDimensionMismatch, "query shape differs from the calibration data");
    }
    std::vector<std::vector<std::size_t>> sets(rows);
    ParallelFor(rows, [&](std::size_t i) { sets[i] = model.PredictSet(q.features.row(i), q.probs.row(i), i); });
    csv = "row,set\n";
    for (std::size_t i = 0; i < rows; ++i) csv += std::to_string(i + 1) + ',' + JoinLabels(sets[i]) + '\n';
  }
  WriteTextFileAtomic(out, csv);
  Log("wrote " + std::to_string(rows) + " predictions to " + out);
  return "rows=" + std::to_string(rows) + "\n";
}

std::string RunEvaluate(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.RequireSeed();
  const std::string cal_text = ReadTextFile(RequirePath(cfg.in, "calibration file (--in)"));
  const std::string test_text = ReadTextFile(RequirePath(cfg.test, "test file (--test)"));
  const std::string dir = RequirePath(cfg.out, "output directory (--out)");
  const DataKind task = ParseHeader(std::string_view(cal_text).substr(0, cal_text.find('\n'))).kind;
  RequireAlpha(cfg.params.alpha);

  std::vector<Method> methods = cfg.methods;
  if (methods.empty()) methods = cfg.method_set ? std::vector<Method>{cfg.params.method} : DefaultMethods(task);

  std::optional<RegressionData> reg_cal, reg_test;
  std::optional<ClassificationData> cls_cal, cls_test;
  std::size_t n_cal = 0, n_test = 0;
  if (task == DataKind::kRegression) {
    reg_cal = ParseRegressionCsv(cal_text);
    reg_test = ParseRegressionCsv(test_text);
    if (reg_test->y.dim() != reg_cal->y.dim() || reg_test->features.dim() != reg_cal->features.dim()) {
      Fail(ErrorCode::kDimensionMismatch, "test data shape differs from calibration data");
    }
    n_cal = reg_cal->size();
    n_test = reg_test->size();
  } else {
    cls_cal = ParseClassificationCsv(cal_text);
    cls_test = ParseClassificationCsv(test_text);
    if (cls_test->probs.dim() != cls_cal->probs.dim() ||
        cls_test->features.dim() != cls_cal->features.dim()) {
      Fail(ErrorCode::kDimensionMismatch, "test data shape differs from calibration data");
    }
    n_cal = cls_cal->size();
    n_test = cls_test->size();
  }

  json report = {{"alpha", cfg.params.alpha},
                 {"seed", seed},
                 {"task", task == DataKind::kRegression ? "regression" : "classification"},
                 {"n_calibration", n_cal},
                 {"n_test", n_test},
                 {"methods", json::array()}};
  std::string csv = "method,metric,value,stderr\n";
  std::string summary;
  for (Method method : methods) {
    RunConfig one = cfg;
    one.params.method = method;
    one.method_set = true;
    if (one.score && (*one.score == "ip" || *one.score == "ms" || *one.score == "aps")) one.score.reset();
    ModelParams params = ResolveParams(one, task);
    params.seed = seed;
    Log("evaluating " + std::string(MethodName(method)));
    MetricTable t;
    t.method = std::string(MethodName(method));
    if (task == DataKind::kRegression) {
      const auto model = CalibratedModel::FitRegression(params, *reg_cal);
      t.report["threshold_count"] = model.threshold_count();
      EvaluateRegression(cfg, model, *reg_cal, *reg_test, seed, t);
    } else {
      const auto model = CalibratedModel::FitClassification(params, *cls_cal);
      t.report["threshold_count"] = model.threshold_count();
      EvaluateClassification(cfg, model, *cls_test, seed, t);
    }
    t.report["method"] = t.method;
    report["methods"].push_back(t.report);
    csv += t.csv;
    summary += "method=" + t.method;
    if (t.report.contains("marginal_coverage")) {
      summary += " marginal_coverage=" + FormatDouble(t.report["marginal_coverage"].get<double>());
    }
    summary += '\n';
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  WriteTextFileAtomic((std::filesystem::path(dir) / "metrics.json").string(), report.dump(1) + "\n");
  WriteTextFileAtomic((std::filesystem::path(dir) / "metrics.csv").string(), csv);
  Log("wrote metrics.json and metrics.csv to " + dir);
  return summary;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kLevelOutOfRange: return 2;
    case ErrorCode::kIo: return 3;
    case ErrorCode::kCalibrationTooSmall:
    case ErrorCode::kNeighborCountTooSmall: return 4;
    case ErrorCode::kMalformedData:
    case ErrorCode::kInvalidLabel:
    case ErrorCode::kNonFiniteInput:
    case ErrorCode::kVersionMismatch: return 5;
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kInvalidDimension: return 6;
    default: return 1;
  }
}

}  // namespace otcp
