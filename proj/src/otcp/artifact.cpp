#include "otcp/artifact.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <memory>

#include "otcp/error.hpp"

namespace otcp {
namespace {

using nlohmann::json;

json PointsToJson(const PointSet& p) {
  return json{{"rows", p.size()}, {"cols", p.dim()}, {"data", p.data()}};
}

PointSet PointsFromJson(const json& j) {
  const auto n = j.at("rows").get<std::size_t>();
  const auto d = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != n * d) Fail(ErrorCode::kMalformedData, "point block size does not match its shape");
  return PointSet(n, d, std::move(data));
}

// JSON has no infinities; unbounded interval ends are stored as null.
json BoundToJson(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double BoundFromJson(const json& j, double if_null) {
  return j.is_null() ? if_null : j.get<double>();
}

json MatrixToJson(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd MatrixFromJson(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(flat.size()) != r * c) {
    Fail(ErrorCode::kMalformedData, "matrix block size does not match its shape");
  }
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = flat[static_cast<std::size_t>(i * c + k)];
  }
  return m;
}

json StandardizationToJson(const Standardization& s) {
  return json{{"mean", s.mean}, {"scale", s.scale}};
}

Standardization StandardizationFromJson(const json& j) {
  return Standardization{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

json RankMapToJson(const RankMap& map) {
  const auto& ref = map.reference();
  const auto& a = map.assignment();
  const auto& duals = map.duals();
  return json{
      {"reference",
       {{"kind", ReferenceKindName(ref.kind)}, {"seed", ref.seed}, {"vectors", PointsToJson(ref.vectors)}}},
      {"scores", PointsToJson(map.scores())},
      {"assignment",
       {{"permutation", a.permutation},
        {"total_cost", a.total_cost},
        {"row_duals", a.row_duals},
        {"col_duals", a.col_duals}}},
      {"duals", {{"psi", duals.psi}, {"psi_star", duals.psi_star}, {"strict", duals.strict}}},
  };
}

std::shared_ptr<const RankMap> RankMapFromJson(const json& j) {
  const auto& r = j.at("reference");
  ReferenceRanks reference =
      ReferenceFromVectors(ParseReferenceKind(r.at("kind").get<std::string>()),
                           r.at("seed").get<std::uint64_t>(), PointsFromJson(r.at("vectors")));
  const auto& a = j.at("assignment");
  Assignment assignment{a.at("permutation").get<std::vector<std::size_t>>(),
                        a.at("total_cost").get<double>(), a.at("row_duals").get<std::vector<double>>(),
                        a.at("col_duals").get<std::vector<double>>()};
  const auto& d = j.at("duals");
  DualPotentials duals{d.at("psi").get<std::vector<double>>(), d.at("psi_star").get<std::vector<double>>(),
                       d.at("strict").get<bool>()};
  return std::make_shared<const RankMap>(std::move(reference), PointsFromJson(j.at("scores")),
                                         std::move(assignment), std::move(duals));
}

json BodyToJson(const CalibratedModel::Body& body) {
  return std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, MarginalPredictor>) {
          return json{{"score", ScoreKindName(b.score_kind())},
                      {"threshold_count", b.region().threshold_count()},
                      {"beta", b.region().nominal_level()},
                      {"rank_map", RankMapToJson(b.region().rank_map())}};
        } else if constexpr (std::is_same_v<T, ConditionalPredictor>) {
          return json{{"features", PointsToJson(b.index().features())},
                      {"standardization", StandardizationToJson(b.index().standardization())},
                      {"scores", PointsToJson(b.scores())},
                      {"k", b.options().k},
                      {"threshold_count", b.threshold_count()}};
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          return json{{"radius", b.radius()}};
        } else if constexpr (std::is_same_v<T, HyperrectRegion>) {
          json lo = json::array(), hi = json::array();
          for (const auto& iv : b.intervals()) {
            lo.push_back(BoundToJson(iv.lo));
            hi.push_back(BoundToJson(iv.hi));
          }
          return json{{"lo", lo}, {"hi", hi}};
        } else if constexpr (std::is_same_v<T, EllipsoidRegion>) {
          return json{{"center", std::vector<double>(b.center().data(), b.center().data() + b.center().size())},
                      {"covariance", MatrixToJson(b.covariance())},
                      {"radius", b.radius()}};
        } else if constexpr (std::is_same_v<T, AdaptiveEllipsoidPredictor>) {
          return json{{"features", PointsToJson(b.index().features())},
                      {"standardization", StandardizationToJson(b.index().standardization())},
                      {"residuals", PointsToJson(b.residuals())},
                      {"k", b.k()},
                      {"radius", b.radius()}};
        } else {
          return json{{"score", ScalarScoreKindName(b.kind())},
                      {"threshold", b.threshold()},
                      {"randomized", b.randomized()},
                      {"seed", b.seed()}};
        }
      },
      body);
}

CalibratedModel::Body BodyFromJson(const ModelParams& params, const json& j) {
  switch (params.method) {
    case Method::kOtcp: {
      const auto score = j.at("score").get<std::string>();
      const ScoreKind kind = score == ScoreKindName(ScoreKind::kResidual) ? ScoreKind::kResidual
                                                                          : ScoreKind::kAbsOneHot;
      return MarginalPredictor(kind, params.alpha,
                               QuantileRegion::WithThreshold(RankMapFromJson(j.at("rank_map")),
                                                             j.at("threshold_count").get<std::size_t>(),
                                                             j.at("beta").get<double>()));
    }
    case Method::kOtcpPlus: {
      ConditionalOptions opt{j.at("k").get<std::size_t>(), params.alpha, params.seed, params.standardize};
      KnnIndex index(PointsFromJson(j.at("features")), StandardizationFromJson(j.at("standardization")));
      return ConditionalPredictor(std::move(index), PointsFromJson(j.at("scores")), opt);
    }
    case Method::kBall: return BallRegion(j.at("radius").get<double>());
    case Method::kHyperrect: {
      const auto& lo = j.at("lo");
      const auto& hi = j.at("hi");
      if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size()) {
        Fail(ErrorCode::kMalformedData, "interval bounds differ in length");
      }
      std::vector<Interval> iv(lo.size());
      const double inf = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < iv.size(); ++k) iv[k] = {BoundFromJson(lo[k], -inf), BoundFromJson(hi[k], inf)};
      return HyperrectRegion(std::move(iv));
    }
    case Method::kEllipsoid: {
      const auto c = j.at("center").get<std::vector<double>>();
      Eigen::VectorXd center = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
      return EllipsoidRegion(std::move(center), MatrixFromJson(j.at("covariance")), j.at("radius").get<double>());
    }
    case Method::kAdaptiveEllipsoid: {
      KnnIndex index(PointsFromJson(j.at("features")), StandardizationFromJson(j.at("standardization")));
      return AdaptiveEllipsoidPredictor(std::move(index), PointsFromJson(j.at("residuals")),
                                        j.at("k").get<std::size_t>(), j.at("radius").get<double>());
    }
    case Method::kInverseProbability:
    case Method::kMargin:
    case Method::kAdaptive: {
      const auto score = j.at("score").get<std::string>();
      ScalarScoreKind kind = ScalarScoreKind::kAdaptive;
      for (auto k : {ScalarScoreKind::kInverseProbability, ScalarScoreKind::kMargin, ScalarScoreKind::kAdaptive}) {
        if (ScalarScoreKindName(k) == score) kind = k;
      }
      return ScalarScorePredictor(kind, j.at("threshold").get<double>(), j.at("randomized").get<bool>(),
                                  j.at("seed").get<std::uint64_t>());
    }
  }
  Fail(ErrorCode::kMalformedData, "unknown method in artifact");
}

}  // namespace

std::string ContentDigest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json ArtifactToJson(const CalibratedModel& model, const Provenance& provenance) {
  const ModelParams& p = model.params();
  json inputs = json::array();
  for (const auto& [path, digest] : provenance.inputs) inputs.push_back({{"path", path}, {"fnv1a64", digest}});
  return json{
      {"format", kArtifactFormat},
      {"version", kArtifactVersion},
      {"method", MethodName(p.method)},
      {"task", model.task() == DataKind::kRegression ? "regression" : "classification"},
      {"params",
       {{"alpha", p.alpha},
        {"seed", p.seed},
        {"k", p.k},
        {"reference", ReferenceKindName(p.reference)},
        {"reference_set", p.reference_set},
        {"randomized", p.randomized},
        {"standardize", p.standardize}}},
      {"shape", {{"features", model.features()}, {"outputs", model.outputs()}, {"n", model.n_calibration()}}},
      {"threshold_count", model.threshold_count()},
      {"model", BodyToJson(model.body())},
      {"provenance", {{"inputs", inputs}, {"created", provenance.created}}},
  };
}

CalibratedModel ArtifactFromJson(const json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kArtifactFormat) {
    Fail(ErrorCode::kVersionMismatch, "not a calibration artifact");
  }
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != kArtifactVersion) {
    Fail(ErrorCode::kVersionMismatch, "artifact version " + (j.contains("version") ? j.at("version").dump() : "?") +
                                          " is not supported (expected " + std::to_string(kArtifactVersion) + ")");
  }
  try {
    ModelParams p;
    p.method = ParseMethod(j.at("method").get<std::string>());
    const auto& jp = j.at("params");
    p.alpha = jp.at("alpha").get<double>();
    p.seed = jp.at("seed").get<std::uint64_t>();
    p.k = jp.at("k").get<std::size_t>();
    p.reference = ParseReferenceKind(jp.at("reference").get<std::string>());
    p.reference_set = jp.at("reference_set").get<bool>();
    p.randomized = jp.at("randomized").get<bool>();
    p.standardize = jp.at("standardize").get<bool>();
    const auto task_name = j.at("task").get<std::string>();
    if (task_name != "regression" && task_name != "classification") {
      Fail(ErrorCode::kMalformedData, "unknown task '" + task_name + "'");
    }
    const DataKind task = task_name == "regression" ? DataKind::kRegression : DataKind::kClassification;
    const auto& shape = j.at("shape");
    return CalibratedModel(p, task, shape.at("features").get<std::size_t>(),
                           shape.at("outputs").get<std::size_t>(), shape.at("n").get<std::size_t>(),
                           BodyFromJson(p, j.at("model")));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kMalformedData, std::string("artifact field error: ") + e.what());
  }
}

std::string SerializeArtifact(const CalibratedModel& model, const Provenance& provenance) {
  return ArtifactToJson(model, provenance).dump(1) + "\n";
}

CalibratedModel ParseArtifact(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kMalformedData, std::string("artifact is not valid JSON: ") + e.what());
  }
  return ArtifactFromJson(j);
}

void SaveArtifact(const std::string& path, const CalibratedModel& model, const Provenance& provenance) {
  WriteTextFileAtomic(path, SerializeArtifact(model, provenance));
}

CalibratedModel LoadArtifact(const std::string& path) { return ParseArtifact(ReadTextFile(path)); }

}  // namespace otcp
