#include "otcp/otcp.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "otcp/artifact.hpp"
#include "otcp/conformal.hpp"
#include "otcp/error.hpp"
#include "otcp/model.hpp"
#include "otcp/workflow.hpp"

struct otcp_reference {
  otcp::ReferenceRanks ranks;
};
struct otcp_rank_map {
  std::shared_ptr<const otcp::RankMap> map;
};
struct otcp_region {
  otcp::QuantileRegion region;
};
struct otcp_predictor {
  otcp::CalibratedModel model;
};
struct otcp_config {
  otcp::RunConfig config;
  std::string output;
};

namespace {

thread_local std::string g_last_error;

template <class F>
otcp_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return OTCP_OK;
  } catch (const otcp::Error& e) {
    g_last_error = e.what();
    return static_cast<otcp_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OTCP_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OTCP_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return OTCP_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) otcp::Fail(otcp::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

otcp::PointSet Copy(const double* data, std::size_t n, std::size_t d) {
  if (n * d == 0) return otcp::PointSet(n, d);
  NotNull(data, "data");
  return otcp::PointSet(n, d, std::vector<double>(data, data + n * d));
}

otcp::ReferenceKind ToKind(int kind) {
  if (kind == OTCP_REFERENCE_SPHERE) return otcp::ReferenceKind::kSpherical;
  if (kind == OTCP_REFERENCE_ORTHANT) return otcp::ReferenceKind::kPositiveOrthant;
  otcp::Fail(otcp::ErrorCode::kInvalidArgument, "unknown reference kind " + std::to_string(kind));
}

otcp::ModelParams ToParams(const otcp_params* p) {
  NotNull(p, "params");
  if (p->method < OTCP_METHOD_OTCP || p->method > OTCP_METHOD_APS) {
    otcp::Fail(otcp::ErrorCode::kInvalidArgument, "unknown method");
  }
  otcp::ModelParams m;
  m.method = static_cast<otcp::Method>(p->method);
  m.alpha = p->alpha;
  m.seed = p->seed;
  m.k = p->k;
  if (p->reference != OTCP_REFERENCE_DEFAULT) {
    m.reference = ToKind(p->reference);
    m.reference_set = true;
  }
  m.randomized = p->randomized != 0;
  m.standardize = p->standardize != 0;
  return m;
}

}  // namespace

extern "C" {

const char* otcp_version(void) { return "1.0.0"; }

const char* otcp_status_string(otcp_status status) {
  if (status == OTCP_OK) return "ok";
  if (status == OTCP_INTERNAL) return "internal error";
  const auto name = otcp::ErrorCodeName(static_cast<otcp::ErrorCode>(status));
  return name.data();  // names are string literals
}

const char* otcp_last_error(void) { return g_last_error.c_str(); }

int otcp_exit_code(otcp_status status) {
  if (status == OTCP_OK) return 0;
  if (status == OTCP_INTERNAL) return 1;
  return otcp::ExitCodeFor(static_cast<otcp::ErrorCode>(status));
}

otcp_status otcp_reference_create(otcp_reference_kind kind, size_t n, size_t d, uint64_t seed,
                                  otcp_reference** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new otcp_reference{otcp::MakeReference(ToKind(kind), n, d, seed)};
  });
}

size_t otcp_reference_size(const otcp_reference* ref) { return ref ? ref->ranks.size() : 0; }
size_t otcp_reference_dim(const otcp_reference* ref) { return ref ? ref->ranks.dim() : 0; }

otcp_status otcp_reference_vectors(const otcp_reference* ref, double* out) {
  return Guard([&] {
    NotNull(ref, "reference");
    NotNull(out, "out");
    const auto& data = ref->ranks.vectors.data();
    std::copy(data.begin(), data.end(), out);
  });
}

void otcp_reference_free(otcp_reference* ref) { delete ref; }

otcp_status otcp_rank_map_fit(const double* scores, size_t n, size_t d, const otcp_reference* ref,
                              otcp_rank_map** out) {
  return Guard([&] {
    NotNull(ref, "reference");
    NotNull(out, "out");
    *out = new otcp_rank_map{
        std::make_shared<const otcp::RankMap>(otcp::RankMap::Fit(Copy(scores, n, d), ref->ranks))};
  });
}

otcp_status otcp_rank_map_evaluate(const otcp_rank_map* map, const double* s, size_t d, size_t* index,
                                   double* rank_norm, double* rank_vector) {
  return Guard([&] {
    NotNull(map, "rank map");
    NotNull(s, "score");
    if (d != map->map->dim()) otcp::Fail(otcp::ErrorCode::kDimensionMismatch, "score dimension differs");
    const auto r = map->map->Evaluate({s, d});
    if (index) *index = r.index;
    if (rank_norm) *rank_norm = r.rank_norm;
    if (rank_vector) std::copy(r.rank_vector.begin(), r.rank_vector.end(), rank_vector);
  });
}

otcp_status otcp_rank_map_permutation(const otcp_rank_map* map, size_t* permutation) {
  return Guard([&] {
    NotNull(map, "rank map");
    NotNull(permutation, "permutation");
    const auto& p = map->map->assignment().permutation;
    std::copy(p.begin(), p.end(), permutation);
  });
}

otcp_status otcp_rank_map_potentials(const otcp_rank_map* map, double* psi, double* psi_star) {
  return Guard([&] {
    NotNull(map, "rank map");
    const auto& duals = map->map->duals();
    if (psi) std::copy(duals.psi.begin(), duals.psi.end(), psi);
    if (psi_star) std::copy(duals.psi_star.begin(), duals.psi_star.end(), psi_star);
  });
}

otcp_status otcp_rank_map_total_cost(const otcp_rank_map* map, double* cost) {
  return Guard([&] {
    NotNull(map, "rank map");
    NotNull(cost, "cost");
    *cost = map->map->assignment().total_cost;
  });
}

otcp_status otcp_rank_map_shift(const otcp_rank_map* map, double c, otcp_rank_map** out) {
  return Guard([&] {
    NotNull(map, "rank map");
    NotNull(out, "out");
    *out = new otcp_rank_map{std::make_shared<const otcp::RankMap>(map->map->ShiftPotentials(c))};
  });
}

void otcp_rank_map_free(otcp_rank_map* map) { delete map; }

otcp_status otcp_region_build(const otcp_rank_map* map, double beta, otcp_region** out) {
  return Guard([&] {
    NotNull(map, "rank map");
    NotNull(out, "out");
    *out = new otcp_region{otcp::QuantileRegion::Build(map->map, beta)};
  });
}

otcp_status otcp_region_contains(const otcp_region* region, const double* s, size_t d, int* member) {
  return Guard([&] {
    NotNull(region, "region");
    NotNull(s, "score");
    NotNull(member, "member");
    if (d != region->region.rank_map().dim()) {
      otcp::Fail(otcp::ErrorCode::kDimensionMismatch, "score dimension differs");
    }
    *member = region->region.Contains({s, d}) ? 1 : 0;
  });
}

size_t otcp_region_threshold_count(const otcp_region* region) {
  return region ? region->region.threshold_count() : 0;
}

void otcp_region_free(otcp_region* region) { delete region; }

void otcp_params_init(otcp_params* params) {
  if (!params) return;
  params->method = OTCP_METHOD_OTCP;
  params->alpha = 0.9;
  params->seed = 0;
  params->k = 0;
  params->reference = OTCP_REFERENCE_DEFAULT;
  params->randomized = 0;
  params->standardize = 1;
}

otcp_status otcp_predictor_fit_regression(const otcp_params* params, const double* x, size_t p,
                                          const double* fhat, const double* y, size_t n, size_t d,
                                          otcp_predictor** out) {
  return Guard([&] {
    NotNull(out, "out");
    otcp::RegressionData data{Copy(x, n, p), Copy(fhat, n, d), Copy(y, n, d)};
    *out = new otcp_predictor{otcp::CalibratedModel::FitRegression(ToParams(params), data)};
  });
}

otcp_status otcp_predictor_fit_classification(const otcp_params* params, const double* x, size_t p,
                                              const double* probs, const size_t* labels, size_t n,
                                              size_t num_classes, otcp_predictor** out) {
  return Guard([&] {
    NotNull(out, "out");
    NotNull(labels, "labels");
    otcp::ClassificationData data{Copy(x, n, p), Copy(probs, n, num_classes),
                                  std::vector<std::size_t>(labels, labels + n)};
    for (auto l : data.labels) {
      if (l >= num_classes) otcp::Fail(otcp::ErrorCode::kInvalidLabel, "label out of range");
    }
    *out = new otcp_predictor{otcp::CalibratedModel::FitClassification(ToParams(params), data)};
  });
}

otcp_status otcp_predictor_contains(const otcp_predictor* pred, const double* x, const double* fhat,
                                    const double* y, int* member) {
  return Guard([&] {
    NotNull(pred, "predictor");
    NotNull(fhat, "fhat");
    NotNull(y, "y");
    NotNull(member, "member");
    const auto& m = pred->model;
    if (m.features() > 0) NotNull(x, "x");
    *member = m.ContainsRegression({x, m.features()}, {fhat, m.outputs()}, {y, m.outputs()}) ? 1 : 0;
  });
}

otcp_status otcp_predictor_predict_set(const otcp_predictor* pred, const double* x, const double* pi,
                                       uint64_t query_id, unsigned char* in_set, size_t* size) {
  return Guard([&] {
    NotNull(pred, "predictor");
    NotNull(pi, "pi");
    NotNull(in_set, "in_set");
    const auto& m = pred->model;
    if (m.features() > 0) NotNull(x, "x");
    const auto labels = m.PredictSet({x, m.features()}, {pi, m.outputs()}, query_id);
    std::fill(in_set, in_set + m.outputs(), 0);
    for (auto l : labels) in_set[l] = 1;
    if (size) *size = labels.size();
  });
}

size_t otcp_predictor_threshold_count(const otcp_predictor* pred) {
  return pred ? pred->model.threshold_count() : 0;
}

otcp_status otcp_predictor_save(const otcp_predictor* pred, const char* path) {
  return Guard([&] {
    NotNull(pred, "predictor");
    NotNull(path, "path");
    otcp::SaveArtifact(path, pred->model, otcp::Provenance{{}, otcp::UtcTimestamp()});
  });
}

otcp_status otcp_predictor_load(const char* path, otcp_predictor** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new otcp_predictor{otcp::LoadArtifact(path)};
  });
}

void otcp_predictor_free(otcp_predictor* pred) { delete pred; }

otcp_status otcp_config_create(otcp_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new otcp_config{};
  });
}

otcp_status otcp_config_set(otcp_config* cfg, const char* key, const char* value) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    cfg->config.Set(key, value);
  });
}

otcp_status otcp_config_load_file(otcp_config* cfg, const char* path) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(path, "path");
    cfg->config.LoadFile(path);
  });
}

otcp_status otcp_run(otcp_config* cfg, const char* command) {
  return Guard([&] {
    NotNull(cfg, "config");
    NotNull(command, "command");
    const std::string c = command;
    if (c == "simulate") cfg->output = otcp::RunSimulate(cfg->config);
    else if (c == "calibrate") cfg->output = otcp::RunCalibrate(cfg->config);
    else if (c == "predict") cfg->output = otcp::RunPredict(cfg->config);
    else if (c == "evaluate") cfg->output = otcp::RunEvaluate(cfg->config);
    else otcp::Fail(otcp::ErrorCode::kInvalidConfig, "unknown command '" + c + "'");
  });
}

const char* otcp_config_output(const otcp_config* cfg) { return cfg ? cfg->output.c_str() : ""; }

void otcp_config_free(otcp_config* cfg) { delete cfg; }

}  // extern "C"
