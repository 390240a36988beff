// Exercises the shared library through its C header only.
#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "otcp/otcp.h"

namespace {

std::vector<double> Normals(std::size_t count, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(count);
  for (double& x : v) x = normal(gen);
  return v;
}

std::string TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "otcp_capi" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_GT(std::strlen(otcp_version()), 0u);
  EXPECT_STREQ(otcp_status_string(OTCP_OK), "ok");
  EXPECT_GT(std::strlen(otcp_status_string(OTCP_CALIBRATION_TOO_SMALL)), 0u);
  EXPECT_EQ(otcp_exit_code(OTCP_OK), 0);
  EXPECT_EQ(otcp_exit_code(OTCP_INVALID_CONFIG), 2);
  EXPECT_EQ(otcp_exit_code(OTCP_IO), 3);
  EXPECT_EQ(otcp_exit_code(OTCP_CALIBRATION_TOO_SMALL), 4);
  EXPECT_EQ(otcp_exit_code(OTCP_MALFORMED_DATA), 5);
  EXPECT_EQ(otcp_exit_code(OTCP_DIMENSION_MISMATCH), 6);
}

TEST(CApi, RankMapAndRegion) {
  const std::size_t n = 50, d = 2;
  otcp_reference* ref = nullptr;
  ASSERT_EQ(otcp_reference_create(OTCP_REFERENCE_SPHERE, n, d, 3, &ref), OTCP_OK);
  EXPECT_EQ(otcp_reference_size(ref), n);
  EXPECT_EQ(otcp_reference_dim(ref), d);

  const auto scores = Normals(n * d, 4);
  otcp_rank_map* map = nullptr;
  ASSERT_EQ(otcp_rank_map_fit(scores.data(), n, d, ref, &map), OTCP_OK);
  std::vector<std::size_t> perm(n);
  ASSERT_EQ(otcp_rank_map_permutation(map, perm.data()), OTCP_OK);
  std::vector<int> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t index = 0;
    double norm = 0.0;
    ASSERT_EQ(otcp_rank_map_evaluate(map, &scores[i * d], d, &index, &norm, nullptr), OTCP_OK);
    EXPECT_EQ(index, perm[i]);
    EXPECT_EQ(norm, static_cast<double>(index + 1) / n);
    seen[index]++;
  }
  for (int c : seen) EXPECT_EQ(c, 1);

  double cost = 0.0;
  EXPECT_EQ(otcp_rank_map_total_cost(map, &cost), OTCP_OK);
  EXPECT_GT(cost, 0.0);
  std::vector<double> psi(n), psi_star(n);
  EXPECT_EQ(otcp_rank_map_potentials(map, psi.data(), psi_star.data()), OTCP_OK);

  otcp_rank_map* shifted = nullptr;
  ASSERT_EQ(otcp_rank_map_shift(map, -7.5, &shifted), OTCP_OK);
  const auto queries = Normals(400 * d, 5);
  for (std::size_t q = 0; q < 400; ++q) {
    std::size_t a = 0, b = 0;
    otcp_rank_map_evaluate(map, &queries[q * d], d, &a, nullptr, nullptr);
    otcp_rank_map_evaluate(shifted, &queries[q * d], d, &b, nullptr, nullptr);
    EXPECT_EQ(a, b);
  }

  otcp_region* region = nullptr;
  ASSERT_EQ(otcp_region_build(map, 0.5, &region), OTCP_OK);
  EXPECT_EQ(otcp_region_threshold_count(region), 25u);
  int members = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int m = 0;
    ASSERT_EQ(otcp_region_contains(region, &scores[i * d], d, &m), OTCP_OK);
    members += m;
  }
  EXPECT_EQ(members, 25);

  int m = 0;
  const double bad[3] = {0, 0, 0};
  EXPECT_EQ(otcp_region_contains(region, bad, 3, &m), OTCP_DIMENSION_MISMATCH);
  EXPECT_GT(std::strlen(otcp_last_error()), 0u);
  otcp_region* too_big = nullptr;
  EXPECT_EQ(otcp_region_build(map, 1.5, &too_big), OTCP_LEVEL_OUT_OF_RANGE);
  EXPECT_EQ(too_big, nullptr);

  otcp_region_free(region);
  otcp_rank_map_free(shifted);
  otcp_rank_map_free(map);
  otcp_reference_free(ref);
}

TEST(CApi, NullArgumentsAreRejected) {
  otcp_reference* ref = nullptr;
  EXPECT_EQ(otcp_reference_create(OTCP_REFERENCE_SPHERE, 5, 2, 0, nullptr), OTCP_INVALID_ARGUMENT);
  EXPECT_EQ(otcp_reference_create(OTCP_REFERENCE_SPHERE, 5, 0, 0, &ref), OTCP_INVALID_DIMENSION);
  EXPECT_EQ(otcp_rank_map_fit(nullptr, 5, 2, nullptr, nullptr), OTCP_INVALID_ARGUMENT);
  otcp_reference_free(nullptr);
  otcp_rank_map_free(nullptr);
  otcp_predictor_free(nullptr);
}

TEST(CApi, RegressionPredictorSaveLoad) {
  const std::size_t n = 200, d = 2;
  const auto noise = Normals(n * d, 6);
  std::vector<double> fhat(n * d, 1.0), y(n * d);
  for (std::size_t i = 0; i < n * d; ++i) y[i] = fhat[i] + noise[i];

  otcp_params params;
  otcp_params_init(&params);
  EXPECT_EQ(params.alpha, 0.9);
  EXPECT_EQ(params.reference, OTCP_REFERENCE_DEFAULT);
  params.seed = 9;
  otcp_predictor* pred = nullptr;
  ASSERT_EQ(otcp_predictor_fit_regression(&params, nullptr, 0, fhat.data(), y.data(), n, d, &pred),
            OTCP_OK)
      << otcp_last_error();
  EXPECT_EQ(otcp_predictor_threshold_count(pred), 181u);

  const auto path = TempDir("reg") + "/model.json";
  ASSERT_EQ(otcp_predictor_save(pred, path.c_str()), OTCP_OK);
  otcp_predictor* loaded = nullptr;
  ASSERT_EQ(otcp_predictor_load(path.c_str(), &loaded), OTCP_OK);
  const auto candidates = Normals(2000 * d, 7);
  const double origin[2] = {0.0, 0.0};
  int covered = 0;
  for (std::size_t q = 0; q < 2000; ++q) {
    int a = 0, b = 0;
    ASSERT_EQ(otcp_predictor_contains(pred, nullptr, origin, &candidates[q * d], &a), OTCP_OK);
    ASSERT_EQ(otcp_predictor_contains(loaded, nullptr, origin, &candidates[q * d], &b), OTCP_OK);
    EXPECT_EQ(a, b);
    covered += a;
  }
  EXPECT_NEAR(covered / 2000.0, 0.9, 0.05);

  otcp_predictor* missing = nullptr;
  EXPECT_EQ(otcp_predictor_load("/nonexistent/model.json", &missing), OTCP_IO);
  params.alpha = 0.999;
  otcp_predictor* small = nullptr;
  EXPECT_EQ(otcp_predictor_fit_regression(&params, nullptr, 0, fhat.data(), y.data(), 50, d, &small),
            OTCP_CALIBRATION_TOO_SMALL);
  otcp_predictor_free(loaded);
  otcp_predictor_free(pred);
}

TEST(CApi, ClassificationSets) {
  const std::size_t n = 300, K = 3;
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> probs(n * K);
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += (probs[i * K + k] = unif(gen) + (k == i % K ? 2.0 : 0.0));
    for (std::size_t k = 0; k < K; ++k) probs[i * K + k] /= sum;
    labels[i] = i % K;
  }
  for (int method : {OTCP_METHOD_OTCP, OTCP_METHOD_IP, OTCP_METHOD_MS, OTCP_METHOD_APS}) {
    otcp_params params;
    otcp_params_init(&params);
    params.method = static_cast<otcp_method>(method);
    otcp_predictor* pred = nullptr;
    ASSERT_EQ(otcp_predictor_fit_classification(&params, nullptr, 0, probs.data(), labels.data(), n, K, &pred),
              OTCP_OK)
        << otcp_last_error();
    unsigned char in_set[3];
    std::size_t size = 0;
    ASSERT_EQ(otcp_predictor_predict_set(pred, nullptr, &probs[0], 0, in_set, &size), OTCP_OK);
    EXPECT_EQ(size, static_cast<std::size_t>(in_set[0] + in_set[1] + in_set[2]));
    otcp_predictor_free(pred);
  }
  labels[5] = 7;
  otcp_params params;
  otcp_params_init(&params);
  otcp_predictor* bad = nullptr;
  EXPECT_EQ(otcp_predictor_fit_classification(&params, nullptr, 0, probs.data(), labels.data(), n, K, &bad),
            OTCP_INVALID_LABEL);
}

TEST(CApi, ConfigWorkflow) {
  const auto dir = TempDir("workflow");
  otcp_config* cfg = nullptr;
  ASSERT_EQ(otcp_config_create(&cfg), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "scenario", "mixture-regression"), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "n_cal", "200"), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "n_test", "50"), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "seed", "11"), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "out", dir.c_str()), OTCP_OK);
  EXPECT_EQ(otcp_config_set(cfg, "alpha", "abc"), OTCP_INVALID_CONFIG);
  EXPECT_EQ(otcp_config_set(cfg, "no_such_key", "1"), OTCP_INVALID_CONFIG);
  ASSERT_EQ(otcp_run(cfg, "simulate"), OTCP_OK) << otcp_last_error();
  EXPECT_TRUE(std::filesystem::exists(dir + "/calibration.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir + "/test.csv"));

  otcp_config* cal = nullptr;
  ASSERT_EQ(otcp_config_create(&cal), OTCP_OK);
  otcp_config_set(cal, "in", (dir + "/calibration.csv").c_str());
  otcp_config_set(cal, "out", (dir + "/model.json").c_str());
  otcp_config_set(cal, "seed", "11");
  ASSERT_EQ(otcp_run(cal, "calibrate"), OTCP_OK) << otcp_last_error();
  EXPECT_NE(std::string(otcp_config_output(cal)).find("threshold_count=181"), std::string::npos);
  EXPECT_EQ(otcp_run(cal, "dance"), OTCP_INVALID_CONFIG);
  otcp_config_free(cal);
  otcp_config_free(cfg);
}

}  // namespace
