#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "otcp/error.hpp"
#include "otcp/model.hpp"
#include "otcp/synthetic.hpp"

namespace otcp {

// Settings shared by the four commands. Populated from an optional
// key=value file and then from command-line flags; later Set() calls win.
struct RunConfig {
  ModelParams params;
  bool method_set = false;
  std::optional<std::string> score;    // residual, abs-onehot, ip, ms, aps
  std::optional<std::uint64_t> seed;   // required by simulate/calibrate/evaluate
  bool seed_random = false;            // seed was drawn because "random" was given
  std::vector<Method> methods;         // evaluate; empty means all methods for the task
  std::string in;                      // calibration data or prediction queries
  std::string test;                    // evaluate: test data
  std::string out;                     // output directory or file
  std::string artifact;                // predict: calibration artifact
  Scenario scenario = Scenario::kMixtureRegression;
  std::size_t n_cal = 1000;
  std::size_t n_test = 2000;
  GmmClassificationOptions gmm;
  std::size_t mc_samples = 100000;
  std::size_t bins = 4;
  std::optional<double> bin_lo, bin_hi;  // default: range of the test x_1 column
  std::size_t worst_sets = 5;
  double worst_set_fraction = 0.1;
  std::size_t local_volume_queries = 10;
  std::set<std::string> metrics;  // empty means all

  // Throws InvalidConfig on unknown keys or unparsable values.
  void Set(std::string_view key, std::string_view value);
  // Lines "key = value"; '#' starts a comment. Io if unreadable.
  void LoadFile(const std::string& path);

  std::uint64_t RequireSeed() const;
  bool WantsMetric(std::string_view name) const;
};

// Each command returns a short machine-readable summary (key=value lines)
// and logs progress to standard error.
std::string RunSimulate(const RunConfig& cfg);
std::string RunCalibrate(const RunConfig& cfg);
std::string RunPredict(const RunConfig& cfg);
std::string RunEvaluate(const RunConfig& cfg);

// Process exit status for a library error: 2 configuration, 3 I/O,
// 4 calibration too small, 5 malformed data, 6 dimension mismatch, 1 other.
int ExitCodeFor(ErrorCode code);

}  // namespace otcp
