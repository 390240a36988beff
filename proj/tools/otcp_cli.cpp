// otcp command-line front end. Talks to the library only through the C API.
//
//   otcp simulate  --scenario mixture-regression --n-cal 1000 --n-test 2000 --seed 7 --out data/
//   otcp calibrate --in data/calibration.csv --alpha 0.9 --seed 7 --out model.json
//   otcp predict   --artifact model.json --in data/test.csv --out pred.csv
//   otcp evaluate  --in data/calibration.csv --test data/test.csv --seed 7 --out report/

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otcp/otcp.h"

namespace {

struct Flag {
  const char* name;  // long option without dashes
  const char* key;   // configuration key
  const char* help;
};

const std::vector<Flag>& CommonFlags() {
  static const std::vector<Flag> flags = {
      {"seed", "seed", "Random seed, or 'random' to draw one (logged)"},
      {"in", "in", "Input CSV (calibration data or prediction queries)"},
      {"out", "out", "Output file or directory"},
  };
  return flags;
}

std::vector<Flag> FlagsFor(const std::string& command) {
  std::vector<Flag> flags = CommonFlags();
  auto add = [&](std::initializer_list<Flag> more) { flags.insert(flags.end(), more); };
  if (command == "simulate") {
    add({{"scenario", "scenario", "mixture-regression, heteroscedastic or gmm-classification"},
         {"n-cal", "n_cal", "Calibration sample size"},
         {"n-test", "n_test", "Test sample size"},
         {"classes", "classes", "Number of classes (gmm-classification)"},
         {"separation", "separation", "Mean spread multiplier (gmm-classification)"}});
  }
  if (command == "calibrate" || command == "evaluate") {
    add({{"alpha", "alpha", "Coverage level in (0, 1)"},
         {"method", "method", "otcp, otcp-plus, ball, rect, ellipsoid, adaptive-ellipsoid, ip, ms, aps"},
         {"k", "k", "Neighbors for otcp-plus / adaptive-ellipsoid (default ceil(0.1 n))"},
         {"reference", "reference", "Reference ranks: sphere or orthant"},
         {"score", "score", "residual, abs-onehot, ip, ms or aps"},
         {"randomized", "randomized", "Randomized APS scores (true/false)"}});
  }
  if (command == "predict") add({{"artifact", "artifact", "Calibration artifact (JSON)"}});
  if (command == "evaluate") {
    add({{"test", "test", "Test CSV"},
         {"methods", "methods", "Comma-separated methods (default: all for the task)"},
         {"mc-samples", "mc_samples", "Monte-Carlo samples for volumes"},
         {"bins", "bins", "Equal-width x_1 bins for conditional coverage"},
         {"bin-lo", "bin_lo", "Lower end of the binned x_1 range"},
         {"bin-hi", "bin_hi", "Upper end of the binned x_1 range"},
         {"metrics", "metrics", "Subset of coverage,worst-set,worst-slab,volume,bins,sets"}});
  }
  return flags;
}

int Report(otcp_status status) {
  std::fprintf(stderr, "otcp: error: %s\n", otcp_last_error());
  return otcp_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate conformal prediction regions via optimal transport ranks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(otcp_version()));

  const std::vector<std::string> commands = {"simulate", "calibrate", "predict", "evaluate"};
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_path;
  std::map<std::string, std::vector<Flag>> flags;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c, c == "simulate"    ? "Write synthetic calibration/test CSV files"
                                          : c == "calibrate" ? "Fit a calibration artifact"
                                          : c == "predict"   ? "Membership or label sets for queries"
                                                             : "Metric report for one or more methods");
    flags[c] = FlagsFor(c);
    for (const auto& f : flags[c]) sub->add_option(std::string("--") + f.name, values[c][f.key], f.help);
    sub->add_option("--config", config_path[c], "key = value configuration file (flags override it)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& c : commands) {
    CLI::App* sub = app.get_subcommand(c);
    if (!sub->parsed()) continue;
    otcp_config* cfg = nullptr;
    otcp_status st = otcp_config_create(&cfg);
    if (st != OTCP_OK) return Report(st);
    if (!config_path[c].empty()) st = otcp_config_load_file(cfg, config_path[c].c_str());
    for (const auto& f : flags[c]) {
      if (st != OTCP_OK) break;
      if (sub->count(std::string("--") + f.name) > 0) st = otcp_config_set(cfg, f.key, values[c][f.key].c_str());
    }
    if (st == OTCP_OK) st = otcp_run(cfg, c.c_str());
    if (st != OTCP_OK) {
      const int code = Report(st);
      otcp_config_free(cfg);
      return code;
    }
    std::fputs(otcp_config_output(cfg), stdout);
    otcp_config_free(cfg);
  }
  return 0;
}
