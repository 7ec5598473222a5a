#ifndef COLEP_EXPERIMENT_HPP
#define COLEP_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "colep/analysis.hpp"
#include "colep/io.hpp"

namespace colep {

struct ExperimentConfig {
  std::optional<WorldSpec> world;
  std::optional<std::string> calibration_csv;
  std::optional<std::string> test_csv;
  // externally produced per-sample probability intervals (lo_i/hi_i CSV);
  // certify uses them verbatim instead of the smoothing algebra
  std::optional<std::string> calibration_intervals_csv;
  std::optional<KnowledgeBaseSpec> kb;

  double alpha = 0.1;
  std::vector<double> deltas;
  double sigma = 1.0;
  long n_cal = 1000;
  long n_test = 10000;
  long n_mc = 100000;
  std::optional<double> fs_beta;
  long n_trials = 200;
  long n_adv = 500;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

// Parses the config JSON; "world" and "knowledge_base" accept either an
// inline object or a path string. The config seed overrides the world seed.
ExperimentConfig config_from_json(const Json& j);

struct CommandOutcome {
  int exit_code = 0;
  Json summary;
};

// World -> calibration.csv + test.csv in the CalibrationSet format.
CommandOutcome cmd_generate(const ExperimentConfig& cfg);

// Per-class clean and worst-case score lists + thresholds -> calibration.json.
CommandOutcome cmd_calibrate(const ExperimentConfig& cfg);

// Certified worst-case coverage per delta -> certification.json.
CommandOutcome cmd_certify(const ExperimentConfig& cfg);

// Coverage / set-size table for {baseline-CP, COLEP, COLEP-certified} x
// {clean, adversarial} -> simulation.csv + simulation.json.
CommandOutcome cmd_simulate(const ExperimentConfig& cfg);

// Utility diagnostics, effectiveness inequalities and the model-comparison
// Monte Carlo -> analysis.json. Nonzero exit when a check fails.
CommandOutcome cmd_analyze(const ExperimentConfig& cfg);

}  // namespace colep

#endif
