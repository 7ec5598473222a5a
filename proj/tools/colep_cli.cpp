#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "colep/experiment.hpp"

namespace {

// Exit codes: 0 all requested checks passed, 1 check/runtime failure,
// 2 configuration or input-file problem.
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_delta_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void print_error(int code, const std::string& message) {
  colep::Json err;
  err["error"] = {{"code", code}, {"message", message}};
  std::cerr << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COLEP certified learning-reasoning conformal prediction driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string delta_list;
  double alpha = -1.0, sigma = -1.0, fs_beta = -1.0;
  long n_mc = -1;
  long long seed = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config JSON");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--alpha", alpha, "miscoverage level");
    sub->add_option("--delta", delta_list, "perturbation radius, comma-separated list");
    sub->add_option("--sigma", sigma, "smoothing noise scale");
    sub->add_option("--n-mc", n_mc, "smoothing Monte Carlo sample count");
    sub->add_option("--fs-beta", fs_beta, "finite-sample smoothing confidence");
  };

  CLI::App* generate = app.add_subcommand("generate", "emit calibration/test CSVs from a world");
  CLI::App* calibrate = app.add_subcommand("calibrate", "compute score lists and thresholds");
  CLI::App* certify = app.add_subcommand("certify", "certified worst-case coverage per delta");
  CLI::App* simulate = app.add_subcommand("simulate", "coverage/set-size table under the adversary");
  CLI::App* analyze = app.add_subcommand("analyze", "utility diagnostics and comparison checks");
  for (auto* sub : {generate, calibrate, certify, simulate, analyze}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    colep::Json config_json = colep::Json::object();
    if (!config_path.empty()) config_json = colep::load_json_file(config_path);
    colep::ExperimentConfig cfg = colep::config_from_json(config_json);
    if (seed >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed);
      if (cfg.world) cfg.world->seed = cfg.seed;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (alpha >= 0.0) cfg.alpha = alpha;
    if (!delta_list.empty()) cfg.deltas = parse_delta_list(delta_list);
    if (sigma >= 0.0) cfg.sigma = sigma;
    if (n_mc >= 0) cfg.n_mc = n_mc;
    if (fs_beta >= 0.0) cfg.fs_beta = fs_beta;

    colep::CommandOutcome outcome;
    if (generate->parsed())
      outcome = colep::cmd_generate(cfg);
    else if (calibrate->parsed())
      outcome = colep::cmd_calibrate(cfg);
    else if (certify->parsed())
      outcome = colep::cmd_certify(cfg);
    else if (simulate->parsed())
      outcome = colep::cmd_simulate(cfg);
    else
      outcome = colep::cmd_analyze(cfg);

    std::cout << outcome.summary.dump(2) << std::endl;
    if (outcome.exit_code != 0) print_error(outcome.exit_code, "one or more requested checks failed");
    return outcome.exit_code;
  } catch (const colep::StructuralError& e) {
    print_error(kExitConfig, e.what());
    return kExitConfig;
  } catch (const colep::NumericError& e) {
    print_error(kExitFailure, e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    print_error(kExitFailure, e.what());
    return kExitFailure;
  }
}
