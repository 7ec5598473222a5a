#include "colep/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "colep/parallel.hpp"
#include "colep/rng.hpp"

namespace colep {

namespace {
constexpr std::uint64_t kGenerateULane = 0x47ull;

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

Json json_vec(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
  return a;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

struct Pipeline {
  KnowledgeBase kb;
  std::vector<CalibrationRecord> calibration;
  std::vector<CalibrationRecord> test;  // empty unless requested
  UPolicy cal_upolicy;
  UPolicy test_upolicy;
  bool from_world = false;
};

std::vector<CalibrationRecord> records_from_samples(const std::vector<Sample>& samples) {
  std::vector<CalibrationRecord> out(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    out[i] = CalibrationRecord{samples[i].beliefs, samples[i].true_class(), std::nullopt};
  return out;
}

bool all_have_u(const std::vector<CalibrationRecord>& recs) {
  for (const auto& r : recs)
    if (!r.u) return false;
  return true;
}

Pipeline build_pipeline(const ExperimentConfig& cfg, bool need_test) {
  if (!cfg.kb) throw StructuralError("config: knowledge_base is required");

  std::vector<CalibrationRecord> cal, test;
  bool from_world = false;
  if (cfg.calibration_csv) {
    cal = load_calibration_csv(*cfg.calibration_csv);
    if (need_test) {
      if (!cfg.test_csv) throw StructuralError("config: test_csv is required for this command");
      test = load_calibration_csv(*cfg.test_csv);
    }
  } else if (cfg.world) {
    from_world = true;
    WorldSpec world = *cfg.world;
    world.seed = cfg.seed;
    cal = records_from_samples(generate(world, cfg.n_cal, /*stream_offset=*/0));
    if (need_test) test = records_from_samples(generate(world, cfg.n_test, /*stream_offset=*/1));
  } else {
    throw StructuralError("config: either a world or calibration_csv is required");
  }

  std::vector<Vec> beliefs;
  std::vector<int> labels;
  if (cfg.kb->needs_estimation()) {
    beliefs.reserve(cal.size());
    for (const auto& r : cal) {
      beliefs.push_back(r.beliefs);
      labels.push_back(r.label);
    }
  }
  KnowledgeBase kb = cfg.kb->needs_estimation() ? cfg.kb->build_with(beliefs, labels)
                                                : cfg.kb->build();
  if (kb.label_space().width() != cal.front().beliefs.size())
    throw StructuralError("config: knowledge base width does not match the data");

  UPolicy cal_up = all_have_u(cal) ? UPolicy::from_records() : UPolicy::seeded(cfg.seed);
  UPolicy test_up = (!test.empty() && all_have_u(test))
                        ? UPolicy::from_records()
                        : UPolicy::seeded(splitmix64(cfg.seed ^ 0x7E57ull));
  return Pipeline{std::move(kb), std::move(cal), std::move(test), cal_up, test_up, from_world};
}

std::vector<IntervalRecord> intervals_for(const std::vector<CalibrationRecord>& cal,
                                          const PerturbationBudget& budget,
                                          const std::optional<double>& fs_beta, long n_mc) {
  std::vector<IntervalRecord> out(cal.size());
  parallel_for(static_cast<long>(cal.size()), [&](long i) {
    const auto& rec = cal[static_cast<size_t>(i)];
    IntervalVector iv = fs_beta ? smoothing_intervals_finite_sample(rec.beliefs, budget, n_mc, *fs_beta)
                                : smoothing_intervals(rec.beliefs, budget);
    out[static_cast<size_t>(i)] = IntervalRecord{std::move(iv), rec.label, rec.u};
  });
  return out;
}
}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  if (j.contains("world")) {
    const auto& w = j.at("world");
    cfg.world = w.is_string() ? world_from_json(load_json_file(w.get<std::string>()))
                              : world_from_json(w);
  }
  if (j.contains("knowledge_base")) {
    const auto& k = j.at("knowledge_base");
    cfg.kb = k.is_string() ? load_knowledge_base(k.get<std::string>())
                           : knowledge_base_from_json(k);
  }
  if (j.contains("calibration_csv")) cfg.calibration_csv = j.at("calibration_csv").get<std::string>();
  if (j.contains("test_csv")) cfg.test_csv = j.at("test_csv").get<std::string>();
  if (j.contains("calibration_intervals_csv"))
    cfg.calibration_intervals_csv = j.at("calibration_intervals_csv").get<std::string>();
  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (d.is_number())
      cfg.deltas = {d.get<double>()};
    else
      for (const auto& x : d) cfg.deltas.push_back(x.get<double>());
  }
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.n_cal = j.value("n_cal", cfg.n_cal);
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.n_mc = j.value("n_mc", cfg.n_mc);
  if (j.contains("fs_beta") && !j.at("fs_beta").is_null()) cfg.fs_beta = j.at("fs_beta").get<double>();
  cfg.n_trials = j.value("n_trials", cfg.n_trials);
  cfg.n_adv = j.value("n_adv", cfg.n_adv);
  if (j.contains("seed"))
    cfg.seed = j.at("seed").get<std::uint64_t>();
  else if (cfg.world)
    cfg.seed = cfg.world->seed;
  cfg.out_dir = j.value("out", cfg.out_dir);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw StructuralError("config: alpha must lie in (0,1)");
  for (double d : cfg.deltas)
    if (!(d >= 0.0)) throw StructuralError("config: delta must be >= 0");
  if (cfg.world) cfg.world->seed = cfg.seed;
  return cfg;
}

CommandOutcome cmd_generate(const ExperimentConfig& cfg) {
  if (!cfg.world) throw StructuralError("generate: a world config is required");
  WorldSpec world = *cfg.world;
  world.seed = cfg.seed;

  auto emit = [&](long n, std::uint64_t offset, const std::string& name) {
    auto samples = generate(world, n, offset);
    std::vector<CalibrationRecord> records(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      records[i] = CalibrationRecord{
          samples[i].beliefs, samples[i].true_class(),
          uniform_at(cfg.seed, kGenerateULane, offset * (1ull << 40) + i, 0)};
    }
    std::string path = out_path(cfg, name);
    write_calibration_csv(path, records);
    return path;
  };

  Json summary;
  summary["command"] = "generate";
  summary["calibration_csv"] = emit(cfg.n_cal, 0, "calibration.csv");
  summary["test_csv"] = emit(cfg.n_test, 1, "test.csv");
  summary["n_cal"] = cfg.n_cal;
  summary["n_test"] = cfg.n_test;
  summary["seed"] = cfg.seed;
  return {0, summary};
}

CommandOutcome cmd_calibrate(const ExperimentConfig& cfg) {
  Pipeline p = build_pipeline(cfg, /*need_test=*/false);
  const CoverageTarget target(cfg.alpha);
  const long n = static_cast<long>(p.calibration.size());

  auto clean = calibration_class_scores(p.calibration, p.kb, p.cal_upolicy);
  Vec clean_thresholds = thresholds_from_scores(clean, target);

  Json artifact;
  artifact["alpha"] = cfg.alpha;
  artifact["n"] = n;
  artifact["seed"] = cfg.seed;
  artifact["u_mode"] = p.cal_upolicy.mode_name();
  artifact["num_classes"] = p.kb.label_space().num_classes;
  artifact["mixture_weights"] = json_vec(p.kb.mixture_weights());
  artifact["thresholds_clean"] = json_vec(clean_thresholds);
  Json clean_scores = Json::array();
  for (const auto& per_class : clean) {
    Json a = Json::array();
    for (double s : per_class) a.push_back(s);
    clean_scores.push_back(a);
  }
  artifact["scores_clean"] = clean_scores;

  Json certified = Json::array();
  double shift = cfg.fs_beta ? 2.0 * *cfg.fs_beta : 0.0;
  for (double delta : cfg.deltas) {
    PerturbationBudget budget(delta, cfg.sigma);
    auto intervals = intervals_for(p.calibration, budget, cfg.fs_beta, cfg.n_mc);
    auto worst = calibration_class_scores_certified(intervals, p.kb, p.cal_upolicy);
    Vec thresholds = thresholds_from_scores(worst, target, shift);
    Json entry;
    entry["delta"] = delta;
    entry["sigma"] = cfg.sigma;
    if (cfg.fs_beta) entry["fs_beta"] = *cfg.fs_beta;
    entry["thresholds"] = json_vec(thresholds);
    Json ws = Json::array();
    for (const auto& per_class : worst) {
      Json a = Json::array();
      for (double s : per_class) a.push_back(s);
      ws.push_back(a);
    }
    entry["scores_worst"] = ws;
    certified.push_back(entry);
  }
  artifact["certified"] = certified;

  std::string path = out_path(cfg, "calibration.json");
  write_json_file(path, artifact);

  Json summary;
  summary["command"] = "calibrate";
  summary["artifact"] = path;
  summary["n"] = n;
  summary["thresholds_clean"] = json_vec(clean_thresholds);
  return {0, summary};
}

CommandOutcome cmd_certify(const ExperimentConfig& cfg) {
  Pipeline p = build_pipeline(cfg, /*need_test=*/false);
  const CoverageTarget target(cfg.alpha);
  if (cfg.deltas.empty() && !cfg.calibration_intervals_csv)
    throw StructuralError("certify: at least one delta (or an interval CSV) is required");

  auto clean = calibration_class_scores(p.calibration, p.kb, p.cal_upolicy);
  Vec clean_thresholds = thresholds_from_scores(clean, target);

  Json rows = Json::array();
  std::vector<double> taus;
  for (double delta : cfg.deltas) {
    PerturbationBudget budget(delta, cfg.sigma);
    auto intervals = intervals_for(p.calibration, budget, cfg.fs_beta, cfg.n_mc);
    auto worst = calibration_class_scores_certified(intervals, p.kb, p.cal_upolicy);
    CertifiedCoverage cc = certified_coverage(clean, worst, target);
    Json row;
    row["delta"] = delta;
    row["sigma"] = cfg.sigma;
    row["bound_family"] = cfg.fs_beta ? "finite_sample" : "exact";
    if (cfg.fs_beta) row["fs_beta"] = *cfg.fs_beta;
    row["tau_per_class"] = json_vec(cc.tau_per_class);
    row["tau"] = cc.tau;
    row["finite_sample_tau"] = cc.finite_sample_tau;
    row["threshold_clean"] = json_vec(clean_thresholds);
    row["threshold_worst"] = json_vec(thresholds_from_scores(worst, target));
    rows.push_back(row);
    taus.push_back(cc.tau);
  }

  if (cfg.calibration_intervals_csv) {
    auto intervals = load_interval_csv(*cfg.calibration_intervals_csv);
    if (intervals.size() != p.calibration.size())
      throw StructuralError("certify: interval CSV row count does not match the calibration set");
    for (size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].label != p.calibration[i].label)
        throw StructuralError("certify: interval CSV labels disagree with the calibration set");
      intervals[i].u = p.calibration[i].u;
    }
    auto worst = calibration_class_scores_certified(intervals, p.kb, p.cal_upolicy);
    CertifiedCoverage cc = certified_coverage(clean, worst, target);
    Json row;
    row["delta"] = nullptr;
    row["bound_family"] = "external";
    row["tau_per_class"] = json_vec(cc.tau_per_class);
    row["tau"] = cc.tau;
    row["finite_sample_tau"] = cc.finite_sample_tau;
    rows.push_back(row);
  }

  // tau must not increase along an increasing delta sweep
  bool monotone = true;
  for (size_t i = 1; i < cfg.deltas.size(); ++i)
    if (cfg.deltas[i] >= cfg.deltas[i - 1] && taus[i] > taus[i - 1] + 1e-12) monotone = false;

  Json report;
  report["alpha"] = cfg.alpha;
  report["n"] = static_cast<long>(p.calibration.size());
  report["seed"] = cfg.seed;
  report["u_mode"] = p.cal_upolicy.mode_name();
  report["per_delta"] = rows;
  report["tau_monotone_in_delta"] = monotone;
  std::string path = out_path(cfg, "certification.json");
  write_json_file(path, report);

  Json summary;
  summary["command"] = "certify";
  summary["artifact"] = path;
  summary["per_delta"] = rows;
  summary["tau_monotone_in_delta"] = monotone;
  return {monotone ? 0 : 1, summary};
}

CommandOutcome cmd_simulate(const ExperimentConfig& cfg) {
  Pipeline p = build_pipeline(cfg, /*need_test=*/true);
  const CoverageTarget target(cfg.alpha);
  const int nc = p.kb.label_space().num_classes;
  const long n_test = static_cast<long>(p.test.size());
  const double shift = cfg.fs_beta ? 2.0 * *cfg.fs_beta : 0.0;

  auto clean = calibration_class_scores(p.calibration, p.kb, p.cal_upolicy);
  Vec clean_thresholds = thresholds_from_scores(clean, target);
  double base_threshold = aps_threshold(p.calibration, nc, cfg.alpha, p.cal_upolicy);

  std::vector<Vec> certified_thresholds;
  for (double delta : cfg.deltas) {
    PerturbationBudget budget(delta, cfg.sigma);
    auto intervals = intervals_for(p.calibration, budget, cfg.fs_beta, cfg.n_mc);
    auto worst = calibration_class_scores_certified(intervals, p.kb, p.cal_upolicy);
    certified_thresholds.push_back(thresholds_from_scores(worst, target, shift));
  }

  struct Cell {
    long hits = 0;
    long size_sum = 0;
  };
  // scenario index: 0 = clean, 1 + d = adversarial at deltas[d]
  const size_t n_scen = 1 + cfg.deltas.size();
  std::vector<std::vector<Cell>> base_cells(n_scen, std::vector<Cell>(1)),
      colep_cells(n_scen, std::vector<Cell>(1)),
      cert_cells(n_scen, std::vector<Cell>(cfg.deltas.size()));

  // evaluation is parallel over samples into per-sample buffers; accumulation
  // happens serially afterwards so totals are scheduling-independent
  struct SampleOut {
    std::vector<int> base_size, colep_size;       // per scenario
    std::vector<int> base_hit, colep_hit;         // per scenario
    std::vector<std::vector<int>> cert_size, cert_hit;  // [scenario][delta]
  };
  std::vector<SampleOut> outs(static_cast<size_t>(n_test));

  parallel_for(n_test, [&](long i) {
    const auto& rec = p.test[static_cast<size_t>(i)];
    SampleOut& so = outs[static_cast<size_t>(i)];
    so.base_size.resize(n_scen);
    so.colep_size.resize(n_scen);
    so.base_hit.resize(n_scen);
    so.colep_hit.resize(n_scen);
    so.cert_size.assign(n_scen, std::vector<int>(cfg.deltas.size(), 0));
    so.cert_hit.assign(n_scen, std::vector<int>(cfg.deltas.size(), 0));

    Vec test_us(nc);
    for (int j = 0; j < nc; ++j) test_us[j] = p.test_upolicy.value(rec.u, i, j);
    double u_aps = p.test_upolicy.value(rec.u, i, -1);

    for (size_t scen = 0; scen < n_scen; ++scen) {
      // each method faces its own strongest admissible attack
      Vec beliefs_base = rec.beliefs;
      Vec beliefs_colep = rec.beliefs;
      if (scen > 0) {
        PerturbationBudget budget(cfg.deltas[scen - 1], cfg.sigma);
        beliefs_base = aps_interval_adversary(rec.beliefs, rec.label, budget, nc, u_aps);
        beliefs_colep = interval_adversary(rec.beliefs, rec.label, budget, p.kb);
      }
      auto base_set = aps_predict(beliefs_base.head(nc), base_threshold, u_aps);
      so.base_size[scen] = static_cast<int>(base_set.size());
      so.base_hit[scen] =
          std::find(base_set.begin(), base_set.end(), rec.label) != base_set.end() ? 1 : 0;

      auto colep_set = predict_with_thresholds(beliefs_colep, p.kb, clean_thresholds, test_us);
      so.colep_size[scen] = static_cast<int>(colep_set.members.size());
      so.colep_hit[scen] = colep_set.contains(rec.label) ? 1 : 0;

      for (size_t d = 0; d < cfg.deltas.size(); ++d) {
        auto cert_set =
            predict_with_thresholds(beliefs_colep, p.kb, certified_thresholds[d], test_us);
        so.cert_size[scen][d] = static_cast<int>(cert_set.members.size());
        so.cert_hit[scen][d] = cert_set.contains(rec.label) ? 1 : 0;
      }
    }
  });

  for (long i = 0; i < n_test; ++i) {
    const SampleOut& so = outs[static_cast<size_t>(i)];
    for (size_t scen = 0; scen < n_scen; ++scen) {
      base_cells[scen][0].hits += so.base_hit[scen];
      base_cells[scen][0].size_sum += so.base_size[scen];
      colep_cells[scen][0].hits += so.colep_hit[scen];
      colep_cells[scen][0].size_sum += so.colep_size[scen];
      for (size_t d = 0; d < cfg.deltas.size(); ++d) {
        cert_cells[scen][d].hits += so.cert_hit[scen][d];
        cert_cells[scen][d].size_sum += so.cert_size[scen][d];
      }
    }
  }

  std::string csv = "method,scenario,delta,coverage,avg_set_size,n_test\n";
  Json rows = Json::array();
  auto emit = [&](const std::string& method, const std::string& scenario, double delta,
                  const Cell& cell) {
    double cov = static_cast<double>(cell.hits) / static_cast<double>(n_test);
    double sz = static_cast<double>(cell.size_sum) / static_cast<double>(n_test);
    csv += method + "," + scenario + "," + format_double(delta) + "," + format_double(cov) + "," +
           format_double(sz) + "," + std::to_string(n_test) + "\n";
    rows.push_back({{"method", method},
                    {"scenario", scenario},
                    {"delta", delta},
                    {"coverage", cov},
                    {"avg_set_size", sz},
                    {"n_test", n_test}});
  };

  emit("baseline-CP", "clean", 0.0, base_cells[0][0]);
  emit("COLEP", "clean", 0.0, colep_cells[0][0]);
  for (size_t d = 0; d < cfg.deltas.size(); ++d)
    emit("COLEP-certified", "clean", cfg.deltas[d], cert_cells[0][d]);
  for (size_t scen = 1; scen < n_scen; ++scen) {
    double delta = cfg.deltas[scen - 1];
    emit("baseline-CP", "adversarial", delta, base_cells[scen][0]);
    emit("COLEP", "adversarial", delta, colep_cells[scen][0]);
    emit("COLEP-certified", "adversarial", delta, cert_cells[scen][scen - 1]);
  }

  std::string csv_path = out_path(cfg, "simulation.csv");
  write_text_file(csv_path, csv);
  Json report;
  report["alpha"] = cfg.alpha;
  report["seed"] = cfg.seed;
  report["n_test"] = n_test;
  report["u_mode_calibration"] = p.cal_upolicy.mode_name();
  report["u_mode_test"] = p.test_upolicy.mode_name();
  report["rows"] = rows;
  std::string json_path = out_path(cfg, "simulation.json");
  write_json_file(json_path, report);

  Json summary;
  summary["command"] = "simulate";
  summary["csv"] = csv_path;
  summary["json"] = json_path;
  summary["rows"] = rows;
  return {0, summary};
}

CommandOutcome cmd_analyze(const ExperimentConfig& cfg) {
  if (!cfg.world) throw StructuralError("analyze: a world config is required");
  if (!cfg.kb) throw StructuralError("analyze: knowledge_base is required");
  WorldSpec world = *cfg.world;
  world.seed = cfg.seed;
  KnowledgeBase kb = [&] {
    if (!cfg.kb->needs_estimation()) return cfg.kb->build();
    auto cal = generate(world, cfg.n_cal, /*stream_offset=*/0);
    std::vector<Vec> beliefs;
    std::vector<int> labels;
    for (const auto& s : cal) {
      beliefs.push_back(s.beliefs);
      labels.push_back(s.true_class());
    }
    return cfg.kb->build_with(beliefs, labels);
  }();

  const long n_util = std::max<long>(20000, cfg.n_test);
  UtilityEstimate util = estimate_utilities(world, kb, n_util);
  EffectivenessReport eff = effectiveness_check(world, kb, cfg.n_test, n_util);
  ComparisonReport cmp = model_comparisons(world, kb, cfg.n_cal, cfg.n_adv, cfg.n_trials,
                                               cfg.alpha);

  Json report;
  report["seed"] = cfg.seed;
  report["alpha"] = cfg.alpha;
  report["w"] = util.w;
  report["p_benign"] = util.p_benign;
  report["model_utility"] = {{"benign", {{"t", json_vec(util.benign.t)}, {"z", json_vec(util.benign.z)}}},
                             {"adversarial",
                              {{"t", json_vec(util.adversarial.t)}, {"z", json_vec(util.adversarial.z)}}}};

  Json rule_utils = Json::array();
  const int nc = kb.label_space().num_classes;
  for (int j = 0; j < nc; ++j) {
    for (int r = 0; r < kb.num_circuits(); ++r) {
      for (int d = 0; d < 2; ++d) {
        const ModelUtility& mu = d == 0 ? util.benign : util.adversarial;
        RuleUtility ru = rule_utility(kb, util.truths, mu, j, r, util.w);
        Json row;
        row["class"] = j;
        row["circuit"] = r;
        row["distribution"] = d == 0 ? "benign" : "adversarial";
        row["T"] = ru.T;
        row["Z"] = ru.Z;
        row["lambda"] = ru.lambda;
        if (ru.U)
          row["U"] = *ru.U;
        else
          row["U"] = nullptr;
        rule_utils.push_back(row);
      }
    }
  }
  report["rule_utility"] = rule_utils;

  Json eff_rows = Json::array();
  auto status_name = [](CheckStatus s) {
    switch (s) {
      case CheckStatus::pass: return "pass";
      case CheckStatus::fail: return "fail";
      default: return "inconclusive";
    }
  };
  for (const auto& row : eff.per_class) {
    eff_rows.push_back({{"class", row.cls},
                          {"n0", row.n0},
                          {"n1", row.n1},
                          {"lhs0", row.lhs0},
                          {"rhs0", row.rhs0},
                          {"se0", row.se0},
                          {"lhs1", row.lhs1},
                          {"rhs1", row.rhs1},
                          {"se1", row.se1},
                          {"mean_eps0", row.mean_eps0},
                          {"mean_eps1", row.mean_eps1},
                          {"status0", status_name(row.status0)},
                          {"status1", status_name(row.status1)}});
  }
  report["effectiveness_check"] = {{"per_class", eff_rows},
                                   {"all_pass", eff.all_pass},
                                   {"any_inconclusive", eff.any_inconclusive}};

  Json h1 = Json::array();
  for (const auto& row : cmp.accuracy_bounds) {
    h1.push_back({{"class", row.cls},
                  {"e0", row.e0},
                  {"e1", row.e1},
                  {"accuracy", row.accuracy},
                  {"bound", row.bound},
                  {"hypothesis_ok", row.hypothesis_ok},
                  {"holds", row.holds}});
  }
  report["comparisons"] = {{"n_trials", cmp.n_trials},
                           {"win_fraction", cmp.win_fraction},
                           {"mean_coverage_colep", cmp.mean_coverage_colep},
                           {"mean_coverage_baseline", cmp.mean_coverage_baseline},
                           {"mean_accuracy_delta", cmp.mean_accuracy_delta},
                           {"accuracy_lower_bounds", h1},
                           {"accuracy_bounds_hold", cmp.accuracy_bounds_hold}};

  bool ok = eff.all_pass && cmp.accuracy_bounds_hold;
  report["verdict"] = ok ? "pass" : "fail";
  std::string path = out_path(cfg, "analysis.json");
  write_json_file(path, report);

  Json summary;
  summary["command"] = "analyze";
  summary["artifact"] = path;
  summary["verdict"] = report["verdict"];
  summary["win_fraction"] = cmp.win_fraction;
  summary["mean_accuracy_delta"] = cmp.mean_accuracy_delta;
  summary["effectiveness_all_pass"] = eff.all_pass;
  return {ok ? 0 : 1, summary};
}

}  // namespace colep
