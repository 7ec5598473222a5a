#include "colep/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "colep/conformal.hpp"
#include "colep/parallel.hpp"
#include "colep/rng.hpp"

namespace colep {

namespace {
constexpr long kMinStratum = 100;
constexpr double kPi = 3.14159265358979323846;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// kappa-correction p - p/(p + (1-p)*kappa); zero at p in {0,1} and kappa = 1.
double correction_gap(double p, double kappa) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return p - p / (p + (1.0 - p) * kappa);
}
}  // namespace

Vec default_threshold_grid() {
  Vec g(11);
  for (int i = 0; i < 10; ++i) g[i] = 0.5 + 0.05 * i;
  g[10] = 0.99;
  return g;
}

ModelUtility estimate_model_utility(const std::vector<Sample>& data, const Vec& t_grid) {
  if (data.empty()) throw StructuralError("estimate_model_utility: empty data");
  if (t_grid.size() < 1) throw StructuralError("estimate_model_utility: empty grid");
  const int w = static_cast<int>(data.front().beliefs.size());
  ModelUtility util;
  util.t = Vec(w);
  util.z = Vec(w);
  for (int idx = 0; idx < w; ++idx) {
    long n0 = 0, n1 = 0;
    for (const auto& s : data) (s.truth[idx] ? n1 : n0) += 1;
    double best_t = t_grid[0], best_z = 0.0, best_obj = -1.0;
    for (Eigen::Index g = 0; g < t_grid.size(); ++g) {
      double t = t_grid[g];
      double z = 0.0;
      if (n0 > 0 && n1 > 0) {
        long low_ok = 0, high_ok = 0;
        for (const auto& s : data) {
          if (s.truth[idx]) {
            if (s.beliefs[idx] >= t) ++high_ok;
          } else {
            if (s.beliefs[idx] <= 1.0 - t) ++low_ok;
          }
        }
        z = std::min(static_cast<double>(low_ok) / static_cast<double>(n0),
                     static_cast<double>(high_ok) / static_cast<double>(n1));
      }
      if (t * z > best_obj) {
        best_obj = t * z;
        best_t = t;
        best_z = z;
      }
    }
    util.t[idx] = best_t;
    util.z[idx] = best_z;
  }
  return util;
}

RuleUtility rule_utility(const KnowledgeBase& kb, const std::vector<Assignment>& truths,
                         const ModelUtility& model_util, int j, int r, double w) {
  if (r < 0 || r >= kb.num_circuits()) throw StructuralError("rule_utility: circuit index out of range");
  const auto& circuit = kb.circuits()[static_cast<size_t>(r)];
  if (j < 0 || j >= circuit.label_space().num_classes)
    throw StructuralError("rule_utility: class index out of range");

  RuleUtility out;
  const auto neighbors = circuit.component_neighbors(j);
  for (int q : neighbors) {
    out.T *= model_util.t[q];
    out.Z *= model_util.z[q];
  }
  out.lambda = 1.0 / out.T + std::exp(-w) - 1.0;

  const VariableRole role = circuit.role(j);
  if (role == VariableRole::none) return out;  // circuit does not touch j: U undefined

  const bool preventive = role == VariableRole::conditional;  // r in P_d(j)
  long denom = 0, numer = 0;
  for (const auto& nu : truths) {
    if (nu.size() != circuit.label_space().width())
      throw StructuralError("rule_utility: truth width mismatch");
    bool strat = preventive ? !nu[j] : nu[j];
    if (!strat) continue;
    ++denom;
    bool exists = false;
    for (int q : neighbors) {
      if (preventive) {
        if (circuit.role(q) == VariableRole::consequence && !nu[q]) exists = true;
      } else {
        if (circuit.role(q) == VariableRole::conditional && nu[q]) exists = true;
      }
    }
    if (exists) ++numer;
  }
  if (denom > 0) out.U = static_cast<double>(numer) / static_cast<double>(denom);
  return out;
}

namespace {
Effectiveness effectiveness_one_distribution(double pi_j, const EffectivenessContext& ctx,
                                             const KnowledgeBase& kb, int j, int d) {
  Effectiveness eff;
  for (int r = 0; r < kb.num_circuits(); ++r) {
    const auto& circuit = kb.circuits()[static_cast<size_t>(r)];
    const VariableRole role = circuit.role(j);
    if (role == VariableRole::none) continue;
    const RuleUtility& ru = ctx.per_circuit.at(static_cast<size_t>(r))[static_cast<size_t>(d)];
    if (ru.T <= 0.0 || ru.lambda <= 0.0)
      throw NumericError("reasoning_effectiveness: utilities must be positive");
    const double beta = kb.mixture_weights()[r];
    if (role == VariableRole::conditional) {  // r in P_d(j)
      if (!ru.U) throw StructuralError("reasoning_effectiveness: missing U for a preventive circuit");
      eff.eps0 += beta * *ru.U * ru.Z * correction_gap(pi_j, 1.0 / ru.lambda);
      eff.eps1 += beta * -correction_gap(pi_j, 1.0 / ru.T);
    } else {  // r in P_s(j)
      if (!ru.U) throw StructuralError("reasoning_effectiveness: missing U for a permissive circuit");
      eff.eps0 += beta * correction_gap(pi_j, ru.T);
      eff.eps1 += beta * *ru.U * ru.Z * -correction_gap(pi_j, ru.lambda);
    }
  }
  return eff;
}
}  // namespace

Effectiveness reasoning_effectiveness(double pi_j, const EffectivenessContext& ctx,
                                      const KnowledgeBase& kb, int j) {
  if (!(pi_j >= 0.0 && pi_j <= 1.0)) throw NumericError("reasoning_effectiveness: pi_j outside [0,1]");
  if (static_cast<int>(ctx.per_circuit.size()) != kb.num_circuits())
    throw StructuralError("reasoning_effectiveness: utility table size mismatch");
  Effectiveness total;
  const double p[2] = {ctx.p_benign, 1.0 - ctx.p_benign};
  for (int d = 0; d < 2; ++d) {
    if (p[d] == 0.0) continue;
    Effectiveness e = effectiveness_one_distribution(pi_j, ctx, kb, j, d);
    total.eps0 += p[d] * e.eps0;
    total.eps1 += p[d] * e.eps1;
  }
  return total;
}

Effectiveness reasoning_effectiveness_for_origin(double pi_j, const EffectivenessContext& ctx,
                                                 const KnowledgeBase& kb, int j, Origin origin) {
  if (!(pi_j >= 0.0 && pi_j <= 1.0)) throw NumericError("reasoning_effectiveness: pi_j outside [0,1]");
  return effectiveness_one_distribution(pi_j, ctx, kb, j, origin == Origin::benign ? 0 : 1);
}

UtilityEstimate estimate_utilities(const WorldSpec& world, const KnowledgeBase& kb, long n_samples,
                                   std::uint64_t stream_offset) {
  UtilityEstimate est;
  est.w = kb.common_rule_weight();
  est.p_benign = 1.0 - world.p_adversarial;
  auto samples = generate(world, n_samples, stream_offset);
  std::vector<Sample> benign, adversarial;
  est.truths.reserve(samples.size());
  for (auto& s : samples) {
    est.truths.push_back(s.truth);
    (s.origin == Origin::benign ? benign : adversarial).push_back(s);
  }
  // An absent mixture side is never consulted; the pooled estimate keeps the
  // table rectangular.
  const Vec grid = default_threshold_grid();
  est.benign =
      benign.empty() ? estimate_model_utility(samples, grid) : estimate_model_utility(benign, grid);
  est.adversarial = adversarial.empty() ? estimate_model_utility(samples, grid)
                                        : estimate_model_utility(adversarial, grid);
  return est;
}

EffectivenessContext UtilityEstimate::context_for_class(const KnowledgeBase& kb, int j) const {
  EffectivenessContext ctx;
  ctx.p_benign = p_benign;
  ctx.w = w;
  ctx.per_circuit.resize(static_cast<size_t>(kb.num_circuits()));
  for (int r = 0; r < kb.num_circuits(); ++r) {
    ctx.per_circuit[static_cast<size_t>(r)][0] = rule_utility(kb, truths, benign, j, r, w);
    ctx.per_circuit[static_cast<size_t>(r)][1] = rule_utility(kb, truths, adversarial, j, r, w);
  }
  return ctx;
}

EffectivenessReport effectiveness_check(const WorldSpec& world, const KnowledgeBase& kb,
                                        long n_samples, long n_utility_samples) {
  if (n_samples < 1) throw StructuralError("effectiveness_check: n_samples must be >= 1");
  UtilityEstimate builder = estimate_utilities(world, kb, n_utility_samples, /*stream_offset=*/11);
  auto eval = generate(world, n_samples, /*stream_offset=*/12);

  const int nc = kb.label_space().num_classes;
  EffectivenessReport report;
  report.all_pass = true;
  for (int j = 0; j < nc; ++j) {
    EffectivenessContext ctx = builder.context_for_class(kb, j);
    EffectivenessPerClass row;
    row.cls = j;
    std::vector<double> d0, d1, colep0, colep1, rhs0, rhs1, e0s, e1s;
    for (const auto& s : eval) {
      double colep = colep_probability(s.beliefs, kb, j);
      double pi = s.beliefs[j];
      Effectiveness eff = reasoning_effectiveness_for_origin(pi, ctx, kb, j, s.origin);
      if (s.truth[j]) {
        colep1.push_back(colep);
        rhs1.push_back(pi + eff.eps1);
        d1.push_back(colep - (pi + eff.eps1));
        e1s.push_back(eff.eps1);
      } else {
        colep0.push_back(colep);
        rhs0.push_back(pi - eff.eps0);
        d0.push_back(colep - (pi - eff.eps0));
        e0s.push_back(eff.eps0);
      }
    }
    row.n0 = static_cast<long>(d0.size());
    row.n1 = static_cast<long>(d1.size());
    row.lhs0 = mean_of(colep0);
    row.rhs0 = mean_of(rhs0);
    row.se0 = stderr_of(d0);
    row.lhs1 = mean_of(colep1);
    row.rhs1 = mean_of(rhs1);
    row.se1 = stderr_of(d1);
    row.mean_eps0 = mean_of(e0s);
    row.mean_eps1 = mean_of(e1s);
    if (row.n0 < kMinStratum) {
      row.status0 = CheckStatus::inconclusive;
    } else {
      // E[colep | Y!=j] <= E[pi - eps0 | Y!=j] within 3 SE of the difference
      row.status0 = mean_of(d0) <= 3.0 * row.se0 ? CheckStatus::pass : CheckStatus::fail;
    }
    if (row.n1 < kMinStratum) {
      row.status1 = CheckStatus::inconclusive;
    } else {
      row.status1 = mean_of(d1) >= -3.0 * row.se1 ? CheckStatus::pass : CheckStatus::fail;
    }
    if (row.status0 == CheckStatus::fail || row.status1 == CheckStatus::fail)
      report.all_pass = false;
    if (row.status0 == CheckStatus::inconclusive || row.status1 == CheckStatus::inconclusive)
      report.any_inconclusive = true;
    report.per_class.push_back(row);
  }
  return report;
}

ComparisonReport model_comparisons(const WorldSpec& world, const KnowledgeBase& kb,
                                       long n_cal, long n_adv, long n_trials, double alpha) {
  if (n_trials < 1) throw StructuralError("model_comparisons: n_trials must be >= 1");
  WorldSpec benign_world = world;
  benign_world.p_adversarial = 0.0;
  WorldSpec adv_world = world;
  adv_world.p_adversarial = 1.0;

  const int nc = kb.label_space().num_classes;
  const CoverageTarget target(alpha);

  std::vector<double> cov_colep(static_cast<size_t>(n_trials)),
      cov_base(static_cast<size_t>(n_trials)), acc_delta(static_cast<size_t>(n_trials));

  parallel_for(n_trials, [&](long trial) {
    const std::uint64_t off = 100 + static_cast<std::uint64_t>(trial) * 4;
    auto cal = generate(benign_world, n_cal, off);
    auto test = generate(adv_world, n_adv, off + 1);
    auto mix = generate(world, n_adv, off + 2);

    std::vector<CalibrationRecord> records(cal.size());
    for (size_t i = 0; i < cal.size(); ++i)
      records[i] = CalibrationRecord{cal[i].beliefs, cal[i].true_class(), std::nullopt};
    UPolicy upolicy = UPolicy::seeded(world.seed ^ splitmix64(off));
    UPolicy utest = UPolicy::seeded(world.seed ^ splitmix64(off + 3));

    auto scores = calibration_class_scores(records, kb, upolicy);
    Vec thresholds = thresholds_from_scores(scores, target);
    double base_thr = aps_threshold(records, nc, alpha, upolicy);

    long hit_colep = 0, hit_base = 0;
    for (size_t i = 0; i < test.size(); ++i) {
      int y = test[i].true_class();
      double p = colep_probability(test[i].beliefs, kb, y);
      double u = utest.value(std::nullopt, static_cast<long>(i), y);
      if (binary_score(p, true, u) <= thresholds[y]) ++hit_colep;
      double ub = utest.value(std::nullopt, static_cast<long>(i), -1);
      Vec head = test[i].beliefs.head(nc);
      if (aps_score(head, y, ub) <= base_thr) ++hit_base;
    }
    cov_colep[static_cast<size_t>(trial)] =
        static_cast<double>(hit_colep) / static_cast<double>(test.size());
    cov_base[static_cast<size_t>(trial)] =
        static_cast<double>(hit_base) / static_cast<double>(test.size());

    double delta_sum = 0.0;
    for (int j = 0; j < nc; ++j) {
      long ok_colep = 0, ok_base = 0;
      for (const auto& s : mix) {
        bool truth = s.truth[j];
        if ((colep_probability(s.beliefs, kb, j) >= 0.5) == truth) ++ok_colep;
        if ((s.beliefs[j] >= 0.5) == truth) ++ok_base;
      }
      delta_sum += static_cast<double>(ok_colep - ok_base) / static_cast<double>(mix.size());
    }
    acc_delta[static_cast<size_t>(trial)] = delta_sum / static_cast<double>(nc);
  });

  ComparisonReport out;
  out.n_trials = n_trials;
  long wins = 0;
  for (long t = 0; t < n_trials; ++t)
    if (cov_colep[static_cast<size_t>(t)] > cov_base[static_cast<size_t>(t)]) ++wins;
  out.win_fraction = static_cast<double>(wins) / static_cast<double>(n_trials);
  out.mean_coverage_colep = mean_of(cov_colep);
  out.mean_coverage_baseline = mean_of(cov_base);
  out.mean_accuracy_delta = mean_of(acc_delta);

  // Accuracy lower bound from measured conditional expectations (one large
  // mixture draw).
  const long n_big = std::max<long>(20000, n_adv);
  auto mix = generate(world, n_big, 7);
  out.accuracy_bounds_hold = true;
  for (int j = 0; j < nc; ++j) {
    AccuracyBoundPerClass row;
    row.cls = j;
    double s0 = 0.0, s1 = 0.0;
    long n0 = 0, n1 = 0, ok = 0;
    for (const auto& s : mix) {
      double colep = colep_probability(s.beliefs, kb, j);
      if (s.truth[j]) {
        s1 += colep;
        ++n1;
      } else {
        s0 += colep;
        ++n0;
      }
      if ((colep >= 0.5) == static_cast<bool>(s.truth[j])) ++ok;
    }
    row.e0 = n0 > 0 ? s0 / static_cast<double>(n0) : 0.0;
    row.e1 = n1 > 0 ? s1 / static_cast<double>(n1) : 1.0;
    row.accuracy = static_cast<double>(ok) / static_cast<double>(mix.size());
    double p1 = static_cast<double>(n1) / static_cast<double>(mix.size());
    row.bound = 1.0 - (1.0 - p1) * std::exp(-3.0 * (0.5 - row.e0) * (0.5 - row.e0) / (kPi * kPi)) -
                p1 * std::exp(-3.0 * (row.e1 - 0.5) * (row.e1 - 0.5) / (kPi * kPi));
    row.hypothesis_ok = row.e0 < 0.5 && row.e1 > 0.5;
    row.holds = row.accuracy >= row.bound - 1e-12;
    if (!row.holds) out.accuracy_bounds_hold = false;
    out.accuracy_bounds.push_back(row);
  }
  return out;
}

}  // namespace colep
