#include <doctest.h>

#include <cmath>

#include "colep/circuits.hpp"
#include "helpers.hpp"

using namespace colep;
using colep::testing::brute_marginal;
using colep::testing::random_probs;
using colep::testing::random_rules;

namespace {
Assignment bits(std::initializer_list<int> v) {
  Assignment a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int b : v) a[i++] = b != 0;
  return a;
}

Vec probs(std::initializer_list<double> v) {
  Vec p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
}  // namespace

TEST_CASE("factor value of the empty circuit is 1") {
  CircuitSpec c({}, LabelSpace(1, 1));
  CHECK(factor_value(bits({0, 0}), c) == 1.0);
  CHECK(factor_value(bits({1, 1}), c) == 1.0);
  CHECK(log_factor_value(bits({1, 0}), c) == 0.0);
}

TEST_CASE("single satisfied rule contributes e^w") {
  const double w = 1.5;
  CircuitSpec c({{0, 1, w}}, LabelSpace(1, 1));
  CHECK(factor_value(bits({1, 1}), c) == doctest::Approx(std::exp(w)).epsilon(1e-15));
  CHECK(factor_value(bits({1, 0}), c) == 1.0);   // violated
  CHECK(factor_value(bits({0, 0}), c) == doctest::Approx(std::exp(w)));  // vacuously satisfied
}

TEST_CASE("only satisfied rules count") {
  CircuitSpec c({{0, 1, 0.7}, {2, 3, 1.1}}, LabelSpace(2, 2));
  // first rule satisfied, second violated
  CHECK(factor_value(bits({1, 1, 1, 0}), c) == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
}

TEST_CASE("factor value rejects width mismatch") {
  CircuitSpec c({{0, 1, 1.0}}, LabelSpace(1, 1));
  CHECK_THROWS_AS(factor_value(bits({1, 1, 0}), c), StructuralError);
}

TEST_CASE("circuit validation") {
  LabelSpace ls(2, 2);
  CHECK_THROWS_AS(CircuitSpec({{0, 0, 1.0}}, ls), StructuralError);          // self-rule
  CHECK_THROWS_AS(CircuitSpec({{0, 1, -0.5}}, ls), StructuralError);         // negative weight
  CHECK_THROWS_AS(CircuitSpec({{0, 5, 1.0}}, ls), StructuralError);          // out of range
  CHECK_THROWS_AS(CircuitSpec({{0, 1, 1.0}, {1, 2, 1.0}}, ls), StructuralError);  // 1 on both sides
  CHECK_NOTHROW(CircuitSpec({{0, 2, 1.0}, {1, 2, 1.0}}, ls));  // shared consequent is fine
}

TEST_CASE("worked single-rule example") {
  // stop-sign example: pi = (0.9, 0.0), rule s => o
  for (double w : {0.0, 1.5, 5.0}) {
    CircuitSpec c({{0, 1, w}}, LabelSpace(1, 1));
    double expected = 0.9 / (0.1 * std::exp(w) + 0.9);
    CHECK(pc_marginal(probs({0.9, 0.0}), c, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pc_marginal_oracle(probs({0.9, 0.0}), c, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("zero weights leave the marginal untouched") {
  CounterRng rng(2024, 1);
  for (int trial = 0; trial < 50; ++trial) {
    int w = 2 + static_cast<int>(rng.next_unit() * 5);
    auto rules = random_rules(rng, w, 6, 0.0);  // weights all zero
    for (auto& r : rules) r.weight = 0.0;
    CircuitSpec c(rules, LabelSpace(w - 1, 1));
    Vec pi = random_probs(rng, w);
    int j = static_cast<int>(rng.next_unit() * (w - 1));
    CHECK(pc_marginal(pi, c, j) == doctest::Approx(pi[j]).epsilon(1e-12));
  }
}

TEST_CASE("fast path equals the oracle and the linear-space enumeration") {
  CounterRng rng(7, 2);
  for (int trial = 0; trial < 200; ++trial) {
    int w = 2 + static_cast<int>(rng.next_unit() * 7);
    auto rules = random_rules(rng, w, 2 * w);
    CircuitSpec c(rules, LabelSpace(w, 0));
    Vec pi = random_probs(rng, w);
    int j = static_cast<int>(rng.next_unit() * w);
    double fast = pc_marginal(pi, c, j);
    CHECK(fast == doctest::Approx(pc_marginal_oracle(pi, c, j)).epsilon(1e-10));
    CHECK(fast == doctest::Approx(brute_marginal(pi, rules, j)).epsilon(1e-10));
  }
}

TEST_CASE("extreme probabilities and large weights stay in range") {
  CounterRng rng(99, 3);
  for (int trial = 0; trial < 100; ++trial) {
    int w = 2 + static_cast<int>(rng.next_unit() * 5);
    auto rules = random_rules(rng, w, 8, 50.0);
    CircuitSpec c(rules, LabelSpace(w, 0));
    Vec pi(w);
    for (int i = 0; i < w; ++i) {
      double r = rng.next_unit();
      pi[i] = r < 0.25 ? 0.0 : (r < 0.5 ? 1.0 : rng.next_unit());
    }
    for (int j = 0; j < w; ++j) {
      double m = pc_marginal(pi, c, j);
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
      CHECK(std::isfinite(m));
    }
  }
}

TEST_CASE("marginal of the antecedent grows with the consequent's probability") {
  CircuitSpec c({{0, 1, 1.5}}, LabelSpace(1, 1));
  double prev = -1.0;
  for (double po = 0.0; po <= 1.0; po += 0.05) {
    double m = pc_marginal(probs({0.9, po}), c, 0);
    CHECK(m >= prev - 1e-12);
    prev = m;
  }
}

TEST_CASE("component cutoff raises a structural error") {
  // star with 20 consequents: component of class 0 has 21 members
  std::vector<KnowledgeRule> rules;
  for (int l = 0; l < 20; ++l) rules.push_back({0, 1 + l, 1.0});
  CircuitSpec c(rules, LabelSpace(1, 20));
  CHECK_THROWS_AS(pc_marginal(probs({0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5,
                                     0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}),
                              c, 0),
                  StructuralError);
}

TEST_CASE("oracle width cutoff") {
  std::vector<KnowledgeRule> rules{{0, 1, 1.0}};
  CircuitSpec c(rules, LabelSpace(1, 20));
  Vec pi = Vec::Constant(21, 0.5);
  CHECK_THROWS_AS(pc_marginal_oracle(pi, c, 0), StructuralError);
  CHECK_NOTHROW(pc_marginal(pi, c, 0));  // fast path only touches the pair
}

TEST_CASE("non-finite and out-of-range inputs are rejected") {
  CircuitSpec c({{0, 1, 1.0}}, LabelSpace(1, 1));
  CHECK_THROWS_AS(pc_marginal(probs({0.5, std::nan("")}), c, 0), NumericError);
  CHECK_THROWS_AS(pc_marginal(probs({0.5, 1.5}), c, 0), NumericError);
  CHECK_THROWS_AS(pc_marginal(probs({0.5}), c, 0), StructuralError);
}

TEST_CASE("singleton mixture equals the circuit marginal") {
  CircuitSpec c({{0, 2, 1.5}}, LabelSpace(2, 1));
  KnowledgeBase kb({c}, probs({1.0}));
  Vec pi = probs({0.7, 0.4, 0.2});
  CHECK(colep_probability(pi, kb, 0) == pc_marginal(pi, c, 0));
}

TEST_CASE("mixture of empty circuits is the identity") {
  CircuitSpec empty1({}, LabelSpace(2, 1)), empty2({}, LabelSpace(2, 1));
  KnowledgeBase kb({empty1, empty2}, probs({0.5, 0.5}));
  Vec pi = probs({0.35, 0.8, 0.1});
  CHECK(colep_probability(pi, kb, 0) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(colep_probability(pi, kb, 1) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("mixture is the weighted sum of per-circuit marginals") {
  CounterRng rng(5, 4);
  CircuitSpec c1({{0, 2, 1.0}}, LabelSpace(2, 2));
  CircuitSpec c2({{3, 1, 2.0}}, LabelSpace(2, 2));
  KnowledgeBase kb({c1, c2}, probs({0.3, 0.7}));
  for (int trial = 0; trial < 20; ++trial) {
    Vec pi = random_probs(rng, 4);
    for (int j = 0; j < 2; ++j) {
      double expected = 0.3 * pc_marginal(pi, c1, j) + 0.7 * pc_marginal(pi, c2, j);
      CHECK(colep_probability(pi, kb, j) == doctest::Approx(expected).epsilon(1e-14));
      double lo = std::min(pc_marginal(pi, c1, j), pc_marginal(pi, c2, j));
      double hi = std::max(pc_marginal(pi, c1, j), pc_marginal(pi, c2, j));
      CHECK(colep_probability(pi, kb, j) >= lo - 1e-14);
      CHECK(colep_probability(pi, kb, j) <= hi + 1e-14);
    }
  }
}

TEST_CASE("class probability vector matches per-class evaluation") {
  CounterRng rng(8, 5);
  CircuitSpec c1({{0, 3, 1.2}}, LabelSpace(3, 1));
  CircuitSpec c2({{1, 3, 0.8}}, LabelSpace(3, 1));
  KnowledgeBase kb({c1, c2}, probs({0.25, 0.75}));
  for (int trial = 0; trial < 10; ++trial) {
    Vec pi = random_probs(rng, 4);
    Vec all = colep_class_probabilities(pi, kb);
    REQUIRE(all.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(all[j] == colep_probability(pi, kb, j));
  }
}

TEST_CASE("knowledge base validation") {
  CircuitSpec c({}, LabelSpace(1, 1));
  CHECK_THROWS_AS(KnowledgeBase({c}, probs({0.5})), StructuralError);         // sum != 1
  CHECK_THROWS_AS(KnowledgeBase({c}, probs({-1.0, 2.0})), StructuralError);   // negative
  CHECK_THROWS_AS(KnowledgeBase({}, probs({})), StructuralError);             // empty
}

TEST_CASE("mixture weight estimation from per-circuit accuracy") {
  LabelSpace ls(2, 2);
  // helpful mapping: class j implies concept j
  CircuitSpec good({{0, 2, 1.5}, {1, 3, 1.5}}, ls);
  // harmful mapping: crossed concepts
  CircuitSpec bad({{0, 3, 1.5}, {1, 2, 1.5}}, ls);

  std::vector<Vec> beliefs;
  std::vector<int> labels;
  // 8 aligned records (good correct, bad wrong) + 2 inverted ones
  for (int i = 0; i < 10; ++i) {
    bool aligned = i < 8;
    int label = i % 2;
    Vec b(4);
    b[0] = 0.5;
    b[1] = 0.5;
    b[2] = (label == 0) == aligned ? 1.0 : 0.0;
    b[3] = (label == 1) == aligned ? 1.0 : 0.0;
    beliefs.push_back(b);
    labels.push_back(label);
  }
  Vec beta = estimate_mixture_weights(beliefs, labels, {good, bad});
  CHECK(beta[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(beta[1] == doctest::Approx(0.2).epsilon(1e-12));

  SUBCASE("single circuit normalizes to 1") {
    Vec one = estimate_mixture_weights(beliefs, labels, {good});
    CHECK(one[0] == doctest::Approx(1.0));
  }
  SUBCASE("all-zero accuracy falls back to uniform") {
    // both circuits suppress nothing and ties resolve to class 0; label 1
    CircuitSpec a({{0, 2, 1.5}}, ls), b({{0, 3, 1.5}}, ls);
    std::vector<Vec> bel{Vec::Constant(4, 1.0)};
    std::vector<int> lab{1};
    Vec beta2 = estimate_mixture_weights(bel, lab, {a, b});
    CHECK(beta2[0] == doctest::Approx(0.5));
    CHECK(beta2[1] == doctest::Approx(0.5));
  }
  SUBCASE("empty calibration is rejected") {
    CHECK_THROWS_AS(estimate_mixture_weights({}, {}, {good}), StructuralError);
  }
}

TEST_CASE("common rule weight") {
  LabelSpace ls(1, 2);
  KnowledgeBase uniform({CircuitSpec({{0, 1, 1.5}}, ls), CircuitSpec({{0, 2, 1.5}}, ls)},
                        probs({0.5, 0.5}));
  CHECK(uniform.common_rule_weight() == 1.5);
  KnowledgeBase empty({CircuitSpec({}, ls)}, probs({1.0}));
  CHECK(empty.common_rule_weight() == 0.0);
  KnowledgeBase mixed({CircuitSpec({{0, 1, 1.0}, {0, 2, 2.0}}, ls)}, probs({1.0}));
  CHECK_THROWS_AS(mixed.common_rule_weight(), StructuralError);
}
