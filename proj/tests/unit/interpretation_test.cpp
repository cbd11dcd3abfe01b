/*
 * Copyright 2026 The VLSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vlsa/interpretation.hpp"
#include "vlsa/model.hpp"

using namespace vlsa;

namespace {

struct Problem {
  Eigen::MatrixXd pooled;
  LinearHead<double> head;
  Eigen::MatrixXd text;
  double tau = 0.0;
};

Problem random_problem(std::mt19937_64& gen, int m, int d = 6, int c = 4) {
  Problem p;
  p.pooled = oracle::random_matrix(gen, m, d);
  p.head = {Eigen::MatrixXd::Identity(d, d) + 0.3 * oracle::random_matrix(gen, d, d),
            0.1 * Eigen::VectorXd(oracle::random_matrix(gen, d, 1))};
  p.text = oracle::random_matrix(gen, c, d);
  p.tau = 5.0;
  return p;
}

double coalition_risk(const Problem& p, const std::vector<int>& z) {
  return incidence<double>(subset_fuse<double>(p.pooled, z, p.head), p.text, p.tau).risk;
}

ModelConfig tiny_config(AggregatorKind kind = AggregatorKind::kPriorGuided) {
  ModelConfig cfg;
  cfg.aggregator.kind = kind;
  cfg.num_classes = 4;
  cfg.token_dim = 12;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Shapley, SinglePlayer) {
  std::mt19937_64 gen(1);
  const auto p = random_problem(gen, 1);
  const auto r = shapley_exact(p.pooled, p.head, p.text, p.tau);
  EXPECT_NEAR(r.contributions(0), coalition_risk(p, {0}) - coalition_risk(p, {}), 1e-14);
  EXPECT_NEAR(r.baseline_risk, 2.5, 1e-14);
}

TEST(Shapley, MatchesPermutationOracleAndIsEfficient) {
  std::mt19937_64 gen(2);
  for (int m = 1; m <= 6; ++m) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = random_problem(gen, m);
      const auto r = shapley_exact(p.pooled, p.head, p.text, p.tau);
      const auto phi = oracle::permutation_shapley(m, [&](const std::vector<int>& z) { return coalition_risk(p, z); });
      for (int i = 0; i < m; ++i) EXPECT_NEAR(r.contributions(i), phi[i], 1e-12);
      const std::vector<int> all = [&] {
        std::vector<int> v(m);
        std::iota(v.begin(), v.end(), 0);
        return v;
      }();
      EXPECT_NEAR(r.contributions.sum(), coalition_risk(p, all) - coalition_risk(p, {}), 1e-10);
      EXPECT_NEAR(r.full_risk - r.baseline_risk, r.contributions.sum(), 1e-10);
    }
  }
}

TEST(Shapley, IdenticalRowsAreSymmetric) {
  std::mt19937_64 gen(3);
  auto p = random_problem(gen, 4);
  p.pooled.row(3) = p.pooled.row(1);
  const auto r = shapley_exact(p.pooled, p.head, p.text, p.tau);
  EXPECT_NEAR(r.contributions(1), r.contributions(3), 1e-13);
}

TEST(Shapley, RelabelingPermutesContributions) {
  std::mt19937_64 gen(4);
  const auto p = random_problem(gen, 5);
  const auto a = shapley_exact(p.pooled, p.head, p.text, p.tau);
  const int perm[] = {2, 4, 0, 1, 3};
  Problem q = p;
  for (int i = 0; i < 5; ++i) q.pooled.row(i) = p.pooled.row(perm[i]);
  const auto b = shapley_exact(q.pooled, q.head, q.text, q.tau);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(b.contributions(i), a.contributions(perm[i]), 1e-12);
}

TEST(Shapley, DummyPlayerGetsZero) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> table(64);
  for (double& t : table) t = z(gen);
  // Player 2 never changes the value.
  const auto r = shapley_values(6, [&](std::span<const int> members) {
    unsigned mask = 0;
    for (int m : members)
      if (m != 2) mask |= 1u << m;
    return table[mask];
  });
  EXPECT_LT(std::abs(r.contributions(2)), 1e-10);
}

TEST(Shapley, Limits) {
  EXPECT_THROW(shapley_values(21, [](std::span<const int>) { return 0.0; }), std::invalid_argument);
  try {
    shapley_values(21, [](std::span<const int>) { return 0.0; });
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("coalition enumeration too large"), std::string::npos);
  }
  EXPECT_THROW(shapley_values(0, [](std::span<const int>) { return 0.0; }), std::invalid_argument);
}

TEST(TopInstances, Examples) {
  std::mt19937_64 gen(6);
  const Eigen::MatrixXd priors = oracle::random_matrix(gen, 2, 4);
  const auto one = top_instances(priors, oracle::random_matrix(gen, 1, 4), 100.0, 0, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].index, 0);
  EXPECT_DOUBLE_EQ(one[0].weight, 1.0);

  const auto flat = top_instances(priors, oracle::random_matrix(gen, 5, 4), 0.0, 1, 5);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(flat[k].index, k);
    EXPECT_DOUBLE_EQ(flat[k].weight, 0.2);
  }
  EXPECT_THROW(top_instances(priors, oracle::random_matrix(gen, 3, 4), 1.0, 0, 4), std::invalid_argument);
  EXPECT_THROW(top_instances(priors, oracle::random_matrix(gen, 3, 4), 1.0, 2, 1), std::out_of_range);
}

TEST(TopInstances, MatchesSortedDirectWeights) {
  std::mt19937_64 gen(7);
  const Eigen::MatrixXd priors = oracle::random_matrix(gen, 3, 4);
  const Eigen::MatrixXd bag = oracle::random_matrix(gen, 5, 4);
  Eigen::VectorXd w(5);
  for (int k = 0; k < 5; ++k) {
    w(k) = std::exp(10.0 * priors.row(1).dot(bag.row(k)) / (priors.row(1).norm() * bag.row(k).norm()));
  }
  w /= w.sum();
  std::vector<int> order{0, 1, 2, 3, 4};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
  const auto ranked = top_instances(priors, bag, 10.0, 1, 3);
  ASSERT_EQ(ranked.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(ranked[i].index, order[i]);
    EXPECT_NEAR(ranked[i].weight, w(order[i]), 1e-14);
  }
}

TEST(Explain, ModelReportIsEfficient) {
  std::mt19937_64 gen(8);
  const Eigen::MatrixXd base = oracle::random_matrix(gen, 3, 6);
  Model model(tiny_config(), base, {"a", "b", "c"});
  model.params().head.weight += 0.2 * oracle::random_matrix(gen, 6, 6);
  const Eigen::MatrixXd bag = oracle::random_matrix(gen, 7, 6);
  const auto r = explain(model, bag);
  EXPECT_EQ(r.prior_texts, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_NEAR(r.contributions.sum(), r.full_risk - r.baseline_risk, 1e-10);
  EXPECT_NEAR(r.full_risk, model.predict(bag, model.prompts()).risk, 1e-12);
  EXPECT_NEAR(r.baseline_risk, 2.5, 1e-12);

  const auto rows = prior_evidence(model, bag, 2);
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(prior_evidence(model, bag, 50).size(), 21u);

  Model attention(tiny_config(AggregatorKind::kAttention), base);
  EXPECT_THROW(explain(attention, bag), std::invalid_argument);
}
