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
#include "vlsa/prompts.hpp"

using namespace vlsa;

TEST(OrderingDistance, Examples) {
  const auto d84 = default_distance(8, 4);
  EXPECT_EQ(d84(0, 0), 0.0);
  EXPECT_EQ(d84(7, 3), 0.0);
  EXPECT_NEAR(d84(3, 1), 2.0 / 3.0, 1e-15);
  const auto d52 = default_distance(5, 2);
  EXPECT_EQ(d52(2, 0), 2.0);
  EXPECT_EQ(d52(2, 1), 2.0);
  EXPECT_THROW(default_distance(5, 1), std::invalid_argument);
  EXPECT_THROW(default_distance(1, 2), std::invalid_argument);
}

TEST(InterpolationWeights, Examples) {
  const auto w = interpolation_weights(default_distance(5, 2), 5);
  EXPECT_NEAR(w(2, 0), 0.5, 1e-15);
  EXPECT_NEAR(w(2, 1), 0.5, 1e-15);
  const auto w84 = interpolation_weights(default_distance(8, 4), 8);
  Eigen::Index arg = 0;
  w84.row(0).maxCoeff(&arg);
  EXPECT_EQ(arg, 0);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(2, 2, 1.0);
  EXPECT_THROW(interpolation_weights(bad, 2), std::invalid_argument);
}

TEST(InterpolationWeights, RowStochastic) {
  for (int c = 2; c <= 12; ++c) {
    for (int b = 2; b <= 6; ++b) {
      const auto w = interpolation_weights(default_distance(c, b), c);
      EXPECT_GE(w.minCoeff(), 0.0);
      for (int r = 0; r < c; ++r) EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-12);
    }
  }
}

TEST(InterpolationWeights, EqualCountsPeakOnOwnBase) {
  for (int c = 2; c <= 8; ++c) {
    const auto w = interpolation_weights(default_distance(c, c), c);
    for (int r = 0; r < c; ++r) {
      Eigen::Index arg = 0;
      w.row(r).maxCoeff(&arg);
      EXPECT_EQ(arg, r);
      double total = 0.0;
      for (int b = 0; b < c; ++b) total += 1.0 - std::abs(r - b) / double(c - 1);
      for (int b = 0; b < c; ++b) {
        EXPECT_NEAR(w(r, b), (1.0 - std::abs(r - b) / double(c - 1)) / total, 1e-14);
      }
    }
  }
  // Two classes, two bases: each class keeps only its own base.
  EXPECT_LT((interpolation_weights(default_distance(2, 2), 2) - Eigen::Matrix2d::Identity()).norm(), 1e-15);
}

TEST(InterpolateTokens, OneHotAndIdenticalBases) {
  std::mt19937_64 gen(1);
  std::vector<Eigen::MatrixXd> bases{oracle::random_matrix(gen, 2, 3), oracle::random_matrix(gen, 2, 3)};
  Eigen::MatrixXd onehot(3, 2);
  onehot << 0, 1, 1, 0, 0, 1;
  const auto out = interpolate_tokens(bases, onehot);
  EXPECT_EQ(out[0], bases[1]);
  EXPECT_EQ(out[1], bases[0]);

  std::vector<Eigen::MatrixXd> same(3, bases[0]);
  const auto mixed = interpolate_tokens(same, interpolation_weights(default_distance(6, 3), 6));
  for (const auto& t : mixed) EXPECT_LT((t - bases[0]).norm(), 1e-14);
}

TEST(InterpolateTokens, LinearInBases) {
  std::mt19937_64 gen(2);
  std::vector<Eigen::MatrixXd> bases;
  for (int b = 0; b < 4; ++b) bases.push_back(oracle::random_matrix(gen, 3, 5));
  const auto w = interpolation_weights(default_distance(7, 4), 7);
  const auto a = interpolate_tokens(bases, w);
  for (auto& b : bases) b *= -2.5;
  const auto s = interpolate_tokens(bases, w);
  for (int c = 0; c < 7; ++c) EXPECT_LT((s[c] + 2.5 * a[c]).norm(), 1e-12);
}

TEST(SurvivalPrompts, ShapesAndModes) {
  const PseudoEncoder enc(3, 16, 10);
  const auto ordinal = init_prompt_params(6, 4, 5, 4, 16, true, 1);
  EXPECT_EQ(ordinal.num_bases(), 4);
  EXPECT_EQ(ordinal.context_tokens.rows(), 5);
  EXPECT_EQ(ordinal.class_tokens[0].rows(), 4);
  const auto text = survival_prompts(ordinal, prompt_weights(ordinal), enc);
  EXPECT_EQ(text.rows(), 6);
  EXPECT_EQ(text.cols(), 10);
  for (int c = 0; c < 6; ++c) EXPECT_NEAR(text.row(c).norm(), 1.0, 1e-12);

  const auto coop = init_prompt_params(6, 4, 5, 4, 16, false, 1);
  EXPECT_EQ(coop.num_bases(), 6);
  EXPECT_EQ(prompt_weights(coop), Eigen::MatrixXd::Identity(6, 6));
  EXPECT_THROW(init_prompt_params(6, 1, 5, 4, 16, true, 1), std::invalid_argument);
}

TEST(SurvivalPrompts, IdenticalClassTokensGiveIdenticalRows) {
  const PseudoEncoder enc(4, 8, 6);
  auto p = init_prompt_params(2, 2, 3, 2, 8, false, 2);
  p.class_tokens[1] = p.class_tokens[0];
  const auto text = survival_prompts(p, prompt_weights(p), enc);
  EXPECT_EQ(text.row(0), text.row(1));
}

TEST(SurvivalPrompts, FrozenTable) {
  Eigen::MatrixXd table(2, 2);
  table << 3, 4, 0, 2;
  const auto t = survival_prompts(table, 2);
  EXPECT_NEAR(t(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(t(1, 1), 1.0, 1e-15);
  EXPECT_THROW(survival_prompts(table, 3), std::invalid_argument);
  table.row(1).setZero();
  EXPECT_THROW(survival_prompts(table, 2), std::invalid_argument);
}

TEST(SurvivalPrompts, BackwardMatchesFiniteDifferences) {
  const PseudoEncoder enc(5, 6, 7);
  std::mt19937_64 gen(3);
  for (bool ordinal : {true, false}) {
    auto p = init_prompt_params(5, 3, 2, 3, 6, ordinal, 4);
    const Eigen::MatrixXd w = prompt_weights(p);
    const Eigen::MatrixXd up = oracle::random_matrix(gen, 5, 7);
    const auto g = survival_prompts_backward(p, w, enc, up);
    const auto objective = [&](const PromptParams& q) {
      return (survival_prompts(q, w, enc).array() * up.array()).sum();
    };

    const auto fctx = [&](const Eigen::VectorXd& flat) {
      auto q = p;
      q.context_tokens = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 2, 6);
      return objective(q);
    };
    const Eigen::VectorXd ctx = Eigen::Map<const Eigen::VectorXd>(p.context_tokens.data(), 12);
    EXPECT_LT(oracle::relative_error(Eigen::Map<const Eigen::VectorXd>(g.context_tokens.data(), 12),
                                     oracle::central_difference(fctx, ctx)),
              1e-7);
    for (int b = 0; b < p.num_bases(); ++b) {
      const auto fcls = [&](const Eigen::VectorXd& flat) {
        auto q = p;
        q.class_tokens[b] = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 3, 6);
        return objective(q);
      };
      const Eigen::VectorXd cls = Eigen::Map<const Eigen::VectorXd>(p.class_tokens[b].data(), 18);
      EXPECT_LT(oracle::relative_error(Eigen::Map<const Eigen::VectorXd>(g.class_tokens[b].data(), 18),
                                       oracle::central_difference(fcls, cls)),
                1e-7);
    }
  }
}

TEST(OrdinalityReport, RampAndDegenerate) {
  // Unit vectors along an arc: angle grows with class index.
  Eigen::MatrixXd ramp(6, 2);
  for (int c = 0; c < 6; ++c) ramp.row(c) << std::cos(0.2 * c), std::sin(0.2 * c);
  const auto r = prompt_ordinality_report(ramp);
  EXPECT_GT(r.comparable_triples, 0);
  EXPECT_EQ(r.ranking_accuracy, 1.0);
  EXPECT_NEAR(r.similarity(0, 0), 1.0, 1e-15);

  const auto flat = prompt_ordinality_report(Eigen::MatrixXd::Ones(4, 3));
  EXPECT_EQ(flat.comparable_triples, 0);
  EXPECT_TRUE(std::isnan(flat.ranking_accuracy));
  EXPECT_THROW(prompt_ordinality_report(Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
}

TEST(OrdinalityReport, BruteForceTripleCount) {
  std::mt19937_64 gen(6);
  const Eigen::MatrixXd text = oracle::random_matrix(gen, 5, 4);
  const auto r = prompt_ordinality_report(text);
  long comparable = 0, correct = 0;
  for (int c = 0; c < 5; ++c)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        if (i == c || std::abs(c - i) >= std::abs(c - j)) continue;
        const double a = text.row(c).dot(text.row(i)) / (text.row(c).norm() * text.row(i).norm());
        const double b = text.row(c).dot(text.row(j)) / (text.row(c).norm() * text.row(j).norm());
        ++comparable;
        correct += a > b;
      }
  EXPECT_EQ(r.comparable_triples, comparable);
  EXPECT_EQ(r.correct_triples, correct);
}
