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
#include "vlsa/losses.hpp"

using namespace vlsa;

namespace {

Eigen::VectorXd point_mass(int n, int at) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(at) = 1.0;
  return v;
}

}  // namespace

TEST(MleLoss, Examples) {
  EXPECT_EQ(mle_loss<double>(Eigen::Vector3d(0, 1, 0), {2, 1}), 0.0);
  EXPECT_EQ(mle_loss<double>(Eigen::Vector3d(0.7, 0.2, 0.1), {1, 0}), 0.0);
  EXPECT_NEAR(mle_loss<double>(Eigen::Vector4d(0.25, 0.25, 0.25, 0.25), {3, 1}), 1.386294, 1e-6);
  EXPECT_NEAR(mle_loss<double>(Eigen::Vector3d(0.2, 0.3, 0.5), {3, 0}), -std::log(0.5), 1e-15);
  // Clamped at 1e-12 instead of infinity.
  EXPECT_NEAR(mle_loss<double>(Eigen::Vector2d(1, 0), {2, 1}), -std::log(1e-12), 1e-9);
}

TEST(MleLoss, NonNegative) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto y = oracle::random_simplex(gen, 5);
    for (int c = 1; c <= 5; ++c)
      for (int e : {0, 1}) EXPECT_GE(mle_loss<double>(y, {c, e}), 0.0);
  }
}

TEST(EmdMeasure, Examples) {
  std::mt19937_64 gen(2);
  const auto p = oracle::random_simplex(gen, 4);
  EXPECT_EQ(emd_measure<double>(p, p, 1), 0.0);
  EXPECT_DOUBLE_EQ(emd_measure<double>(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 1), 0.5);
  EXPECT_NEAR(emd_measure<double>(point_mass(3, 0), point_mass(3, 2), 1),
              oracle::transport_cost(point_mass(3, 0), point_mass(3, 2)), 1e-12);
  EXPECT_NEAR(emd_measure<double>(point_mass(3, 0), point_mass(3, 2), 1), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(emd_measure<double>(p, Eigen::Vector3d(1, 0, 0), 1), std::invalid_argument);
  EXPECT_THROW(emd_measure<double>(p, p, 0), std::invalid_argument);
}

TEST(EmdMeasure, MatchesTransportOracle) {
  std::mt19937_64 gen(3);
  for (int c = 2; c <= 5; ++c) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto p = oracle::random_simplex(gen, c);
      const auto q = oracle::random_simplex(gen, c);
      EXPECT_NEAR(emd_measure<double>(p, q, 1), oracle::transport_cost(p, q), 1e-9);
    }
  }
}

TEST(EmdMeasure, MetricAxioms) {
  std::mt19937_64 gen(4);
  for (int l : {1, 2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto a = oracle::random_simplex(gen, 6);
      const auto b = oracle::random_simplex(gen, 6);
      const auto c = oracle::random_simplex(gen, 6);
      const double ab = emd_measure<double>(a, b, l);
      EXPECT_NEAR(ab, emd_measure<double>(b, a, l), 1e-15);
      EXPECT_GT(ab, 0.0);
      EXPECT_LE(emd_measure<double>(a, c, l), ab + emd_measure<double>(b, c, l) + 1e-12);
    }
  }
}

TEST(EmdLoss, Examples) {
  const DiscreteLabel label{2, 1};
  const Eigen::VectorXd target = target_distribution(label, 3, 1.0);
  EXPECT_NEAR(emd_loss<double>(target, label, 1.0), 0.0, 1e-30);
  EXPECT_DOUBLE_EQ(squared_cdf_distance<double>(cumulative_sum(Eigen::Vector2d(1, 0)),
                                                cumulative_sum(Eigen::Vector2d(0, 1))),
                   1.0);
  EXPECT_NEAR(emd_loss<double>(Eigen::Vector2d(1, 0), {2, 1}, 50.0), 1.0, 1e-12);
}

TEST(EmdLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = oracle::random_simplex(gen, 6);
    const DiscreteLabel label{1 + trial % 6, trial % 2};
    const auto f = [&](const Eigen::VectorXd& v) { return emd_loss<double>(v, label, 3.0); };
    EXPECT_LT(oracle::relative_error(emd_loss_grad<double>(y, label, 3.0), oracle::central_difference(f, y)),
              1e-5);
  }
}

TEST(EmdLoss, PointMassCloserToClassIsStrictlyBetter) {
  for (int n = 2; n <= 8; ++n) {
    for (int c = 1; c <= n; ++c) {
      for (double tau : {1.0, 10.0, 1.0 / 0.07}) {
        const DiscreteLabel label{c, 1};
        for (int k = 1; k <= n; ++k) {
          if (k == c) continue;
          const int closer = k < c ? k + 1 : k - 1;
          EXPECT_LT(emd_loss<double>(point_mass(n, closer - 1), label, tau),
                    emd_loss<double>(point_mass(n, k - 1), label, tau))
              << "C=" << n << " c=" << c << " k=" << k << " tau'=" << tau;
        }
      }
    }
  }
}

TEST(TotalLoss, Additivity) {
  const Eigen::Vector2d y(0.25, 0.75);
  const DiscreteLabel label{1, 1};
  LossConfig off;
  off.beta = 0.0;
  EXPECT_EQ(total_loss<double>(y, label, off, 2.0), mle_loss<double>(y, label));
  LossConfig disabled;
  disabled.use_emd = false;
  EXPECT_EQ(total_loss<double>(y, label, disabled, 2.0), mle_loss<double>(y, label));

  LossConfig one;
  const double emd = emd_loss<double>(y, label, 2.0);
  EXPECT_NEAR(total_loss<double>(y, label, one, 2.0), -std::log(0.25) + emd, 1e-15);
  LossConfig two;
  two.beta = 2.0;
  EXPECT_NEAR(total_loss<double>(y, label, two, 2.0) - total_loss<double>(y, label, off, 2.0), 2.0 * emd,
              1e-15);
}

TEST(TotalLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(6);
  LossConfig cfg;
  cfg.beta = 1.5;
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = oracle::random_simplex(gen, 5);
    const DiscreteLabel label{1 + trial % 5, trial % 2};
    const auto f = [&](const Eigen::VectorXd& v) { return total_loss<double>(v, label, cfg, 4.0); };
    EXPECT_LT(oracle::relative_error(total_loss_grad<double>(y, label, cfg, 4.0), oracle::central_difference(f, y)),
              1e-6);
  }
}

TEST(HazardNll, DirectFormula) {
  const Eigen::Vector4d h(0.1, 0.3, 0.6, 0.2);
  EXPECT_NEAR(hazard_nll<double>(h, {3, 1}), -std::log(0.9) - std::log(0.7) - std::log(0.6), 1e-15);
  EXPECT_NEAR(hazard_nll<double>(h, {2, 0}), -std::log(0.9) - std::log(0.7), 1e-15);
  EXPECT_NEAR(hazard_nll<double>(h, {1, 1}), -std::log(0.1), 1e-15);

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd hz(5);
    for (int i = 0; i < 5; ++i) hz(i) = u(gen);
    const DiscreteLabel label{1 + trial % 5, trial % 2};
    const auto f = [&](const Eigen::VectorXd& v) { return hazard_nll<double>(v, label); };
    EXPECT_LT(oracle::relative_error(hazard_nll_grad<double>(hz, label), oracle::central_difference(f, hz)),
              1e-7);
  }
}

TEST(HeadKind, NamesRoundTrip) {
  EXPECT_EQ(head_kind_from_string(to_string(HeadKind::kIncidence)), HeadKind::kIncidence);
  EXPECT_EQ(head_kind_from_string(to_string(HeadKind::kHazard)), HeadKind::kHazard);
  EXPECT_THROW(head_kind_from_string("cox"), std::invalid_argument);
}
