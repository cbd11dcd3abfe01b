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
#include "vlsa/prediction.hpp"

using namespace vlsa;

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

TEST(Incidence, EqualScoresAreUniform) {
  const Eigen::MatrixXd text = Eigen::MatrixXd::Ones(4, 3);
  const auto r = incidence<double>(Eigen::Vector3d(1, -2, 0.5), text, 14.0);
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(r.y_hat(c), 0.25, 1e-15);
}

TEST(Incidence, ZeroImageFallback) {
  std::mt19937_64 gen(1);
  const auto r = incidence<double>(Eigen::VectorXd::Zero(5), oracle::random_matrix(gen, 8, 5), 30.0);
  for (int c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(r.y_hat(c), 1.0 / 8.0);
  EXPECT_NEAR(r.risk, 4.5, 1e-14);
}

TEST(Incidence, TwoClassHandValue) {
  Eigen::MatrixXd text(2, 2);
  text << std::cos(M_PI / 3), std::sin(M_PI / 3), std::cos(2 * M_PI / 3), std::sin(2 * M_PI / 3);
  const auto r = incidence<double>(Eigen::Vector2d(3, 0), text, 1.0);
  EXPECT_NEAR(r.cosines(0), 0.5, 1e-15);
  EXPECT_NEAR(r.cosines(1), -0.5, 1e-15);
  EXPECT_NEAR(r.y_hat(0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(r.y_hat(0), 0.7311, 5e-5);
  EXPECT_NEAR(r.y_hat(1), 0.2689, 5e-5);
}

TEST(Incidence, ScaleInvariantInImage) {
  std::mt19937_64 gen(2);
  const Eigen::MatrixXd text = oracle::random_matrix(gen, 5, 6);
  const Eigen::VectorXd image = oracle::random_matrix(gen, 6, 1);
  const auto a = incidence<double>(image, text, 14.0);
  const auto b = incidence<double>(Eigen::VectorXd(4.0 * image), text, 14.0);
  EXPECT_LT((a.y_hat - b.y_hat).norm(), 1e-15);
}

TEST(Incidence, SurvivalPlusCifIsOne) {
  std::mt19937_64 gen(3);
  const auto r = incidence<double>(oracle::random_matrix(gen, 4, 1), oracle::random_matrix(gen, 7, 4), 9.0);
  for (int c = 0; c < 7; ++c) EXPECT_NEAR(r.survival(c) + r.cif(c), 1.0, 1e-12);
  EXPECT_THROW(incidence<double>(Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Ones(2, 4), 1.0),
               std::invalid_argument);
  EXPECT_THROW(incidence<double>(Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Zero(2, 3), 1.0),
               std::invalid_argument);
}

TEST(RiskScore, PointMassesAndUniform) {
  Eigen::VectorXd first = Eigen::VectorXd::Zero(6);
  first(0) = 1.0;
  EXPECT_DOUBLE_EQ(risk_score(incidence_from_distribution<double>(first)), 6.0);
  Eigen::VectorXd last = Eigen::VectorXd::Zero(6);
  last(5) = 1.0;
  EXPECT_DOUBLE_EQ(risk_score(incidence_from_distribution<double>(last)), 1.0);
  EXPECT_NEAR(risk_score(incidence_from_distribution<double>(Eigen::VectorXd::Constant(8, 0.125))),
              4.5, 1e-14);
}

TEST(RiskScore, MovingMassLaterLowersRisk) {
  std::mt19937_64 gen(4);
  const Eigen::VectorXd y = oracle::random_simplex(gen, 7);
  const double base = risk_score(incidence_from_distribution<double>(y));
  for (int i = 0; i < 7; ++i) {
    for (int j = i + 1; j < 7; ++j) {
      Eigen::VectorXd moved = y;
      const double eps = 0.5 * y(i);
      moved(i) -= eps;
      moved(j) += eps;
      EXPECT_NEAR(base - risk_score(incidence_from_distribution<double>(moved)), eps * (j - i), 1e-12);
    }
  }
}

TEST(ExpectedTime, MidpointExamples) {
  const TimeGrid grid({0, 10, 20}, GridScheme::kUniform);
  EXPECT_DOUBLE_EQ(expected_time<double>(Eigen::Vector2d(1, 0), grid), 5.0);
  EXPECT_DOUBLE_EQ(expected_time<double>(Eigen::Vector2d(0.5, 0.5), grid), 10.0);
  EXPECT_DOUBLE_EQ(expected_time<double>(Eigen::Vector2d(0.25, 0.75), grid), 12.5);
  EXPECT_THROW(expected_time<double>(Eigen::Vector3d(1, 0, 0), grid), std::invalid_argument);
}

TEST(HazardHead, ZeroCosines) {
  Eigen::MatrixXd text(4, 2);
  text << 0, 1, 0, 2, 0, -1, 0, 3;
  const auto r = hazard_head<double>(Eigen::Vector2d(1, 0), text, 10.0);
  for (int c = 0; c < 4; ++c) {
    EXPECT_DOUBLE_EQ(r.hazards(c), 0.5);
    EXPECT_DOUBLE_EQ(r.survival(c), std::pow(2.0, -(c + 1)));
  }
}

TEST(HazardHead, SaturationAndProductOracle) {
  Eigen::MatrixXd text(2, 2);
  text << 1, 0.2, -1, 0;
  const auto sat = hazard_head<double>(Eigen::Vector2d(1, 0), text, 1e4);
  EXPECT_NEAR(sat.hazards(0), 1.0, 1e-12);
  EXPECT_NEAR(sat.survival(0), 0.0, 1e-12);

  std::mt19937_64 gen(5);
  const Eigen::MatrixXd t3 = oracle::random_matrix(gen, 3, 4);
  const Eigen::VectorXd img = oracle::random_matrix(gen, 4, 1);
  const auto r = hazard_head<double>(img, t3, 3.0);
  double s = 1.0, risk = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double cosine = t3.row(c).dot(img) / (t3.row(c).norm() * img.norm());
    const double h = 1.0 / (1.0 + std::exp(-3.0 * cosine));
    s *= 1.0 - h;
    risk += 1.0 - s;
    EXPECT_NEAR(r.hazards(c), h, 1e-15);
    EXPECT_NEAR(r.survival(c), s, 1e-15);
  }
  EXPECT_NEAR(r.risk, risk, 1e-14);
  const Eigen::VectorXd y = hazard_to_incidence(r);
  EXPECT_NEAR(y.sum(), 1.0, 1e-14);
  EXPECT_NEAR(y(0), r.hazards(0), 1e-15);
  EXPECT_NEAR(y(1), (1 - r.hazards(0)) * r.hazards(1), 1e-15);
}

TEST(IncidenceBackward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(6);
  const Eigen::MatrixXd text = oracle::random_matrix(gen, 4, 5);
  const Eigen::VectorXd image = oracle::random_matrix(gen, 5, 1);
  const Eigen::VectorXd up = oracle::random_matrix(gen, 4, 1);
  const double tau = 7.0;
  const auto fwd = incidence<double>(image, text, tau);
  const auto g = incidence_backward<double>(image, text, tau, fwd, up);

  const auto fi = [&](const Eigen::VectorXd& x) { return up.dot(incidence<double>(x, text, tau).y_hat); };
  EXPECT_LT(oracle::relative_error(g.image, oracle::central_difference(fi, image)), 1e-7);
  const auto ft = [&](const Eigen::VectorXd& flat) {
    return up.dot(incidence<double>(image, Eigen::Map<const Eigen::MatrixXd>(flat.data(), 4, 5), tau).y_hat);
  };
  EXPECT_LT(oracle::relative_error(flatten(g.text), oracle::central_difference(ft, flatten(text))), 1e-7);
  const auto fs = [&](const Eigen::VectorXd& t) { return up.dot(incidence<double>(image, text, t(0)).y_hat); };
  EXPECT_NEAR(g.tau, oracle::central_difference(fs, Eigen::VectorXd::Constant(1, tau))(0), 1e-8);
}

TEST(HazardBackward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(7);
  const Eigen::MatrixXd text = oracle::random_matrix(gen, 4, 3);
  const Eigen::VectorXd image = oracle::random_matrix(gen, 3, 1);
  const Eigen::VectorXd up = oracle::random_matrix(gen, 4, 1);
  const double tau = 2.0;
  const auto fwd = hazard_head<double>(image, text, tau);
  const auto g = hazard_backward<double>(image, text, tau, fwd, up);
  const auto fi = [&](const Eigen::VectorXd& x) { return up.dot(hazard_head<double>(x, text, tau).hazards); };
  EXPECT_LT(oracle::relative_error(g.image, oracle::central_difference(fi, image)), 1e-7);

  const Eigen::VectorXd gs = oracle::random_matrix(gen, 4, 1);
  const Eigen::VectorXd h = fwd.hazards;
  const auto fsurv = [&](const Eigen::VectorXd& hz) {
    double s = 1.0, total = 0.0;
    for (int c = 0; c < 4; ++c) {
      s *= 1.0 - hz(c);
      total += gs(c) * s;
    }
    return total;
  };
  EXPECT_LT(oracle::relative_error(survival_to_hazard_grad<double>(h, gs), oracle::central_difference(fsurv, h)),
            1e-8);
}
