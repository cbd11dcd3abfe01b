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

#ifndef VLSA_METRICS_HPP_
#define VLSA_METRICS_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/labels.hpp"

namespace vlsa {

enum class RiskTies { kZero, kHalf };

struct Concordance {
  double index = 0.0;
  long comparable_pairs = 0;
  long concordant_pairs = 0;
  long tied_pairs = 0;
};

// Pairs (i, j) with t_i < t_j and delta_i = 1 are comparable; concordant when
// risk_i > risk_j. Risk ties score 0 unless ties = kHalf.
Concordance concordance(std::span<const double> risks, const std::vector<SurvivalRecord>& records,
                        RiskTies ties = RiskTies::kZero);

// Throws "CI undefined" when no pair is comparable.
double concordance_index(std::span<const double> risks,
                         const std::vector<SurvivalRecord>& records,
                         RiskTies ties = RiskTies::kZero);

// |t - t_hat| for events, max(0, t - t_hat) for censored records.
double mae(double predicted_time, const SurvivalRecord& record);
double mean_mae(std::span<const double> predicted_times,
                const std::vector<SurvivalRecord>& records);

struct DCalibration {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<int> counts;
};

// Pearson chi-square uniformity test of S_i(t_i) over equal-width probability bins.
DCalibration d_calibration(std::span<const double> survival_at_event, int bins = 10);

// Piecewise-constant survival: survival[c] on [T_{c-1}, T_c); t >= T_C maps to the last bin.
double survival_at_time(const Eigen::VectorXd& survival, const TimeGrid& grid, double t);

struct LogRank {
  double statistic = 0.0;
  double p_value = 1.0;
  double observed = 0.0;  // group 1 deaths
  double expected = 0.0;
  double variance = 0.0;
};

// Two-group log-rank test; groups[i] in {0, 1}.
LogRank logrank_test(const std::vector<SurvivalRecord>& records, std::span<const int> groups);

struct RiskGrouping {
  std::vector<int> groups;  // 1 = high risk
  double threshold = 0.0;   // median risk; ties go to the low-risk group
  LogRank test;
  KMCurve low_risk;
  KMCurve high_risk;
};

RiskGrouping risk_grouping_logrank(std::span<const double> risks,
                                   const std::vector<SurvivalRecord>& records);

struct EvaluationReport {
  double ci = 0.0;
  double mae = 0.0;
  double dcal_statistic = 0.0;
  double dcal_pvalue = 1.0;
  long n_pairs_comparable = 0;
  int n_patients = 0;
  LogRank logrank;
  bool has_logrank = false;
};

}  // namespace vlsa

#endif  // VLSA_METRICS_HPP_
