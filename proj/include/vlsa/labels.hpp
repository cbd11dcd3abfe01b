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

#ifndef VLSA_LABELS_HPP_
#define VLSA_LABELS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vlsa {

// One patient's follow-up: time in months and event indicator.
struct SurvivalRecord {
  std::string patient_id;
  double time = 0.0;
  int event = 0;
  std::string bag_path;
};

enum class GridScheme { kUniform, kQuantile };

std::string to_string(GridScheme scheme);
GridScheme grid_scheme_from_string(const std::string& name);

// Cut points [T_0 = 0, T_1, ..., T_C] of C discrete survival classes.
class TimeGrid {
 public:
  TimeGrid() = default;
  // Throws std::invalid_argument unless cuts start at 0, increase strictly and C >= 2.
  TimeGrid(std::vector<double> cuts, GridScheme scheme);

  int num_classes() const { return static_cast<int>(cuts_.size()) - 1; }
  const std::vector<double>& cuts() const { return cuts_; }
  GridScheme scheme() const { return scheme_; }
  double lower(int klass) const { return cuts_[klass - 1]; }
  double upper(int klass) const { return cuts_[klass]; }
  double midpoint(int klass) const { return 0.5 * (lower(klass) + upper(klass)); }

 private:
  std::vector<double> cuts_;
  GridScheme scheme_ = GridScheme::kUniform;
};

// Time-discrete label; klass is 1-based.
struct DiscreteLabel {
  int klass = 1;
  int event = 0;
};

// Product-limit survival curve over the distinct event times.
struct KMCurve {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<int> at_risk;
  std::vector<int> deaths;

  // Right-continuous step function; 1 before the first event time.
  double survival_at(double t) const;
};

// C defaults to floor(sqrt(N_e)).
TimeGrid build_time_grid(const std::vector<SurvivalRecord>& records, GridScheme scheme,
                         std::optional<int> num_bins = std::nullopt);

int default_num_bins(int num_events);

DiscreteLabel assign_class(const SurvivalRecord& record, const TimeGrid& grid);

// y(c, delta): softmax of +tau' on the target support and -tau' elsewhere.
Eigen::VectorXd target_distribution(const DiscreteLabel& label, int num_classes,
                                    double tau_prime);

KMCurve kaplan_meier(const std::vector<SurvivalRecord>& records);

// Most likely class of a censored record under the cohort KM curve,
// conditional on survival past the censoring time.
int estimate_censored_class(const SurvivalRecord& record, const TimeGrid& grid,
                            const KMCurve& km);

struct FewShotSample {
  std::vector<SurvivalRecord> records;
  std::vector<int> empty_classes;
};

FewShotSample few_shot_sample(const std::vector<SurvivalRecord>& records, const TimeGrid& grid,
                              const KMCurve& km, int shots_per_class, std::uint64_t seed);

}  // namespace vlsa

#endif  // VLSA_LABELS_HPP_
