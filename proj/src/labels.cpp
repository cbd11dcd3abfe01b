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

#include "vlsa/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vlsa/random.hpp"
#include "vlsa/types.hpp"

namespace vlsa {

std::string to_string(GridScheme scheme) {
  return scheme == GridScheme::kUniform ? "uniform" : "quantile";
}

GridScheme grid_scheme_from_string(const std::string& name) {
  if (name == "uniform") return GridScheme::kUniform;
  if (name == "quantile") return GridScheme::kQuantile;
  throw std::invalid_argument("unknown grid scheme '" + name + "'");
}

TimeGrid::TimeGrid(std::vector<double> cuts, GridScheme scheme)
    : cuts_(std::move(cuts)), scheme_(scheme) {
  if (cuts_.size() < 3) {
    throw std::invalid_argument("time grid needs at least 2 classes");
  }
  if (cuts_.front() != 0.0) {
    throw std::invalid_argument("time grid must start at 0");
  }
  for (std::size_t i = 1; i < cuts_.size(); ++i) {
    if (!(cuts_[i] > cuts_[i - 1]) || !std::isfinite(cuts_[i])) {
      throw std::invalid_argument("time grid cuts must be finite and strictly increasing");
    }
  }
}

int default_num_bins(int num_events) {
  // Integer floor(sqrt(n)) without floating round-off at perfect squares.
  int c = static_cast<int>(std::sqrt(static_cast<double>(num_events)));
  while ((c + 1) * (c + 1) <= num_events) ++c;
  while (c * c > num_events) --c;
  return c;
}

TimeGrid build_time_grid(const std::vector<SurvivalRecord>& records, GridScheme scheme,
                         std::optional<int> num_bins) {
  std::vector<double> event_times;
  double max_time = 0.0;
  for (const auto& r : records) {
    if (!std::isfinite(r.time) || r.time < 0.0) {
      throw std::invalid_argument("record '" + r.patient_id + "' has invalid time");
    }
    max_time = std::max(max_time, r.time);
    if (r.event == 1) event_times.push_back(r.time);
  }
  if (event_times.empty()) throw std::invalid_argument("no uncensored records");

  const int bins = num_bins.value_or(default_num_bins(static_cast<int>(event_times.size())));
  if (bins < 2) {
    throw std::invalid_argument("time grid needs at least 2 bins, got " + std::to_string(bins));
  }

  std::vector<double> cuts{0.0};
  if (scheme == GridScheme::kUniform) {
    for (int i = 1; i < bins; ++i) cuts.push_back(max_time * i / bins);
    cuts.push_back(max_time);
    return TimeGrid(std::move(cuts), scheme);
  }

  // Quantiles of event times with linear interpolation between order statistics.
  std::sort(event_times.begin(), event_times.end());
  const auto n = static_cast<double>(event_times.size());
  for (int i = 1; i < bins; ++i) {
    const double h = (n - 1.0) * i / bins;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, event_times.size() - 1);
    const double q = event_times[lo] + (h - lo) * (event_times[hi] - event_times[lo]);
    if (q > cuts.back() && q < max_time) cuts.push_back(q);
  }
  if (max_time > cuts.back()) cuts.push_back(max_time);
  if (cuts.size() < 3) {
    throw std::invalid_argument("quantile grid collapsed to fewer than 2 classes");
  }
  return TimeGrid(std::move(cuts), scheme);
}

DiscreteLabel assign_class(const SurvivalRecord& record, const TimeGrid& grid) {
  if (record.time < 0.0 || !std::isfinite(record.time)) {
    throw std::invalid_argument("negative or non-finite time for '" + record.patient_id + "'");
  }
  const auto& cuts = grid.cuts();
  const auto it = std::upper_bound(cuts.begin(), cuts.end(), record.time);
  int klass = static_cast<int>(it - cuts.begin());
  klass = std::clamp(klass, 1, grid.num_classes());
  return {klass, record.event};
}

Eigen::VectorXd target_distribution(const DiscreteLabel& label, int num_classes,
                                    double tau_prime) {
  if (label.klass < 1 || label.klass > num_classes) {
    throw std::invalid_argument("class out of range");
  }
  Eigen::VectorXd logits = Eigen::VectorXd::Constant(num_classes, -tau_prime);
  if (label.event == 1) {
    logits(label.klass - 1) = tau_prime;
  } else {
    logits.tail(num_classes - label.klass + 1).setConstant(tau_prime);
  }
  return softmax(logits);
}

double KMCurve::survival_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - times.begin()) - 1];
}

KMCurve kaplan_meier(const std::vector<SurvivalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("kaplan_meier: empty input");
  std::vector<const SurvivalRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->time < b->time; });

  KMCurve curve;
  double surv = 1.0;
  int at_risk = static_cast<int>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i]->time;
    int deaths = 0;
    int leaving = 0;
    for (; i < sorted.size() && sorted[i]->time == t; ++i) {
      deaths += sorted[i]->event;
      ++leaving;
    }
    if (deaths > 0) {
      surv *= 1.0 - static_cast<double>(deaths) / at_risk;
      curve.times.push_back(t);
      curve.survival.push_back(surv);
      curve.at_risk.push_back(at_risk);
      curve.deaths.push_back(deaths);
    }
    at_risk -= leaving;
  }
  return curve;
}

int estimate_censored_class(const SurvivalRecord& record, const TimeGrid& grid,
                            const KMCurve& km) {
  const int num_classes = grid.num_classes();
  const int first = assign_class(record, grid).klass;
  const double s_t = km.survival_at(record.time);
  if (s_t <= 0.0) return num_classes;

  int best = first;
  double best_mass = -1.0;
  for (int c = first; c <= num_classes; ++c) {
    const double left = km.survival_at(std::max(grid.lower(c), record.time));
    const double right = c == num_classes ? 0.0 : km.survival_at(grid.upper(c));
    const double mass = (left - right) / s_t;
    if (mass > best_mass) {
      best_mass = mass;
      best = c;
    }
  }
  return best;
}

FewShotSample few_shot_sample(const std::vector<SurvivalRecord>& records, const TimeGrid& grid,
                              const KMCurve& km, int shots_per_class, std::uint64_t seed) {
  if (shots_per_class < 1) throw std::invalid_argument("shots_per_class must be >= 1");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const int c = r.event == 1 ? assign_class(r, grid).klass
                               : estimate_censored_class(r, grid, km);
    by_class[c].push_back(i);
  }

  FewShotSample out;
  Rng rng(seed);
  for (int c = 1; c <= grid.num_classes(); ++c) {
    auto it = by_class.find(c);
    if (it == by_class.end()) {
      out.empty_classes.push_back(c);
      continue;
    }
    auto members = it->second;
    rng.shuffle(members);
    const auto take = std::min<std::size_t>(members.size(), shots_per_class);
    for (std::size_t k = 0; k < take; ++k) out.records.push_back(records[members[k]]);
  }
  return out;
}

}  // namespace vlsa
