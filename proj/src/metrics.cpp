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

#include "vlsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vlsa/special.hpp"

namespace vlsa {
namespace {

class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Number of inserted ranks < i.
  long prefix(std::size_t i) const {
    long s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<long> tree_;
};

}  // namespace

Concordance concordance(std::span<const double> risks, const std::vector<SurvivalRecord>& records,
                        RiskTies ties) {
  if (risks.size() != records.size()) throw std::invalid_argument("risks/records size mismatch");
  const std::size_t n = records.size();

  std::vector<double> levels(risks.begin(), risks.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), risks[i]) - levels.begin());
  }

  // Sweep from the latest time; the tree holds every record with a strictly later time.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return records[a].time > records[b].time; });

  Concordance out;
  FenwickTree tree(levels.size());
  long inserted = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t end = i;
    while (end < n && records[order[end]].time == records[order[i]].time) ++end;
    for (std::size_t k = i; k < end; ++k) {
      const std::size_t p = order[k];
      if (records[p].event != 1) continue;
      const long below = tree.prefix(rank[p]);
      const long equal = tree.prefix(rank[p] + 1) - below;
      out.comparable_pairs += inserted;
      out.concordant_pairs += below;
      out.tied_pairs += equal;
    }
    for (std::size_t k = i; k < end; ++k) {
      tree.add(rank[order[k]]);
      ++inserted;
    }
    i = end;
  }
  if (out.comparable_pairs > 0) {
    double numerator = static_cast<double>(out.concordant_pairs);
    if (ties == RiskTies::kHalf) numerator += 0.5 * static_cast<double>(out.tied_pairs);
    out.index = numerator / static_cast<double>(out.comparable_pairs);
  }
  return out;
}

double concordance_index(std::span<const double> risks,
                         const std::vector<SurvivalRecord>& records, RiskTies ties) {
  const auto c = concordance(risks, records, ties);
  if (c.comparable_pairs == 0) throw std::invalid_argument("CI undefined: no comparable pairs");
  return c.index;
}

double mae(double predicted_time, const SurvivalRecord& record) {
  if (record.event == 1) return std::abs(record.time - predicted_time);
  return std::max(0.0, record.time - predicted_time);
}

double mean_mae(std::span<const double> predicted_times,
                const std::vector<SurvivalRecord>& records) {
  if (predicted_times.size() != records.size() || records.empty()) {
    throw std::invalid_argument("mean_mae: size mismatch or empty input");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) total += mae(predicted_times[i], records[i]);
  return total / static_cast<double>(records.size());
}

DCalibration d_calibration(std::span<const double> survival_at_event, int bins) {
  if (bins < 2) throw std::invalid_argument("d_calibration: bins must be >= 2");
  if (survival_at_event.empty()) throw std::invalid_argument("d_calibration: no uncensored records");
  DCalibration out;
  out.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double s : survival_at_event) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("survival probability outside [0,1]");
    const int b = std::min(bins - 1, static_cast<int>(s * bins));
    ++out.counts[static_cast<std::size_t>(b)];
  }
  const double expected = static_cast<double>(survival_at_event.size()) / bins;
  for (int c : out.counts) out.statistic += (c - expected) * (c - expected) / expected;
  out.p_value = chi_square_sf(out.statistic, bins - 1);
  return out;
}

double survival_at_time(const Eigen::VectorXd& survival, const TimeGrid& grid, double t) {
  if (survival.size() != grid.num_classes()) {
    throw std::invalid_argument("survival/grid length mismatch");
  }
  SurvivalRecord probe;
  probe.time = t;
  // 1 - CIF can land a few ulps outside [0, 1].
  return std::clamp(survival(assign_class(probe, grid).klass - 1), 0.0, 1.0);
}

LogRank logrank_test(const std::vector<SurvivalRecord>& records, std::span<const int> groups) {
  if (groups.size() != records.size()) throw std::invalid_argument("groups/records size mismatch");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return records[a].time < records[b].time; });

  double at_risk = static_cast<double>(records.size());
  double at_risk_1 = static_cast<double>(std::count(groups.begin(), groups.end(), 1));
  LogRank out;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = records[order[i]].time;
    double deaths = 0.0, deaths_1 = 0.0, leaving = 0.0, leaving_1 = 0.0;
    for (; i < order.size() && records[order[i]].time == t; ++i) {
      const auto p = order[i];
      const bool in_1 = groups[p] == 1;
      deaths += records[p].event;
      if (in_1) deaths_1 += records[p].event;
      leaving += 1.0;
      if (in_1) leaving_1 += 1.0;
    }
    if (deaths > 0.0) {
      const double share = at_risk_1 / at_risk;
      out.observed += deaths_1;
      out.expected += deaths * share;
      if (at_risk > 1.0) {
        out.variance += deaths * share * (1.0 - share) * (at_risk - deaths) / (at_risk - 1.0);
      }
    }
    at_risk -= leaving;
    at_risk_1 -= leaving_1;
  }
  if (out.variance > 0.0) {
    const double diff = out.observed - out.expected;
    out.statistic = diff * diff / out.variance;
    out.p_value = chi_square_sf(out.statistic, 1.0);
  }
  return out;
}

RiskGrouping risk_grouping_logrank(std::span<const double> risks,
                                   const std::vector<SurvivalRecord>& records) {
  if (risks.size() != records.size()) throw std::invalid_argument("risks/records size mismatch");
  std::vector<double> sorted(risks.begin(), risks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n < 4) throw std::invalid_argument("risk grouping needs at least 4 patients");
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  RiskGrouping out;
  out.threshold = median;
  std::vector<SurvivalRecord> low, high;
  for (std::size_t i = 0; i < n; ++i) {
    const int g = risks[i] > median ? 1 : 0;
    out.groups.push_back(g);
    (g == 1 ? high : low).push_back(records[i]);
  }
  if (low.size() < 2 || high.size() < 2) {
    throw std::invalid_argument("degenerate risk group: fewer than 2 patients on one side");
  }
  out.test = logrank_test(records, out.groups);
  out.low_risk = kaplan_meier(low);
  out.high_risk = kaplan_meier(high);
  return out;
}

}  // namespace vlsa
