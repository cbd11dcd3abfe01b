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

#include "vlsa/experiment.hpp"

#include <numeric>
#include <stdexcept>

#include "vlsa/random.hpp"

namespace vlsa {

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  for (std::size_t i : indices) {
    out.records.push_back(records.at(i));
    out.bags.push_back(bags.at(i));
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& manifest) {
  Dataset d;
  d.records = read_manifest(manifest);
  d.bags = load_bags(d.records);
  return d;
}

FoldSplit kfold_split(std::size_t n, const FoldSpec& fold) {
  if (fold.count < 1 || fold.index < 0 || fold.index >= fold.count) {
    throw std::invalid_argument("fold index must satisfy 0 <= i < k");
  }
  FoldSplit split;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (fold.count == 1) {
    split.train = order;
    split.test = order;
    return split;
  }
  Rng rng(mix_seed(fold.seed, 0xF01D));
  rng.shuffle(order);
  const auto k = static_cast<std::size_t>(fold.count);
  const auto idx = static_cast<std::size_t>(fold.index);
  const std::size_t begin = idx * n / k;
  const std::size_t end = (idx + 1) * n / k;
  for (std::size_t i = 0; i < n; ++i) {
    (i >= begin && i < end ? split.test : split.train).push_back(order[i]);
  }
  return split;
}

void apply_ablation(TrainConfig& config, const std::string& name) {
  if (name == "no-ordinal-prompts") {
    config.ordinal_prompts = false;
  } else if (name == "no-emd") {
    config.loss.beta = 0.0;
    config.loss.use_emd = false;
  } else if (name == "attention") {
    config.aggregator.kind = AggregatorKind::kAttention;
  } else if (name == "prototypes") {
    config.aggregator.kind = AggregatorKind::kLearnablePrototypes;
  } else if (name == "hazard-head") {
    config.loss.head = HeadKind::kHazard;
  } else if (name == "quantile-bins") {
    config.scheme = GridScheme::kQuantile;
  } else if (name.rfind("bins=", 0) == 0) {
    std::size_t used = 0;
    int bins = 0;
    try {
      bins = std::stoi(name.substr(5), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size() - 5 || bins < 2) {
      throw std::invalid_argument("ablation bins=N needs an integer N >= 2");
    }
    config.num_bins = bins;
  } else {
    throw std::invalid_argument("unknown ablation '" + name + "'");
  }
}

FoldResult train_fold(const Dataset& data, const Eigen::MatrixXd& prior_base,
                      const std::vector<std::string>& prior_texts, const TrainConfig& config,
                      const FoldSpec& fold) {
  const FoldSplit split = kfold_split(data.size(), fold);
  if (split.train.empty()) throw std::invalid_argument("empty training fold");
  const Dataset train_set = data.subset(split.train);
  const TimeGrid grid = build_time_grid(train_set.records, config.scheme, config.num_bins);
  const auto samples = make_samples(train_set.records, train_set.bags, grid);
  // The held-out fold is only scored for the log; it never affects training.
  std::vector<Sample> held_out;
  if (fold.count > 1) {
    const Dataset test_set = data.subset(split.test);
    held_out = make_samples(test_set.records, test_set.bags, grid);
  }

  Model model(model_config(config, grid.num_classes()), prior_base, prior_texts);
  TrainResult trained =
      train(std::move(model), samples, config, held_out.empty() ? nullptr : &held_out);

  FoldResult out;
  out.checkpoint.model = std::move(trained.model);
  out.checkpoint.train = config;
  out.checkpoint.grid = grid;
  out.checkpoint.fold = fold;
  out.log = std::move(trained.log);
  return out;
}

Evaluation evaluate(const Model& model, const TimeGrid& grid, const Dataset& data, int dcal_bins) {
  if (data.size() == 0) throw std::invalid_argument("evaluation set is empty");
  if (model.num_classes() != grid.num_classes()) {
    throw std::invalid_argument("model/grid class count mismatch");
  }
  const PromptCache prompts = model.prompts();
  Evaluation ev;
  std::vector<double> risks, times, survival_at_event;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Prediction p = model.predict(data.bags[i], prompts);
    PredictionRow row;
    row.patient_id = data.records[i].patient_id;
    row.y_hat = p.y_hat;
    row.risk = p.risk;
    row.expected_time = expected_time(p.y_hat, grid);
    risks.push_back(row.risk);
    times.push_back(row.expected_time);
    if (data.records[i].event == 1) {
      survival_at_event.push_back(survival_at_time(p.survival, grid, data.records[i].time));
    }
    ev.predictions.push_back(std::move(row));
  }

  auto& r = ev.report;
  const Concordance c = concordance(risks, data.records);
  if (c.comparable_pairs == 0) throw std::invalid_argument("CI undefined: no comparable pairs");
  r.ci = c.index;
  r.n_pairs_comparable = c.comparable_pairs;
  r.n_patients = static_cast<int>(data.size());
  r.mae = mean_mae(times, data.records);
  const DCalibration dcal = d_calibration(survival_at_event, dcal_bins);
  r.dcal_statistic = dcal.statistic;
  r.dcal_pvalue = dcal.p_value;
  try {
    ev.grouping = risk_grouping_logrank(risks, data.records);
    r.logrank = ev.grouping.test;
    r.has_logrank = true;
  } catch (const std::invalid_argument&) {
    r.has_logrank = false;
  }
  return ev;
}

EvaluationReport aggregate_reports(const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports to aggregate");
  EvaluationReport out;
  out.dcal_pvalue = 0.0;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    out.ci += r.ci / n;
    out.mae += r.mae / n;
    out.dcal_statistic += r.dcal_statistic / n;
    out.dcal_pvalue += r.dcal_pvalue / n;
    out.n_pairs_comparable += r.n_pairs_comparable;
    out.n_patients += r.n_patients;
  }
  return out;
}

}  // namespace vlsa
