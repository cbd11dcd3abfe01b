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

#ifndef VLSA_EXPERIMENT_HPP_
#define VLSA_EXPERIMENT_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/io.hpp"
#include "vlsa/metrics.hpp"
#include "vlsa/trainer.hpp"

namespace vlsa {

struct Dataset {
  std::vector<SurvivalRecord> records;
  std::vector<Eigen::MatrixXd> bags;

  std::size_t size() const { return records.size(); }
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

Dataset load_dataset(const std::filesystem::path& manifest);

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle of patient indices cut into count contiguous chunks; chunk
// index is the test fold. count = 1 trains and tests on every patient.
FoldSplit kfold_split(std::size_t n, const FoldSpec& fold);

// Applies one ablation name: no-ordinal-prompts, no-emd, attention,
// prototypes, hazard-head, quantile-bins or bins=N.
void apply_ablation(TrainConfig& config, const std::string& name);

struct FoldResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
};

// Builds the grid from the training fold only, then trains.
FoldResult train_fold(const Dataset& data, const Eigen::MatrixXd& prior_base,
                      const std::vector<std::string>& prior_texts, const TrainConfig& config,
                      const FoldSpec& fold);

struct Evaluation {
  EvaluationReport report;
  std::vector<PredictionRow> predictions;
  RiskGrouping grouping;
};

// Metrics of the model on the given patients, labelled on grid.
Evaluation evaluate(const Model& model, const TimeGrid& grid, const Dataset& data,
                    int dcal_bins = 10);

// Mean of the per-fold scalars; patient and pair counts are summed.
EvaluationReport aggregate_reports(const std::vector<EvaluationReport>& reports);

}  // namespace vlsa

#endif  // VLSA_EXPERIMENT_HPP_
