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

#ifndef VLSA_IO_HPP_
#define VLSA_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/interpretation.hpp"
#include "vlsa/labels.hpp"
#include "vlsa/metrics.hpp"
#include "vlsa/model.hpp"
#include "vlsa/trainer.hpp"

namespace vlsa {

struct SynthCohort;

// Manifest CSV: patient_id,bag_path,time_months,event. Relative bag paths
// are resolved against the manifest's directory on read.
std::vector<SurvivalRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records);
std::vector<Eigen::MatrixXd> load_bags(const std::vector<SurvivalRecord>& records);

std::string grid_to_json(const TimeGrid& grid);
TimeGrid grid_from_json(const std::string& text);

// {"context": "...", "bases": [...], "priors": [...]}
struct PhraseConfig {
  std::string context;
  std::vector<std::string> bases;
  std::vector<std::string> priors;
};
PhraseConfig read_phrase_config(const std::filesystem::path& path);
void write_phrase_config(const std::filesystem::path& path, const PhraseConfig& config);

void write_latent_risks(const std::filesystem::path& path, const SynthCohort& cohort);
std::map<std::string, double> read_latent_risks(const std::filesystem::path& path);

// k-fold split "index/count"; count = 1 means train and test on everything.
struct FoldSpec {
  int index = 0;
  int count = 5;
  std::uint64_t seed = 0;
};
FoldSpec parse_fold(const std::string& text, std::uint64_t seed);

struct Checkpoint {
  Model model;
  TrainConfig train;
  TimeGrid grid;
  FoldSpec fold;
};

// "VLSC", u32 LE header length, JSON header, then one float64 VLSB blob per
// tensor in header order, starting with the frozen prior base.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string train_config_to_json(const TrainConfig& config);

void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

struct PredictionRow {
  std::string patient_id;
  Eigen::VectorXd y_hat;
  double risk = 0.0;
  double expected_time = 0.0;
};
void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);

void write_km_curve(const std::filesystem::path& path, const KMCurve& curve);

// {"ci", "mae", "dcal": {"statistic", "pvalue"}, "logrank": {...} | null,
//  "n_pairs_comparable", "n_patients"}
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

void write_shapley(const std::filesystem::path& path, const ShapleyReport& report);
void write_evidence(const std::filesystem::path& path, const std::vector<EvidenceRow>& rows);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vlsa

#endif  // VLSA_IO_HPP_
