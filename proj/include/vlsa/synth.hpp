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

#ifndef VLSA_SYNTH_HPP_
#define VLSA_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/labels.hpp"

namespace vlsa {

struct SynthConfig {
  int n_patients = 400;
  int k_min = 20;
  int k_max = 60;
  int dim = 64;
  int n_prototypes = 4;
  double signal_strength = 1.0;
  double censoring_rate = 0.3;
  double baseline_scale = 24.0;  // months
  std::uint64_t seed = 0;
  // Share of instances carrying prototype-aligned signal.
  double signal_fraction = 0.25;
  double noise_scale = 0.05;
  double amplitude = 2.0;
  // Norm of the per-bag background direction (orthogonal to every prototype)
  // added to the instances that carry no signal.
  double distractor_scale = 2.0;

  void validate() const;
};

struct SynthCohort {
  SynthConfig config;
  std::vector<SurvivalRecord> records;  // bag_path relative to the cohort directory
  std::vector<Eigen::MatrixXd> bags;    // values are exactly float32-representable
  Eigen::MatrixXd prototypes;           // M x D, orthonormal rows
  std::vector<std::string> prior_texts;
  std::vector<double> latent_risks;
  double censoring_bound = 0.0;  // q; +inf when censoring_rate = 0
};

SynthCohort generate(const SynthConfig& config);

// Concordance of the true latent risk against the observed outcomes.
double oracle_ci(const SynthCohort& cohort);

// manifest.csv, bags/<id>.vlsb, priors.vlsb, priors.json, latent.json.
void write_cohort(const SynthCohort& cohort, const std::filesystem::path& dir);

}  // namespace vlsa

#endif  // VLSA_SYNTH_HPP_
