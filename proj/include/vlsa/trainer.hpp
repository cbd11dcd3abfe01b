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

#ifndef VLSA_TRAINER_HPP_
#define VLSA_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/labels.hpp"
#include "vlsa/model.hpp"

namespace vlsa {

struct TrainConfig {
  int epochs = 10;
  double learning_rate = 2e-4;
  double weight_decay = 1e-5;
  int accumulation_steps = 32;
  std::uint64_t seed = 0;
  LossConfig loss;
  GridScheme scheme = GridScheme::kUniform;
  std::optional<int> num_bins;
  AggregatorConfig aggregator;
  bool ordinal_prompts = true;
  int num_bases = PromptDefaults::kNumBases;
  int context_length = PromptDefaults::kContextLength;
  int class_length = PromptDefaults::kClassLength;
  int token_dim = PseudoEncoder::kDefaultTokenDim;

  // Throws std::invalid_argument on epochs < 1, lr < 0, wd < 0 or
  // accumulation_steps < 1. lr = 0 is accepted and leaves parameters unchanged.
  void validate() const;
};

ModelConfig model_config(const TrainConfig& config, int num_classes);

// One bag in memory with its label on the training grid.
struct Sample {
  SurvivalRecord record;
  Eigen::MatrixXd bag;
  DiscreteLabel label;
};

std::vector<Sample> make_samples(const std::vector<SurvivalRecord>& records,
                                 const std::vector<Eigen::MatrixXd>& bags, const TimeGrid& grid);

struct OptimizerState {
  Parameters first_moment;
  Parameters second_moment;
  long step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

OptimizerState init_optimizer(const Parameters& params);

// One Adam update of a single tensor; step is the 1-based step count.
void adam_update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::Ref<const Eigen::MatrixXd>& grad,
                 Eigen::Ref<Eigen::MatrixXd> m, Eigen::Ref<Eigen::MatrixXd> v, long step,
                 double lr, double wd);

void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state, double lr,
               double wd);

struct EpochLog {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::optional<double> val_ci;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  long optimizer_steps = 0;
};

// Mean-averaged gradient accumulation over windows of accumulation_steps bags;
// a partial window at the end of an epoch is flushed with its own average.
TrainResult train(Model model, const std::vector<Sample>& data, const TrainConfig& config,
                  const std::vector<Sample>* validation = nullptr);

// Risks of every sample under the model, with prompts computed once.
std::vector<double> predict_risks(const Model& model, const std::vector<Sample>& data);

}  // namespace vlsa

#endif  // VLSA_TRAINER_HPP_
