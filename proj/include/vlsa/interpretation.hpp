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

#ifndef VLSA_INTERPRETATION_HPP_
#define VLSA_INTERPRETATION_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/aggregation.hpp"

namespace vlsa {

class Model;

inline constexpr int kMaxShapleyPlayers = 20;

struct ShapleyReport {
  Eigen::VectorXd contributions;  // phi, one per prior
  double baseline_risk = 0.0;     // f_risk of the empty coalition
  double full_risk = 0.0;
  std::vector<std::string> prior_texts;
};

using CoalitionValue = std::function<double(std::span<const int>)>;

// Exact Shapley values of an M-player game by enumerating all 2^M coalitions.
// value() receives the members of each coalition in increasing order.
ShapleyReport shapley_values(int num_players, const CoalitionValue& value);

// Risk attribution to each pooled prior row: f_risk(Z) = risk of the incidence
// prediction from subset_fuse(pooled, Z). The empty coalition is uniform.
ShapleyReport shapley_exact(const Eigen::MatrixXd& pooled, const LinearHead<double>& head,
                            const Eigen::MatrixXd& text, double tau,
                            std::vector<std::string> prior_texts = {});

// Same game for a trained model and one bag, using the model's own head.
ShapleyReport explain(const Model& model, const Eigen::MatrixXd& bag);

struct RankedInstance {
  int index = 0;
  double weight = 0.0;
};

// Instances ranked by prior m's pooling weight, descending; ties by index.
std::vector<RankedInstance> top_instances(const Eigen::MatrixXd& priors, const Eigen::MatrixXd& bag,
                                          double alpha, int m, int top_k);

struct EvidenceRow {
  int prior_index = 0;
  int instance_index = 0;
  double weight = 0.0;
};

std::vector<EvidenceRow> prior_evidence(const Model& model, const Eigen::MatrixXd& bag, int top_k);

}  // namespace vlsa

#endif  // VLSA_INTERPRETATION_HPP_
