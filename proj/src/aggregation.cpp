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

#include "vlsa/aggregation.hpp"

#include "vlsa/random.hpp"

namespace vlsa {

std::string to_string(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::kPriorGuided:
      return "prior_guided";
    case AggregatorKind::kAttention:
      return "attention";
    case AggregatorKind::kLearnablePrototypes:
      return "prototypes";
  }
  return "unknown";
}

AggregatorKind aggregator_kind_from_string(const std::string& name) {
  if (name == "prior_guided") return AggregatorKind::kPriorGuided;
  if (name == "attention") return AggregatorKind::kAttention;
  if (name == "prototypes") return AggregatorKind::kLearnablePrototypes;
  throw std::invalid_argument("unknown aggregator '" + name + "'");
}

Eigen::MatrixXd effective_priors(const PriorSet& priors) {
  return effective_priors(priors.base_embeddings, priors.offsets);
}

AttentionScorer<double> init_attention_scorer(int dim, int hidden, std::uint64_t seed) {
  const CounterRng rng(mix_seed(seed, 0xA77E));
  AttentionScorer<double> s;
  s.w1 = rng.normal_matrix(hidden, dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  s.b1 = Eigen::VectorXd::Zero(hidden);
  s.w2 = rng.normal_matrix(hidden, 1, 1.0 / std::sqrt(static_cast<double>(hidden)),
                           static_cast<std::uint64_t>(hidden) * dim);
  return s;
}

Eigen::MatrixXd init_learnable_prototypes(int num_prototypes, int dim, std::uint64_t seed) {
  const CounterRng rng(mix_seed(seed, 0x9207));
  return rng.normal_matrix(num_prototypes, dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

}  // namespace vlsa
