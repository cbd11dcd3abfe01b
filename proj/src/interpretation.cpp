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

#include "vlsa/interpretation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vlsa/model.hpp"
#include "vlsa/prediction.hpp"

namespace vlsa {

ShapleyReport shapley_values(int num_players, const CoalitionValue& value) {
  if (num_players < 1) throw std::invalid_argument("shapley: need at least one player");
  if (num_players > kMaxShapleyPlayers) {
    throw std::invalid_argument("coalition enumeration too large (M = " +
                                std::to_string(num_players) + " > " +
                                std::to_string(kMaxShapleyPlayers) + ")");
  }
  const auto m = static_cast<unsigned>(num_players);
  const std::size_t masks = std::size_t{1} << m;

  std::vector<double> values(masks);
  std::vector<int> members;
  members.reserve(m);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    members.clear();
    for (unsigned i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) members.push_back(static_cast<int>(i));
    }
    values[mask] = value(members);
  }

  // |Z|! (M - |Z| - 1)! / M! for coalitions Z not containing the player.
  std::vector<double> weight(m);
  for (unsigned s = 0; s < m; ++s) {
    weight[s] = std::exp(std::lgamma(s + 1.0) + std::lgamma(m - s + 0.0) - std::lgamma(m + 1.0));
  }

  ShapleyReport out;
  out.contributions = Eigen::VectorXd::Zero(num_players);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    const auto size = static_cast<unsigned>(__builtin_popcountll(mask));
    for (unsigned i = 0; i < m; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      if (mask & bit) continue;
      out.contributions(i) += weight[size] * (values[mask | bit] - values[mask]);
    }
  }
  out.baseline_risk = values.front();
  out.full_risk = values.back();
  return out;
}

ShapleyReport shapley_exact(const Eigen::MatrixXd& pooled, const LinearHead<double>& head,
                            const Eigen::MatrixXd& text, double tau,
                            std::vector<std::string> prior_texts) {
  auto report = shapley_values(static_cast<int>(pooled.rows()), [&](std::span<const int> z) {
    return incidence(subset_fuse(pooled, z, head), text, tau).risk;
  });
  report.prior_texts = std::move(prior_texts);
  return report;
}

ShapleyReport explain(const Model& model, const Eigen::MatrixXd& bag) {
  if (!model.uses_priors()) {
    throw std::invalid_argument("interpretation needs a prior-based aggregator");
  }
  const PromptCache prompts = model.prompts();
  const BagForward f = model.forward(bag, prompts);
  auto report = shapley_values(static_cast<int>(f.pool.pooled.rows()), [&](std::span<const int> z) {
    return model.predict_image(subset_fuse(f.pool.pooled, z, model.params().head), prompts).risk;
  });
  report.prior_texts = model.prior_texts();
  return report;
}

std::vector<RankedInstance> top_instances(const Eigen::MatrixXd& priors, const Eigen::MatrixXd& bag,
                                          double alpha, int m, int top_k) {
  if (m < 0 || m >= priors.rows()) throw std::out_of_range("prior index out of range");
  if (top_k < 1 || top_k > bag.rows()) throw std::invalid_argument("top_k must be in [1, K]");
  const Eigen::MatrixXd prior = priors.row(m);
  const auto pool = prior_guided_pool<double>(prior, bag, alpha);

  std::vector<RankedInstance> ranked(static_cast<std::size_t>(bag.rows()));
  for (Eigen::Index k = 0; k < bag.rows(); ++k) {
    ranked[static_cast<std::size_t>(k)] = {static_cast<int>(k), pool.weights(0, k)};
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedInstance& a, const RankedInstance& b) { return a.weight > b.weight; });
  ranked.resize(static_cast<std::size_t>(top_k));
  return ranked;
}

std::vector<EvidenceRow> prior_evidence(const Model& model, const Eigen::MatrixXd& bag, int top_k) {
  if (!model.uses_priors()) {
    throw std::invalid_argument("interpretation needs a prior-based aggregator");
  }
  const Eigen::MatrixXd priors = model.effective_priors();
  const int k = std::min<int>(top_k, static_cast<int>(bag.rows()));
  std::vector<EvidenceRow> rows;
  for (int m = 0; m < priors.rows(); ++m) {
    for (const auto& r : top_instances(priors, bag, model.config().aggregator.alpha, m, k)) {
      rows.push_back({m, r.index, r.weight});
    }
  }
  return rows;
}

}  // namespace vlsa
