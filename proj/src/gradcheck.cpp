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

#include "vlsa/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vlsa/random.hpp"

namespace vlsa {

std::vector<GradCheckRow> gradcheck(const GradCheckOptions& o) {
  const CounterRng rng(mix_seed(o.seed, 0x6C4E));
  const Eigen::MatrixXd prior_base = rng.normal_matrix(o.priors, o.dim, 1.0, 0);
  const Eigen::MatrixXd bag_a = rng.normal_matrix(o.instances, o.dim, 1.0, 1000);
  const Eigen::MatrixXd bag_b = rng.normal_matrix(o.instances + 2, o.dim, 1.0, 2000);

  ModelConfig mc;
  mc.aggregator.kind = o.aggregator;
  mc.aggregator.attention_hidden = 6;
  mc.head = o.head;
  mc.ordinal_prompts = o.ordinal_prompts;
  mc.num_classes = o.classes;
  mc.num_bases = std::min(PromptDefaults::kNumBases, o.classes);
  mc.token_dim = o.token_dim;
  mc.seed = o.seed;
  Model model(mc, prior_base);

  // Move away from the symmetric initialization so every path carries signal.
  {
    auto views = model.params().tensors();
    std::uint64_t offset = 10000;
    for (auto& t : views) {
      if (t.name == "log_tau") continue;
      t.values += rng.normal_matrix(t.values.rows(), t.values.cols(), 0.1, offset);
      offset += static_cast<std::uint64_t>(t.values.size());
    }
    model.params().log_tau(0) = std::log(5.0);
  }

  LossConfig lc;
  lc.head = o.head;
  const DiscreteLabel event_label{2, 1};
  const DiscreteLabel censored_label{2, 0};
  const double tau_prime = model.tau();

  auto total = [&](const Model& m) {
    return bag_loss(m, bag_a, event_label, lc, tau_prime) +
           bag_loss(m, bag_b, censored_label, lc, tau_prime);
  };

  Parameters analytic = model.params().zeros_like();
  loss_backward(model, bag_a, event_label, lc, tau_prime, analytic);
  loss_backward(model, bag_b, censored_label, lc, tau_prime, analytic);
  if (o.break_head) {
    analytic.head.weight *= 1.01;
    analytic.head.bias *= 1.01;
  }

  struct Accum {
    int entries = 0;
    double max_abs = 0.0;
    double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
  };
  std::map<std::string, Accum> groups;
  std::vector<std::string> order;

  auto params = model.params().tensors();
  auto grads = analytic.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    const std::string group = params[t].group();
    if (!groups.count(group)) order.push_back(group);
    auto& acc = groups[group];
    for (Eigen::Index i = 0; i < params[t].values.size(); ++i) {
      double& x = params[t].values.data()[i];
      const double saved = x;
      x = saved + o.step;
      const double up = total(model);
      x = saved - o.step;
      const double down = total(model);
      x = saved;
      const double numeric = (up - down) / (2.0 * o.step);
      const double a = grads[t].values.data()[i];
      ++acc.entries;
      acc.max_abs = std::max(acc.max_abs, std::abs(a - numeric));
      acc.diff_sq += (a - numeric) * (a - numeric);
      acc.analytic_sq += a * a;
      acc.numeric_sq += numeric * numeric;
    }
  }

  std::vector<GradCheckRow> rows;
  for (const auto& name : order) {
    const auto& acc = groups[name];
    GradCheckRow row;
    row.group = name;
    row.entries = acc.entries;
    row.max_abs_error = acc.max_abs;
    const double scale =
        std::max({std::sqrt(acc.analytic_sq), std::sqrt(acc.numeric_sq), 1e-12});
    row.relative_error = std::sqrt(acc.diff_sq) / scale;
    row.pass = row.relative_error < o.tolerance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vlsa
