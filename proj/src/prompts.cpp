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

#include "vlsa/prompts.hpp"

#include <limits>

#include "vlsa/random.hpp"

namespace vlsa {
namespace {

Eigen::VectorXd token_mean(const Eigen::MatrixXd& context, const Eigen::MatrixXd& klass) {
  const auto total = static_cast<double>(context.rows() + klass.rows());
  return (context.colwise().sum() + klass.colwise().sum()).transpose() / total;
}

}  // namespace

Eigen::MatrixXd prompt_weights(const PromptParams& params) {
  if (!params.ordinal) return Eigen::MatrixXd::Identity(params.num_classes, params.num_classes);
  return interpolation_weights(default_distance(params.num_classes, params.num_bases()),
                               params.num_classes);
}

std::vector<Eigen::MatrixXd> class_prompt_tokens(const PromptParams& params,
                                                 const Eigen::MatrixXd& weights) {
  if (!params.ordinal) return params.class_tokens;
  return interpolate_tokens(params.class_tokens, weights);
}

PromptParams init_prompt_params(int num_classes, int num_bases, int context_length,
                                int class_length, int token_dim, bool ordinal,
                                std::uint64_t seed) {
  if (context_length < 1 || class_length < 1) {
    throw std::invalid_argument("prompt token lengths must be >= 1");
  }
  if (ordinal && num_bases < 2) throw std::invalid_argument("ordinal prompts need B >= 2");
  const CounterRng rng(mix_seed(seed, 0xC7C7));
  const double scale = 1.0;
  PromptParams p;
  p.num_classes = num_classes;
  p.ordinal = ordinal;
  p.context_tokens = rng.normal_matrix(context_length, token_dim, scale);
  const int count = ordinal ? num_bases : num_classes;
  const auto block = static_cast<std::uint64_t>(context_length + class_length) * token_dim;
  for (int b = 0; b < count; ++b) {
    p.class_tokens.push_back(
        rng.normal_matrix(class_length, token_dim, scale, block * static_cast<std::uint64_t>(b + 1)));
  }
  return p;
}

Eigen::MatrixXd survival_prompts(const PromptParams& params, const Eigen::MatrixXd& weights,
                                 const PseudoEncoder& encoder) {
  const auto classes = class_prompt_tokens(params, weights);
  Eigen::MatrixXd text(params.num_classes, encoder.out_dim());
  for (int c = 0; c < params.num_classes; ++c) {
    text.row(c) = encoder.encode_mean(token_mean(params.context_tokens, classes[c])).transpose();
  }
  return text;
}

Eigen::MatrixXd survival_prompts(const EmbeddingMatrix& table, int num_classes) {
  if (table.rows() != num_classes) {
    throw std::invalid_argument("prompt table has " + std::to_string(table.rows()) +
                                " rows, expected " + std::to_string(num_classes));
  }
  const Eigen::VectorXd norms = table.rowwise().norm();
  if ((norms.array() <= 0.0).any()) throw std::invalid_argument("zero row in prompt table");
  return table.rowwise().normalized();
}

PromptGrad survival_prompts_backward(const PromptParams& params, const Eigen::MatrixXd& weights,
                                     const PseudoEncoder& encoder,
                                     const Eigen::MatrixXd& grad_text) {
  const auto classes = class_prompt_tokens(params, weights);
  const auto ctx_len = params.context_tokens.rows();
  const auto cls_len = params.class_tokens.front().rows();
  const auto total = static_cast<double>(ctx_len + cls_len);

  // Every token row of a class receives the same gradient: dL/dmean / L.
  Eigen::MatrixXd grad_rows(params.num_classes, encoder.token_dim());
  for (int c = 0; c < params.num_classes; ++c) {
    const Eigen::VectorXd mean = token_mean(params.context_tokens, classes[c]);
    grad_rows.row(c) = encoder.backward_mean(mean, grad_text.row(c).transpose()).transpose() / total;
  }

  PromptGrad g;
  g.context_tokens = grad_rows.colwise().sum().replicate(ctx_len, 1);
  const Eigen::MatrixXd per_token = weights.transpose() * grad_rows;  // count x D_emb
  for (int b = 0; b < params.num_bases(); ++b) {
    g.class_tokens.push_back(per_token.row(b).replicate(cls_len, 1));
  }
  return g;
}

OrdinalityReport prompt_ordinality_report(const Eigen::MatrixXd& text) {
  const auto n = static_cast<int>(text.rows());
  if (n < 3) throw std::invalid_argument("ordinality report needs C >= 3");
  OrdinalityReport report;
  const Eigen::MatrixXd unit = text.rowwise().normalized();
  report.similarity = unit * unit.transpose();
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      for (int j = 0; j < n; ++j) {
        if (std::abs(c - i) >= std::abs(c - j)) continue;
        const double near = report.similarity(c, i);
        const double far = report.similarity(c, j);
        if (near == far) continue;
        ++report.comparable_triples;
        if (near > far) ++report.correct_triples;
      }
    }
  }
  report.ranking_accuracy = report.comparable_triples == 0
                                ? std::numeric_limits<double>::quiet_NaN()
                                : static_cast<double>(report.correct_triples) /
                                      static_cast<double>(report.comparable_triples);
  return report;
}

}  // namespace vlsa
