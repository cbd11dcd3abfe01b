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

#ifndef VLSA_PROMPTS_HPP_
#define VLSA_PROMPTS_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vlsa/embeddings.hpp"
#include "vlsa/types.hpp"

namespace vlsa {

// Learnable context tokens plus class tokens. In ordinal mode class_tokens
// holds B base prompts that are interpolated into C classes; otherwise it
// holds C independent class prompts.
struct PromptParams {
  Eigen::MatrixXd context_tokens;
  std::vector<Eigen::MatrixXd> class_tokens;
  int num_classes = 0;
  bool ordinal = true;

  int num_bases() const { return static_cast<int>(class_tokens.size()); }
};

struct PromptDefaults {
  static constexpr int kNumBases = 4;
  static constexpr int kContextLength = 5;
  static constexpr int kClassLength = 4;
};

// D(c, b) = |(c-1) - (b-1)(C-1)/(B-1)| with 1-based c, b.
template <typename Scalar = double>
Matrix<Scalar> default_distance(int num_classes, int num_bases) {
  if (num_classes < 2) throw std::invalid_argument("default_distance: C must be >= 2");
  if (num_bases < 2) throw std::invalid_argument("default_distance: B must be >= 2");
  Matrix<Scalar> dist(num_classes, num_bases);
  const Scalar spacing = Scalar(num_classes - 1) / Scalar(num_bases - 1);
  for (int c = 0; c < num_classes; ++c) {
    for (int b = 0; b < num_bases; ++b) {
      dist(c, b) = std::abs(Scalar(c) - Scalar(b) * spacing);
    }
  }
  return dist;
}

// Row-normalized linear weights W(D) = 1 - D / (C - 1).
template <typename Derived>
Matrix<typename Derived::Scalar> interpolation_weights(const Eigen::MatrixBase<Derived>& dist,
                                                       int num_classes) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> w = (Scalar(1) - dist.array() / Scalar(num_classes - 1)).matrix();
  for (Eigen::Index c = 0; c < w.rows(); ++c) {
    const Scalar total = w.row(c).sum();
    if (!(total > Scalar(0))) throw std::invalid_argument("degenerate interpolation row");
    w.row(c) /= total;
  }
  return w;
}

// V_cls^c = sum_b weights(c, b) * V_cls^b.
template <typename Scalar>
std::vector<Matrix<Scalar>> interpolate_tokens(const std::vector<Matrix<Scalar>>& bases,
                                               const Matrix<Scalar>& weights) {
  if (static_cast<Eigen::Index>(bases.size()) != weights.cols()) {
    throw std::invalid_argument("weights/base count mismatch");
  }
  std::vector<Matrix<Scalar>> out;
  out.reserve(static_cast<std::size_t>(weights.rows()));
  for (Eigen::Index c = 0; c < weights.rows(); ++c) {
    Matrix<Scalar> tokens = Matrix<Scalar>::Zero(bases.front().rows(), bases.front().cols());
    for (Eigen::Index b = 0; b < weights.cols(); ++b) tokens += weights(c, b) * bases[b];
    out.push_back(std::move(tokens));
  }
  return out;
}

// Interpolation weights for the parameters' mode (identity when not ordinal).
Eigen::MatrixXd prompt_weights(const PromptParams& params);

std::vector<Eigen::MatrixXd> class_prompt_tokens(const PromptParams& params,
                                                 const Eigen::MatrixXd& weights);

PromptParams init_prompt_params(int num_classes, int num_bases, int context_length,
                                int class_length, int token_dim, bool ordinal,
                                std::uint64_t seed);

// F_text: C x D, row c = E_text([V_ctx | V_cls^c]).
Eigen::MatrixXd survival_prompts(const PromptParams& params, const Eigen::MatrixXd& weights,
                                 const PseudoEncoder& encoder);

// Frozen prompt table (C x D precomputed embeddings); rows are L2-normalized.
Eigen::MatrixXd survival_prompts(const EmbeddingMatrix& table, int num_classes);

struct PromptGrad {
  Eigen::MatrixXd context_tokens;
  std::vector<Eigen::MatrixXd> class_tokens;
};

PromptGrad survival_prompts_backward(const PromptParams& params, const Eigen::MatrixXd& weights,
                                     const PseudoEncoder& encoder,
                                     const Eigen::MatrixXd& grad_text);

struct OrdinalityReport {
  Eigen::MatrixXd similarity;  // C x C cosine heatmap
  long comparable_triples = 0;
  long correct_triples = 0;
  double ranking_accuracy = 0.0;  // NaN when no triple is comparable
};

// Counts triples (c, i, j), i != c, |c - i| < |c - j|, whose cosines are not
// tied; a triple is correct when cos(f_c, f_i) > cos(f_c, f_j).
OrdinalityReport prompt_ordinality_report(const Eigen::MatrixXd& text);

}  // namespace vlsa

#endif  // VLSA_PROMPTS_HPP_
