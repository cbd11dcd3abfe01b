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

#ifndef VLSA_AGGREGATION_HPP_
#define VLSA_AGGREGATION_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlsa/types.hpp"

namespace vlsa {

enum class AggregatorKind { kPriorGuided, kAttention, kLearnablePrototypes };

std::string to_string(AggregatorKind kind);
AggregatorKind aggregator_kind_from_string(const std::string& name);

struct AggregatorConfig {
  AggregatorKind kind = AggregatorKind::kPriorGuided;
  double alpha = 100.0;
  int attention_hidden = 128;
};

// Frozen prior text embeddings plus their learnable offsets (T_prog).
struct PriorSet {
  Eigen::MatrixXd base_embeddings;
  Eigen::MatrixXd offsets;
  std::vector<std::string> texts;
};

template <typename Scalar>
struct LinearHead {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;

  template <typename Derived>
  Vector<Scalar> operator()(const Eigen::MatrixBase<Derived>& x) const {
    return weight * x + bias;
  }
  Eigen::Index out_dim() const { return weight.rows(); }
};

template <typename Scalar>
struct LinearHeadGrad {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;
};

template <typename DerivedBase, typename DerivedOffsets>
Matrix<typename DerivedBase::Scalar> effective_priors(
    const Eigen::MatrixBase<DerivedBase>& base, const Eigen::MatrixBase<DerivedOffsets>& offsets) {
  if (base.rows() != offsets.rows() || base.cols() != offsets.cols()) {
    throw std::invalid_argument("prior base and offsets differ in shape");
  }
  return base + offsets;
}

Eigen::MatrixXd effective_priors(const PriorSet& priors);

namespace detail {

template <typename Scalar>
Vector<Scalar> checked_row_norms(const Matrix<Scalar>& m) {
  Vector<Scalar> norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > Scalar(0))) throw std::invalid_argument("zero vector in cosine");
  }
  return norms;
}

}  // namespace detail

// Per-prior similarity attention over a bag (one pooled row per prior).
template <typename Scalar>
struct PoolResult {
  Matrix<Scalar> pooled;   // M x D
  Matrix<Scalar> weights;  // M x K, rows sum to 1
  Matrix<Scalar> cosines;  // M x K
};

template <typename Scalar>
PoolResult<Scalar> prior_guided_pool(const Matrix<Scalar>& priors, const Matrix<Scalar>& bag,
                                     Scalar alpha) {
  if (bag.rows() < 1) throw std::invalid_argument("empty bag");
  if (priors.cols() != bag.cols()) throw std::invalid_argument("prior/instance dim mismatch");
  const Vector<Scalar> prior_norms = detail::checked_row_norms(priors);
  const Vector<Scalar> bag_norms = detail::checked_row_norms(bag);

  PoolResult<Scalar> out;
  out.cosines = (prior_norms.cwiseInverse().asDiagonal() * priors) *
                (bag_norms.cwiseInverse().asDiagonal() * bag).transpose();
  out.weights.resize(priors.rows(), bag.rows());
  for (Eigen::Index m = 0; m < priors.rows(); ++m) {
    out.weights.row(m) = softmax((alpha * out.cosines.row(m)).transpose()).transpose();
  }
  out.pooled = out.weights * bag;
  return out;
}

// dL/dpriors given dL/dpooled; the bag is frozen.
template <typename Scalar>
Matrix<Scalar> prior_guided_pool_backward(const Matrix<Scalar>& priors, const Matrix<Scalar>& bag,
                                          Scalar alpha, const PoolResult<Scalar>& forward,
                                          const Matrix<Scalar>& grad_pooled) {
  const Vector<Scalar> prior_norms = priors.rowwise().norm();
  const Matrix<Scalar> bag_unit = bag.rowwise().normalized();
  const Matrix<Scalar> grad_weights = grad_pooled * bag.transpose();  // M x K

  Matrix<Scalar> grad_cos(priors.rows(), bag.rows());
  for (Eigen::Index m = 0; m < priors.rows(); ++m) {
    grad_cos.row(m) = alpha * softmax_backward(forward.weights.row(m).transpose(),
                                               grad_weights.row(m).transpose())
                                  .transpose();
  }
  // d cos(p, x) / dp = (x_unit - cos * p_unit) / |p|
  Matrix<Scalar> grad = grad_cos * bag_unit;
  const Vector<Scalar> radial = (grad_cos.array() * forward.cosines.array()).rowwise().sum();
  for (Eigen::Index m = 0; m < priors.rows(); ++m) {
    grad.row(m) = (grad.row(m) - radial(m) * priors.row(m) / prior_norms(m)) / prior_norms(m);
  }
  return grad;
}

template <typename Scalar>
Vector<Scalar> fuse(const Matrix<Scalar>& pooled, const LinearHead<Scalar>& head) {
  if (pooled.rows() < 1) throw std::invalid_argument("fuse: no pooled rows");
  return head(pooled.colwise().mean().transpose());
}

template <typename Scalar>
struct FuseGrad {
  LinearHeadGrad<Scalar> head;
  Matrix<Scalar> pooled;
};

template <typename Scalar>
FuseGrad<Scalar> fuse_backward(const Matrix<Scalar>& pooled, const LinearHead<Scalar>& head,
                               const Vector<Scalar>& grad_output) {
  const Vector<Scalar> mean = pooled.colwise().mean().transpose();
  FuseGrad<Scalar> g;
  g.head.weight = grad_output * mean.transpose();
  g.head.bias = grad_output;
  const Vector<Scalar> grad_mean = head.weight.transpose() * grad_output;
  g.pooled = (grad_mean / Scalar(pooled.rows())).transpose().replicate(pooled.rows(), 1);
  return g;
}

// Mean of the selected rows through the head; the empty coalition maps to the
// zero vector (which the incidence head turns into a uniform prediction).
template <typename Scalar>
Vector<Scalar> subset_fuse(const Matrix<Scalar>& pooled, std::span<const int> subset,
                           const LinearHead<Scalar>& head) {
  if (subset.empty()) return Vector<Scalar>::Zero(head.out_dim());
  Vector<Scalar> mean = Vector<Scalar>::Zero(pooled.cols());
  for (int m : subset) {
    if (m < 0 || m >= pooled.rows()) throw std::out_of_range("subset index out of range");
    mean += pooled.row(m).transpose();
  }
  mean /= Scalar(subset.size());
  return head(mean);
}

// Two-layer tanh perceptron producing one attention logit per instance.
template <typename Scalar>
struct AttentionScorer {
  Matrix<Scalar> w1;  // H x D
  Vector<Scalar> b1;  // H
  Vector<Scalar> w2;  // H
  // The output bias is omitted: softmax is shift-invariant.
};

template <typename Scalar>
struct AttentionResult {
  Vector<Scalar> pooled;   // D
  Vector<Scalar> weights;  // K
  Matrix<Scalar> hidden;   // K x H, tanh activations
};

template <typename Scalar>
AttentionResult<Scalar> attention_pool(const Matrix<Scalar>& bag,
                                       const AttentionScorer<Scalar>& scorer) {
  if (bag.rows() < 1) throw std::invalid_argument("empty bag");
  AttentionResult<Scalar> out;
  out.hidden = ((bag * scorer.w1.transpose()).rowwise() + scorer.b1.transpose()).array().tanh();
  out.weights = softmax(out.hidden * scorer.w2);
  out.pooled = bag.transpose() * out.weights;
  return out;
}

template <typename Scalar>
AttentionScorer<Scalar> attention_pool_backward(const Matrix<Scalar>& bag,
                                                const AttentionScorer<Scalar>& scorer,
                                                const AttentionResult<Scalar>& forward,
                                                const Vector<Scalar>& grad_pooled) {
  const Vector<Scalar> grad_weights = bag * grad_pooled;
  const Vector<Scalar> grad_scores = softmax_backward(forward.weights, grad_weights);
  AttentionScorer<Scalar> g;
  g.w2 = forward.hidden.transpose() * grad_scores;
  const Matrix<Scalar> grad_pre =
      ((grad_scores * scorer.w2.transpose()).array() * (Scalar(1) - forward.hidden.array().square()))
          .matrix();
  g.w1 = grad_pre.transpose() * bag;
  g.b1 = grad_pre.colwise().sum().transpose();
  return g;
}

AttentionScorer<double> init_attention_scorer(int dim, int hidden, std::uint64_t seed);

// M x D learnable prototypes for the prototype ablation.
Eigen::MatrixXd init_learnable_prototypes(int num_prototypes, int dim, std::uint64_t seed);

}  // namespace vlsa

#endif  // VLSA_AGGREGATION_HPP_
