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

#ifndef VLSA_TYPES_HPP_
#define VLSA_TYPES_HPP_

#include <Eigen/Dense>

namespace vlsa {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Numerically stable softmax of a dense vector expression.
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out = (logits.array() - logits.maxCoeff()).exp().matrix();
  out /= out.sum();
  return out;
}

// Backward pass of softmax: given probabilities p and dL/dp, returns dL/dlogits.
template <typename DerivedP, typename DerivedG>
Vector<typename DerivedP::Scalar> softmax_backward(const Eigen::MatrixBase<DerivedP>& probs,
                                                   const Eigen::MatrixBase<DerivedG>& grad) {
  const auto inner = probs.dot(grad);
  return (probs.array() * (grad.array() - inner)).matrix();
}

// Inclusive prefix sum (a discrete CDF when applied to a probability vector).
template <typename Derived>
Vector<typename Derived::Scalar> cumulative_sum(const Eigen::MatrixBase<Derived>& v) {
  Vector<typename Derived::Scalar> out(v.size());
  typename Derived::Scalar acc(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    acc += v(i);
    out(i) = acc;
  }
  return out;
}

// Adjoint of cumulative_sum: out(i) = sum_{c >= i} g(c).
template <typename Derived>
Vector<typename Derived::Scalar> suffix_sum(const Eigen::MatrixBase<Derived>& g) {
  Vector<typename Derived::Scalar> out(g.size());
  typename Derived::Scalar acc(0);
  for (Eigen::Index i = g.size() - 1; i >= 0; --i) {
    acc += g(i);
    out(i) = acc;
  }
  return out;
}

}  // namespace vlsa

#endif  // VLSA_TYPES_HPP_
