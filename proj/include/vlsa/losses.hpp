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

#ifndef VLSA_LOSSES_HPP_
#define VLSA_LOSSES_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

#include "vlsa/labels.hpp"
#include "vlsa/types.hpp"

namespace vlsa {

enum class HeadKind { kIncidence, kHazard };

std::string to_string(HeadKind kind);
HeadKind head_kind_from_string(const std::string& name);

struct LossConfig {
  double beta = 1.0;
  int emd_norm_order = 1;
  bool use_emd = true;
  HeadKind head = HeadKind::kIncidence;

  double effective_beta() const { return use_emd ? beta : 0.0; }
};

inline constexpr double kLogClamp = 1e-12;

namespace detail {

template <typename Scalar>
Scalar clamped_neg_log(Scalar x) {
  return -std::log(std::max(x, Scalar(kLogClamp)));
}

template <typename Scalar>
Scalar clamped_neg_log_grad(Scalar x) {
  return x > Scalar(kLogClamp) ? -Scalar(1) / x : Scalar(0);
}

}  // namespace detail

// -[delta log y_c + (1 - delta) log(1 - sum_{i<c} y_i)], logs clamped at 1e-12.
template <typename Scalar>
Scalar mle_loss(const Vector<Scalar>& y_hat, const DiscreteLabel& label) {
  const Eigen::Index c = label.klass - 1;
  if (label.event == 1) return detail::clamped_neg_log(y_hat(c));
  return detail::clamped_neg_log(Scalar(1) - y_hat.head(c).sum());
}

template <typename Scalar>
Vector<Scalar> mle_loss_grad(const Vector<Scalar>& y_hat, const DiscreteLabel& label) {
  const Eigen::Index c = label.klass - 1;
  Vector<Scalar> g = Vector<Scalar>::Zero(y_hat.size());
  if (label.event == 1) {
    g(c) = detail::clamped_neg_log_grad(y_hat(c));
  } else {
    // d/dy_i of -log(1 - sum_{j<c} y_j) = -(-1) * 1/s.
    g.head(c).setConstant(-detail::clamped_neg_log_grad(Scalar(1) - y_hat.head(c).sum()));
  }
  return g;
}

// (1/C)^(1/l) * || CDF(p) - CDF(q) ||_l
template <typename Scalar>
Scalar emd_measure(const Vector<Scalar>& p, const Vector<Scalar>& q, int norm_order) {
  if (p.size() != q.size()) throw std::invalid_argument("emd_measure: size mismatch");
  if (norm_order < 1) throw std::invalid_argument("emd_measure: l must be >= 1");
  const Vector<Scalar> diff = cumulative_sum(p) - cumulative_sum(q);
  const Scalar l = Scalar(norm_order);
  const Scalar norm = std::pow(diff.array().abs().pow(l).sum(), Scalar(1) / l);
  return std::pow(Scalar(1) / Scalar(p.size()), Scalar(1) / l) * norm;
}

// Squared L2 distance between two CDFs (no 1/C prefactor).
template <typename Scalar>
Scalar squared_cdf_distance(const Vector<Scalar>& cdf, const Vector<Scalar>& target_cdf) {
  return (cdf - target_cdf).squaredNorm();
}

template <typename Scalar>
Scalar emd_loss(const Vector<Scalar>& y_hat, const DiscreteLabel& label, double tau_prime) {
  const Vector<Scalar> target =
      target_distribution(label, static_cast<int>(y_hat.size()), tau_prime).cast<Scalar>();
  return squared_cdf_distance<Scalar>(cumulative_sum(y_hat), cumulative_sum(target));
}

template <typename Scalar>
Vector<Scalar> emd_loss_grad(const Vector<Scalar>& y_hat, const DiscreteLabel& label,
                             double tau_prime) {
  const Vector<Scalar> target =
      target_distribution(label, static_cast<int>(y_hat.size()), tau_prime).cast<Scalar>();
  const Vector<Scalar> grad_cdf = Scalar(2) * (cumulative_sum(y_hat) - cumulative_sum(target));
  return suffix_sum(grad_cdf);
}

// L = L_MLE + beta * L_EMD for the incidence head.
template <typename Scalar>
Scalar total_loss(const Vector<Scalar>& y_hat, const DiscreteLabel& label,
                  const LossConfig& config, double tau_prime) {
  Scalar loss = mle_loss(y_hat, label);
  const double beta = config.effective_beta();
  if (beta != 0.0) loss += Scalar(beta) * emd_loss(y_hat, label, tau_prime);
  return loss;
}

template <typename Scalar>
Vector<Scalar> total_loss_grad(const Vector<Scalar>& y_hat, const DiscreteLabel& label,
                               const LossConfig& config, double tau_prime) {
  Vector<Scalar> g = mle_loss_grad(y_hat, label);
  const double beta = config.effective_beta();
  if (beta != 0.0) g += Scalar(beta) * emd_loss_grad(y_hat, label, tau_prime);
  return g;
}

// Discrete-hazard likelihood: an event in bin c contributes -log h_c - sum_{i<c} log(1-h_i);
// a record censored in bin c survived through it: -sum_{i<=c} log(1-h_i).
template <typename Scalar>
Scalar hazard_nll(const Vector<Scalar>& hazards, const DiscreteLabel& label) {
  const Eigen::Index c = label.klass - 1;
  Scalar loss = 0;
  const Eigen::Index survived = label.event == 1 ? c : c + 1;
  for (Eigen::Index i = 0; i < survived; ++i) {
    loss += detail::clamped_neg_log(Scalar(1) - hazards(i));
  }
  if (label.event == 1) loss += detail::clamped_neg_log(hazards(c));
  return loss;
}

template <typename Scalar>
Vector<Scalar> hazard_nll_grad(const Vector<Scalar>& hazards, const DiscreteLabel& label) {
  const Eigen::Index c = label.klass - 1;
  Vector<Scalar> g = Vector<Scalar>::Zero(hazards.size());
  const Eigen::Index survived = label.event == 1 ? c : c + 1;
  for (Eigen::Index i = 0; i < survived; ++i) {
    g(i) = -detail::clamped_neg_log_grad(Scalar(1) - hazards(i));
  }
  if (label.event == 1) g(c) = detail::clamped_neg_log_grad(hazards(c));
  return g;
}

}  // namespace vlsa

#endif  // VLSA_LOSSES_HPP_
