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

#include "vlsa/model.hpp"

#include <cmath>
#include <stdexcept>

#include "vlsa/random.hpp"

namespace vlsa {

std::string to_string(HeadKind kind) {
  return kind == HeadKind::kIncidence ? "incidence" : "hazard";
}

HeadKind head_kind_from_string(const std::string& name) {
  if (name == "incidence") return HeadKind::kIncidence;
  if (name == "hazard") return HeadKind::kHazard;
  throw std::invalid_argument("unknown head '" + name + "'");
}

namespace {

template <typename T>
void add_view(std::vector<TensorView>& out, std::string name, T& tensor) {
  out.push_back({std::move(name),
                 Eigen::Map<Eigen::MatrixXd>(tensor.data(), tensor.rows(), tensor.cols())});
}

}  // namespace

std::vector<TensorView> Parameters::tensors() {
  std::vector<TensorView> out;
  if (prior_offsets.size() > 0) add_view(out, "prior_offsets", prior_offsets);
  add_view(out, "context_tokens", prompts.context_tokens);
  for (std::size_t i = 0; i < prompts.class_tokens.size(); ++i) {
    add_view(out, "class_tokens." + std::to_string(i), prompts.class_tokens[i]);
  }
  add_view(out, "head.weight", head.weight);
  add_view(out, "head.bias", head.bias);
  if (attention.w1.size() > 0) {
    add_view(out, "attention.w1", attention.w1);
    add_view(out, "attention.b1", attention.b1);
    add_view(out, "attention.w2", attention.w2);
  }
  add_view(out, "log_tau", log_tau);
  return out;
}

Parameters Parameters::zeros_like() const {
  Parameters z = *this;
  z.set_zero();
  return z;
}

void Parameters::set_zero() {
  for (auto& t : tensors()) t.values.setZero();
}

Parameters& Parameters::operator+=(const Parameters& other) {
  auto mine = tensors();
  auto theirs = const_cast<Parameters&>(other).tensors();
  if (mine.size() != theirs.size()) throw std::invalid_argument("parameter layout mismatch");
  for (std::size_t i = 0; i < mine.size(); ++i) mine[i].values += theirs[i].values;
  return *this;
}

Parameters& Parameters::operator*=(double scale) {
  for (auto& t : tensors()) t.values *= scale;
  return *this;
}

Model::Model(ModelConfig config, Eigen::MatrixXd prior_base, std::vector<std::string> prior_texts)
    : config_(config), prior_base_(std::move(prior_base)), prior_texts_(std::move(prior_texts)) {
  if (config_.num_classes < 2) throw std::invalid_argument("model needs at least 2 classes");
  if (prior_base_.cols() < 1) throw std::invalid_argument("model needs a positive feature dim");
  if (uses_priors() && prior_base_.rows() < 1) throw std::invalid_argument("model needs M >= 1 priors");
  if (!(config_.aggregator.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");

  const int d = dim();
  encoder_ = PseudoEncoder(mix_seed(config_.seed, 0xE1C0), config_.token_dim, d);

  switch (config_.aggregator.kind) {
    case AggregatorKind::kPriorGuided:
      params_.prior_offsets = Eigen::MatrixXd::Zero(prior_base_.rows(), d);
      break;
    case AggregatorKind::kLearnablePrototypes:
      params_.prior_offsets = init_learnable_prototypes(num_priors(), d, config_.seed);
      prior_base_.setZero();
      break;
    case AggregatorKind::kAttention:
      params_.attention = init_attention_scorer(d, config_.aggregator.attention_hidden, config_.seed);
      break;
  }
  params_.prompts =
      init_prompt_params(config_.num_classes, config_.num_bases, config_.context_length,
                         config_.class_length, config_.token_dim, config_.ordinal_prompts,
                         config_.seed);
  params_.head.weight = Eigen::MatrixXd::Identity(d, d);
  params_.head.bias = Eigen::VectorXd::Zero(d);
  params_.log_tau(0) = std::log(kInitialTau);
}

double Model::tau() const { return std::exp(params_.log_tau(0)); }

void Model::clamp_tau() {
  params_.log_tau(0) = std::min(params_.log_tau(0), std::log(kMaxTau));
}

Eigen::MatrixXd Model::effective_priors() const {
  return vlsa::effective_priors(prior_base_, params_.prior_offsets);
}

PromptCache Model::prompts() const {
  PromptCache cache;
  cache.weights = prompt_weights(params_.prompts);
  cache.text = survival_prompts(params_.prompts, cache.weights, encoder_);
  return cache;
}

BagForward Model::forward(const Eigen::MatrixXd& bag, const PromptCache& prompts) const {
  if (bag.cols() != dim()) {
    throw std::invalid_argument("bag dim " + std::to_string(bag.cols()) + " != model dim " +
                                std::to_string(dim()));
  }
  BagForward f;
  if (uses_priors()) {
    f.priors = effective_priors();
    f.pool = prior_guided_pool(f.priors, bag, config_.aggregator.alpha);
    f.image = fuse(f.pool.pooled, params_.head);
  } else {
    f.attention = attention_pool(bag, params_.attention);
    f.image = params_.head(f.attention.pooled);
  }
  f.tau = tau();
  if (config_.head == HeadKind::kIncidence) {
    f.incidence = incidence(f.image, prompts.text, f.tau);
  } else {
    f.hazard = hazard_head(f.image, prompts.text, f.tau);
  }
  return f;
}

Prediction Model::predict_image(const Eigen::VectorXd& image, const PromptCache& prompts) const {
  Prediction p;
  if (config_.head == HeadKind::kIncidence) {
    const auto r = incidence(image, prompts.text, tau());
    p.y_hat = r.y_hat;
    p.survival = r.survival;
    p.risk = r.risk;
  } else {
    const auto h = hazard_head(image, prompts.text, tau());
    p.y_hat = hazard_to_incidence(h);
    p.survival = h.survival;
    p.risk = h.risk;
  }
  return p;
}

Prediction Model::predict(const Eigen::MatrixXd& bag, const PromptCache& prompts) const {
  return predict_image(forward(bag, prompts).image, prompts);
}

double Model::loss(const BagForward& f, const DiscreteLabel& label, const LossConfig& config,
                   double tau_prime) const {
  if (config_.head == HeadKind::kIncidence) {
    return total_loss(f.incidence.y_hat, label, config, tau_prime);
  }
  double value = hazard_nll(f.hazard.hazards, label);
  const double beta = config.effective_beta();
  if (beta != 0.0) {
    const Eigen::VectorXd target = target_distribution(label, num_classes(), tau_prime);
    const Eigen::VectorXd cdf = (1.0 - f.hazard.survival.array()).matrix();
    value += beta * squared_cdf_distance<double>(cdf, cumulative_sum(target));
  }
  return value;
}

double Model::backward(const Eigen::MatrixXd& bag, const BagForward& f, const DiscreteLabel& label,
                       const LossConfig& config, double tau_prime, const PromptCache& prompts,
                       Parameters& grads, Eigen::MatrixXd& grad_text) const {
  const double value = loss(f, label, config, tau_prime);

  HeadGrad<double> head_grad;
  if (config_.head == HeadKind::kIncidence) {
    const Eigen::VectorXd grad_y = total_loss_grad(f.incidence.y_hat, label, config, tau_prime);
    head_grad = incidence_backward(f.image, prompts.text, f.tau, f.incidence, grad_y);
  } else {
    Eigen::VectorXd grad_h = hazard_nll_grad(f.hazard.hazards, label);
    const double beta = config.effective_beta();
    if (beta != 0.0) {
      const Eigen::VectorXd target = target_distribution(label, num_classes(), tau_prime);
      const Eigen::VectorXd cdf = (1.0 - f.hazard.survival.array()).matrix();
      // cdf = 1 - S, so dL/dS = -2 (cdf - target_cdf).
      const Eigen::VectorXd grad_s = -2.0 * beta * (cdf - cumulative_sum(target));
      grad_h += survival_to_hazard_grad(f.hazard.hazards, grad_s);
    }
    head_grad = hazard_backward(f.image, prompts.text, f.tau, f.hazard, grad_h);
  }

  grads.log_tau(0) += head_grad.tau * f.tau;
  grad_text += head_grad.text;

  if (uses_priors()) {
    const auto g = fuse_backward(f.pool.pooled, params_.head, head_grad.image);
    grads.head.weight += g.head.weight;
    grads.head.bias += g.head.bias;
    grads.prior_offsets += prior_guided_pool_backward(f.priors, bag, config_.aggregator.alpha,
                                                      f.pool, g.pooled);
  } else {
    grads.head.weight += head_grad.image * f.attention.pooled.transpose();
    grads.head.bias += head_grad.image;
    const Eigen::VectorXd grad_pooled = params_.head.weight.transpose() * head_grad.image;
    const auto g = attention_pool_backward(bag, params_.attention, f.attention, grad_pooled);
    grads.attention.w1 += g.w1;
    grads.attention.b1 += g.b1;
    grads.attention.w2 += g.w2;
  }
  return value;
}

void Model::prompt_backward(const PromptCache& prompts, const Eigen::MatrixXd& grad_text,
                            Parameters& grads) const {
  const auto g = survival_prompts_backward(params_.prompts, prompts.weights, encoder_, grad_text);
  grads.prompts.context_tokens += g.context_tokens;
  for (std::size_t b = 0; b < g.class_tokens.size(); ++b) {
    grads.prompts.class_tokens[b] += g.class_tokens[b];
  }
}

double loss_backward(const Model& model, const Eigen::MatrixXd& bag, const DiscreteLabel& label,
                     const LossConfig& config, double tau_prime, Parameters& grads) {
  const PromptCache prompts = model.prompts();
  const BagForward f = model.forward(bag, prompts);
  Eigen::MatrixXd grad_text = Eigen::MatrixXd::Zero(prompts.text.rows(), prompts.text.cols());
  const double value = model.backward(bag, f, label, config, tau_prime, prompts, grads, grad_text);
  model.prompt_backward(prompts, grad_text, grads);
  return value;
}

double bag_loss(const Model& model, const Eigen::MatrixXd& bag, const DiscreteLabel& label,
                const LossConfig& config, double tau_prime) {
  const PromptCache prompts = model.prompts();
  return model.loss(model.forward(bag, prompts), label, config, tau_prime);
}

}  // namespace vlsa
