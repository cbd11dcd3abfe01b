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

#ifndef VLSA_MODEL_HPP_
#define VLSA_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vlsa/aggregation.hpp"
#include "vlsa/embeddings.hpp"
#include "vlsa/labels.hpp"
#include "vlsa/losses.hpp"
#include "vlsa/prediction.hpp"
#include "vlsa/prompts.hpp"

namespace vlsa {

inline constexpr double kMaxTau = 100.0;
inline constexpr double kInitialTau = 1.0 / 0.07;

struct ModelConfig {
  AggregatorConfig aggregator;
  HeadKind head = HeadKind::kIncidence;
  bool ordinal_prompts = true;
  int num_classes = 0;
  int num_bases = PromptDefaults::kNumBases;
  int context_length = PromptDefaults::kContextLength;
  int class_length = PromptDefaults::kClassLength;
  int token_dim = PseudoEncoder::kDefaultTokenDim;
  std::uint64_t seed = 0;
};

// A named, mutable view of one parameter tensor.
struct TensorView {
  std::string name;
  Eigen::Map<Eigen::MatrixXd> values;

  // Parameter group used in gradient reports: the name up to the first '.'.
  std::string group() const { return name.substr(0, name.find('.')); }
};

// Every learnable tensor. Gradients and optimizer moments use the same layout.
struct Parameters {
  Eigen::MatrixXd prior_offsets;  // T_prog (or the prototypes themselves)
  PromptParams prompts;
  LinearHead<double> head;
  AttentionScorer<double> attention;
  Eigen::VectorXd log_tau = Eigen::VectorXd::Zero(1);

  std::vector<TensorView> tensors();
  Parameters zeros_like() const;
  void set_zero();
  Parameters& operator+=(const Parameters& other);
  Parameters& operator*=(double scale);
};

// Frozen per-step prompt state: interpolation weights and F_text.
struct PromptCache {
  Eigen::MatrixXd weights;
  Eigen::MatrixXd text;
};

struct BagForward {
  Eigen::MatrixXd priors;  // effective priors (empty for attention)
  PoolResult<double> pool;
  AttentionResult<double> attention;
  Eigen::VectorXd image;
  IncidenceResult<double> incidence;
  HazardResult<double> hazard;
  double tau = 0.0;
};

// Head-independent view of a prediction.
struct Prediction {
  Eigen::VectorXd y_hat;
  Eigen::VectorXd survival;
  double risk = 0.0;
};

class Model {
 public:
  Model() = default;
  // prior_base: M x D frozen prior embeddings (ignored except for shape by
  // the prototype ablation, whose priors are fully learnable).
  Model(ModelConfig config, Eigen::MatrixXd prior_base, std::vector<std::string> prior_texts = {});

  const ModelConfig& config() const { return config_; }
  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }
  const Eigen::MatrixXd& prior_base() const { return prior_base_; }
  const std::vector<std::string>& prior_texts() const { return prior_texts_; }
  const PseudoEncoder& encoder() const { return encoder_; }
  int dim() const { return static_cast<int>(prior_base_.cols()); }
  int num_priors() const { return static_cast<int>(prior_base_.rows()); }
  int num_classes() const { return config_.num_classes; }
  bool uses_priors() const { return config_.aggregator.kind != AggregatorKind::kAttention; }

  double tau() const;
  // Keeps tau inside (0, kMaxTau].
  void clamp_tau();

  Eigen::MatrixXd effective_priors() const;
  PromptCache prompts() const;

  BagForward forward(const Eigen::MatrixXd& bag, const PromptCache& prompts) const;
  Prediction predict(const Eigen::MatrixXd& bag, const PromptCache& prompts) const;
  Prediction predict_image(const Eigen::VectorXd& image, const PromptCache& prompts) const;

  double loss(const BagForward& forward, const DiscreteLabel& label, const LossConfig& config,
              double tau_prime) const;

  // Accumulates parameter gradients of one bag's loss into grads, except for
  // the prompt parameters: dL/dF_text is accumulated into grad_text so the
  // prompt backward can run once per optimizer step.
  double backward(const Eigen::MatrixXd& bag, const BagForward& forward,
                  const DiscreteLabel& label, const LossConfig& config, double tau_prime,
                  const PromptCache& prompts, Parameters& grads,
                  Eigen::MatrixXd& grad_text) const;

  void prompt_backward(const PromptCache& prompts, const Eigen::MatrixXd& grad_text,
                       Parameters& grads) const;

 private:
  ModelConfig config_;
  Eigen::MatrixXd prior_base_;
  std::vector<std::string> prior_texts_;
  PseudoEncoder encoder_;
  Parameters params_;
};

// Loss of one bag and the full gradient with respect to every parameter.
double loss_backward(const Model& model, const Eigen::MatrixXd& bag, const DiscreteLabel& label,
                     const LossConfig& config, double tau_prime, Parameters& grads);

double bag_loss(const Model& model, const Eigen::MatrixXd& bag, const DiscreteLabel& label,
                const LossConfig& config, double tau_prime);

}  // namespace vlsa

#endif  // VLSA_MODEL_HPP_
