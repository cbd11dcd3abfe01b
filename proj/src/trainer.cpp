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

#include "vlsa/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vlsa/metrics.hpp"
#include "vlsa/random.hpp"

namespace vlsa {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  }
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (accumulation_steps < 1) throw std::invalid_argument("accumulation_steps must be >= 1");
  if (!(loss.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
}

ModelConfig model_config(const TrainConfig& config, int num_classes) {
  ModelConfig m;
  m.aggregator = config.aggregator;
  m.head = config.loss.head;
  m.ordinal_prompts = config.ordinal_prompts;
  m.num_classes = num_classes;
  m.num_bases = config.num_bases;
  m.context_length = config.context_length;
  m.class_length = config.class_length;
  m.token_dim = config.token_dim;
  m.seed = config.seed;
  return m;
}

std::vector<Sample> make_samples(const std::vector<SurvivalRecord>& records,
                                 const std::vector<Eigen::MatrixXd>& bags, const TimeGrid& grid) {
  if (records.size() != bags.size()) throw std::invalid_argument("records/bags size mismatch");
  std::vector<Sample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back({records[i], bags[i], assign_class(records[i], grid)});
  }
  return out;
}

OptimizerState init_optimizer(const Parameters& params) {
  OptimizerState s;
  s.first_moment = params.zeros_like();
  s.second_moment = params.zeros_like();
  return s;
}

void adam_update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::Ref<const Eigen::MatrixXd>& grad,
                 Eigen::Ref<Eigen::MatrixXd> m, Eigen::Ref<Eigen::MatrixXd> v, long step,
                 double lr, double wd) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() || m.rows() != param.rows() ||
      m.cols() != param.cols() || v.rows() != param.rows() || v.cols() != param.cols()) {
    throw std::invalid_argument("adam_update: shape mismatch");
  }
  if (step < 1) throw std::invalid_argument("adam_update: step must be >= 1");
  param -= lr * wd * param;
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
  v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEpsilon);
}

void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state, double lr,
               double wd) {
  auto p = params.tensors();
  auto g = const_cast<Parameters&>(grads).tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw std::invalid_argument("adam_step: parameter layout mismatch");
  }
  ++state.step;
  for (std::size_t i = 0; i < p.size(); ++i) {
    adam_update(p[i].values, g[i].values, m[i].values, v[i].values, state.step, lr, wd);
  }
}

std::vector<double> predict_risks(const Model& model, const std::vector<Sample>& data) {
  const PromptCache prompts = model.prompts();
  std::vector<double> risks;
  risks.reserve(data.size());
  for (const auto& s : data) risks.push_back(model.predict(s.bag, prompts).risk);
  return risks;
}

namespace {

std::optional<double> validation_ci(const Model& model, const std::vector<Sample>& data) {
  if (data.empty()) return std::nullopt;
  std::vector<SurvivalRecord> records;
  for (const auto& s : data) records.push_back(s.record);
  const auto risks = predict_risks(model, data);
  const auto c = concordance(risks, records);
  if (c.comparable_pairs == 0) return std::nullopt;
  return c.index;
}

}  // namespace

TrainResult train(Model model, const std::vector<Sample>& data, const TrainConfig& config,
                  const std::vector<Sample>* validation) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (std::none_of(data.begin(), data.end(), [](const Sample& s) { return s.record.event == 1; })) {
    throw std::invalid_argument("train: dataset has no events");
  }

  TrainResult result;
  OptimizerState opt = init_optimizer(model.params());
  Parameters grads = model.params().zeros_like();
  Rng rng(mix_seed(config.seed, 0x7A1A));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  long global_step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;

    PromptCache prompts;
    Eigen::MatrixXd grad_text;
    double tau_prime = 0.0;
    int in_window = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (in_window == 0) {
        prompts = model.prompts();
        grad_text = Eigen::MatrixXd::Zero(prompts.text.rows(), prompts.text.cols());
        tau_prime = model.tau();
        grads.set_zero();
      }
      const Sample& s = data[order[i]];
      ++global_step;
      const BagForward f = model.forward(s.bag, prompts);
      const double loss =
          model.backward(s.bag, f, s.label, config.loss, tau_prime, prompts, grads, grad_text);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss for patient '" << s.record.patient_id << "' at step "
            << global_step << " (epoch " << epoch << ")";
        throw std::runtime_error(msg.str());
      }
      epoch_loss += loss;
      ++in_window;
      if (in_window == config.accumulation_steps || i + 1 == order.size()) {
        model.prompt_backward(prompts, grad_text, grads);
        grads *= 1.0 / in_window;
        adam_step(model.params(), grads, opt, config.learning_rate, config.weight_decay);
        model.clamp_tau();
        in_window = 0;
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.mean_loss = epoch_loss / static_cast<double>(data.size());
    if (validation != nullptr) entry.val_ci = validation_ci(model, *validation);
    result.log.push_back(entry);
  }
  result.optimizer_steps = opt.step;
  result.model = std::move(model);
  return result;
}

}  // namespace vlsa
