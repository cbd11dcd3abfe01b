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

#ifndef VLSA_PREDICTION_HPP_
#define VLSA_PREDICTION_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlsa/labels.hpp"
#include "vlsa/types.hpp"

namespace vlsa {

// Cosine of one image vector against every prompt row. A zero image vector
// has cosine 0 with everything.
template <typename Scalar>
struct CosineScores {
  Vector<Scalar> cosines;
  Scalar image_norm = 0;
  Vector<Scalar> text_norms;
};

template <typename Scalar>
CosineScores<Scalar> cosine_scores(const Vector<Scalar>& image, const Matrix<Scalar>& text) {
  if (image.size() != text.cols()) throw std::invalid_argument("image/prompt dim mismatch");
  CosineScores<Scalar> s;
  s.text_norms = text.rowwise().norm();
  for (Eigen::Index c = 0; c < s.text_norms.size(); ++c) {
    if (!(s.text_norms(c) > Scalar(0))) throw std::invalid_argument("zero-norm prompt row");
  }
  s.image_norm = image.norm();
  if (s.image_norm == Scalar(0)) {
    s.cosines = Vector<Scalar>::Zero(text.rows());
  } else {
    s.cosines = (text * image).cwiseQuotient(s.text_norms) / s.image_norm;
  }
  return s;
}

template <typename Scalar>
struct CosineGrad {
  Vector<Scalar> image;
  Matrix<Scalar> text;
};

template <typename Scalar>
CosineGrad<Scalar> cosine_scores_backward(const Vector<Scalar>& image, const Matrix<Scalar>& text,
                                          const CosineScores<Scalar>& s,
                                          const Vector<Scalar>& grad_cos) {
  CosineGrad<Scalar> g;
  if (s.image_norm == Scalar(0)) {
    // The zero-vector convention is a constant; no gradient flows through it.
    g.image = Vector<Scalar>::Zero(image.size());
    g.text = Matrix<Scalar>::Zero(text.rows(), text.cols());
    return g;
  }
  const Vector<Scalar> image_unit = image / s.image_norm;
  const Matrix<Scalar> text_unit = s.text_norms.cwiseInverse().asDiagonal() * text;
  g.image = (text_unit.transpose() * grad_cos - image_unit * grad_cos.dot(s.cosines)) /
            s.image_norm;
  g.text.resize(text.rows(), text.cols());
  for (Eigen::Index c = 0; c < text.rows(); ++c) {
    g.text.row(c) = grad_cos(c) *
                    (image_unit.transpose() - s.cosines(c) * text_unit.row(c)) / s.text_norms(c);
  }
  return g;
}

// Predicted first-hitting distribution over C bins and its derived curves.
template <typename Scalar>
struct IncidenceResult {
  Vector<Scalar> y_hat;
  Vector<Scalar> cif;
  Vector<Scalar> survival;
  Scalar risk = 0;
  Vector<Scalar> cosines;
};

template <typename Scalar>
IncidenceResult<Scalar> incidence_from_distribution(const Vector<Scalar>& y_hat) {
  IncidenceResult<Scalar> r;
  r.y_hat = y_hat;
  r.cif = cumulative_sum(y_hat);
  r.survival = (Scalar(1) - r.cif.array()).matrix();
  r.risk = r.cif.sum();
  return r;
}

// y_hat = softmax(tau * cos(image, text_c)).
template <typename Scalar>
IncidenceResult<Scalar> incidence(const Vector<Scalar>& image, const Matrix<Scalar>& text,
                                  Scalar tau) {
  const auto scores = cosine_scores(image, text);
  auto r = incidence_from_distribution<Scalar>(softmax(tau * scores.cosines));
  r.cosines = scores.cosines;
  return r;
}

// Sum of the CIF; ranges over [1, C].
template <typename Scalar>
Scalar risk_score(const IncidenceResult<Scalar>& result) {
  return result.cif.sum();
}

// Expectation of the bin midpoints under y_hat.
template <typename Scalar>
Scalar expected_time(const Vector<Scalar>& y_hat, const TimeGrid& grid) {
  if (y_hat.size() != grid.num_classes()) {
    throw std::invalid_argument("expected_time: grid/result length mismatch");
  }
  Scalar t = 0;
  for (int c = 1; c <= grid.num_classes(); ++c) t += y_hat(c - 1) * Scalar(grid.midpoint(c));
  return t;
}

template <typename Scalar>
Scalar expected_time(const IncidenceResult<Scalar>& result, const TimeGrid& grid) {
  return expected_time(result.y_hat, grid);
}

template <typename Scalar>
struct HeadGrad {
  Vector<Scalar> image;
  Matrix<Scalar> text;
  Scalar tau = 0;
};

template <typename Scalar>
HeadGrad<Scalar> incidence_backward(const Vector<Scalar>& image, const Matrix<Scalar>& text,
                                    Scalar tau, const IncidenceResult<Scalar>& forward,
                                    const Vector<Scalar>& grad_y) {
  const Vector<Scalar> grad_logits = softmax_backward(forward.y_hat, grad_y);
  const auto scores = cosine_scores(image, text);
  const auto g = cosine_scores_backward(image, text, scores, Vector<Scalar>(tau * grad_logits));
  return {g.image, g.text, grad_logits.dot(forward.cosines)};
}

// Discrete hazard variant: h_c = sigmoid(tau * cos), S(c) = prod_{i<=c} (1 - h_i).
template <typename Scalar>
struct HazardResult {
  Vector<Scalar> hazards;
  Vector<Scalar> survival;
  Scalar risk = 0;
  Vector<Scalar> cosines;
};

template <typename Scalar>
HazardResult<Scalar> hazard_from_logits(const Vector<Scalar>& logits) {
  HazardResult<Scalar> r;
  r.hazards = (Scalar(1) / (Scalar(1) + (-logits.array()).exp())).matrix();
  r.survival.resize(logits.size());
  Scalar s = 1;
  for (Eigen::Index c = 0; c < logits.size(); ++c) {
    s *= Scalar(1) - r.hazards(c);
    r.survival(c) = s;
  }
  r.risk = (Scalar(1) - r.survival.array()).sum();
  return r;
}

template <typename Scalar>
HazardResult<Scalar> hazard_head(const Vector<Scalar>& image, const Matrix<Scalar>& text,
                                 Scalar tau) {
  const auto scores = cosine_scores(image, text);
  auto r = hazard_from_logits<Scalar>(tau * scores.cosines);
  r.cosines = scores.cosines;
  return r;
}

// dL/dh given dL/dS: S(c) depends on h_i for every i <= c.
template <typename Scalar>
Vector<Scalar> survival_to_hazard_grad(const Vector<Scalar>& hazards,
                                       const Vector<Scalar>& grad_survival) {
  const Eigen::Index n = hazards.size();
  Vector<Scalar> g = Vector<Scalar>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // prod_{j<=c, j!=i} (1 - h_j), built without dividing by (1 - h_i).
    Scalar before = 1;
    for (Eigen::Index j = 0; j < i; ++j) before *= Scalar(1) - hazards(j);
    Scalar running = before;
    for (Eigen::Index c = i; c < n; ++c) {
      if (c > i) running *= Scalar(1) - hazards(c);
      g(i) -= grad_survival(c) * running;
    }
  }
  return g;
}

template <typename Scalar>
HeadGrad<Scalar> hazard_backward(const Vector<Scalar>& image, const Matrix<Scalar>& text,
                                 Scalar tau, const HazardResult<Scalar>& forward,
                                 const Vector<Scalar>& grad_hazards) {
  const Vector<Scalar> grad_logits =
      (grad_hazards.array() * forward.hazards.array() * (Scalar(1) - forward.hazards.array()))
          .matrix();
  const auto scores = cosine_scores(image, text);
  const auto g = cosine_scores_backward(image, text, scores, Vector<Scalar>(tau * grad_logits));
  return {g.image, g.text, grad_logits.dot(forward.cosines)};
}

// Incidence implied by hazards; the final bin absorbs the residual mass S(C-1).
template <typename Scalar>
Vector<Scalar> hazard_to_incidence(const HazardResult<Scalar>& h) {
  const Eigen::Index n = h.hazards.size();
  Vector<Scalar> y(n);
  Scalar prev = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    y(c) = c + 1 == n ? prev : prev * h.hazards(c);
    prev = h.survival(c);
  }
  return y;
}

}  // namespace vlsa

#endif  // VLSA_PREDICTION_HPP_
