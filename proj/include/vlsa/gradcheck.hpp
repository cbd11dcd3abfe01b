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

#ifndef VLSA_GRADCHECK_HPP_
#define VLSA_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vlsa/model.hpp"

namespace vlsa {

struct GradCheckOptions {
  int instances = 5;  // K
  int priors = 2;     // M
  int classes = 3;    // C
  int dim = 8;        // D
  int token_dim = 16;
  double step = 1e-6;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  AggregatorKind aggregator = AggregatorKind::kPriorGuided;
  HeadKind head = HeadKind::kIncidence;
  bool ordinal_prompts = true;
  // Debug negative control: scales the analytic head gradient by 1.01.
  bool break_head = false;
};

struct GradCheckRow {
  std::string group;
  int entries = 0;
  double max_abs_error = 0.0;
  // ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12)
  double relative_error = 0.0;
  bool pass = false;
};

// Central finite differences against the analytic gradient of the loss of
// one uncensored and one censored bag, grouped by parameter family.
std::vector<GradCheckRow> gradcheck(const GradCheckOptions& options);

}  // namespace vlsa

#endif  // VLSA_GRADCHECK_HPP_
