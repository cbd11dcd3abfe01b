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

#include "vlsa/synth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlsa/io.hpp"
#include "vlsa/metrics.hpp"
#include "vlsa/random.hpp"

namespace vlsa {

void SynthConfig::validate() const {
  if (n_patients < 2) throw std::invalid_argument("synth: n_patients must be >= 2");
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("synth: need 1 <= k_min <= k_max");
  if (n_prototypes < 1) throw std::invalid_argument("synth: n_prototypes must be >= 1");
  if (dim <= n_prototypes) throw std::invalid_argument("synth: dim must exceed n_prototypes");
  if (!(signal_strength >= 0.0)) throw std::invalid_argument("synth: signal_strength must be >= 0");
  if (!(censoring_rate >= 0.0 && censoring_rate < 1.0)) {
    throw std::invalid_argument("synth: censoring_rate must be in [0, 1)");
  }
  if (!(baseline_scale > 0.0)) throw std::invalid_argument("synth: baseline_scale must be > 0");
  if (!(signal_fraction >= 0.0 && signal_fraction <= 1.0)) {
    throw std::invalid_argument("synth: signal_fraction must be in [0, 1]");
  }
  if (!(noise_scale >= 0.0) || !(amplitude >= 0.0) || !(distractor_scale >= 0.0)) {
    throw std::invalid_argument("synth: scales must be >= 0");
  }
}

namespace {

double to_float32(double x) { return static_cast<double>(static_cast<float>(x)); }

Eigen::VectorXd normal_vector(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Gram-Schmidt against the rows of basis, then normalized.
Eigen::VectorXd orthonormal_direction(Rng& rng, const Eigen::MatrixXd& basis, int dim) {
  for (;;) {
    Eigen::VectorXd v = normal_vector(rng, dim);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index r = 0; r < basis.rows(); ++r) {
        v -= basis.row(r).dot(v) * basis.row(r).transpose();
      }
    }
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
}

double censored_fraction(const std::vector<double>& events, const std::vector<double>& unit,
                         double bound) {
  int censored = 0;
  for (std::size_t i = 0; i < events.size(); ++i) censored += bound * unit[i] < events[i];
  return static_cast<double>(censored) / static_cast<double>(events.size());
}

}  // namespace

SynthCohort generate(const SynthConfig& config) {
  config.validate();
  SynthCohort cohort;
  cohort.config = config;
  const int d = config.dim;
  const int m = config.n_prototypes;

  Rng proto_rng(mix_seed(config.seed, 1));
  cohort.prototypes = Eigen::MatrixXd::Zero(0, d);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd u = orthonormal_direction(proto_rng, cohort.prototypes, d);
    cohort.prototypes.conservativeResize(i + 1, Eigen::NoChange);
    cohort.prototypes.row(i) = u.transpose();
  }
  for (int i = 0; i < m; ++i) cohort.prior_texts.push_back("synthetic prior " + std::to_string(i + 1));

  // Outcomes and features use separate streams, so feature settings never
  // change the latent risks or survival times of a seed.
  Rng outcome_rng(mix_seed(config.seed, 2));
  Rng feature_rng(mix_seed(config.seed, 3));
  std::vector<double> event_times;
  std::vector<double> censor_unit;
  const int width = static_cast<int>(std::to_string(config.n_patients).size());
  for (int p = 0; p < config.n_patients; ++p) {
    const double r = outcome_rng.normal();
    event_times.push_back(outcome_rng.exponential(std::exp(r) / config.baseline_scale));
    censor_unit.push_back(outcome_rng.uniform());
    cohort.latent_risks.push_back(r);

    const double g = 1.0 / (1.0 + std::exp(-r * config.signal_strength));
    const int k = feature_rng.integer(config.k_min, config.k_max);
    const Eigen::VectorXd background = orthonormal_direction(feature_rng, cohort.prototypes, d);
    Eigen::MatrixXd bag(k, d);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd x = config.noise_scale * normal_vector(feature_rng, d);
      if (feature_rng.uniform() < config.signal_fraction) {
        const auto proto = static_cast<Eigen::Index>(feature_rng.index(static_cast<std::uint64_t>(m)));
        x += config.amplitude * g * cohort.prototypes.row(proto).transpose();
      } else {
        x += config.distractor_scale * background;
      }
      bag.row(i) = x.unaryExpr(&to_float32).transpose();
    }
    cohort.bags.push_back(std::move(bag));

    std::string id = std::to_string(p + 1);
    id = "P" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
    cohort.records.push_back({id, 0.0, 1, "bags/" + id + ".vlsb"});
  }

  double bound = std::numeric_limits<double>::infinity();
  if (config.censoring_rate > 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    while (censored_fraction(event_times, censor_unit, hi) > config.censoring_rate) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (censored_fraction(event_times, censor_unit, mid) > config.censoring_rate) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    bound = hi;
  }
  cohort.censoring_bound = bound;
  for (int p = 0; p < config.n_patients; ++p) {
    auto& rec = cohort.records[static_cast<std::size_t>(p)];
    const double c = std::isinf(bound) ? bound : bound * censor_unit[static_cast<std::size_t>(p)];
    if (c < event_times[static_cast<std::size_t>(p)]) {
      rec.time = c;
      rec.event = 0;
    } else {
      rec.time = event_times[static_cast<std::size_t>(p)];
      rec.event = 1;
    }
  }
  return cohort;
}

double oracle_ci(const SynthCohort& cohort) {
  return concordance_index(cohort.latent_risks, cohort.records);
}

void write_cohort(const SynthCohort& cohort, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "bags");
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    save_embeddings(dir / cohort.records[i].bag_path, cohort.bags[i], VlsbPrecision::kFloat32);
  }
  write_manifest(dir / "manifest.csv", cohort.records);
  save_embeddings(dir / "priors.vlsb", cohort.prototypes, VlsbPrecision::kFloat64);

  PhraseConfig phrases;
  phrases.context = "a histopathology image suggesting";
  phrases.bases = {"a very poor prognosis", "a poor prognosis", "a good prognosis",
                   "a very good prognosis"};
  phrases.priors = cohort.prior_texts;
  write_phrase_config(dir / "priors.json", phrases);
  write_latent_risks(dir / "latent.json", cohort);
}

}  // namespace vlsa
