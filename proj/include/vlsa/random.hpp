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

#ifndef VLSA_RANDOM_HPP_
#define VLSA_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace vlsa {

// Stateless generator: the value at (seed, counter) never depends on call order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  // Standard normal via Box-Muller over counters 2i and 2i+1.
  double normal(std::uint64_t counter) const;

  // rows x cols matrix of N(0,1) * scale; entry (r,c) uses counter offset + r*cols + c.
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                                std::uint64_t offset = 0) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Sequential generator with platform-independent distributions
// (std::*_distribution output is implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                 // (0, 1)
  double uniform(double lo, double hi);
  double normal();
  double exponential(double rate);
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  int integer(int lo, int hi);      // inclusive

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace vlsa

#endif  // VLSA_RANDOM_HPP_
