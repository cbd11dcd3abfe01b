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

#ifndef VLSA_EMBEDDINGS_HPP_
#define VLSA_EMBEDDINGS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace vlsa {

// VLSB layout: "VLSB", u8 version, u32 LE rows, u32 LE dim, row-major payload.
// Version 1 stores float32 (bags, embeddings); version 2 stores float64
// (checkpoints and files that must round-trip at double precision).
enum class VlsbPrecision : std::uint8_t { kFloat32 = 1, kFloat64 = 2 };

using EmbeddingMatrix = Eigen::MatrixXd;

EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
EmbeddingMatrix read_vlsb(std::istream& in, const std::string& source = "<stream>");

void save_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                     VlsbPrecision precision = VlsbPrecision::kFloat32);
void write_vlsb(std::ostream& out, const Eigen::MatrixXd& matrix,
                VlsbPrecision precision = VlsbPrecision::kFloat32);

// Frozen stand-in for a text encoder: L2-normalize(projection * mean(token rows)).
class PseudoEncoder {
 public:
  static constexpr int kDefaultOutDim = 512;
  static constexpr int kDefaultTokenDim = 768;

  PseudoEncoder() = default;
  PseudoEncoder(std::uint64_t seed, int token_dim = kDefaultTokenDim,
                int out_dim = kDefaultOutDim);

  std::uint64_t seed() const { return seed_; }
  int token_dim() const { return static_cast<int>(projection_.cols()); }
  int out_dim() const { return static_cast<int>(projection_.rows()); }
  const Eigen::MatrixXd& projection() const { return projection_; }

  // Encodes a pre-pooled token mean; shared by encode() and the prompt builder.
  Eigen::VectorXd encode_mean(const Eigen::VectorXd& token_mean) const;
  // Gradient w.r.t. the token mean given dL/d(output).
  Eigen::VectorXd backward_mean(const Eigen::VectorXd& token_mean,
                                const Eigen::VectorXd& grad_output) const;

 private:
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd projection_;
};

// tokens: L x D_emb. Throws "degenerate encoding" if the projection vanishes.
Eigen::VectorXd pseudo_encode(const PseudoEncoder& encoder, const Eigen::MatrixXd& tokens);

// dL/dtokens (L x D_emb) for dL/d(output).
Eigen::MatrixXd pseudo_encode_backward(const PseudoEncoder& encoder,
                                       const Eigen::MatrixXd& tokens,
                                       const Eigen::VectorXd& grad_output);

}  // namespace vlsa

#endif  // VLSA_EMBEDDINGS_HPP_
