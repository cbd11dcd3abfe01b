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

#include "vlsa/embeddings.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vlsa/random.hpp"

namespace vlsa {
namespace {

constexpr std::array<char, 4> kMagic{'V', 'L', 'S', 'B'};

static_assert(std::endian::native == std::endian::little,
              "VLSB IO assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const std::string& source) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error(source + ": truncated header");
  }
  return v;
}

}  // namespace

EmbeddingMatrix read_vlsb(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw std::runtime_error(source + ": bad magic");
  }
  char version = 0;
  if (!in.read(&version, 1)) throw std::runtime_error(source + ": truncated header");
  if (version != 1 && version != 2) {
    throw std::runtime_error(source + ": unsupported version " +
                             std::to_string(static_cast<int>(version)));
  }
  const std::uint32_t rows = get_u32(in, source);
  const std::uint32_t dim = get_u32(in, source);
  if (dim == 0) throw std::runtime_error(source + ": dim must be positive");

  const std::size_t count = static_cast<std::size_t>(rows) * dim;
  const std::size_t width = version == 1 ? sizeof(float) : sizeof(double);
  std::vector<char> payload(count * width);
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw std::runtime_error(source + ": payload length mismatch");
  }

  EmbeddingMatrix out(rows, dim);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < dim; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * dim + c;
      double value;
      if (version == 1) {
        float f;
        std::memcpy(&f, payload.data() + k * width, sizeof f);
        value = f;
      } else {
        std::memcpy(&value, payload.data() + k * width, sizeof value);
      }
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << source << ": non-finite value at (" << r << "," << c << ")";
        throw std::runtime_error(msg.str());
      }
      out(r, c) = value;
    }
  }
  return out;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  EmbeddingMatrix out = read_vlsb(in, path.string());
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw std::runtime_error(path.string() + ": payload length mismatch");
  }
  return out;
}

void write_vlsb(std::ostream& out, const Eigen::MatrixXd& matrix, VlsbPrecision precision) {
  out.write(kMagic.data(), kMagic.size());
  const char version = static_cast<char>(precision);
  out.write(&version, 1);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (precision == VlsbPrecision::kFloat32) {
        const auto f = static_cast<float>(matrix(r, c));
        out.write(reinterpret_cast<const char*>(&f), sizeof f);
      } else {
        const double d = matrix(r, c);
        out.write(reinterpret_cast<const char*>(&d), sizeof d);
      }
    }
  }
}

void save_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                     VlsbPrecision precision) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_vlsb(out, matrix, precision);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

PseudoEncoder::PseudoEncoder(std::uint64_t seed, int token_dim, int out_dim) : seed_(seed) {
  if (token_dim < 1 || out_dim < 1) {
    throw std::invalid_argument("encoder dimensions must be positive");
  }
  projection_ = CounterRng(seed).normal_matrix(out_dim, token_dim,
                                               1.0 / std::sqrt(static_cast<double>(token_dim)));
}

Eigen::VectorXd PseudoEncoder::encode_mean(const Eigen::VectorXd& token_mean) const {
  Eigen::VectorXd z = projection_ * token_mean;
  const double norm = z.norm();
  if (!(norm > 0.0)) throw std::runtime_error("degenerate encoding");
  return z / norm;
}

Eigen::VectorXd PseudoEncoder::backward_mean(const Eigen::VectorXd& token_mean,
                                             const Eigen::VectorXd& grad_output) const {
  const Eigen::VectorXd z = projection_ * token_mean;
  const double norm = z.norm();
  const Eigen::VectorXd u = z / norm;
  const Eigen::VectorXd grad_z = (grad_output - u * u.dot(grad_output)) / norm;
  return projection_.transpose() * grad_z;
}

Eigen::VectorXd pseudo_encode(const PseudoEncoder& encoder, const Eigen::MatrixXd& tokens) {
  if (tokens.rows() < 1) throw std::invalid_argument("pseudo_encode: no tokens");
  if (tokens.cols() != encoder.token_dim()) {
    throw std::invalid_argument("pseudo_encode: token dim mismatch");
  }
  return encoder.encode_mean(tokens.colwise().mean().transpose());
}

Eigen::MatrixXd pseudo_encode_backward(const PseudoEncoder& encoder,
                                       const Eigen::MatrixXd& tokens,
                                       const Eigen::VectorXd& grad_output) {
  const Eigen::VectorXd mean = tokens.colwise().mean().transpose();
  const Eigen::VectorXd grad_mean = encoder.backward_mean(mean, grad_output);
  return (grad_mean / static_cast<double>(tokens.rows())).transpose().replicate(tokens.rows(), 1);
}

}  // namespace vlsa
