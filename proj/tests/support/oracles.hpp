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

#ifndef VLSA_TESTS_ORACLES_HPP_
#define VLSA_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "vlsa/labels.hpp"

namespace oracle {

inline Eigen::VectorXd random_simplex(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = e(gen);
  return v / v.sum();
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = n(gen);
  return m;
}

// Literal double sum over ordered pairs, ties in risk score 0.
inline double pairwise_ci(const std::vector<double>& risk,
                          const std::vector<vlsa::SurvivalRecord>& rec) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    for (std::size_t j = 0; j < rec.size(); ++j) {
      if (rec[i].time < rec[j].time && rec[i].event == 1) {
        den += 1.0;
        if (risk[i] > risk[j]) num += 1.0;
      }
    }
  }
  return num / den;
}

// Min-cost flow (successive shortest paths, Bellman-Ford) moving mass p onto q
// over a complete bipartite graph with cost |i - j| / n.
inline double transport_cost(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const int n = static_cast<int>(p.size());
  const int source = 2 * n, sink = 2 * n + 1, nodes = 2 * n + 2;
  struct Edge {
    int to;
    double cap, cost;
    int rev;
  };
  std::vector<std::vector<Edge>> g(static_cast<std::size_t>(nodes));
  auto add = [&](int a, int b, double cap, double cost) {
    g[a].push_back({b, cap, cost, static_cast<int>(g[b].size())});
    g[b].push_back({a, 0.0, -cost, static_cast<int>(g[a].size()) - 1});
  };
  for (int i = 0; i < n; ++i) add(source, i, p(i), 0.0);
  for (int j = 0; j < n; ++j) add(n + j, sink, q(j), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) add(i, n + j, 10.0, std::abs(i - j) / static_cast<double>(n));

  double total = 0.0, remaining = p.sum();
  const double inf = std::numeric_limits<double>::infinity();
  while (remaining > 1e-15) {
    std::vector<double> dist(nodes, inf);
    std::vector<int> prev_node(nodes, -1), prev_edge(nodes, -1);
    dist[source] = 0.0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (int u = 0; u < nodes; ++u) {
        if (dist[u] == inf) continue;
        for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
          const Edge& e = g[u][k];
          if (e.cap > 1e-15 && dist[u] + e.cost < dist[e.to] - 1e-15) {
            dist[e.to] = dist[u] + e.cost;
            prev_node[e.to] = u;
            prev_edge[e.to] = k;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    double push = remaining;
    for (int v = sink; v != source; v = prev_node[v]) push = std::min(push, g[prev_node[v]][prev_edge[v]].cap);
    for (int v = sink; v != source; v = prev_node[v]) {
      Edge& e = g[prev_node[v]][prev_edge[v]];
      e.cap -= push;
      g[v][e.rev].cap += push;
    }
    total += push * dist[sink];
    remaining -= push;
  }
  return total;
}

// Average marginal contribution over all orderings of the players.
inline std::vector<double> permutation_shapley(
    int players, const std::function<double(const std::vector<int>&)>& value) {
  std::vector<int> order(static_cast<std::size_t>(players));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(static_cast<std::size_t>(players), 0.0);
  double perms = 0.0;
  do {
    std::vector<int> coalition;
    double before = value(coalition);
    for (int p : order) {
      coalition.push_back(p);
      std::vector<int> sorted = coalition;
      std::sort(sorted.begin(), sorted.end());
      const double after = value(sorted);
      phi[static_cast<std::size_t>(p)] += after - before;
      before = after;
    }
    perms += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& x : phi) x /= perms;
  return phi;
}

template <typename F>
Eigen::VectorXd central_difference(F&& f, Eigen::VectorXd x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("vlsa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace oracle

#endif  // VLSA_TESTS_ORACLES_HPP_
