#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pacoord {

/// Simple undirected graph on nodes 0..n-1.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  Graph() = default;
  Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> e)
      : num_nodes(n), edges(std::move(e)) {
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop in simple graph");
    }
  }

  /// Dense symmetric adjacency matrix.
  std::vector<std::vector<bool>> adjacency() const {
    std::vector<std::vector<bool>> adj(num_nodes, std::vector<bool>(num_nodes, false));
    for (auto [u, v] : edges) adj[u][v] = adj[v][u] = true;
    return adj;
  }
};

}  // namespace pacoord
