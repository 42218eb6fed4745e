#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace mbqc {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

inline Edge ordered(std::uint32_t a, std::uint32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Simple undirected graph over dense node ids [0, n).
struct Graph {
  std::uint32_t n = 0;
  std::vector<Edge> edges;

  Graph() = default;
  explicit Graph(std::uint32_t nodes) : n(nodes) {}
  Graph(std::uint32_t nodes, std::vector<Edge> e) : n(nodes), edges(std::move(e)) {}

  void add_edge(std::uint32_t a, std::uint32_t b) { edges.push_back(ordered(a, b)); }

  std::vector<std::vector<std::uint32_t>> adjacency() const {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    return adj;
  }

  std::vector<std::uint32_t> degrees() const {
    std::vector<std::uint32_t> d(n, 0);
    for (auto [a, b] : edges) {
      ++d[a];
      ++d[b];
    }
    return d;
  }

  bool is_simple() const {
    auto e = edges;
    for (auto& x : e) {
      if (x.first == x.second) return false;
      x = ordered(x.first, x.second);
    }
    std::sort(e.begin(), e.end());
    return std::adjacent_find(e.begin(), e.end()) == e.end();
  }
};

/// Union-find with path halving.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

inline std::size_t count_components(const Graph& g) {
  DisjointSets ds(g.n);
  std::size_t c = g.n;
  for (auto [a, b] : g.edges)
    if (ds.unite(a, b)) --c;
  return c;
}

}  // namespace mbqc
