#pragma once

// Planarize-and-merge: cut the graph state into an ordered list of planar
// rounds that respect the dependency layering. Edges between rounds are
// represented on both sides by pendant virtual nodes.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"
#include "mbqc/graphstate.hpp"
#include "mbqc/planarity.hpp"

namespace mbqc {

struct PartitionOptions {
  std::uint32_t max_layers_per_round = 0;  // dependency-layer span cap, 0 = unlimited
  std::uint32_t max_nodes_per_round = 0;   // 0 = unlimited
};

/// Stand-in for a neighbour that lives in another round. Local id in the
/// round graph is `local`; it has exactly one edge, to `anchor`.
struct VirtualNode {
  std::uint32_t local = 0;
  NodeId original = 0;      // the neighbour's id in the graph state
  NodeId anchor = 0;        // graph-state id of the in-round endpoint
  std::uint32_t round = 0;  // round hosting `original`
};

struct Round {
  std::uint32_t index = 0;
  std::vector<NodeId> nodes;  // graph-state ids, sorted; local id = position
  std::vector<VirtualNode> virtual_nodes;
  Graph graph;  // real nodes first, then virtual nodes
  RotationSystem rotation;
  std::uint32_t first_layer = 0;  // dependency-layer span of the round
  std::uint32_t last_layer = 0;

  std::uint32_t layer_span() const { return nodes.empty() ? 0 : last_layer - first_layer + 1; }
  std::uint32_t local_of(NodeId v) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
    if (it == nodes.end() || *it != v) throw InternalError("node not in round");
    return static_cast<std::uint32_t>(it - nodes.begin());
  }
};

namespace detail {

/// Graph induced on a node set, with local ids following `nodes` order.
inline Graph induced(const std::vector<std::vector<NodeId>>& adj, const std::vector<NodeId>& nodes,
                     std::vector<std::uint32_t>& scratch) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  for (std::uint32_t i = 0; i < nodes.size(); ++i) scratch[nodes[i]] = i;
  Graph g(static_cast<std::uint32_t>(nodes.size()));
  for (std::uint32_t i = 0; i < nodes.size(); ++i)
    for (auto w : adj[nodes[i]])
      if (scratch[w] != kNone && scratch[w] > i) g.add_edge(i, scratch[w]);
  for (auto v : nodes) scratch[v] = kNone;
  return g;
}

inline bool induced_planar(const std::vector<std::vector<NodeId>>& adj, const std::vector<NodeId>& nodes,
                           std::vector<std::uint32_t>& scratch) {
  return planar(induced(adj, nodes, scratch));
}

}  // namespace detail

/// Ordered node sets, one per round. Each dependency layer (outputs join the
/// layer given by `layer_of`) is split greedily into induced-planar pieces by
/// ascending node id; consecutive pieces are then merged while the union
/// stays planar and within the caps.
inline std::vector<std::vector<NodeId>> partition_nodes(const GraphState& g, const DependencyLayers& dl,
                                                        const PartitionOptions& opt = {}) {
  const auto n = g.size();
  if (n == 0) return {{}};
  const auto adj = g.graph().adjacency();
  std::vector<std::uint32_t> scratch(n, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t num_layers = 0;
  for (auto l : dl.layer_of) num_layers = std::max(num_layers, l + 1);
  std::vector<std::vector<NodeId>> by_layer(num_layers);
  for (NodeId v = 0; v < n; ++v) by_layer[dl.layer_of[v]].push_back(v);

  struct Piece {
    std::vector<NodeId> nodes;
    std::uint32_t layer;
  };
  std::vector<Piece> pieces;
  const std::size_t node_cap = opt.max_nodes_per_round ? opt.max_nodes_per_round : n;
  for (std::uint32_t l = 0; l < num_layers; ++l) {
    std::vector<NodeId> rest = by_layer[l];
    while (!rest.empty()) {
      if (rest.size() <= node_cap && detail::induced_planar(adj, rest, scratch)) {
        pieces.push_back({rest, l});
        break;
      }
      std::vector<NodeId> piece, left;
      for (auto v : rest) {
        if (piece.size() >= node_cap) {
          left.push_back(v);
          continue;
        }
        piece.push_back(v);
        if (!detail::induced_planar(adj, piece, scratch)) {
          piece.pop_back();
          left.push_back(v);
        }
      }
      pieces.push_back({piece, l});
      rest = std::move(left);
    }
  }

  std::vector<std::vector<NodeId>> rounds;
  std::vector<NodeId> cur;
  std::uint32_t cur_first = 0;
  for (const auto& p : pieces) {
    if (cur.empty()) {
      cur = p.nodes;
      cur_first = p.layer;
      continue;
    }
    bool ok = cur.size() + p.nodes.size() <= node_cap;
    if (ok && opt.max_layers_per_round) ok = p.layer - cur_first + 1 <= opt.max_layers_per_round;
    std::vector<NodeId> merged;
    if (ok) {
      merged = cur;
      merged.insert(merged.end(), p.nodes.begin(), p.nodes.end());
      std::sort(merged.begin(), merged.end());
      ok = detail::induced_planar(adj, merged, scratch);
    }
    if (ok) {
      cur = std::move(merged);
    } else {
      std::sort(cur.begin(), cur.end());
      rounds.push_back(std::move(cur));
      cur = p.nodes;
      cur_first = p.layer;
    }
  }
  if (!cur.empty()) {
    std::sort(cur.begin(), cur.end());
    rounds.push_back(std::move(cur));
  }
  return rounds;
}

/// Re-layers measured nodes within their scheduling slack so graph edges
/// span few layers: each node moves toward the middle of its neighbours'
/// layers while staying strictly after its prerequisites and before its
/// dependents, and never past the last layer. Outputs follow their latest
/// measured neighbour. The result is a valid dependency layering.
inline DependencyLayers balance_layers(const GraphState& g, const DependencyLayers& dl, std::uint32_t max_sweeps = 32) {
  const auto n = g.size();
  if (dl.layers.empty()) return dl;
  const auto pre = prerequisites(g);
  std::vector<std::vector<NodeId>> post(n);
  for (NodeId v = 0; v < n; ++v)
    for (auto u : pre[v]) post[u].push_back(v);
  const auto adj = g.graph().adjacency();
  const auto order = dependency_order(g);
  const auto top = static_cast<std::uint32_t>(dl.layers.size() - 1);
  auto L = dl.layer_of;
  std::vector<std::uint32_t> nb;
  for (std::uint32_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (int backward = 0; backward < 2; ++backward)
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto v = backward ? order[order.size() - 1 - i] : order[i];
        if (g.nodes[v].output) continue;
        std::uint32_t lo = 0, hi = top;
        for (auto u : pre[v])
          if (!g.nodes[u].output) lo = std::max(lo, L[u] + 1);
        for (auto w : post[v])
          if (!g.nodes[w].output) hi = std::min(hi, L[w] - 1);
        nb.clear();
        for (auto w : adj[v])
          if (!g.nodes[w].output) nb.push_back(L[w]);
        if (nb.empty()) continue;
        const auto [mn, mx] = std::minmax_element(nb.begin(), nb.end());
        const auto want = std::clamp((*mn + *mx + 1) / 2, lo, std::max(lo, hi));
        if (want != L[v]) {
          L[v] = want;
          changed = true;
        }
      }
    if (!changed) break;
  }
  DependencyLayers out;
  out.layer_of = std::move(L);
  for (NodeId v = 0; v < n; ++v) {
    if (!g.nodes[v].output) continue;
    out.layer_of[v] = 0;
    for (auto w : adj[v])
      if (!g.nodes[w].output) out.layer_of[v] = std::max(out.layer_of[v], out.layer_of[w]);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (g.nodes[v].output) continue;
    const auto l = out.layer_of[v];
    if (out.layers.size() <= l) out.layers.resize(l + 1);
    out.layers[l].push_back(v);
  }
  return out;
}

/// Materializes rounds from ordered node sets: induced subgraph plus one
/// pendant virtual node per cut edge, and a planar rotation system.
inline std::vector<Round> build_rounds(const GraphState& g, const DependencyLayers& dl,
                                       const std::vector<std::vector<NodeId>>& sets) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  const auto adj = g.graph().adjacency();
  std::vector<std::uint32_t> round_of(g.size(), kNone);
  for (std::uint32_t r = 0; r < sets.size(); ++r)
    for (auto v : sets[r]) {
      if (round_of[v] != kNone) throw InvalidInput("node assigned to two rounds");
      round_of[v] = r;
    }
  for (NodeId v = 0; v < g.size(); ++v)
    if (round_of[v] == kNone) throw InvalidInput("node not assigned to any round");

  std::vector<std::uint32_t> scratch(g.size(), kNone);
  std::vector<Round> rounds(sets.size());
  for (std::uint32_t r = 0; r < sets.size(); ++r) {
    auto& R = rounds[r];
    R.index = r;
    R.nodes = sets[r];
    std::sort(R.nodes.begin(), R.nodes.end());
    R.graph = detail::induced(adj, R.nodes, scratch);
    if (!R.nodes.empty()) {
      R.first_layer = std::numeric_limits<std::uint32_t>::max();
      for (auto v : R.nodes) {
        R.first_layer = std::min(R.first_layer, dl.layer_of[v]);
        R.last_layer = std::max(R.last_layer, dl.layer_of[v]);
      }
    }
    for (auto v : R.nodes) {
      auto nb = adj[v];
      std::sort(nb.begin(), nb.end());
      for (auto w : nb) {
        if (round_of[w] == r) continue;
        VirtualNode vn{R.graph.n, w, v, round_of[w]};
        R.graph.n += 1;
        R.graph.add_edge(R.local_of(v), vn.local);
        R.virtual_nodes.push_back(vn);
      }
    }
    auto res = is_planar(R.graph, false);
    if (!res.planar) throw InternalError("round " + std::to_string(r) + " is not planar");
    R.rotation = std::move(*res.rotation);
  }
  return rounds;
}

inline std::vector<Round> planarize_and_merge(const GraphState& g, const DependencyLayers& dl,
                                              const PartitionOptions& opt = {}) {
  return build_rounds(g, dl, partition_nodes(g, dl, opt));
}

}  // namespace mbqc
