#pragma once

// Circuit -> graph state translation with causal-flow dependency arcs, and
// the executability layering of measurements.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "mbqc/circuit.hpp"
#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"

namespace mbqc {

using NodeId = std::uint32_t;

struct GraphStateNode {
  std::optional<double> angle;  // nullopt for output nodes
  bool input = false;
  bool output = false;
  std::uint32_t qubit = 0;  // logical qubit whose chain owns the node
};

struct GraphState {
  std::vector<GraphStateNode> nodes;
  std::vector<Edge> edges;  // undirected, (min, max), no duplicates
  std::vector<Edge> xdeps;  // (source, dependent)
  std::vector<Edge> zdeps;

  std::size_t size() const { return nodes.size(); }
  Graph graph() const { return Graph(static_cast<std::uint32_t>(nodes.size()), edges); }
};

/// Topological order of xdeps + zdeps; throws DependencyCycle.
inline std::vector<NodeId> dependency_order(const GraphState& g) {
  const auto n = g.size();
  std::vector<std::vector<NodeId>> out(n);
  std::vector<std::size_t> indeg(n, 0);
  for (const auto* arcs : {&g.xdeps, &g.zdeps})
    for (auto [s, d] : *arcs) {
      out[s].push_back(d);
      ++indeg[d];
    }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : out[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  if (order.size() != n) throw DependencyCycle("dependency arcs contain a cycle");
  return order;
}

/// Structural validation of the GraphState invariants.
inline void validate(const GraphState& g) {
  const auto n = g.size();
  std::set<Edge> seen;
  for (auto [a, b] : g.edges) {
    if (a >= n || b >= n || a == b) throw InvalidInput("graph state edge endpoints invalid");
    if (!seen.insert(ordered(a, b)).second) throw InvalidInput("parallel graph state edge");
  }
  for (const auto* arcs : {&g.xdeps, &g.zdeps})
    for (auto [s, d] : *arcs)
      if (s >= n || d >= n || s == d) throw InvalidInput("dependency arc endpoints invalid");
  for (const auto& v : g.nodes)
    if (!v.output && !v.angle) throw InvalidInput("measured node without angle");
  dependency_order(g);
}

/// Translates a {J, CZ} circuit. Each qubit starts with an input node; J(a)
/// measures the current node at angle a and appends a successor, CZ toggles
/// an edge between the two current nodes. Flow f(v) is the chain successor:
/// X arc v -> f(v), Z arcs v -> u for the other neighbours u of f(v).
///
/// Pauli-plane targets need no basis adaptation: an X correction leaves an
/// X-basis measurement (angle 0 or pi) untouched, so that arc is dropped, and
/// merely flips a Y-basis outcome (angle pi/2 or 3pi/2), so that arc is kept
/// as an outcome-reinterpreting Z arc.
inline GraphState translate(const Circuit& c) {
  validate(c);
  if (!c.is_normalized()) throw InvalidInput("translate expects a circuit over {J, CZ}");
  GraphState g;
  std::vector<NodeId> frontier(c.num_qubits);
  for (std::uint32_t q = 0; q < c.num_qubits; ++q) {
    frontier[q] = static_cast<NodeId>(g.nodes.size());
    g.nodes.push_back({std::nullopt, true, false, q});
  }
  std::vector<std::optional<NodeId>> flow(c.num_qubits);
  std::set<Edge> edges;
  for (const auto& gate : c.gates) {
    if (gate.kind == GateKind::J) {
      const auto q = gate.targets[0];
      const NodeId v = frontier[q];
      const auto w = static_cast<NodeId>(g.nodes.size());
      g.nodes[v].angle = gate.angle;
      g.nodes.push_back({std::nullopt, false, false, q});
      flow.push_back(std::nullopt);
      flow[v] = w;
      edges.insert(ordered(v, w));
      frontier[q] = w;
    } else {
      auto e = ordered(frontier[gate.targets[0]], frontier[gate.targets[1]]);
      if (!edges.erase(e)) edges.insert(e);
    }
  }
  for (auto q = 0u; q < c.num_qubits; ++q) g.nodes[frontier[q]].output = true;
  g.edges.assign(edges.begin(), edges.end());

  std::vector<std::vector<NodeId>> adj(g.nodes.size());
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (NodeId v = 0; v < g.nodes.size(); ++v) {
    if (v >= flow.size() || !flow[v]) continue;
    const NodeId w = *flow[v];
    const auto& target = g.nodes[w];
    if (target.output || !is_clifford_angle(*target.angle))
      g.xdeps.emplace_back(v, w);
    else if (!angles_equal(*target.angle, 0.0) && !angles_equal(*target.angle, kPi))
      g.zdeps.emplace_back(v, w);
    std::vector<NodeId> nb = adj[w];
    std::sort(nb.begin(), nb.end());
    for (auto u : nb)
      if (u != v) g.zdeps.emplace_back(v, u);
  }
  std::sort(g.zdeps.begin(), g.zdeps.end());
  g.zdeps.erase(std::unique(g.zdeps.begin(), g.zdeps.end()), g.zdeps.end());
  dependency_order(g);
  return g;
}

/// Z-closure of x: x plus every node reaching x backwards along Z arcs. The
/// standard outcome of x is its raw outcome XOR the outcomes of its Z sources,
/// recursively, so reading it needs the whole closure measured.
inline std::vector<std::vector<NodeId>> z_sources(const GraphState& g) {
  std::vector<std::vector<NodeId>> zsrc(g.size());
  for (auto [s, d] : g.zdeps) zsrc[d].push_back(s);
  return zsrc;
}

/// Prerequisites of v: its X sources plus the Z-closure of each X source
/// (for a Z chain of length one this is exactly "X sources and their Z
/// sources"). Sorted, deduplicated.
inline std::vector<std::vector<NodeId>> prerequisites(const GraphState& g) {
  const auto n = g.size();
  const auto zsrc = z_sources(g);
  std::vector<std::vector<NodeId>> xsrc(n), pre(n);
  for (auto [s, d] : g.xdeps) xsrc[d].push_back(s);
  std::vector<std::uint32_t> mark(n, std::numeric_limits<std::uint32_t>::max());
  for (NodeId v = 0; v < n; ++v) {
    auto& p = pre[v];
    std::vector<NodeId> stack(xsrc[v].begin(), xsrc[v].end());
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      if (mark[u] == v) continue;
      mark[u] = v;
      p.push_back(u);
      stack.insert(stack.end(), zsrc[u].begin(), zsrc[u].end());
    }
    std::sort(p.begin(), p.end());
  }
  return pre;
}

/// For every node x: max over its Z-closure of value[u]. Linear time in
/// dependency order.
inline std::vector<std::int64_t> closure_max(const GraphState& g, const std::vector<NodeId>& order,
                                             const std::vector<std::int64_t>& value) {
  const auto zsrc = z_sources(g);
  std::vector<std::int64_t> m(value);
  for (auto x : order)
    for (auto z : zsrc[x]) m[x] = std::max(m[x], m[z]);
  return m;
}

struct DependencyLayers {
  std::vector<std::vector<NodeId>> layers;  // layer 0 first, sorted ids
  std::vector<std::uint32_t> layer_of;      // per node; outputs included
};

/// Layer of v = longest prerequisite chain ending at v. `layers` partitions
/// the measured nodes. Outputs are never measured (their byproducts are a
/// classical frame on the result), so `layer_of` puts each output in the
/// latest layer among its measured neighbours.
inline DependencyLayers dependency_layers(const GraphState& g) {
  const auto order = dependency_order(g);
  const auto zsrc = z_sources(g);
  std::vector<std::vector<NodeId>> xsrc(g.size());
  for (auto [s, d] : g.xdeps) xsrc[d].push_back(s);
  DependencyLayers dl;
  dl.layer_of.assign(g.size(), 0);
  // reach[x] = 1 + max layer over x's Z-closure: the earliest layer that may
  // consume x's standard outcome.
  std::vector<std::uint32_t> reach(g.size(), 0);
  for (auto v : order) {
    for (auto x : xsrc[v]) dl.layer_of[v] = std::max(dl.layer_of[v], reach[x]);
    reach[v] = dl.layer_of[v] + 1;
    for (auto z : zsrc[v]) reach[v] = std::max(reach[v], reach[z]);
  }
  const auto adj = g.graph().adjacency();
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!g.nodes[v].output) continue;
    dl.layer_of[v] = 0;
    for (auto w : adj[v])
      if (!g.nodes[w].output) dl.layer_of[v] = std::max(dl.layer_of[v], dl.layer_of[w]);
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.nodes[v].output) continue;
    const auto l = dl.layer_of[v];
    if (dl.layers.size() <= l) dl.layers.resize(l + 1);
    dl.layers[l].push_back(v);
  }
  return dl;
}

/// Adaptive angle: ((-1)^s a + t pi) mod 2pi.
inline double adjust_angle(double alpha, bool s, bool t) {
  return canonical_angle((s ? -alpha : alpha) + (t ? kPi : 0.0));
}

}  // namespace mbqc
