#pragma once

// Runs a fusion graph through the stabilizer oracle: resource states are
// created one at a time, fusions are performed as soon as both qubits exist
// and discarded slots are Z-measured and dropped, which keeps the live
// register small.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <map>
#include <random>
#include <vector>

#include "mbqc/fusiongraph.hpp"
#include "mbqc/oracle.hpp"
#include "mbqc/partition.hpp"
#include "mbqc/planarity.hpp"

namespace mbqc {

struct RealizedState {
  StabilizerState state{0};
  std::vector<Port> qubits;  // slot behind each surviving qubit
};

/// Star graph state of one GHZ resource: root (qubit 0) joined to both leaves.
inline StabilizerState ghz_resource() { return graph_to_stabilizer(Graph(3, {{0, 1}, {0, 2}})); }

/// Builds the state a fusion graph produces. Surviving qubits are the
/// measurement slots and the dangling ports. `rng` draws fusion and
/// discard outcomes; without it every outcome is 0.
inline RealizedState realize(const FusionGraph& fg, std::mt19937_64* rng = nullptr) {
  RealizedState out;
  auto index_of = [&](const Port& p) -> std::optional<std::uint32_t> {
    auto it = std::find(out.qubits.begin(), out.qubits.end(), p);
    if (it == out.qubits.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - out.qubits.begin());
  };
  auto outcome = [&]() -> std::optional<int> {
    if (rng) return std::nullopt;
    return 0;
  };
  std::vector<bool> done(fg.fusion_edges.size(), false);
  for (const auto& rn : fg.nodes) {
    out.state = StabilizerState::tensor(out.state, ghz_resource());
    for (std::uint32_t s = 0; s < 3; ++s) out.qubits.push_back({rn.id, s});
    for (std::uint32_t s = 0; s < 3; ++s) {
      const auto& slot = rn.slots[s];
      if (slot.use != SlotUse::Fusion || done[slot.fusion]) continue;
      const auto& e = fg.fusion_edges[slot.fusion];
      auto c = index_of(e.a), d = index_of(e.b);
      if (!c || !d) continue;
      auto r = fuse(std::move(out.state), *c, *d, outcome(), outcome(), rng);
      out.state = std::move(r.state);
      const auto hi = std::max(*c, *d), lo = std::min(*c, *d);
      out.qubits.erase(out.qubits.begin() + hi);
      out.qubits.erase(out.qubits.begin() + lo);
      done[slot.fusion] = true;
    }
    for (std::uint32_t s = 0; s < 3; ++s) {
      if (rn.slots[s].use != SlotUse::Discard) continue;
      const auto q = *index_of({rn.id, s});
      out.state.measure_pauli(q, PauliBasis::Z, outcome(), rng);
      out.state.discard({q});
      out.qubits.erase(out.qubits.begin() + q);
    }
  }
  if (!std::all_of(done.begin(), done.end(), [](bool b) { return b; }))
    throw InternalError("fusion edge between unknown slots");
  return out;
}

/// True when the fusion graph synthesized for `target` (one round of
/// measured nodes) realizes the target's graph state up to local Paulis.
inline bool synthesis_realizes(const Graph& target, std::mt19937_64* rng = nullptr) {
  GraphState g;
  DependencyLayers dl;
  dl.layers.resize(1);
  std::vector<NodeId> all;
  for (NodeId v = 0; v < target.n; ++v) {
    g.nodes.push_back({0.0, false, false, v});
    dl.layer_of.push_back(0);
    dl.layers[0].push_back(v);
    all.push_back(v);
  }
  for (auto [a, b] : target.edges) g.edges.push_back(ordered(a, b));
  const auto round = build_rounds(g, dl, {all}).front();
  const auto fg = generate_fusion_graph(round, g);
  const auto res = realize(fg, rng);
  if (res.qubits.size() != target.n) return false;
  std::map<std::uint32_t, std::uint32_t> index_of_carrier;
  for (std::uint32_t i = 0; i < res.qubits.size(); ++i) index_of_carrier[res.qubits[i].node] = i;
  Graph want(target.n);
  for (auto [a, b] : round.graph.edges)
    want.add_edge(index_of_carrier.at(fg.carrier(round.nodes[a])), index_of_carrier.at(fg.carrier(round.nodes[b])));
  return equivalent_up_to_local_paulis(res.state, graph_to_stabilizer(want));
}

struct VerifySummary {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::optional<Graph> counterexample;  // first failing target graph
  bool passed() const { return failed == 0; }
};

/// End-to-end synthesis check over connected planar graphs with at most
/// `max_nodes` nodes: every labeled graph when `trials` is empty, otherwise
/// `trials` random ones. Each graph is realized with all-zero and with
/// random fusion outcomes.
inline VerifySummary verify_synthesis(std::uint32_t max_nodes, std::optional<std::uint32_t> trials, std::uint64_t seed) {
  if (max_nodes == 0 || max_nodes > 5) throw InvalidInput("synthesis checks support 1 to 5 nodes");
  std::mt19937_64 rng(seed);
  VerifySummary out;
  auto check = [&](const Graph& g) {
    ++out.checked;
    if (synthesis_realizes(g) && synthesis_realizes(g, &rng)) return;
    if (!out.counterexample) out.counterexample = g;
    ++out.failed;
  };
  auto from_mask = [](std::uint32_t n, std::uint64_t mask) {
    Graph g(n);
    std::uint32_t i = 0;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b, ++i)
        if (mask >> i & 1) g.add_edge(a, b);
    return g;
  };
  auto eligible = [](const Graph& g) { return count_components(g) == 1 && planar(g); };
  if (!trials) {
    for (std::uint32_t n = 1; n <= max_nodes; ++n)
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n * (n - 1) / 2)); ++mask)
        if (auto g = from_mask(n, mask); eligible(g)) check(g);
    return out;
  }
  for (std::uint32_t t = 0; t < *trials; ++t) {
    const auto n = 1 + static_cast<std::uint32_t>(rng() % max_nodes);
    Graph g(n);
    do g = from_mask(n, rng());
    while (!eligible(g));
    check(g);
  }
  return out;
}

}  // namespace mbqc
