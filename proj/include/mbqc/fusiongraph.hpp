#pragma once

// Fusion-graph generation: every node of a planar round is synthesized from
// 3-qubit GHZ resource states (one root entangled with two leaves) using
// three basic patterns -- degree increment, line extension and connection --
// while keeping the round's rotation order so the result stays planar.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"
#include "mbqc/graphstate.hpp"
#include "mbqc/partition.hpp"
#include "mbqc/planarity.hpp"

namespace mbqc {

inline constexpr std::uint32_t kNoFusion = std::numeric_limits<std::uint32_t>::max();

enum class SlotRole { Root, Leaf };
enum class SlotUse { Free, Fusion, Measure, Discard };

inline const char* to_string(SlotUse u) {
  switch (u) {
    case SlotUse::Free: return "free";
    case SlotUse::Fusion: return "fusion";
    case SlotUse::Measure: return "measure";
    case SlotUse::Discard: return "discard";
  }
  return "?";
}

struct Slot {
  SlotRole role = SlotRole::Leaf;
  SlotUse use = SlotUse::Free;
  std::uint32_t fusion = kNoFusion;  // fusion edge id when use == Fusion
  std::optional<double> angle;       // when use == Measure; nullopt keeps an output qubit

  static Slot root() {
    Slot s;
    s.role = SlotRole::Root;
    return s;
  }
};

/// Slot 0 is the root, slots 1 and 2 are the leaves. The slot order is also
/// the node's counter-clockwise order in the fusion graph embedding.
struct ResourceNode {
  std::uint32_t id = 0;
  std::array<Slot, 3> slots{Slot::root(), Slot{}, Slot{}};
  std::optional<NodeId> owner;  // graph-state node synthesized by this node; nullopt for routing

  std::uint32_t fusion_degree() const {
    std::uint32_t d = 0;
    for (const auto& s : slots) d += s.use == SlotUse::Fusion;
    return d;
  }
};

struct Port {
  std::uint32_t node = 0;
  std::uint32_t slot = 0;
  friend bool operator==(const Port&, const Port&) = default;
};

struct FusionEdge {
  Port a, b;
  bool internal = false;  // part of a node's synthesis chain (or a route hop)
};

struct FusionGraph {
  std::vector<ResourceNode> nodes;
  std::vector<FusionEdge> fusion_edges;
  std::map<NodeId, std::vector<std::uint32_t>> groups;  // graph-state node -> resource chain
  RotationSystem rotation;                            // over resource nodes, fusion edges only
  std::map<std::uint32_t, Port> port_map;             // virtual-node local id -> dangling leaf

  std::uint32_t size() const { return static_cast<std::uint32_t>(nodes.size()); }
  std::size_t fusion_count() const { return fusion_edges.size(); }

  Slot& slot(const Port& p) { return nodes.at(p.node).slots.at(p.slot); }
  const Slot& slot(const Port& p) const { return nodes.at(p.node).slots.at(p.slot); }

  Graph graph() const {
    Graph g(size());
    for (const auto& e : fusion_edges) g.add_edge(e.a.node, e.b.node);
    return g;
  }

  /// Resource node carrying the measurement of graph-state node `v`.
  std::uint32_t carrier(NodeId v) const { return groups.at(v).front(); }

  std::uint32_t add_node(std::optional<NodeId> owner) {
    ResourceNode rn;
    rn.id = size();
    rn.owner = owner;
    nodes.push_back(rn);
    return rn.id;
  }

  /// Rotation derived from slot order; fusion edges only.
  void rebuild_rotation() {
    rotation.order.assign(nodes.size(), {});
    for (const auto& rn : nodes)
      for (const auto& s : rn.slots)
        if (s.use == SlotUse::Fusion) {
          const auto& e = fusion_edges.at(s.fusion);
          rotation.order[rn.id].push_back(e.a.node == rn.id ? e.b.node : e.a.node);
        }
  }
};

/// Fuses two free slots. Throws InvalidInput when either is already used.
inline std::uint32_t add_fusion(FusionGraph& fg, Port a, Port b, bool internal) {
  if (a.node == b.node) throw InvalidInput("fusion within one resource state");
  for (auto p : {a, b})
    if (fg.slot(p).use != SlotUse::Free) throw InvalidInput("port already used");
  const auto id = static_cast<std::uint32_t>(fg.fusion_edges.size());
  fg.fusion_edges.push_back({a, b, internal});
  for (auto p : {a, b}) {
    fg.slot(p).use = SlotUse::Fusion;
    fg.slot(p).fusion = id;
  }
  return id;
}

struct SynthesizedNode {
  std::vector<std::uint32_t> chain;  // resource nodes; chain.front() carries the measurement
  std::vector<Port> ports;           // `degree` dangling leaves, in neighbour order
};

/// Degree-n node from a chain of max(1, n-1) GHZ states: leaf 2 of each
/// chain member is fused with the root of the next one, which makes the
/// first root adjacent to every remaining leaf. Member i exposes leaf 1 as
/// port i; the last member also exposes leaf 2. Unneeded leaves are
/// discarded.
inline SynthesizedNode synthesize_node(FusionGraph& fg, std::uint32_t degree,
                                       std::optional<NodeId> owner = std::nullopt) {
  SynthesizedNode out;
  const std::uint32_t m = degree > 1 ? degree - 1 : 1;
  for (std::uint32_t i = 0; i < m; ++i) out.chain.push_back(fg.add_node(owner));
  for (std::uint32_t i = 0; i + 1 < m; ++i) add_fusion(fg, {out.chain[i], 2}, {out.chain[i + 1], 0}, true);
  for (std::uint32_t i = 0; i < m; ++i) out.ports.push_back({out.chain[i], 1});
  out.ports.push_back({out.chain.back(), 2});
  while (out.ports.size() > degree) {
    fg.slot(out.ports.back()).use = SlotUse::Discard;
    out.ports.pop_back();
  }
  if (owner) fg.groups[*owner] = out.chain;
  return out;
}

/// Lengthens a dangling leaf by `hops` routing resource states: the port is
/// fused with the root of a fresh GHZ, one of whose leaves is discarded and
/// the other becomes the new port. Each hop costs one resource state and
/// one fusion and leaves the logical edge unchanged.
inline Port extend_edge(FusionGraph& fg, Port port, std::uint32_t hops) {
  if (fg.slot(port).use != SlotUse::Free || fg.slot(port).role != SlotRole::Leaf)
    throw InvalidInput("extend_edge needs a dangling leaf");
  for (std::uint32_t h = 0; h < hops; ++h) {
    const auto r = fg.add_node(std::nullopt);
    add_fusion(fg, port, {r, 0}, true);
    fg.slot({r, 2}).use = SlotUse::Discard;
    port = {r, 1};
  }
  return port;
}

/// Leaf-leaf fusion joining the roots behind two dangling ports.
inline std::uint32_t connect_groups(FusionGraph& fg, Port a, Port b) {
  for (auto p : {a, b})
    if (fg.slot(p).role != SlotRole::Leaf) throw InvalidInput("connect_groups needs leaf ports");
  return add_fusion(fg, a, b, false);
}

/// Replaces every node of the round by its chain, attaching neighbours in
/// rotation order, and keeps cut edges as dangling ports in `port_map`.
inline FusionGraph generate_fusion_graph(const Round& r, const GraphState& g) {
  const auto real = static_cast<std::uint32_t>(r.nodes.size());
  if (r.rotation.order.size() != r.graph.n) throw InternalError("rotation does not match round graph");
  FusionGraph fg;
  // ports[u][j] is the port of real node u toward rotation.order[u][j]
  std::vector<std::vector<Port>> ports(real);
  for (std::uint32_t u = 0; u < real; ++u) {
    const auto v = r.nodes[u];
    auto s = synthesize_node(fg, static_cast<std::uint32_t>(r.rotation.order[u].size()), v);
    auto& root = fg.nodes[s.chain.front()].slots[0];
    root.use = SlotUse::Measure;
    root.angle = g.nodes.at(v).angle;
    ports[u] = std::move(s.ports);
  }
  auto port_toward = [&](std::uint32_t u, std::uint32_t w) {
    const auto& o = r.rotation.order[u];
    for (std::size_t j = 0; j < o.size(); ++j)
      if (o[j] == w) return ports[u][j];
    throw InternalError("rotation inconsistency: missing neighbour");
  };
  for (auto [a, b] : r.graph.edges) {
    if (a < real && b < real) {
      connect_groups(fg, port_toward(a, b), port_toward(b, a));
    } else {
      const auto u = a < real ? a : b;
      const auto vl = a < real ? b : a;
      fg.port_map[vl] = port_toward(u, vl);
    }
  }
  fg.rebuild_rotation();
  if (!fg.rotation.is_planar_embedding()) throw InternalError("fusion graph embedding is not planar");
  return fg;
}

}  // namespace mbqc
