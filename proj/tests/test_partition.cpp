#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "mbqc/partition.hpp"

using namespace mbqc;

namespace {

// Graph state with every node measured at a Pauli angle: one dependency layer.
GraphState single_layer(std::uint32_t n, const std::vector<Edge>& edges) {
  GraphState g;
  for (std::uint32_t v = 0; v < n; ++v) g.nodes.push_back({0.0, false, false, v});
  for (auto [a, b] : edges) g.edges.push_back(ordered(a, b));
  return g;
}

GraphState random_program(std::uint32_t qubits, std::size_t len, std::mt19937_64& rng) {
  Circuit c;
  c.num_qubits = qubits;
  std::uniform_real_distribution<double> ang(0, kTwoPi);
  std::uniform_int_distribution<std::uint32_t> q(0, qubits - 1);
  for (std::size_t i = 0; i < len; ++i) {
    if (rng() % 3 == 0) {
      auto a = q(rng), b = q(rng);
      while (a == b) b = q(rng);
      c.gates.push_back(Gate::cz(a, b));
    } else {
      c.gates.push_back(Gate::j(q(rng), ang(rng)));
    }
  }
  return translate(c);
}

void check_rounds(const GraphState& g, const DependencyLayers& dl, const std::vector<Round>& rounds) {
  std::map<NodeId, std::uint32_t> round_of;
  for (const auto& r : rounds)
    for (auto v : r.nodes) {
      ASSERT_FALSE(round_of.count(v)) << "node in two rounds";
      round_of[v] = r.index;
    }
  ASSERT_EQ(round_of.size(), g.size());
  // planarity with the virtual fringe, and pendant virtual nodes
  for (const auto& r : rounds) {
    ASSERT_TRUE(planar(r.graph));
    ASSERT_TRUE(r.rotation.is_planar_embedding());
    const auto deg = r.graph.degrees();
    for (const auto& vn : r.virtual_nodes) {
      EXPECT_EQ(deg[vn.local], 1u);
      EXPECT_EQ(round_of[vn.original], vn.round);
      EXPECT_NE(vn.round, r.index);
    }
  }
  // each cut edge appears as exactly one virtual node on each side
  std::multiset<std::pair<Edge, std::uint32_t>> stubs;
  for (const auto& r : rounds)
    for (const auto& vn : r.virtual_nodes) stubs.insert({ordered(vn.anchor, vn.original), r.index});
  std::size_t cut = 0;
  for (auto [a, b] : g.edges) {
    if (round_of[a] == round_of[b]) continue;
    ++cut;
    EXPECT_EQ(stubs.count({Edge{a, b}, round_of[a]}), 1u);
    EXPECT_EQ(stubs.count({Edge{a, b}, round_of[b]}), 1u);
  }
  EXPECT_EQ(stubs.size(), 2 * cut);
  // no prerequisite of a measured node lands in a later round
  const auto pre = prerequisites(g);
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.nodes[v].output) continue;
    for (auto u : pre[v]) EXPECT_LE(round_of[u], round_of[v]);
  }
  (void)dl;
}

}  // namespace

TEST(Partition, PlanarSingleLayerIsOneRound) {
  const auto g = single_layer(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  const auto dl = dependency_layers(g);
  const auto rounds = planarize_and_merge(g, dl);
  ASSERT_EQ(rounds.size(), 1u);
  EXPECT_TRUE(rounds[0].virtual_nodes.empty());
  check_rounds(g, dl, rounds);
}

TEST(Partition, NonPlanarLayerSplitsInTwo) {
  std::vector<Edge> e;
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 3; b < 6; ++b) e.push_back({a, b});
  const auto g = single_layer(6, e);
  const auto dl = dependency_layers(g);
  const auto rounds = planarize_and_merge(g, dl);
  ASSERT_EQ(rounds.size(), 2u);
  // the greedy split leaves the last node alone with its three cut edges
  EXPECT_EQ(rounds[0].nodes.size(), 5u);
  EXPECT_EQ(rounds[1].nodes, (std::vector<NodeId>{5}));
  EXPECT_EQ(rounds[0].virtual_nodes.size(), 3u);
  EXPECT_EQ(rounds[1].virtual_nodes.size(), 3u);
  check_rounds(g, dl, rounds);
}

TEST(Partition, PlanarChainOfLayersMerges) {
  Circuit c;
  c.gates = {Gate::j(0, 0.1), Gate::j(0, 0.2), Gate::j(0, 0.3)};
  const auto g = translate(c);
  const auto dl = dependency_layers(g);
  ASSERT_EQ(dl.layers.size(), 3u);
  const auto rounds = planarize_and_merge(g, dl);
  ASSERT_EQ(rounds.size(), 1u);
  EXPECT_EQ(rounds[0].layer_span(), 3u);  // the output shares the last layer
}

TEST(Partition, LayerCapSplitsRounds) {
  Circuit c;
  c.gates = {Gate::j(0, 0.1), Gate::j(0, 0.2), Gate::j(0, 0.3)};
  const auto g = translate(c);
  const auto dl = dependency_layers(g);
  const auto rounds = planarize_and_merge(g, dl, {2, 0});
  ASSERT_EQ(rounds.size(), 2u);
  EXPECT_EQ(rounds[0].virtual_nodes.size(), 1u);
  for (const auto& r : rounds) EXPECT_LE(r.layer_span(), 2u);
  check_rounds(g, dl, rounds);
}

TEST(Partition, RandomProgramsSatisfyInvariants) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 60; ++i) {
    const auto g = random_program(3 + i % 5, 20 + i, rng);
    const auto dl = dependency_layers(g);
    check_rounds(g, dl, planarize_and_merge(g, dl));
    check_rounds(g, dl, planarize_and_merge(g, dl, {2, 10}));
  }
}

TEST(Partition, DenseLayersStayPlanarPerRound) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 30; ++i) {
    std::vector<Edge> e;
    const std::uint32_t n = 8 + i % 12;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b)
        if (rng() % 2) e.push_back({a, b});
    const auto g = single_layer(n, e);
    const auto dl = dependency_layers(g);
    const auto rounds = planarize_and_merge(g, dl);
    check_rounds(g, dl, rounds);
    // greedy pieces are maximal: no later node fits into an earlier round
    for (std::size_t r = 0; r + 1 < rounds.size(); ++r)
      for (std::size_t s = r + 1; s < rounds.size(); ++s)
        for (auto v : rounds[s].nodes) {
          auto nodes = rounds[r].nodes;
          nodes.push_back(v);
          std::vector<std::uint32_t> scratch(g.size(), std::numeric_limits<std::uint32_t>::max());
          EXPECT_FALSE(detail::induced_planar(g.graph().adjacency(), nodes, scratch));
        }
  }
}

TEST(Partition, BenchmarksPartitionQuickly) {
  for (auto [f, n] : {std::pair{BenchmarkFamily::QFT, 9u}, {BenchmarkFamily::QAOA, 16u}, {BenchmarkFamily::BV, 100u}}) {
    const auto g = translate(normalize_to_jcz(gen_benchmark(f, n, 1)));
    const auto dl = dependency_layers(g);
    const auto rounds = planarize_and_merge(g, dl, {3, 0});
    check_rounds(g, dl, rounds);
  }
}
