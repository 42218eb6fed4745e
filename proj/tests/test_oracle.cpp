#include <gtest/gtest.h>

#include <random>

#include "mbqc/oracle.hpp"
#include "support/cases.hpp"
#include "support/dense.hpp"

using namespace mbqc;

namespace {

std::vector<std::string> gens(const StabilizerState& s) {
  std::vector<std::string> out;
  for (const auto& g : s.generators()) out.push_back(g.str(s.size()));
  return out;
}

Graph path(std::uint32_t n) {
  Graph g(n);
  for (std::uint32_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph star(std::uint32_t leaves) {
  Graph g(leaves + 1);
  for (std::uint32_t i = 1; i <= leaves; ++i) g.add_edge(0, i);
  return g;
}

using cases::random_graph;

// Expected graph after fusing c (in a) with d (in b): union minus c, d plus
// the complete bipartite join N(c) x N(d), toggled mod 2.
Graph bipartite_join(const Graph& a, const Graph& b, std::uint32_t c, std::uint32_t d) {
  const auto n = a.n + b.n;
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (auto [x, y] : a.edges) m[x][y] = m[y][x] = true;
  for (auto [x, y] : b.edges) m[x + a.n][y + a.n] = m[y + a.n][x + a.n] = true;
  const auto D = d + a.n;
  std::vector<std::uint32_t> nc, nd;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (m[c][v]) nc.push_back(v);
    if (m[D][v]) nd.push_back(v);
  }
  for (auto x : nc)
    for (auto y : nd) m[x][y] = m[y][x] = !m[x][y];
  std::vector<std::uint32_t> keep;
  for (std::uint32_t v = 0; v < n; ++v)
    if (v != c && v != D) keep.push_back(v);
  Graph g(static_cast<std::uint32_t>(keep.size()));
  for (std::uint32_t i = 0; i < keep.size(); ++i)
    for (std::uint32_t j = i + 1; j < keep.size(); ++j)
      if (m[keep[i]][keep[j]]) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST(Stabilizer, GraphGenerators) {
  EXPECT_EQ(gens(graph_to_stabilizer(Graph(1))), (std::vector<std::string>{"+X"}));
  EXPECT_EQ(gens(graph_to_stabilizer(path(2))), (std::vector<std::string>{"+XZ", "+ZX"}));
  EXPECT_EQ(gens(graph_to_stabilizer(star(2))), (std::vector<std::string>{"+XZZ", "+ZXI", "+ZIX"}));
  EXPECT_THROW(graph_to_stabilizer(Graph(13)), InvalidInput);
}

TEST(Stabilizer, ZMeasureIsolatedNodeDetaches) {
  Graph g(3);
  g.add_edge(0, 1);
  auto s = graph_to_stabilizer(g);
  s.measure_pauli(2, PauliBasis::Z, 1);
  s.discard({2});
  EXPECT_EQ(s.rank(), 2u);
  EXPECT_TRUE(equivalent_up_to_local_paulis(s, graph_to_stabilizer(path(2))));
}

TEST(Stabilizer, ZMeasureLeafOfEdge) {
  for (int out : {0, 1}) {
    auto s = graph_to_stabilizer(path(2));
    s.measure_pauli(1, PauliBasis::Z, out);
    s.discard({1});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(gens(s)[0], out ? "-X" : "+X");
    // dense: |+> or |-> on the survivor
    auto d = dense::from_stabilizer(graph_to_stabilizer(path(2)));
    dense::project_pauli(d, Pauli::Z(1), out);
    const auto rest = dense::drop_product_qubits(d, {1});
    EXPECT_LT(dense::max_deviation(rest, dense::from_stabilizer(s)), 1e-9);
  }
}

TEST(Stabilizer, XMeasureMiddleOfChainJoinsEnds) {
  auto s = graph_to_stabilizer(path(3));
  s.measure_pauli(1, PauliBasis::X, 0);
  s.discard({1});
  // Bell pair: an edge up to a Hadamard on one end
  const auto bell = StabilizerState::from_generators(2, {Pauli::X(0) * Pauli::X(1), Pauli::Z(0) * Pauli::Z(1)});
  EXPECT_TRUE(equivalent_up_to_local_paulis(s, bell));
}

TEST(Stabilizer, RandomMeasurementsKeepFullRank) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t n = 2 + rng() % 8;
    auto s = graph_to_stabilizer(random_graph(n, rng));
    for (int k = 0; k < 5; ++k) {
      s.measure_pauli(rng() % n, static_cast<PauliBasis>(rng() % 3), std::nullopt, &rng);
      ASSERT_EQ(s.rank(), n);
    }
  }
}

TEST(Equivalence, Basics) {
  const auto e = graph_to_stabilizer(path(2));
  EXPECT_TRUE(equivalent_up_to_local_paulis(e, e));
  auto z = e;
  z.apply({0, 1});
  EXPECT_TRUE(equivalent_up_to_local_paulis(e, z));
  // any frame that maps e onto z will do (frames differ by stabilizers)
  auto fixed = e;
  fixed.apply(*local_pauli_frame(e, z));
  EXPECT_EQ(fixed.canonical(), z.canonical());
  EXPECT_FALSE(equivalent_up_to_local_paulis(graph_to_stabilizer(path(3)), graph_to_stabilizer(star(2))));
  EXPECT_FALSE(equivalent_up_to_local_paulis(graph_to_stabilizer(path(3)), graph_to_stabilizer(Graph(3))));
  EXPECT_THROW(equivalent_up_to_local_paulis(e, graph_to_stabilizer(path(3))), InvalidInput);
}

TEST(Equivalence, FrameIsRecovered) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t n = 1 + rng() % 10;
    const auto a = graph_to_stabilizer(random_graph(n, rng));
    const PauliFrame f{rng() & ((1u << n) - 1), rng() & ((1u << n) - 1)};
    auto b = a;
    b.apply(f);
    const auto got = local_pauli_frame(a, b);
    ASSERT_TRUE(got);
    auto c = a;
    c.apply(*got);
    EXPECT_EQ(c.canonical(), b.canonical());
  }
}

TEST(Fusion, TwoEdgesJoin) {
  // A-C and B-D; fuse C with D leaves A-B.
  const auto s = StabilizerState::tensor(graph_to_stabilizer(path(2)), graph_to_stabilizer(path(2)));
  for (int o1 : {0, 1})
    for (int o2 : {0, 1}) {
      auto r = fuse(s, 1, 2, o1, o2);
      ASSERT_EQ(r.state.size(), 2u);
      EXPECT_TRUE(equivalent_up_to_local_paulis(r.state, graph_to_stabilizer(path(2))));
      r.state.apply(r.correction);
      EXPECT_EQ(r.state.canonical(), graph_to_stabilizer(path(2)).canonical());
    }
}

TEST(Fusion, GhzLeafToLeafGivesFourChain) {
  const auto s = StabilizerState::tensor(graph_to_stabilizer(star(2)), graph_to_stabilizer(star(2)));
  // leaves: 1, 2 of the first; 4, 5 of the second. Fuse 2 with 4.
  const auto r = fuse(s, 2, 4);
  ASSERT_EQ(r.state.size(), 4u);
  // survivors in order: root0, leaf1, root3, leaf5 -> chain leaf1-root0-root3-leaf5
  Graph chain(4);
  chain.add_edge(1, 0);
  chain.add_edge(0, 2);
  chain.add_edge(2, 3);
  EXPECT_TRUE(equivalent_up_to_local_paulis(r.state, graph_to_stabilizer(chain)));
}

TEST(Fusion, NodeWithGhzRootIncrementsDegree) {
  // V-u edge plus a spare port p of V: fuse p with the GHZ root.
  Graph v(3);  // V=0, u=1, p=2
  v.add_edge(0, 1);
  v.add_edge(0, 2);
  const auto s = StabilizerState::tensor(graph_to_stabilizer(v), graph_to_stabilizer(star(2)));
  const auto r = fuse(s, 2, 3);
  // survivors V, u, leaf4, leaf5: V now joined to u and both GHZ leaves
  EXPECT_TRUE(equivalent_up_to_local_paulis(r.state, graph_to_stabilizer(star(3))));
}

TEST(Fusion, BipartiteJoinRuleOnRandomPairs) {
  std::mt19937_64 rng(9);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t na = 1 + rng() % 5, nb = 1 + rng() % 5;
    const auto a = random_graph(na, rng), b = random_graph(nb, rng);
    const std::uint32_t c = rng() % na, d = rng() % nb;
    const auto s = StabilizerState::tensor(graph_to_stabilizer(a), graph_to_stabilizer(b));
    const auto r = fuse(s, c, na + d, std::nullopt, std::nullopt, &rng);
    ASSERT_EQ(r.state.size(), na + nb - 2);
    ASSERT_EQ(r.state.rank(), na + nb - 2);
    const auto want = bipartite_join(a, b, c, na + d - a.n);
    if (want.n == 0) continue;
    EXPECT_TRUE(equivalent_up_to_local_paulis(r.state, graph_to_stabilizer(want)))
        << "c=" << c << " d=" << d << " na=" << na << " nb=" << nb;
    ++checked;
  }
  EXPECT_GT(checked, 250);
}

TEST(Fusion, DenseCrossCheck) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto dev = cases::dense_cross_check(i, rng);
    if (dev) {
      ASSERT_LT(*dev, 1e-9) << "case " << i;
    }
  }
}
