#include <gtest/gtest.h>

#include <random>

#include "mbqc/planarity.hpp"

using namespace mbqc;

namespace {

Graph complete(std::uint32_t n) {
  Graph g(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) g.add_edge(a, b);
  return g;
}

Graph k33() {
  Graph g(6);
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 3; b < 6; ++b) g.add_edge(a, b);
  return g;
}

Graph grid(std::uint32_t r, std::uint32_t c) {
  Graph g(r * c);
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < c; ++j) {
      if (j + 1 < c) g.add_edge(i * c + j, i * c + j + 1);
      if (i + 1 < r) g.add_edge(i * c + j, (i + 1) * c + j);
    }
  return g;
}

Graph random_graph(std::uint32_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution e(p);
  Graph g(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (e(rng)) g.add_edge(a, b);
  return g;
}


}  // namespace

TEST(IsPlanar, K4HasFourFaces) {
  const auto r = is_planar(complete(4));
  ASSERT_TRUE(r.planar);
  ASSERT_TRUE(r.rotation);
  EXPECT_EQ(r.rotation->count_faces(), 4u);
  EXPECT_TRUE(r.rotation->is_planar_embedding());
}

TEST(IsPlanar, K33Witness) {
  const auto r = is_planar(k33());
  ASSERT_FALSE(r.planar);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->kind, KuratowskiKind::K33);
  EXPECT_EQ(r.witness->edges.size(), 9u);
}

TEST(IsPlanar, K5Witness) {
  const auto r = is_planar(complete(5));
  ASSERT_FALSE(r.planar);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->kind, KuratowskiKind::K5);
  EXPECT_EQ(r.witness->branch_nodes.size(), 5u);
}

TEST(IsPlanar, SubdividedWitnessInsideLargerGraph) {
  // K3,3 with one edge subdivided, plus a planar tail.
  Graph g(9);
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 3; b < 6; ++b)
      if (!(a == 0 && b == 3)) g.add_edge(a, b);
  g.add_edge(0, 6);
  g.add_edge(6, 3);
  g.add_edge(6, 7);
  g.add_edge(7, 8);
  const auto r = is_planar(g);
  ASSERT_FALSE(r.planar);
  EXPECT_EQ(r.witness->kind, KuratowskiKind::K33);
  EXPECT_EQ(r.witness->edges.size(), 10u);
}

TEST(IsPlanar, GridsAndTreesEmbed) {
  for (auto [r, c] : {std::pair{1u, 1u}, {1u, 5u}, {3u, 3u}, {6u, 9u}}) {
    const auto res = is_planar(grid(r, c));
    ASSERT_TRUE(res.planar);
    EXPECT_TRUE(res.rotation->is_planar_embedding());
  }
}

TEST(IsPlanar, RandomGraphsAgreeWithWitnessAndEuler) {
  std::mt19937_64 rng(17);
  int planar_count = 0, nonplanar = 0;
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t n = 4 + rng() % 12;
    const auto g = random_graph(n, 0.15 + 0.5 * double(rng() % 100) / 100.0, rng);
    const auto r = is_planar(g);
    if (r.planar) {
      ++planar_count;
      ASSERT_TRUE(r.rotation->is_planar_embedding());
      ASSERT_EQ(r.rotation->edge_count(), g.edges.size());
    } else {
      ++nonplanar;
      // the witness is itself non-planar and every one of its edges is needed
      Graph w(g.n, r.witness->edges);
      ASSERT_FALSE(planar(w));
      for (std::size_t k = 0; k < w.edges.size(); ++k) {
        auto e = w.edges;
        e.erase(e.begin() + static_cast<long>(k));
        ASSERT_TRUE(planar(Graph(g.n, e)));
      }
    }
  }
  EXPECT_GT(planar_count, 30);
  EXPECT_GT(nonplanar, 30);
}

TEST(IsPlanar, RejectsMultigraph) {
  Graph g(2, {{0, 1}, {1, 0}});
  EXPECT_THROW(is_planar(g), InvalidInput);
}

TEST(MaximalPlanar, PlanarInputUnchanged) {
  const auto r = maximal_planar_subgraph(grid(3, 4));
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.subgraph.edges.size(), grid(3, 4).edges.size());
}

TEST(MaximalPlanar, K5AndK33LoseOneEdge) {
  const auto a = maximal_planar_subgraph(complete(5));
  EXPECT_EQ(a.subgraph.edges.size(), 9u);
  EXPECT_EQ(a.removed.size(), 1u);
  const auto b = maximal_planar_subgraph(k33());
  EXPECT_EQ(b.subgraph.edges.size(), 8u);
  EXPECT_EQ(b.removed.size(), 1u);
}

TEST(MaximalPlanar, MaximalOnRandomGraphs) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto g = random_graph(6 + rng() % 20, 0.4, rng);
    const auto r = maximal_planar_subgraph(g);
    EXPECT_EQ(r.subgraph.n, g.n);
    EXPECT_TRUE(planar(r.subgraph));
    EXPECT_EQ(r.subgraph.edges.size() + r.removed.size(), g.edges.size());
    for (const auto& e : r.removed) {
      auto plus = r.subgraph;
      plus.edges.push_back(e);
      EXPECT_FALSE(planar(plus));
    }
  }
}
