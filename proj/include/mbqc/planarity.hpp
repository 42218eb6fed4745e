#pragma once

// Left-right planarity test (Brandes' formulation of de Fraysseix-Rosenstiehl)
// with combinatorial embedding, face counting, Kuratowski witnesses and the
// incremental maximal planar subgraph.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"

namespace mbqc {

/// Per-node cyclic counter-clockwise order of neighbours. Face successor of
/// the dart (v -> w) is (w -> next of v in w's order).
struct RotationSystem {
  std::vector<std::vector<std::uint32_t>> order;

  std::size_t size() const { return order.size(); }

  /// Position-indexed successor of `from` in `at`'s order.
  std::uint32_t next_around(std::uint32_t at, std::uint32_t from) const {
    const auto& o = order[at];
    auto it = std::find(o.begin(), o.end(), from);
    if (it == o.end()) throw InternalError("rotation: missing neighbour");
    ++it;
    return it == o.end() ? o.front() : *it;
  }

  /// Number of faces found by dart traversal.
  std::size_t count_faces() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, bool> used;
    std::vector<std::map<std::uint32_t, std::size_t>> pos(order.size());
    for (std::uint32_t v = 0; v < order.size(); ++v)
      for (std::size_t i = 0; i < order[v].size(); ++i) pos[v][order[v][i]] = i;
    std::size_t faces = 0;
    for (std::uint32_t v = 0; v < order.size(); ++v) {
      for (auto w : order[v]) {
        if (used[{v, w}]) continue;
        ++faces;
        std::uint32_t a = v, b = w;
        while (!used[{a, b}]) {
          used[{a, b}] = true;
          const auto& ob = order[b];
          auto it = pos[b].find(a);
          if (it == pos[b].end()) throw InternalError("rotation is not symmetric");
          const auto nxt = ob[(it->second + 1) % ob.size()];
          a = b;
          b = nxt;
        }
      }
    }
    return faces;
  }

  std::size_t edge_count() const {
    std::size_t d = 0;
    for (const auto& o : order) d += o.size();
    return d / 2;
  }

  /// Euler check per component: V - E + F == 2 for each of the C non-trivial
  /// components (traversal counts every component's outer face separately),
  /// i.e. the rotation describes a planar (genus 0) embedding.
  bool is_planar_embedding() const {
    Graph g(static_cast<std::uint32_t>(order.size()));
    std::size_t isolated = 0;
    for (std::uint32_t v = 0; v < order.size(); ++v) {
      if (order[v].empty()) ++isolated;
      for (auto w : order[v]) {
        if (w >= order.size()) return false;
        if (v < w) g.add_edge(v, w);
      }
    }
    for (std::uint32_t v = 0; v < order.size(); ++v)
      for (auto w : order[v])
        if (std::find(order[w].begin(), order[w].end(), v) == order[w].end()) return false;
    const auto comps = count_components(g) - isolated;
    const auto V = static_cast<long>(order.size() - isolated);
    const auto E = static_cast<long>(g.edges.size());
    const auto F = static_cast<long>(count_faces());
    if (E == 0) return true;
    return V - E + F == 2 * static_cast<long>(comps);
  }
};

enum class KuratowskiKind { K5, K33 };

struct KuratowskiWitness {
  KuratowskiKind kind = KuratowskiKind::K33;
  std::vector<Edge> edges;                // subdivision edges (original ids)
  std::vector<std::uint32_t> branch_nodes;  // degree >= 3 nodes of the subdivision
};

struct PlanarityResult {
  bool planar = false;
  std::optional<RotationSystem> rotation;
  std::optional<KuratowskiWitness> witness;
};

namespace detail {

class LRPlanarity {
 public:
  LRPlanarity(std::uint32_t n, const std::vector<Edge>& edges) : n_(n), m_(edges.size()) {
    eu_.resize(m_);
    ev_.resize(m_);
    adj_.assign(n_, {});
    for (std::size_t e = 0; e < m_; ++e) {
      eu_[e] = edges[e].first;
      ev_[e] = edges[e].second;
      adj_[eu_[e]].push_back(static_cast<int>(e));
      adj_[ev_[e]].push_back(static_cast<int>(e));
    }
  }

  /// Returns true when planar; fills the embedding when requested.
  bool run(bool embed) {
    if (n_ > 2 && m_ > 3 * static_cast<std::size_t>(n_) - 6) return false;
    height_.assign(n_, -1);
    parent_edge_.assign(n_, -1);
    src_.assign(m_, -1);
    dst_.assign(m_, -1);
    lowpt_.assign(m_, 0);
    lowpt2_.assign(m_, 0);
    nesting_.assign(m_, 0);
    out_.assign(n_, {});
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (height_[v] != -1) continue;
      height_[v] = 0;
      roots_.push_back(v);
      orient(v);
    }
    oriented_ = out_;
    ref_.assign(m_, -1);
    side_.assign(m_, 1);
    lowpt_edge_.assign(m_, -1);
    stack_bottom_.assign(m_, 0);
    sort_out_edges();
    for (auto r : roots_)
      if (!test(r)) return false;
    if (!embed) return true;

    for (std::size_t e = 0; e < m_; ++e) nesting_[e] *= sign(static_cast<int>(e));
    sort_out_edges();
    cw_.assign(2 * m_, -1);
    ccw_.assign(2 * m_, -1);
    first_.assign(n_, -1);
    left_ref_.assign(n_, -1);
    right_ref_.assign(n_, -1);
    for (std::uint32_t v = 0; v < n_; ++v) {
      int prev = -1;
      for (int e : out_[v]) {
        const int h = half(e, v);
        add_cw(v, h, prev);
        prev = h;
      }
    }
    for (auto r : roots_) embed_dfs(r);
    return true;
  }

  /// Clockwise neighbour order per node, starting from the first half-edge.
  std::vector<std::vector<std::uint32_t>> clockwise() const {
    std::vector<std::vector<std::uint32_t>> out(n_);
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (first_[v] < 0) continue;
      int h = first_[v];
      do {
        out[v].push_back(head(h));
        h = cw_[h];
      } while (h != first_[v]);
    }
    return out;
  }

 private:
  struct Interval {
    int low = -1, high = -1;
    bool empty() const { return low < 0 && high < 0; }
  };
  struct ConflictPair {
    Interval left, right;
    void swap() { std::swap(left, right); }
  };

  bool conflicting(const Interval& i, int b) const { return !i.empty() && lowpt_[i.high] > lowpt_[b]; }
  int lowest(const ConflictPair& p) const {
    if (p.left.empty()) return lowpt_[p.right.low];
    if (p.right.empty()) return lowpt_[p.left.low];
    return std::min(lowpt_[p.left.low], lowpt_[p.right.low]);
  }

  int half(int e, std::uint32_t from) const { return 2 * e + (from == eu_[e] ? 0 : 1); }
  std::uint32_t tail(int h) const { return (h & 1) ? ev_[h >> 1] : eu_[h >> 1]; }
  std::uint32_t head(int h) const { return (h & 1) ? eu_[h >> 1] : ev_[h >> 1]; }

  // Stable sort by nesting depth, always starting from the orientation order.
  void sort_out_edges() {
    out_ = oriented_;
    for (auto& lst : out_)
      std::stable_sort(lst.begin(), lst.end(), [&](int a, int b) { return nesting_[a] < nesting_[b]; });
  }

  void orient(std::uint32_t v) {
    const int e = parent_edge_[v];
    for (int ei : adj_[v]) {
      if (src_[ei] != -1) continue;
      const std::uint32_t w = eu_[ei] == v ? ev_[ei] : eu_[ei];
      src_[ei] = static_cast<int>(v);
      dst_[ei] = static_cast<int>(w);
      out_[v].push_back(ei);
      lowpt_[ei] = height_[v];
      lowpt2_[ei] = height_[v];
      if (height_[w] == -1) {
        parent_edge_[w] = ei;
        height_[w] = height_[v] + 1;
        orient(w);
      } else {
        lowpt_[ei] = height_[w];
      }
      nesting_[ei] = 2 * lowpt_[ei];
      if (lowpt2_[ei] < height_[v]) nesting_[ei] += 1;
      if (e != -1) {
        if (lowpt_[ei] < lowpt_[e]) {
          lowpt2_[e] = std::min(lowpt_[e], lowpt2_[ei]);
          lowpt_[e] = lowpt_[ei];
        } else if (lowpt_[ei] > lowpt_[e]) {
          lowpt2_[e] = std::min(lowpt2_[e], lowpt_[ei]);
        } else {
          lowpt2_[e] = std::min(lowpt2_[e], lowpt2_[ei]);
        }
      }
    }
  }

  bool test(std::uint32_t v) {
    const int e = parent_edge_[v];
    const auto& outs = out_[v];
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const int ei = outs[k];
      const auto w = static_cast<std::uint32_t>(dst_[ei]);
      stack_bottom_[ei] = S_.size();
      if (ei == parent_edge_[w]) {
        if (!test(w)) return false;
      } else {
        lowpt_edge_[ei] = ei;
        ConflictPair p;
        p.right = {ei, ei};
        S_.push_back(p);
      }
      if (lowpt_[ei] < height_[v]) {
        if (k == 0) {
          lowpt_edge_[e] = lowpt_edge_[ei];
        } else if (!add_constraints(ei, e)) {
          return false;
        }
      }
    }
    if (e != -1) {
      const auto u = static_cast<std::uint32_t>(src_[e]);
      trim_back_edges(u);
      if (lowpt_[e] < height_[u] && !S_.empty()) {
        const int hl = S_.back().left.high;
        const int hr = S_.back().right.high;
        if (hl != -1 && (hr == -1 || lowpt_[hl] > lowpt_[hr]))
          ref_[e] = hl;
        else
          ref_[e] = hr;
      }
    }
    return true;
  }

  bool add_constraints(int ei, int e) {
    ConflictPair P;
    do {
      ConflictPair Q = S_.back();
      S_.pop_back();
      if (!Q.left.empty()) Q.swap();
      if (!Q.left.empty()) return false;
      if (lowpt_[Q.right.low] > lowpt_[e]) {
        if (P.right.empty())
          P.right = Q.right;
        else
          ref_[P.right.low] = Q.right.high;
        P.right.low = Q.right.low;
      } else {
        ref_[Q.right.low] = lowpt_edge_[e];
      }
    } while (S_.size() != stack_bottom_[ei]);
    while (!S_.empty() && (conflicting(S_.back().left, ei) || conflicting(S_.back().right, ei))) {
      ConflictPair Q = S_.back();
      S_.pop_back();
      if (conflicting(Q.right, ei)) Q.swap();
      if (conflicting(Q.right, ei)) return false;
      ref_[P.right.low] = Q.right.high;
      if (Q.right.low != -1) P.right.low = Q.right.low;
      if (P.left.empty())
        P.left = Q.left;
      else
        ref_[P.left.low] = Q.left.high;
      P.left.low = Q.left.low;
    }
    if (!(P.left.empty() && P.right.empty())) S_.push_back(P);
    return true;
  }

  void trim_back_edges(std::uint32_t u) {
    while (!S_.empty() && lowest(S_.back()) == height_[u]) {
      const ConflictPair P = S_.back();
      S_.pop_back();
      if (P.left.low != -1) side_[P.left.low] = -1;
    }
    if (S_.empty()) return;
    ConflictPair P = S_.back();
    S_.pop_back();
    while (P.left.high != -1 && dst_[P.left.high] == static_cast<int>(u)) P.left.high = ref_[P.left.high];
    if (P.left.high == -1 && P.left.low != -1) {
      ref_[P.left.low] = P.right.low;
      side_[P.left.low] = -1;
      P.left.low = -1;
    }
    while (P.right.high != -1 && dst_[P.right.high] == static_cast<int>(u)) P.right.high = ref_[P.right.high];
    if (P.right.high == -1 && P.right.low != -1) {
      ref_[P.right.low] = P.left.low;
      side_[P.right.low] = -1;
      P.right.low = -1;
    }
    S_.push_back(P);
  }

  int sign(int e) {
    std::vector<int> chain;
    int x = e;
    while (ref_[x] != -1) {
      chain.push_back(x);
      x = ref_[x];
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      side_[*it] *= side_[ref_[*it]];
      ref_[*it] = -1;
    }
    return side_[e];
  }

  void add_cw(std::uint32_t v, int h, int ref) {
    if (ref == -1) {
      cw_[h] = ccw_[h] = h;
      first_[v] = h;
      return;
    }
    const int nxt = cw_[ref];
    cw_[ref] = h;
    ccw_[h] = ref;
    cw_[h] = nxt;
    ccw_[nxt] = h;
  }
  void add_ccw(std::uint32_t v, int h, int ref) {
    if (ref == -1) {
      add_cw(v, h, -1);
      return;
    }
    add_cw(v, h, ccw_[ref]);
    if (ref == first_[v]) first_[v] = h;
  }

  void embed_dfs(std::uint32_t v) {
    for (int ei : out_[v]) {
      const auto w = static_cast<std::uint32_t>(dst_[ei]);
      if (ei == parent_edge_[w]) {
        add_ccw(w, half(ei, w), first_[w]);
        left_ref_[v] = right_ref_[v] = half(ei, v);
        embed_dfs(w);
      } else if (side_[ei] == 1) {
        add_cw(w, half(ei, w), right_ref_[w]);
      } else {
        add_ccw(w, half(ei, w), left_ref_[w]);
        left_ref_[w] = half(ei, w);
      }
    }
  }

  std::uint32_t n_;
  std::size_t m_;
  std::vector<std::uint32_t> eu_, ev_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> height_, parent_edge_, src_, dst_, lowpt_, lowpt2_, nesting_;
  std::vector<std::vector<int>> out_, oriented_;
  std::vector<std::uint32_t> roots_;
  std::vector<int> ref_, side_, lowpt_edge_;
  std::vector<std::size_t> stack_bottom_;
  std::vector<ConflictPair> S_;
  std::vector<int> cw_, ccw_, first_, left_ref_, right_ref_;
};

inline bool planar_quick(std::uint32_t n, const std::vector<Edge>& edges) {
  LRPlanarity lr(n, edges);
  return lr.run(false);
}

inline KuratowskiWitness extract_witness(std::uint32_t n, std::vector<Edge> edges) {
  // Deleting every edge whose removal keeps the graph non-planar leaves an
  // edge-minimal non-planar subgraph, i.e. a Kuratowski subdivision.
  for (std::size_t i = 0; i < edges.size();) {
    auto trial = edges;
    trial.erase(trial.begin() + static_cast<long>(i));
    if (!planar_quick(n, trial))
      edges = std::move(trial);
    else
      ++i;
  }
  std::vector<std::uint32_t> deg(n, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  KuratowskiWitness w;
  w.edges = edges;
  for (std::uint32_t v = 0; v < n; ++v)
    if (deg[v] >= 3) w.branch_nodes.push_back(v);
  const bool k5 = w.branch_nodes.size() == 5 &&
                  std::all_of(w.branch_nodes.begin(), w.branch_nodes.end(), [&](auto v) { return deg[v] == 4; });
  w.kind = k5 ? KuratowskiKind::K5 : KuratowskiKind::K33;
  if (!k5 && !(w.branch_nodes.size() == 6 &&
               std::all_of(w.branch_nodes.begin(), w.branch_nodes.end(), [&](auto v) { return deg[v] == 3; })))
    throw InternalError("witness is neither a K5 nor a K3,3 subdivision");
  return w;
}

}  // namespace detail

/// Planarity test. Planar graphs come back with a rotation system, non-planar
/// ones with a Kuratowski subdivision (set want_witness=false to skip the
/// O(E) witness extraction).
inline PlanarityResult is_planar(const Graph& g, bool want_witness = true) {
  if (!g.is_simple()) throw InvalidInput("planarity test expects a simple graph");
  PlanarityResult res;
  detail::LRPlanarity lr(g.n, g.edges);
  res.planar = lr.run(true);
  if (res.planar) {
    RotationSystem rs;
    rs.order = lr.clockwise();
    for (auto& o : rs.order) std::reverse(o.begin(), o.end());
    res.rotation = std::move(rs);
  } else if (want_witness) {
    res.witness = detail::extract_witness(g.n, g.edges);
  }
  return res;
}

inline bool planar(const Graph& g) { return detail::planar_quick(g.n, g.edges); }

struct PlanarSubgraph {
  Graph subgraph;
  std::vector<Edge> removed;
};

/// Greedy edge insertion in ascending (min, max) order: an edge is kept when
/// the graph stays planar. Every removed edge breaks planarity if re-added.
inline PlanarSubgraph maximal_planar_subgraph(const Graph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.edges.size());
  for (auto [a, b] : g.edges) edges.push_back(ordered(a, b));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  PlanarSubgraph out{Graph(g.n), {}};
  if (detail::planar_quick(g.n, edges)) {
    out.subgraph.edges = edges;
    return out;
  }
  DisjointSets comp(g.n);
  auto& kept = out.subgraph.edges;
  for (const auto& e : edges) {
    if (comp.find(e.first) != comp.find(e.second)) {
      // joining two components by a bridge never breaks planarity
      kept.push_back(e);
      comp.unite(e.first, e.second);
      continue;
    }
    kept.push_back(e);
    if (!detail::planar_quick(g.n, kept)) {
      kept.pop_back();
      out.removed.push_back(e);
    }
  }
  return out;
}

}  // namespace mbqc
