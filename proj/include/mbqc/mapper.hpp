#pragma once

// 2D-lattice mapping and routing of one round's fusion graph onto an
// extended layer: cycle-prioritized edge order, greedy placement scored by
// a look-ahead cost, and non-crossing shortest-path routes through free
// cells (every routing cell hosts one auxiliary resource state).

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/fusiongraph.hpp"
#include "mbqc/hardware.hpp"

namespace mbqc {

struct MapperOptions {
  double alpha = 1.0;      // reward per mapped edge
  double beta = 0.5;       // penalty per auxiliary routing cell
  double lookahead = 1.0;  // weight w of the congestion term B
  std::uint32_t beam = 32;
  std::uint32_t max_route = 4;  // auxiliary cells per placement route
  std::uint32_t radius = 2;     // Chebyshev radius of adjacent candidates
  std::uint32_t margin = 1;
  double crowding = 0.1;
  std::uint32_t restarts = 16;  // attempts with walled-in states promoted
  double pull = 1.0;            // weight per grid step between an exit and its partner
};

/// Physical generator position (row, col) a cut-edge exit should sit near,
/// keyed by the port's virtual-node local id.
using PortTargets = std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>;

/// Fusion-graph edges in cycle-prioritized breadth-first order: edges on a
/// cycle are explored first; bridges are expanded only when no cycle edge
/// is pending. Each emitted edge has an endpoint reached earlier, except
/// the first edge of a component.
inline std::vector<std::uint32_t> edge_order(const FusionGraph& fg) {
  const auto n = fg.size();
  const auto m = static_cast<std::uint32_t>(fg.fusion_edges.size());
  // incident edges in rotation (slot) order
  std::vector<std::vector<std::uint32_t>> inc(n);
  for (const auto& rn : fg.nodes)
    for (const auto& s : rn.slots)
      if (s.use == SlotUse::Fusion) inc[rn.id].push_back(s.fusion);
  auto other = [&](std::uint32_t e, std::uint32_t x) {
    const auto& fe = fg.fusion_edges[e];
    return fe.a.node == x ? fe.b.node : fe.a.node;
  };

  // bridges by iterative lowpoint DFS
  std::vector<bool> bridge(m, false);
  {
    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> disc(n, kNone), low(n, 0);
    std::uint32_t timer = 0;
    struct Frame {
      std::uint32_t v, parent_edge, next;
    };
    for (std::uint32_t s = 0; s < n; ++s) {
      if (disc[s] != kNone) continue;
      std::vector<Frame> st{{s, kNone, 0}};
      disc[s] = low[s] = timer++;
      while (!st.empty()) {
        auto& f = st.back();
        if (f.next < inc[f.v].size()) {
          const auto e = inc[f.v][f.next++];
          if (e == f.parent_edge) continue;
          const auto w = other(e, f.v);
          if (disc[w] == kNone) {
            disc[w] = low[w] = timer++;
            st.push_back({w, e, 0});
          } else {
            low[f.v] = std::min(low[f.v], disc[w]);
          }
        } else {
          const auto done = st.back();
          st.pop_back();
          if (!st.empty()) {
            auto& p = st.back();
            low[p.v] = std::min(low[p.v], low[done.v]);
            if (low[done.v] > disc[p.v]) bridge[done.parent_edge] = true;
          }
        }
      }
    }
  }

  std::vector<std::uint32_t> order;
  order.reserve(m);
  std::vector<bool> emitted(m, false), reached(n, false);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (reached[s] || inc[s].empty()) continue;
    reached[s] = true;
    std::deque<std::uint32_t> cycle_q{s}, tree_q{s};
    while (!cycle_q.empty() || !tree_q.empty()) {
      if (!cycle_q.empty()) {
        const auto x = cycle_q.front();
        cycle_q.pop_front();
        for (auto e : inc[x]) {
          if (emitted[e] || bridge[e]) continue;
          emitted[e] = true;
          order.push_back(e);
          const auto y = other(e, x);
          if (!reached[y]) {
            reached[y] = true;
            cycle_q.push_back(y);
            tree_q.push_back(y);
          }
        }
        continue;
      }
      const auto x = tree_q.front();
      tree_q.pop_front();
      for (auto e : inc[x]) {
        if (emitted[e] || !bridge[e]) continue;
        emitted[e] = true;
        order.push_back(e);
        const auto y = other(e, x);
        if (!reached[y]) {
          reached[y] = true;
          cycle_q.push_back(y);
          tree_q.push_back(y);
        }
      }
    }
  }
  return order;
}

/// H = -alpha * mapped + beta * aux + B, where B = w * (summed deficit of
/// free adjacent cells against unmapped incident edges).
inline double heuristic_cost(std::size_t mapped_edges, std::size_t aux_cells, std::size_t deficit,
                             const MapperOptions& opt) {
  return -opt.alpha * double(mapped_edges) + opt.beta * double(aux_cells) + opt.lookahead * double(deficit);
}

/// Placement and routes of one fusion graph on an extended layer. Cells
/// are lattice indices of `layer`.
struct Layout {
  ExtendedLayer layer;
  std::vector<std::uint32_t> placement;               // resource node -> cell
  std::map<std::uint32_t, std::vector<std::uint32_t>> routes;  // fusion edge -> aux cells, in path order
  std::vector<std::uint32_t> aux_cells;                 // sorted
  // cut-edge port (virtual-node local id) -> cells leading away from the
  // port's resource state; the last one is where inter-round routing starts
  std::map<std::uint32_t, std::vector<std::uint32_t>> exits;

  Cell cell_of(std::uint32_t rn) const { return layer.to_cell(layer.pos(placement.at(rn))); }

  std::size_t fusion_count() const {
    std::size_t c = 0;
    for (const auto& [e, r] : routes) c += 1 + r.size();
    return c;
  }
};

namespace detail {

inline constexpr std::int32_t kFree = -1;
inline constexpr std::int32_t kAux = -2;

class RoundMapper {
 public:
  RoundMapper(const FusionGraph& fg, const ExtendedLayer& layer, const MapperOptions& opt,
              std::vector<bool> urgent = {}, std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> anchors = {},
              bool boundary_seed = false)
      : fg_(fg), layer_(layer), opt_(opt), occ_(layer.size(), kFree), pos_(fg.size(), kUnplaced),
        open_(fg.size(), 0), urgent_(std::move(urgent)), anchor_(std::move(anchors)), boundary_seed_(boundary_seed) {
    urgent_.resize(fg.size(), false);
    anchor_.resize(fg.size());
    component_anchor();
    for (const auto& e : fg.fusion_edges) {
      ++open_[e.a.node];
      ++open_[e.b.node];
    }
    adj_.resize(layer.size());
    for (std::uint32_t i = 0; i < layer.size(); ++i) adj_[i] = layer.adjacent(i);
  }

  Layout run() {
    if (fg_.size() > layer_.size())
      throw CapacityExhausted("round needs " + std::to_string(fg_.size()) + " resource states, layer holds " +
                              std::to_string(layer_.size()));
    Layout out{layer_, {}, {}, {}, {}};
    for (auto e : ordered_edges()) {
      const auto& fe = fg_.fusion_edges[e];
      auto a = fe.a.node, b = fe.b.node;
      if (pos_[a] == kUnplaced && pos_[b] == kUnplaced) place(a, seed_cell(a));
      if (pos_[a] == kUnplaced) std::swap(a, b);
      std::vector<std::uint32_t> route;
      if (pos_[b] == kUnplaced) {
        refresh_congestion();
        auto [cell, path] = choose(a, b);
#ifdef MBQC_MAPPER_DEBUG
        std::fprintf(stderr, "edge %u: %u -> %u at (%u,%u) route %zu open_a %u open_b %u B %zu\n", e, a, b,
                     layer_.pos(cell).row, layer_.pos(cell).col, path.size(), open_[a], open_[b], congestion_);
#endif
        place(b, cell);
        route = std::move(path);
      } else {
        auto path = closing_route(a, b);
        if (!path) {
          stuck_ = {a, b};
          throw CapacityExhausted("no free route for fusion edge " + std::to_string(e) + " on " +
                                  std::to_string(layer_.rows()) + "x" + std::to_string(layer_.cols()) + " lattice");
        }
        route = std::move(*path);
#ifdef MBQC_MAPPER_DEBUG
        std::fprintf(stderr, "edge %u: close %u -- %u route %zu\n", e, a, b, route.size());
#endif
      }
      for (auto c : route) occ_[c] = kAux;
      if (a != fe.a.node) std::reverse(route.begin(), route.end());  // store in edge orientation
      --open_[a];
      --open_[b];
      ++mapped_;
      aux_ += route.size();
      out.routes[e] = std::move(route);
    }
    for (std::uint32_t v = 0; v < fg_.size(); ++v)
      if (pos_[v] == kUnplaced) place(v, seed_cell(v));
    out.placement.assign(pos_.begin(), pos_.end());
    for (std::uint32_t c = 0; c < occ_.size(); ++c)
      if (occ_[c] == kAux) out.aux_cells.push_back(c);
    return out;
  }

  /// Resource states involved in the last failure.
  const std::vector<std::uint32_t>& stuck() const { return stuck_; }

 private:
  static constexpr std::uint32_t kUnplaced = std::numeric_limits<std::uint32_t>::max();

  /// Regroups an edge order (which lists components contiguously) so the
  /// largest components come first; each keeps its internal order.
  std::vector<std::uint32_t> components_largest_first(const std::vector<std::uint32_t>& order) const {
    std::vector<std::uint32_t> comp(fg_.size(), kUnplaced);
    std::vector<std::vector<std::uint32_t>> groups;
    for (auto e : order) {
      const auto& fe = fg_.fusion_edges[e];
      if (comp[fe.a.node] == kUnplaced && comp[fe.b.node] == kUnplaced) groups.emplace_back();
      const auto c = comp[fe.a.node] != kUnplaced ? comp[fe.a.node]
                     : comp[fe.b.node] != kUnplaced ? comp[fe.b.node]
                                                    : static_cast<std::uint32_t>(groups.size() - 1);
      comp[fe.a.node] = comp[fe.b.node] = c;
      groups[c].push_back(e);
    }
    std::stable_sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.size() > y.size(); });
    std::vector<std::uint32_t> out;
    for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    return out;
  }

  /// Cycle-prioritized order, except that once an urgent resource state is
  /// reached all its remaining edges follow immediately.
  std::vector<std::uint32_t> ordered_edges() const {
    const auto base = components_largest_first(edge_order(fg_));
    if (std::none_of(urgent_.begin(), urgent_.end(), [](bool u) { return u; })) return base;
    std::vector<std::vector<std::uint32_t>> inc(fg_.size());
    for (auto e : base) {
      inc[fg_.fusion_edges[e].a.node].push_back(e);
      inc[fg_.fusion_edges[e].b.node].push_back(e);
    }
    std::vector<bool> done(fg_.fusion_edges.size(), false), expanded(fg_.size(), false);
    std::vector<std::uint32_t> out;
    for (auto e : base) {
      if (done[e]) continue;
      std::deque<std::uint32_t> q{e};
      while (!q.empty()) {
        const auto x = q.front();
        q.pop_front();
        if (done[x]) continue;
        done[x] = true;
        out.push_back(x);
        for (auto v : {fg_.fusion_edges[x].a.node, fg_.fusion_edges[x].b.node}) {
          if (!urgent_[v] || expanded[v]) continue;
          expanded[v] = true;
          for (auto f : inc[v])
            if (!done[f]) q.push_back(f);
        }
      }
    }
    return out;
  }

  void place(std::uint32_t v, std::uint32_t cell) {
    pos_[v] = cell;
    occ_[cell] = static_cast<std::int32_t>(v);
  }

  /// Occupied or off-lattice positions within Chebyshev radius 2.
  std::uint32_t crowding(std::uint32_t cell) const {
    const auto p = layer_.pos(cell);
    std::uint32_t n = 0;
    for (int dr = -2; dr <= 2; ++dr)
      for (int dc = -2; dc <= 2; ++dc) {
        const int r = int(p.row) + dr, c = int(p.col) + dc;
        if (dr == 0 && dc == 0) continue;
        if (r < 0 || c < 0 || r >= int(layer_.rows()) || c >= int(layer_.cols())) {
          ++n;
          continue;
        }
        n += occ_[layer_.index({std::uint32_t(r), std::uint32_t(c)})] != kFree;
      }
    return n;
  }

  std::uint32_t free_adjacent(std::uint32_t cell) const {
    std::uint32_t f = 0;
    for (auto j : adj_[cell]) f += occ_[j] == kFree;
    return f;
  }

  /// Seed for a new component: the free cell farthest (up to a cap) from
  /// every occupied cell, so components do not wall each other in; ties go
  /// to the cell nearest the component's exit targets (the lattice centre
  /// when it has none), then row-major order.
  std::uint32_t seed_cell(std::uint32_t v) const {
    constexpr std::uint32_t kCap = 3;
    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    if (boundary_seed_) {
      // tight lattices: start in a corner so a long chain can run along the edge
      std::optional<std::pair<std::uint32_t, std::uint32_t>> best;
      for (std::uint32_t i = 0; i < occ_.size(); ++i)
        if (occ_[i] == kFree && (!best || std::pair(free_adjacent(i), i) < *best)) best = std::pair(free_adjacent(i), i);
      if (!best) throw CapacityExhausted("extended layer is full");
      return best->second;
    }
    std::vector<std::uint32_t> clear(occ_.size(), kNone);
    std::deque<std::uint32_t> q;
    for (std::uint32_t i = 0; i < occ_.size(); ++i)
      if (occ_[i] != kFree) {
        clear[i] = 0;
        q.push_back(i);
      }
    while (!q.empty()) {
      const auto c = q.front();
      q.pop_front();
      if (clear[c] >= kCap) continue;
      for (auto j : adj_[c])
        if (clear[j] == kNone) {
          clear[j] = clear[c] + 1;
          q.push_back(j);
        }
    }
    const auto cr = double(layer_.rows() - 1) / 2, cc = double(layer_.cols() - 1) / 2;
    std::optional<std::tuple<std::uint32_t, double, int, std::uint32_t>> best;
    for (std::uint32_t i = 0; i < occ_.size(); ++i) {
      if (occ_[i] != kFree) continue;
      const auto p = layer_.pos(i);
      double d = std::max(std::abs(double(p.row) - cr), std::abs(double(p.col) - cc));
      if (comp_anchor_[comp_[v]]) d = grid_distance(i, *comp_anchor_[comp_[v]]);
      std::tuple<std::uint32_t, double, int, std::uint32_t> key{kCap - std::min(clear[i], kCap), d,
                                                                -int(free_adjacent(i)), i};
      if (!best || key < *best) best = key;
    }
    if (!best) throw CapacityExhausted("extended layer is full");
    return std::get<3>(*best);
  }

  /// Shortest path of free cells strictly between two cells, at most
  /// `limit` cells long.
  std::optional<std::vector<std::uint32_t>> shortest_path(std::uint32_t from, std::uint32_t to,
                                                          std::uint32_t limit) const {
    for (auto j : adj_[from])
      if (j == to) return std::vector<std::uint32_t>{};
    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> parent(occ_.size(), kNone), dist(occ_.size(), kNone);
    std::deque<std::uint32_t> q;
    for (auto j : adj_[from])
      if (occ_[j] == kFree) {
        parent[j] = from;
        dist[j] = 1;
        q.push_back(j);
      }
    while (!q.empty()) {
      const auto c = q.front();
      q.pop_front();
      for (auto j : adj_[c]) {
        if (j == to) {
          std::vector<std::uint32_t> path;
          for (auto x = c; x != from; x = parent[x]) path.push_back(x);
          std::reverse(path.begin(), path.end());
          return path;
        }
        if (occ_[j] != kFree || dist[j] != kNone || dist[c] >= limit) continue;
        parent[j] = c;
        dist[j] = dist[c] + 1;
        q.push_back(j);
      }
    }
    return std::nullopt;
  }

  /// Route between two placed resource states. Cells next to placed states
  /// that still need free neighbours cost extra, steeply so when the state
  /// has little or no slack left.
  std::optional<std::vector<std::uint32_t>> closing_route(std::uint32_t a, std::uint32_t b) const {
    const auto from = pos_[a], to = pos_[b];
    for (auto j : adj_[from])
      if (j == to) return std::vector<std::uint32_t>{};
    constexpr std::uint32_t kPenalty = 16;
    auto cost = [&](std::uint32_t c) {
      std::uint32_t k = 1;
      for (auto j : adj_[c]) {
        if (occ_[j] < 0) continue;
        const auto v = static_cast<std::uint32_t>(occ_[j]);
        const auto need = open_[v] - (v == a || v == b ? 1 : 0);  // this edge closes one
        if (need == 0) continue;
        const auto f = free_adjacent(j);
        k += f <= need ? kPenalty : f <= need + 1 ? kPenalty / 4 : 1;
      }
      return k;
    };
    constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(occ_.size(), kInf), parent(occ_.size(), kInf);
    using Item = std::pair<std::uint32_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (auto j : adj_[from])
      if (occ_[j] == kFree) {
        dist[j] = cost(j);
        parent[j] = from;
        pq.push({dist[j], j});
      }
    std::optional<std::uint32_t> last;
    std::uint32_t best = kInf;
    while (!pq.empty()) {
      const auto [d, c] = pq.top();
      pq.pop();
      if (d != dist[c] || d >= best) continue;
      for (auto j : adj_[c]) {
        if (j == to) {
          if (d < best) {
            best = d;
            last = c;
          }
          continue;
        }
        if (occ_[j] != kFree) continue;
        const auto nd = d + cost(j);
        if (nd < dist[j]) {
          dist[j] = nd;
          parent[j] = c;
          pq.push({nd, j});
        }
      }
    }
    if (!last) return std::nullopt;
    std::vector<std::uint32_t> path;
    for (auto x = *last; x != from; x = parent[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
  }

  struct Candidate {
    bool harmful;  // leaves more open edges without a free adjacent cell
    double h;
    std::uint32_t row, col, cell;
    std::vector<std::uint32_t> route;
  };

  /// Best cell (and route from `a`) for the unplaced end of an edge.
  std::pair<std::uint32_t, std::vector<std::uint32_t>> choose(std::uint32_t a, std::uint32_t b) {
    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    const auto src = pos_[a];
    const auto sp = layer_.pos(src);
    // BFS over free cells from the mapped endpoint
    std::vector<std::uint32_t> parent(occ_.size(), kNone), dist(occ_.size(), kNone);
    std::deque<std::uint32_t> q;
    std::vector<std::uint32_t> reached;
    dist[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
      const auto c = q.front();
      q.pop_front();
      for (auto j : adj_[c]) {
        if (occ_[j] != kFree || dist[j] != kNone) continue;
        parent[j] = c;
        dist[j] = dist[c] + 1;
        reached.push_back(j);
        q.push_back(j);
      }
    }
    if (reached.empty()) {
      stuck_ = {a};
#ifdef MBQC_MAPPER_DEBUG
      dump(a);
#endif
      throw CapacityExhausted("no free cell reachable from resource state " + std::to_string(a));
    }
    auto chebyshev = [&](std::uint32_t c) {
      const auto p = layer_.pos(c);
      return std::max(std::abs(int(p.row) - int(sp.row)), std::abs(int(p.col) - int(sp.col)));
    };
    std::vector<std::uint32_t> pool;
    for (auto c : reached)
      if (chebyshev(c) <= int(opt_.radius) || dist[c] <= opt_.max_route + 1) pool.push_back(c);
    if (pool.empty()) pool = reached;  // nothing close: accept a longer route
    std::stable_sort(pool.begin(), pool.end(), [&](auto x, auto y) { return std::tie(dist[x], x) < std::tie(dist[y], y); });
    if (pool.size() > opt_.beam) pool.resize(opt_.beam);

    std::optional<Candidate> best;
    for (auto c : pool) {
      std::vector<std::uint32_t> route;
      for (auto x = parent[c]; x != src; x = parent[x]) route.push_back(x);
      std::reverse(route.begin(), route.end());
      const auto [h, harmful] = score(a, b, c, route);
      const auto p = layer_.pos(c);
      Candidate cand{harmful, h, p.row, p.col, c, std::move(route)};
      if (!best || std::tie(cand.harmful, cand.h, cand.row, cand.col) <
                       std::tie(best->harmful, best->h, best->row, best->col))
        best = std::move(cand);
    }
    return {best->cell, std::move(best->route)};
  }

  /// Open edges of the given resource states that cannot be given a
  /// distinct free adjacent cell (demand minus a maximum matching of open
  /// edges to free cells). Without shared cells this is the per-node sum of
  /// max(0, open - free adjacent).
  std::size_t unmatched(const std::vector<std::uint32_t>& nodes) {
    std::vector<std::vector<std::uint32_t>> wants;  // one entry per open edge
    for (auto v : nodes) {
      if (pos_[v] == kUnplaced || open_[v] == 0) continue;
      std::vector<std::uint32_t> cells;
      for (auto j : adj_[pos_[v]])
        if (occ_[j] == kFree) cells.push_back(j);
      for (std::uint32_t k = 0; k < open_[v] + opt_.margin; ++k) wants.push_back(cells);
    }
    std::map<std::uint32_t, std::uint32_t> owner;  // cell -> demand index
    std::size_t matched = 0;
    for (std::uint32_t d = 0; d < wants.size(); ++d) {
      std::set<std::uint32_t> seen;
      auto augment = [&](auto&& self, std::uint32_t x) -> bool {
        for (auto c : wants[x]) {
          if (!seen.insert(c).second) continue;
          auto it = owner.find(c);
          if (it == owner.end() || self(self, it->second)) {
            owner[c] = x;
            return true;
          }
        }
        return false;
      };
      matched += augment(augment, d);
    }
    return wants.size() - matched;
  }

  /// Mapped resource states whose free adjacent cells may change, or are
  /// contended by those that may.
  std::vector<std::uint32_t> neighbourhood(std::uint32_t a, std::uint32_t cell, const std::vector<std::uint32_t>& route) {
    std::set<std::uint32_t> out{a};
    auto mark = [&](std::uint32_t c) {
      for (auto j : adj_[c])
        if (occ_[j] >= 0) out.insert(static_cast<std::uint32_t>(occ_[j]));
    };
    mark(cell);
    for (auto c : route) mark(c);
    std::vector<std::uint32_t> first(out.begin(), out.end());
    for (auto v : first)
      for (auto j : adj_[pos_[v]])
        if (occ_[j] == kFree) mark(j);
    return {out.begin(), out.end()};
  }

  /// Cost after tentatively placing `b` at `cell`, reached from `a` via
  /// `route`. Only the neighbourhood of the changed cells can change its
  /// congestion, so B is updated there.
  std::pair<double, bool> score(std::uint32_t a, std::uint32_t b, std::uint32_t cell,
                                const std::vector<std::uint32_t>& route) {
    auto near = neighbourhood(a, cell, route);
    const auto before = unmatched(near);
    for (auto c : route) occ_[c] = kAux;
    place(b, cell);
    --open_[a];
    --open_[b];
    near.push_back(b);
    const auto after = unmatched(near);
    ++open_[a];
    ++open_[b];
    pos_[b] = kUnplaced;
    occ_[cell] = kFree;
    for (auto c : route) occ_[c] = kFree;
    const auto b_total = static_cast<std::int64_t>(congestion_) + std::int64_t(after) - std::int64_t(before);
    const double h = heuristic_cost(mapped_ + 1, aux_ + route.size(),
                                    static_cast<std::size_t>(std::max<std::int64_t>(0, b_total)), opt_) +
                     opt_.crowding * double(crowding(cell)) + opt_.beta * double(closure_estimate(a, b, cell)) +
                     (anchor_[b] ? opt_.pull * grid_distance(cell, *anchor_[b]) : 0.0);
    return {h, after > before};
  }

  /// Lattice distance still to bridge from `cell` to the placed partners
  /// of `b` other than `a`: a lower bound on future route cells.
  std::uint32_t closure_estimate(std::uint32_t a, std::uint32_t b, std::uint32_t cell) const {
    const auto p = layer_.pos(cell);
    std::uint32_t total = 0;
    for (const auto& sl : fg_.nodes[b].slots) {
      if (sl.use != SlotUse::Fusion) continue;
      const auto& fe = fg_.fusion_edges[sl.fusion];
      const auto w = fe.a.node == b ? fe.b.node : fe.a.node;
      if (w == a || pos_[w] == kUnplaced) continue;
      const auto q = layer_.pos(pos_[w]);
      const auto d = std::uint32_t(std::abs(int(p.row) - int(q.row)) + std::abs(int(p.col) - int(q.col)));
      total += d > 0 ? d - 1 : 0;
    }
    return total;
  }

  /// Manhattan distance on the generator grid between a lattice cell and a
  /// physical (row, col).
  double grid_distance(std::uint32_t cell, const std::pair<std::uint32_t, std::uint32_t>& to) const {
    const auto c = layer_.to_cell(layer_.pos(cell));
    return std::abs(double(c.row) - double(to.first)) + std::abs(double(c.col) - double(to.second));
  }

  /// Connected components of the fusion graph and the mean target of the
  /// anchored states in each.
  void component_anchor() {
    comp_.assign(fg_.size(), kUnplaced);
    std::vector<std::vector<std::uint32_t>> adj(fg_.size());
    for (const auto& e : fg_.fusion_edges) {
      adj[e.a.node].push_back(e.b.node);
      adj[e.b.node].push_back(e.a.node);
    }
    std::uint32_t n = 0;
    for (std::uint32_t s = 0; s < fg_.size(); ++s) {
      if (comp_[s] != kUnplaced) continue;
      double r = 0, c = 0;
      std::uint32_t k = 0;
      std::vector<std::uint32_t> st{s};
      comp_[s] = n;
      while (!st.empty()) {
        const auto x = st.back();
        st.pop_back();
        if (anchor_[x]) {
          r += anchor_[x]->first;
          c += anchor_[x]->second;
          ++k;
        }
        for (auto y : adj[x])
          if (comp_[y] == kUnplaced) {
            comp_[y] = n;
            st.push_back(y);
          }
      }
      comp_anchor_.push_back(k ? std::optional<std::pair<std::uint32_t, std::uint32_t>>(
                                     {std::uint32_t(r / k + 0.5), std::uint32_t(c / k + 0.5)})
                               : std::nullopt);
      ++n;
    }
  }

  void refresh_congestion() {
    std::vector<std::uint32_t> all(fg_.size());
    for (std::uint32_t v = 0; v < fg_.size(); ++v) all[v] = v;
    congestion_ = unmatched(all);
  }

#ifdef MBQC_MAPPER_DEBUG
  void dump(std::uint32_t a) const {
    const auto p = layer_.pos(pos_[a]);
    std::fprintf(stderr, "stuck node %u at (%u,%u) open %u mapped %zu\n", a, p.row, p.col, open_[a], mapped_);
    for (int r = int(p.row) - 6; r <= int(p.row) + 6; ++r) {
      for (int c = int(p.col) - 10; c <= int(p.col) + 10; ++c) {
        if (r < 0 || c < 0 || r >= int(layer_.rows()) || c >= int(layer_.cols())) { std::fprintf(stderr, "    "); continue; }
        auto o = occ_[layer_.index({std::uint32_t(r), std::uint32_t(c)})];
        if (o == kFree) std::fprintf(stderr, "   .");
        else if (o == kAux) std::fprintf(stderr, "   +");
        else std::fprintf(stderr, "%3d%c", o, open_[o] ? '*' : ' ');
      }
      std::fprintf(stderr, "\n");
    }
  }
#endif
  std::size_t mapped_ = 0;
  std::size_t aux_ = 0;
  std::size_t congestion_ = 0;
  const FusionGraph& fg_;
  ExtendedLayer layer_;
  MapperOptions opt_;
  std::vector<std::int32_t> occ_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint32_t> open_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<bool> urgent_;
  std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> anchor_;
  std::vector<std::uint32_t> comp_;
  std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> comp_anchor_;
  std::vector<std::uint32_t> stuck_;
  bool boundary_seed_ = false;
};

/// Runs the mapper, restarting with the resource states that got walled in
/// marked urgent, until it succeeds or no new state can be promoted; then
/// tries once more with components seeded on the lattice boundary.
inline Layout map_with_restarts(const FusionGraph& fg, const ExtendedLayer& layer, const MapperOptions& opt,
                                const std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>>& anchors = {}) {
  std::vector<bool> urgent(fg.size(), false);
  for (std::uint32_t attempt = 0;; ++attempt) {
    RoundMapper m(fg, layer, opt, urgent, anchors);
    try {
      return m.run();
    } catch (const CapacityExhausted&) {
      bool promoted = false;
      for (auto v : m.stuck())
        if (!urgent[v]) urgent[v] = promoted = true;
      if (!promoted || attempt + 1 >= opt.restarts) break;
    }
  }
  // last resort: seed components on the lattice boundary
  return RoundMapper(fg, layer, opt, urgent, anchors, true).run();
}

}  // namespace detail

/// Greedy placement and routing of a fusion graph on an extended layer.
/// Throws CapacityExhausted when the lattice cannot hold it.
/// Cut-edge ports are mapped like pendant edges to an exit resource state,
/// so every port keeps a way out of the round's layout.
/// Exits with a target are pulled toward it (their partner port is already
/// placed in an earlier round).
inline Layout map_round(const FusionGraph& fg, const ExtendedLayer& layer, const MapperOptions& opt = {},
                        const PortTargets& targets = {}) {
  if (fg.port_map.empty()) return detail::map_with_restarts(fg, layer, opt);
  FusionGraph aug = fg;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> stubs;  // local id -> stub fusion edge
  std::vector<std::optional<std::pair<std::uint32_t, std::uint32_t>>> anchors(fg.size());
  for (const auto& [local, port] : fg.port_map) {
    const auto stub = aug.add_node(std::nullopt);
    stubs.emplace_back(local, add_fusion(aug, port, Port{stub, 0}, false));
    auto it = targets.find(local);
    anchors.push_back(it == targets.end() ? std::nullopt : std::optional(it->second));
  }
  auto full = detail::map_with_restarts(aug, layer, opt, anchors);
  Layout out{layer, {}, {}, {}, {}};
  out.placement.assign(full.placement.begin(), full.placement.begin() + fg.size());
  for (auto& [e, route] : full.routes)
    if (e < fg.fusion_edges.size()) out.routes[e] = route;
  for (const auto& [local, e] : stubs) {
    auto cells = full.routes.at(e);
    cells.push_back(full.placement.at(aug.fusion_edges[e].b.node));
    out.exits[local] = std::move(cells);
  }
  for (const auto& [e, route] : out.routes) out.aux_cells.insert(out.aux_cells.end(), route.begin(), route.end());
  std::sort(out.aux_cells.begin(), out.aux_cells.end());
  return out;
}

/// Layout invariants; returns one message per violation (empty when legal).
inline std::vector<std::string> audit_layout(const FusionGraph& fg, const Layout& l) {
  std::vector<std::string> bad;
  const auto& L = l.layer;
  std::vector<std::int32_t> owner(L.size(), -1);  // resource node or -(edge + 2)
  if (l.placement.size() != fg.size()) return {"placement size mismatch"};
  for (std::uint32_t v = 0; v < fg.size(); ++v) {
    const auto c = l.placement[v];
    if (c >= L.size()) {
      bad.push_back("resource state " + std::to_string(v) + " off the lattice");
      continue;
    }
    if (owner[c] != -1) bad.push_back("cell " + std::to_string(c) + " hosts two resource states");
    owner[c] = static_cast<std::int32_t>(v);
    if (fg.nodes[v].fusion_degree() > 3) bad.push_back("resource state " + std::to_string(v) + " uses more than 3 slots");
  }
  auto adjacent = [&](std::uint32_t x, std::uint32_t y) {
    const auto a = L.adjacent(x);
    return std::find(a.begin(), a.end(), y) != a.end();
  };
  if (l.routes.size() != fg.fusion_edges.size()) bad.push_back("not every fusion edge is routed");
  for (const auto& [e, route] : l.routes) {
    if (e >= fg.fusion_edges.size()) {
      bad.push_back("route for unknown fusion edge");
      continue;
    }
    const auto& fe = fg.fusion_edges[e];
    std::vector<std::uint32_t> path{l.placement[fe.a.node]};
    path.insert(path.end(), route.begin(), route.end());
    path.push_back(l.placement[fe.b.node]);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (!adjacent(path[i], path[i + 1])) bad.push_back("route of edge " + std::to_string(e) + " is not contiguous");
    for (auto c : route) {
      if (c >= L.size()) {
        bad.push_back("route cell off the lattice");
        continue;
      }
      if (owner[c] != -1) bad.push_back("cell " + std::to_string(c) + " is shared (route crossing)");
      owner[c] = -static_cast<std::int32_t>(e) - 2;
    }
  }
  std::vector<std::uint32_t> aux;
  for (std::uint32_t c = 0; c < L.size(); ++c)
    if (owner[c] <= -2) aux.push_back(c);
  if (l.exits.size() != fg.port_map.size()) bad.push_back("not every cut-edge port has an exit");
  for (const auto& [local, cells] : l.exits) {
    auto it = fg.port_map.find(local);
    if (it == fg.port_map.end() || cells.empty()) {
      bad.push_back("exit for unknown port");
      continue;
    }
    std::uint32_t prev = l.placement[it->second.node];
    for (auto c : cells) {
      if (c >= L.size()) {
        bad.push_back("exit cell off the lattice");
        break;
      }
      if (!adjacent(prev, c)) bad.push_back("exit of port " + std::to_string(local) + " is not contiguous");
      if (owner[c] != -1) bad.push_back("cell " + std::to_string(c) + " is shared (exit crossing)");
      owner[c] = std::numeric_limits<std::int32_t>::min();
      prev = c;
    }
  }
  if (aux != l.aux_cells) bad.push_back("aux cell list does not match routes");
  return bad;
}

}  // namespace mbqc
