#pragma once

// Time assignment, inter-round routing ("shuffling") and the concrete
// per-cycle operation stream of a compiled program.
//
// Round r occupies the physical layers [T_r, T_r + k_r). Its nodes are
// measured after its last layer: a node in dependency layer l is measured in
// cycle T_r + k_r - 1 + (l - a_r), with a_r the round's first measured
// layer. Cut edges are joined by chains of routing resource states found by
// a breadth-first search over the free generator-cycles of the whole
// space-time volume; shuffle layers between rounds are added only when a
// pair cannot be routed otherwise.

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
#include "mbqc/graphstate.hpp"
#include "mbqc/hardware.hpp"
#include "mbqc/mapper.hpp"
#include "mbqc/partition.hpp"

namespace mbqc {

/// One mapped round and its place in time.
struct RoundPlan {
  Round round;
  FusionGraph fg;
  Layout layout;                   // lattice of `layout.layer`, whose t0 is the round start
  std::uint32_t measured_first = 0;  // first dependency layer with a measured node
  std::uint32_t measured_span = 0;   // dependency layers holding measured nodes (0 if none)
  std::uint32_t shuffle_before = 0;  // shuffle layers reserved ahead of this round

  std::uint32_t start() const { return layout.layer.t0; }
  std::uint32_t span() const { return layout.layer.span; }
  std::uint32_t last_layer() const { return start() + span() - 1; }
  /// Cycle of the last measurement (the last layer when nothing is measured).
  std::uint32_t last_measurement() const { return last_layer() + (measured_span ? measured_span - 1 : 0); }

  Cell cell_of(std::uint32_t rn) const { return layout.cell_of(rn); }
};

inline void set_measured_span(RoundPlan& p, const GraphState& g, const DependencyLayers& dl) {
  std::uint32_t lo = std::numeric_limits<std::uint32_t>::max(), hi = 0;
  for (auto v : p.round.nodes) {
    if (g.nodes[v].output) continue;
    lo = std::min(lo, dl.layer_of[v]);
    hi = std::max(hi, dl.layer_of[v]);
  }
  p.measured_first = lo == std::numeric_limits<std::uint32_t>::max() ? 0 : lo;
  p.measured_span = lo == std::numeric_limits<std::uint32_t>::max() ? 0 : hi - lo + 1;
}

/// Measurement cycle of graph-state node v in plan p (nullopt for outputs).
inline std::optional<std::uint32_t> measurement_cycle(const RoundPlan& p, const GraphState& g,
                                                      const DependencyLayers& dl, NodeId v) {
  if (g.nodes[v].output) return std::nullopt;
  return p.last_layer() + (dl.layer_of[v] - p.measured_first);
}

/// Places rounds back to back: round r+1 starts after the shuffle layers
/// reserved for it and late enough that its last layer follows every
/// measurement of round r.
inline void assign_times(std::vector<RoundPlan>& plans) {
  std::uint32_t t = 0;
  for (std::size_t r = 0; r < plans.size(); ++r) {
    auto& p = plans[r];
    std::uint32_t start = t + p.shuffle_before;
    if (r > 0) {
      const auto need = plans[r - 1].last_measurement() + 1;  // earliest last layer
      if (start + p.span() - 1 < need) start = need - (p.span() - 1);
    }
    p.layout.layer.t0 = start;
    t = p.last_layer() + 1;
  }
}

/// A cut edge: port of `u` (earlier round) to port of `v` (later round).
struct CrossPair {
  NodeId u = 0, v = 0;
  std::uint32_t round_u = 0, round_v = 0;
  Port port_u, port_v;          // in the respective fusion graphs
  Cell rn_u, rn_v;              // cells of the port resource states
  std::vector<Cell> exit_u, exit_v;  // in-round exit cells, leading away from each port
  Cell cell_u, cell_v;          // last exit cells, where the shuffle route attaches
};

/// Routing resource states joining a cross pair through the free volume,
/// in path order from u's exit to v's exit.
struct CrossRoute {
  CrossPair pair;
  std::vector<Cell> cells;

  /// Whole chain from u's port resource state to v's, exits included.
  std::vector<Cell> chain() const {
    std::vector<Cell> out = pair.exit_u;
    out.insert(out.end(), cells.begin(), cells.end());
    out.insert(out.end(), pair.exit_v.rbegin(), pair.exit_v.rend());
    return out;
  }
  std::size_t fusion_count() const { return pair.exit_u.size() + cells.size() + pair.exit_v.size() + 1; }
};

inline std::vector<Cell> exit_cells(const RoundPlan& p, std::uint32_t local) {
  std::vector<Cell> out;
  const auto& L = p.layout.layer;
  for (auto c : p.layout.exits.at(local)) out.push_back(L.to_cell(L.pos(c)));
  return out;
}

inline std::vector<CrossPair> cross_pairs(const std::vector<RoundPlan>& plans) {
  std::vector<CrossPair> out;
  for (std::uint32_t r = 0; r < plans.size(); ++r) {
    const auto& p = plans[r];
    for (const auto& vn : p.round.virtual_nodes) {
      if (vn.round <= r) continue;  // each pair is emitted from its earlier side
      const auto& q = plans.at(vn.round);
      const VirtualNode* back = nullptr;
      for (const auto& wn : q.round.virtual_nodes)
        if (wn.original == vn.anchor && wn.anchor == vn.original) back = &wn;
      if (!back) throw InternalError("cut edge without a partner virtual node");
      CrossPair cp;
      cp.u = vn.anchor;
      cp.v = vn.original;
      cp.round_u = r;
      cp.round_v = vn.round;
      cp.port_u = p.fg.port_map.at(vn.local);
      cp.port_v = q.fg.port_map.at(back->local);
      cp.rn_u = p.cell_of(cp.port_u.node);
      cp.rn_v = q.cell_of(cp.port_v.node);
      cp.exit_u = exit_cells(p, vn.local);
      cp.exit_v = exit_cells(q, back->local);
      cp.cell_u = cp.exit_u.back();
      cp.cell_v = cp.exit_v.back();
      out.push_back(cp);
    }
  }
  return out;
}

/// Occupancy of the space-time volume [0, cycles) x rows x cols.
class Volume {
 public:
  Volume(const HardwareModel& m, std::uint32_t cycles)
      : m_(m), cycles_(cycles), used_(std::size_t(cycles) * m.rows * m.cols, 0) {}

  std::uint32_t cycles() const { return cycles_; }
  bool inside(const Cell& c) const { return c.t < cycles_ && c.row < m_.rows && c.col < m_.cols; }
  std::size_t index(const Cell& c) const { return (std::size_t(c.t) * m_.rows + c.row) * m_.cols + c.col; }
  Cell cell(std::size_t i) const {
    const auto per = std::size_t(m_.rows) * m_.cols;
    return {std::uint32_t(i / per), std::uint32_t(i % per / m_.cols), std::uint32_t(i % m_.cols)};
  }
  bool used(const Cell& c) const { return used_[index(c)] != 0; }
  void occupy(const Cell& c) {
    if (!inside(c)) throw InternalError("cell outside the schedule volume");
    if (used_[index(c)]) throw InternalError("generator cycle assigned twice");
    used_[index(c)] = 1;
  }

  /// Cells that can fuse with `c`: spatial neighbours in the same cycle and
  /// the same generator up to `delay_limit` cycles away.
  template <class F>
  void for_each_link(const Cell& c, F&& f) const {
    if (c.row > 0) f(Cell{c.t, c.row - 1, c.col});
    if (c.row + 1 < m_.rows) f(Cell{c.t, c.row + 1, c.col});
    if (c.col > 0) f(Cell{c.t, c.row, c.col - 1});
    if (c.col + 1 < m_.cols) f(Cell{c.t, c.row, c.col + 1});
    for (std::uint32_t d = 1; d <= m_.delay_limit; ++d) {
      if (c.t >= d) f(Cell{c.t - d, c.row, c.col});
      if (c.t + d < cycles_) f(Cell{c.t + d, c.row, c.col});
    }
  }

  bool linked(const Cell& a, const Cell& b) const {
    if (a.t == b.t) return (a.row == b.row ? diff(a.col, b.col) : a.col == b.col ? diff(a.row, b.row) : 0) == 1;
    return a.row == b.row && a.col == b.col && diff(a.t, b.t) <= m_.delay_limit;
  }

 private:
  static std::uint32_t diff(std::uint32_t x, std::uint32_t y) { return x > y ? x - y : y - x; }
  HardwareModel m_;
  std::uint32_t cycles_;
  std::vector<std::uint8_t> used_;
};

/// Cheapest chain of free generator-cycles joining `from` to `to`; each
/// cell costs `cost(cell)` (at least 1), so with unit costs this is the
/// chain with the fewest routing resource states.
template <class Cost>
std::optional<std::vector<Cell>> route_in_volume(const Volume& vol, const Cell& from, const Cell& to, Cost&& cost) {
  if (vol.linked(from, to)) return std::vector<Cell>{};
  constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
  std::map<Cell, std::pair<std::uint32_t, Cell>> best;  // cell -> (distance, parent)
  using Item = std::pair<std::uint32_t, Cell>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto relax = [&](const Cell& c, std::uint32_t d, const Cell& parent) {
    auto it = best.find(c);
    if (it != best.end() && it->second.first <= d) return;
    best[c] = {d, parent};
    pq.push({d, c});
  };
  vol.for_each_link(from, [&](const Cell& c) {
    if (!vol.used(c)) relax(c, cost(c), from);
  });
  std::optional<Cell> last;
  std::uint32_t bound = kInf;
  while (!pq.empty()) {
    const auto [d, c] = pq.top();
    pq.pop();
    if (d >= bound) break;
    if (best.at(c).first != d) continue;
    if (vol.linked(c, to)) {
      bound = d;
      last = c;
      break;
    }
    vol.for_each_link(c, [&](const Cell& n) {
      if (!vol.used(n)) relax(n, d + cost(n), c);
    });
  }
  if (!last) return std::nullopt;
  std::vector<Cell> path;
  for (auto x = *last; !(x == from); x = best.at(x).second) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

inline std::optional<std::vector<Cell>> route_in_volume(const Volume& vol, const Cell& from, const Cell& to) {
  return route_in_volume(vol, from, to, [](const Cell&) { return 1u; });
}

/// Marks every resource state of the mapped rounds in the volume.
inline Volume occupied_volume(const std::vector<RoundPlan>& plans, const HardwareModel& m, std::uint32_t cycles) {
  Volume vol(m, cycles);
  for (const auto& p : plans) {
    for (std::uint32_t rn = 0; rn < p.fg.size(); ++rn) vol.occupy(p.cell_of(rn));
    for (auto c : p.layout.aux_cells) vol.occupy(p.layout.layer.to_cell(p.layout.layer.pos(c)));
    for (const auto& [local, cells] : p.layout.exits)
      for (auto c : cells) vol.occupy(p.layout.layer.to_cell(p.layout.layer.pos(c)));
  }
  return vol;
}

struct ShuffleResult {
  std::vector<CrossRoute> routes;
  std::optional<CrossPair> failed;  // first pair that could not be routed
  bool failed_at_u = false;         // the blocked end is u's exit (else v's)
};

/// Routes every cut edge, shortest pairs first, through free cells of the
/// volume; pairs listed in `first` (typically ones that failed before) go
/// ahead of all others. Cells next to exits that are still waiting for
/// their route cost extra, so earlier routes do not seal them in.
inline ShuffleResult shuffle(const std::vector<RoundPlan>& plans, const HardwareModel& m, std::uint32_t cycles,
                             const std::set<std::pair<NodeId, NodeId>>& first = {}) {
  constexpr std::uint32_t kGuard = 8;
  auto vol = occupied_volume(plans, m, cycles);
  auto pairs = cross_pairs(plans);
  auto dist = [](const CrossPair& p) {
    auto d = [](std::uint32_t x, std::uint32_t y) { return x > y ? x - y : y - x; };
    return d(p.cell_u.t, p.cell_v.t) + d(p.cell_u.row, p.cell_v.row) + d(p.cell_u.col, p.cell_v.col);
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    auto key = [&](const CrossPair& p) { return std::make_tuple(!first.count({p.u, p.v}), dist(p), p.u, p.v); };
    return key(a) < key(b);
  });
  std::map<Cell, std::uint32_t> guarded;  // free cell -> pending exits it touches
  auto guard = [&](const Cell& exit, int delta) {
    vol.for_each_link(exit, [&](const Cell& c) {
      if (vol.used(c)) return;
      auto& g = guarded[c];
      g = static_cast<std::uint32_t>(static_cast<int>(g) + delta);
    });
  };
  for (const auto& p : pairs) {
    guard(p.cell_u, 1);
    guard(p.cell_v, 1);
  }
  ShuffleResult out;
  for (const auto& p : pairs) {
    guard(p.cell_u, -1);
    guard(p.cell_v, -1);
    auto path = route_in_volume(vol, p.cell_u, p.cell_v, [&](const Cell& c) {
      auto it = guarded.find(c);
      return 1 + (it == guarded.end() ? 0 : kGuard * it->second);
    });
    if (!path) {
      out.failed = p;
      std::uint32_t free_u = 0;
      vol.for_each_link(p.cell_u, [&](const Cell& c) { free_u += !vol.used(c); });
      out.failed_at_u = free_u == 0;
      return out;
    }
    for (const auto& c : *path) vol.occupy(c);
    out.routes.push_back({p, std::move(*path)});
  }
  return out;
}

enum class OpKind { Fuse, Measure, Discard, Output, Delay };

inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::Fuse: return "fuse";
    case OpKind::Measure: return "measure";
    case OpKind::Discard: return "discard";
    case OpKind::Output: return "output";
    case OpKind::Delay: return "delay";
  }
  return "?";
}

/// Life of one photon: created with its resource state at `born`, stored
/// in a delay line until `action`, then fused, measured, discarded or
/// emitted as an output.
struct SlotRecord {
  Cell cell;
  std::uint32_t slot = 0;
  std::uint32_t born = 0;
  std::uint32_t action = 0;
  OpKind kind = OpKind::Discard;
  std::optional<Cell> partner;
  std::uint32_t partner_slot = 0;
  std::optional<double> angle;  // Measure only
  std::optional<NodeId> node;   // graph-state node of a Measure or Output

  std::uint32_t wait() const { return action - born; }
};

struct ScheduleOp {
  std::uint32_t t = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint32_t slot = 0;
  OpKind kind = OpKind::Delay;
  std::optional<Cell> partner;
  std::uint32_t partner_slot = 0;
  std::optional<double> angle;
  std::optional<NodeId> node;
};

struct Schedule {
  std::vector<SlotRecord> slots;                       // sorted by (cell, slot)
  std::vector<std::optional<std::uint32_t>> measured;  // graph-state node -> measurement cycle
  std::uint32_t physical_depth = 0;
  std::size_t num_fusions = 0;

  /// Per-cycle operation stream: each photon's Delay cycles [born, action)
  /// followed by its terminal operation; sorted by (t, row, col, slot).
  std::vector<ScheduleOp> ops() const {
    std::vector<ScheduleOp> out;
    for (const auto& r : slots) {
      for (auto t = r.born; t < r.action; ++t)
        out.push_back({t, r.cell.row, r.cell.col, r.slot, OpKind::Delay, std::nullopt, 0, std::nullopt, std::nullopt});
      out.push_back({r.action, r.cell.row, r.cell.col, r.slot, r.kind, r.partner, r.partner_slot, r.angle, r.node});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.t, a.row, a.col, a.slot) < std::tie(b.t, b.row, b.col, b.slot);
    });
    return out;
  }
};

namespace detail {

class ScheduleBuilder {
 public:
  explicit ScheduleBuilder(const HardwareModel& m) : m_(m) {}

  void fuse(const Cell& a, std::uint32_t sa, const Cell& b, std::uint32_t sb) {
    auto d = [](std::uint32_t x, std::uint32_t y) { return x > y ? x - y : y - x; };
    const bool spatial = a.t == b.t && d(a.row, b.row) + d(a.col, b.col) == 1;
    const bool temporal = a.row == b.row && a.col == b.col && a.t != b.t && d(a.t, b.t) <= m_.delay_limit;
    if (!spatial && !temporal) throw InternalError("fusion between resource states that are not coupled");
    const auto t = std::max(a.t, b.t);
    put({a, sa, a.t, t, OpKind::Fuse, b, sb, std::nullopt, std::nullopt});
    put({b, sb, b.t, t, OpKind::Fuse, a, sa, std::nullopt, std::nullopt});
    ++fusions_;
  }
  void single(const Cell& c, std::uint32_t s, std::uint32_t action, OpKind kind, std::optional<double> angle = {},
              std::optional<NodeId> node = {}) {
    put({c, s, c.t, action, kind, std::nullopt, 0, angle, node});
  }
  /// Routing resource state: slot 0 toward the path start, slot 1 toward
  /// the end, slot 2 measured out in Z.
  void discard_spare(const Cell& c) { single(c, 2, c.t, OpKind::Discard); }

  /// Fusion chain: `a` -> path cells -> `b`.
  void chain(const Cell& a, std::uint32_t sa, const std::vector<Cell>& path, const Cell& b, std::uint32_t sb) {
    Cell prev = a;
    std::uint32_t prev_slot = sa;
    for (const auto& c : path) {
      fuse(prev, prev_slot, c, 0);
      discard_spare(c);
      prev = c;
      prev_slot = 1;
    }
    fuse(prev, prev_slot, b, sb);
  }

  Schedule finish(std::size_t num_nodes, const std::map<NodeId, std::uint32_t>& measured) {
    Schedule s;
    s.slots.reserve(slots_.size());
    std::vector<std::uint32_t> cycles;
    for (auto& [key, r] : slots_) {
      if (r.action < r.born) throw InternalError("photon used before it is created");
      for (auto t = r.born; t <= r.action; ++t) cycles.push_back(t);
      s.slots.push_back(r);
    }
    std::sort(cycles.begin(), cycles.end());
    s.physical_depth = static_cast<std::uint32_t>(std::unique(cycles.begin(), cycles.end()) - cycles.begin());
    s.num_fusions = fusions_;
    s.measured.assign(num_nodes, std::nullopt);
    for (auto [v, t] : measured) s.measured.at(v) = t;
    return s;
  }

 private:
  void put(SlotRecord r) {
    if (!in_grid(m_, r.cell) || r.slot >= 3) throw InternalError("photon outside the hardware");
    if (!slots_.emplace(std::make_pair(r.cell, r.slot), r).second)
      throw InternalError("photon assigned two operations");
  }
  HardwareModel m_;
  std::map<std::pair<Cell, std::uint32_t>, SlotRecord> slots_;
  std::size_t fusions_ = 0;
};

}  // namespace detail

/// Assigns an operation to every photon of the mapped rounds and the
/// inter-round routes. Plans must already carry their start cycles.
inline Schedule emit_schedule(const std::vector<RoundPlan>& plans, const std::vector<CrossRoute>& cross,
                              const GraphState& g, const DependencyLayers& dl, const HardwareModel& m) {
  detail::ScheduleBuilder b(m);
  std::map<NodeId, std::uint32_t> measured;
  for (const auto& p : plans) {
    const auto& fg = p.fg;
    const auto& L = p.layout.layer;
    auto cell_of_lattice = [&](std::uint32_t i) { return L.to_cell(L.pos(i)); };
    for (std::uint32_t e = 0; e < fg.fusion_edges.size(); ++e) {
      const auto& fe = fg.fusion_edges[e];
      std::vector<Cell> path;
      for (auto c : p.layout.routes.at(e)) path.push_back(cell_of_lattice(c));
      b.chain(p.cell_of(fe.a.node), fe.a.slot, path, p.cell_of(fe.b.node), fe.b.slot);
    }
    for (const auto& rn : fg.nodes) {
      const auto cell = p.cell_of(rn.id);
      for (std::uint32_t s = 0; s < 3; ++s) {
        const auto& slot = rn.slots[s];
        switch (slot.use) {
          case SlotUse::Fusion: break;  // emitted with its edge
          case SlotUse::Discard: b.single(cell, s, cell.t, OpKind::Discard); break;
          case SlotUse::Measure: {
            const auto v = rn.owner.value();
            if (slot.angle) {
              const auto t = *measurement_cycle(p, g, dl, v);
              b.single(cell, s, t, OpKind::Measure, slot.angle, v);
              measured[v] = t;
            } else {
              b.single(cell, s, p.last_layer(), OpKind::Output, std::nullopt, v);
            }
            break;
          }
          case SlotUse::Free: break;  // cross-round port, emitted with its route
        }
      }
    }
  }
  for (const auto& r : cross)
    b.chain(r.pair.rn_u, r.pair.port_u.slot, r.chain(), r.pair.rn_v, r.pair.port_v.slot);
  return b.finish(g.size(), measured);
}

/// Dependency ordering: every measured node is measured strictly after all its
/// measured prerequisites. One message per violation.
inline std::vector<std::string> dependency_violations(const Schedule& s, const GraphState& g) {
  std::vector<std::string> bad;
  const auto pre = prerequisites(g);
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.nodes[v].output) continue;
    if (!s.measured.at(v)) {
      bad.push_back("node " + std::to_string(v) + " is never measured");
      continue;
    }
    for (auto u : pre[v]) {
      if (g.nodes[u].output) continue;
      if (!s.measured.at(u) || *s.measured[u] >= *s.measured[v])
        bad.push_back("node " + std::to_string(v) + " measured no later than prerequisite " + std::to_string(u));
    }
  }
  return bad;
}

/// Delay bound: no photon waits more than `delay_limit` cycles.
inline std::vector<std::string> delay_violations(const Schedule& s, std::uint32_t delay_limit) {
  std::vector<std::string> bad;
  for (const auto& r : s.slots)
    if (r.wait() > delay_limit)
      bad.push_back("photon at (" + std::to_string(r.cell.t) + "," + std::to_string(r.cell.row) + "," +
                    std::to_string(r.cell.col) + ") slot " + std::to_string(r.slot) + " waits " +
                    std::to_string(r.wait()) + " cycles");
  return bad;
}

}  // namespace mbqc
