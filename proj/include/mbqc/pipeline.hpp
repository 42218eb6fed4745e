#pragma once

// End-to-end compilation: circuit -> graph state -> planar rounds -> fusion
// graphs -> lattice layouts -> timed schedule.
//
// Each round is first tried on a single physical layer; when the lattice is
// too small the extended layer grows (up to the delay limit, and only while
// every photon of the round still meets it), and only then is the round
// split. Cut edges are routed through the free space-time volume, with
// extra shuffle layers inserted when a pair cannot be routed.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbqc/circuit.hpp"
#include "mbqc/common.hpp"
#include "mbqc/fusiongraph.hpp"
#include "mbqc/graphstate.hpp"
#include "mbqc/hardware.hpp"
#include "mbqc/mapper.hpp"
#include "mbqc/partition.hpp"
#include "mbqc/schedule.hpp"

namespace mbqc {

struct CompileOptions {
  HardwareModel hardware;
  MapperOptions mapper;
  std::uint32_t max_shuffle_layers = 64;  // total extra layers before giving up on routing
};

struct CompileResult {
  Circuit normalized;
  GraphState graph;
  DependencyLayers layers;
  std::vector<RoundPlan> plans;
  std::vector<CrossRoute> cross;
  Schedule schedule;

  std::uint32_t shuffle_layers() const {
    std::uint32_t s = 0;
    for (const auto& p : plans) s += p.shuffle_before;
    return s;
  }
};

namespace detail {

/// Largest extended-layer span usable by a round whose measured nodes
/// cover `measured_span` dependency layers: a root created in the first
/// layer waits span - 1 + measured_span - 1 cycles for its measurement.
inline std::uint32_t max_span(const HardwareModel& m, std::uint32_t measured_span) {
  const auto d = std::max<std::uint32_t>(measured_span, 1);
  if (d > m.delay_limit + 1) return 0;
  return std::min(m.delay_limit, m.delay_limit + 2 - d);
}

struct MappedRound {
  FusionGraph fg;
  Layout layout;
};

/// Maps one round on the smallest extended layer that holds it.
inline std::optional<MappedRound> map_with_growth(const Round& r, const GraphState& g, std::uint32_t measured_span,
                                                  const PortTargets& targets, const CompileOptions& opt) {
  auto fg = generate_fusion_graph(r, g);
  const auto kmax = max_span(opt.hardware, measured_span);
  for (std::uint32_t k = 1; k <= kmax; ++k) {
    try {
      auto layout = map_round(fg, build_extended_layer(opt.hardware, 0, k), opt.mapper, targets);
      return MappedRound{std::move(fg), std::move(layout)};
    } catch (const CapacityExhausted&) {
    }
  }
  return std::nullopt;
}

/// Exit targets of round r: for every cut edge into an already mapped
/// round, the generator hosting the partner port's exit.
inline PortTargets exit_targets(const Round& r, const std::vector<RoundPlan>& done) {
  PortTargets out;
  for (const auto& vn : r.virtual_nodes) {
    if (vn.round >= done.size()) continue;
    const auto& q = done[vn.round];
    for (const auto& wn : q.round.virtual_nodes)
      if (wn.original == vn.anchor && wn.anchor == vn.original) {
        const auto& L = q.layout.layer;
        const auto c = L.to_cell(L.pos(q.layout.exits.at(wn.local).back()));
        out[vn.local] = {c.row, c.col};
      }
  }
  return out;
}

/// Splits a node set in two, by dependency layer when it spans several,
/// otherwise by node id.
inline std::pair<std::vector<NodeId>, std::vector<NodeId>> split_round(const std::vector<NodeId>& nodes,
                                                                       const DependencyLayers& dl) {
  std::uint32_t lo = std::numeric_limits<std::uint32_t>::max(), hi = 0;
  for (auto v : nodes) {
    lo = std::min(lo, dl.layer_of[v]);
    hi = std::max(hi, dl.layer_of[v]);
  }
  std::vector<NodeId> a, b;
  if (hi > lo) {
    const auto mid = lo + (hi - lo + 1) / 2;  // layers [lo, mid) first
    for (auto v : nodes) (dl.layer_of[v] < mid ? a : b).push_back(v);
  } else {
    const auto half = nodes.size() / 2;
    a.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(half));
    b.assign(nodes.begin() + static_cast<std::ptrdiff_t>(half), nodes.end());
  }
  return {std::move(a), std::move(b)};
}

}  // namespace detail

/// Compiles a graph state. Throws CapacityExhausted when a single node
/// cannot be placed or cut edges cannot be routed within the shuffle budget.
inline CompileResult compile_graph(GraphState g, const CompileOptions& opt) {
  opt.hardware.validate();
  CompileResult res;
  res.layers = balance_layers(g, dependency_layers(g));
  res.graph = std::move(g);
  const auto& gs = res.graph;
  const auto& dl = res.layers;
  if (gs.size() == 0) return res;

  // Rounds may not span more dependency layers than one photon can wait.
  PartitionOptions popt;
  popt.max_layers_per_round = opt.hardware.delay_limit + 1;
  auto sets = partition_nodes(gs, dl, popt);

  // Rounds are mapped in order so each can pull its exits toward the
  // partner exits of earlier rounds. A round that does not fit is split and
  // mapping resumes from it; the mapped prefix keeps its node sets, hence
  // its fusion graphs and layouts.
  auto rounds = build_rounds(gs, dl, sets);
  for (std::size_t r = 0; r < sets.size();) {
    RoundPlan p;
    p.round = rounds[r];
    set_measured_span(p, gs, dl);
    auto mapped = detail::map_with_growth(p.round, gs, p.measured_span, detail::exit_targets(p.round, res.plans), opt);
    if (mapped) {
      p.fg = std::move(mapped->fg);
      p.layout = std::move(mapped->layout);
      res.plans.push_back(std::move(p));
      ++r;
      continue;
    }
    if (sets[r].size() <= 1)
      throw CapacityExhausted("node " + std::to_string(sets[r].empty() ? 0 : sets[r][0]) + " does not fit on a " +
                              std::to_string(opt.hardware.rows) + "x" + std::to_string(opt.hardware.cols) + " grid");
    auto [lo, hi] = detail::split_round(sets[r], dl);
    sets[r] = std::move(hi);
    sets.insert(sets.begin() + static_cast<std::ptrdiff_t>(r), std::move(lo));
    rounds = build_rounds(gs, dl, sets);
    for (std::size_t i = 0; i < res.plans.size(); ++i) res.plans[i].round = rounds[i];  // renumbered neighbours
  }

  // Failures of the same pair walk the inserted layer backwards through the
  // gaps between its rounds, so a long cut edge gets free stepping stones.
  std::map<std::pair<NodeId, NodeId>, std::uint32_t> failures;
  for (std::uint32_t extra = 0;; ++extra) {
    assign_times(res.plans);
    const auto cycles = res.plans.back().last_measurement() + 1;
    std::set<std::pair<NodeId, NodeId>> first;
    for (const auto& [pair, n] : failures) first.insert(pair);
    auto sh = shuffle(res.plans, opt.hardware, cycles, first);
    if (!sh.failed) {
      res.cross = std::move(sh.routes);
      break;
    }
    if (extra >= opt.max_shuffle_layers)
      throw CapacityExhausted("cannot route the cut edge between nodes " + std::to_string(sh.failed->u) + " and " +
                              std::to_string(sh.failed->v));
    const auto& f = *sh.failed;
    std::uint32_t r = f.round_u + 1;  // a walled-in exit first needs fresh temporal links
    const auto k = failures[{f.u, f.v}]++;
    if (!sh.failed_at_u) r = f.round_v - k % (f.round_v - f.round_u);
    res.plans[r].shuffle_before += 1;
  }

  res.schedule = emit_schedule(res.plans, res.cross, gs, dl, opt.hardware);
  return res;
}

/// Compiles a circuit. A circuit without gates leaves its qubits where they
/// are: no photon is consumed and the schedule is empty.
inline CompileResult compile(const Circuit& c, const CompileOptions& opt) {
  auto n = normalize_to_jcz(c);
  if (n.gates.empty()) {
    opt.hardware.validate();
    CompileResult res;
    res.graph = translate(n);
    res.layers = dependency_layers(res.graph);
    res.schedule.measured.assign(res.graph.size(), std::nullopt);
    res.normalized = std::move(n);
    return res;
  }
  auto res = compile_graph(translate(n), opt);
  res.normalized = std::move(n);
  return res;
}

}  // namespace mbqc
