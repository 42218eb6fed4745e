#pragma once

// Temporal-spatial coupling model: a rows x cols grid of resource-state
// generators emitting one physical layer per clock cycle, spatial fusions
// between grid neighbours and temporal fusions through delay lines of at
// most `delay_limit` cycles. k consecutive layers flatten into one
// extended layer with a serpentine column order.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"

namespace mbqc {

struct HardwareModel {
  std::uint32_t rows = 1;
  std::uint32_t cols = 1;
  std::uint32_t delay_limit = 3;  // tau, in clock cycles
  std::uint32_t resource_size = 3;

  void validate() const {
    if (rows == 0 || cols == 0) throw InvalidInput("grid must have at least one row and column");
    if (delay_limit == 0) throw InvalidInput("delay limit must be at least 1");
    if (resource_size != 3) throw InvalidInput("only 3-qubit GHZ resource states are supported");
  }
};

struct Cell {
  std::uint32_t t = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline bool in_grid(const HardwareModel& m, const Cell& c) { return c.row < m.rows && c.col < m.cols; }

/// Spatial 4-neighbourhood in the same layer plus the same generator at
/// temporal distance 1..tau (past layers clipped at t = 0).
inline std::vector<Cell> neighbors(const HardwareModel& m, const Cell& c) {
  if (!in_grid(m, c)) throw InvalidInput("cell outside the grid");
  std::vector<Cell> out;
  if (c.row > 0) out.push_back({c.t, c.row - 1, c.col});
  if (c.row + 1 < m.rows) out.push_back({c.t, c.row + 1, c.col});
  if (c.col > 0) out.push_back({c.t, c.row, c.col - 1});
  if (c.col + 1 < m.cols) out.push_back({c.t, c.row, c.col + 1});
  for (std::uint32_t d = 1; d <= m.delay_limit; ++d) {
    if (c.t >= d) out.push_back({c.t - d, c.row, c.col});
    out.push_back({c.t + d, c.row, c.col});
  }
  return out;
}

/// Position on a flattened extended layer.
struct LatticePos {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  friend auto operator<=>(const LatticePos&, const LatticePos&) = default;
};

/// k consecutive physical layers [t0, t0 + k) flattened side by side; odd
/// offsets are mirrored so each layer boundary joins the same generator in
/// consecutive cycles. The flattened adjacency is therefore a plain
/// rows x (k * cols) grid whose boundary edges are the kept temporal links.
struct ExtendedLayer {
  HardwareModel model;
  std::uint32_t t0 = 0;
  std::uint32_t span = 1;

  std::uint32_t rows() const { return model.rows; }
  std::uint32_t cols() const { return span * model.cols; }
  std::uint32_t size() const { return rows() * cols(); }

  LatticePos to_lattice(const Cell& c) const {
    if (!in_grid(model, c) || c.t < t0 || c.t >= t0 + span) throw InvalidInput("cell outside the extended layer");
    const auto off = c.t - t0;
    return {c.row, off * model.cols + (off % 2 == 0 ? c.col : model.cols - 1 - c.col)};
  }

  Cell to_cell(const LatticePos& p) const {
    if (p.row >= rows() || p.col >= cols()) throw InvalidInput("position outside the extended layer");
    const auto off = p.col / model.cols;
    const auto c = p.col % model.cols;
    return {t0 + off, p.row, off % 2 == 0 ? c : model.cols - 1 - c};
  }

  std::uint32_t index(const LatticePos& p) const { return p.row * cols() + p.col; }
  LatticePos pos(std::uint32_t i) const { return {i / cols(), i % cols()}; }

  /// Temporal links kept inside the span, as lattice position pairs.
  std::vector<std::pair<LatticePos, LatticePos>> boundary_links() const {
    std::vector<std::pair<LatticePos, LatticePos>> out;
    for (std::uint32_t off = 0; off + 1 < span; ++off)
      for (std::uint32_t r = 0; r < rows(); ++r)
        out.push_back({{r, (off + 1) * model.cols - 1}, {r, (off + 1) * model.cols}});
    return out;
  }

  /// Lattice-adjacent positions (spatial edges and boundary stitches).
  std::vector<std::uint32_t> adjacent(std::uint32_t i) const {
    std::vector<std::uint32_t> out;
    const auto p = pos(i);
    if (p.row > 0) out.push_back(i - cols());
    if (p.row + 1 < rows()) out.push_back(i + cols());
    if (p.col > 0) out.push_back(i - 1);
    if (p.col + 1 < cols()) out.push_back(i + 1);
    return out;
  }

  Graph graph() const {
    Graph g(size());
    for (std::uint32_t i = 0; i < size(); ++i)
      for (auto j : adjacent(i))
        if (i < j) g.add_edge(i, j);
    return g;
  }
};

inline ExtendedLayer build_extended_layer(const HardwareModel& m, std::uint32_t t0, std::uint32_t k) {
  m.validate();
  if (k == 0) throw InvalidInput("extended layer needs at least one physical layer");
  if (k > m.delay_limit)
    throw InvalidInput("extended layer spans " + std::to_string(k) + " layers, delay limit is " +
                       std::to_string(m.delay_limit));
  return {m, t0, k};
}

}  // namespace mbqc
