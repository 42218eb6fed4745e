#pragma once

// Pictures of mapped rounds. A panel is one extended layer drawn flat:
// rows x (span * cols) cells with a boundary between physical layers.
// Resource states that synthesize a graph-state node are blue dots,
// auxiliary routing states pink; nodes still waiting for a fusion with
// another round are "incomplete" and drawn hollow. Exit cells (the start
// of an inter-round route) are drawn as small orange squares.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/schedule.hpp"

namespace mbqc {

enum class PanelCellKind { Node, Incomplete, Aux, Exit };

inline const char* to_string(PanelCellKind k) {
  switch (k) {
    case PanelCellKind::Node: return "node";
    case PanelCellKind::Incomplete: return "incomplete";
    case PanelCellKind::Aux: return "aux";
    case PanelCellKind::Exit: return "exit";
  }
  return "?";
}

inline std::optional<PanelCellKind> panel_cell_kind_from(std::string_view s) {
  for (auto k : {PanelCellKind::Node, PanelCellKind::Incomplete, PanelCellKind::Aux, PanelCellKind::Exit})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct PanelCell {
  std::uint32_t row = 0;
  std::uint32_t col = 0;  // flattened column, 0 .. span * layer_cols - 1
  PanelCellKind kind = PanelCellKind::Node;
  std::optional<NodeId> node;  // graph-state node synthesized here
  friend bool operator==(const PanelCell&, const PanelCell&) = default;
};

struct Panel {
  std::uint32_t round = 0;
  std::uint32_t t0 = 0;
  std::uint32_t rows = 0;
  std::uint32_t layer_cols = 0;  // generator columns per physical layer
  std::uint32_t span = 1;
  std::vector<PanelCell> cells;  // sorted by (row, col); unlisted cells are free

  std::uint32_t cols() const { return span * layer_cols; }
  friend bool operator==(const Panel&, const Panel&) = default;
};

inline Panel panel_of(const RoundPlan& p) {
  const auto& L = p.layout.layer;
  Panel out{p.round.index, L.t0, L.rows(), L.model.cols, L.span, {}};
  std::vector<bool> has_port(p.fg.size(), false);
  for (const auto& [local, port] : p.fg.port_map) has_port[port.node] = true;
  for (std::uint32_t rn = 0; rn < p.fg.size(); ++rn) {
    const auto pos = L.pos(p.layout.placement[rn]);
    const auto& node = p.fg.nodes[rn];
    PanelCell c{pos.row, pos.col, node.owner ? PanelCellKind::Node : PanelCellKind::Aux, node.owner};
    if (node.owner && has_port[rn]) c.kind = PanelCellKind::Incomplete;
    out.cells.push_back(c);
  }
  for (auto i : p.layout.aux_cells) {
    const auto pos = L.pos(i);
    out.cells.push_back({pos.row, pos.col, PanelCellKind::Aux, std::nullopt});
  }
  for (const auto& [local, cells] : p.layout.exits)
    for (auto i : cells) {
      const auto pos = L.pos(i);
      out.cells.push_back({pos.row, pos.col, PanelCellKind::Exit, std::nullopt});
    }
  std::sort(out.cells.begin(), out.cells.end(),
            [](const auto& a, const auto& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  return out;
}

/// Validates a panel read from disk.
inline void check_panel(const Panel& p) {
  if (p.rows == 0 || p.layer_cols == 0 || p.span == 0) throw InvalidInput("panel needs positive dimensions");
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    const auto& c = p.cells[i];
    if (c.row >= p.rows || c.col >= p.cols()) throw InvalidInput("panel cell outside the grid");
    if (i > 0 && std::tie(p.cells[i - 1].row, p.cells[i - 1].col) >= std::tie(c.row, c.col))
      throw InvalidInput("panel cells must be sorted and distinct");
  }
}

/// Text grid: 'O' node, '@' incomplete node, '+' auxiliary state, '~' exit,
/// '.' free; '|' separates physical layers.
inline std::string render_ascii(const Panel& p) {
  check_panel(p);
  std::vector<std::string> grid(p.rows, std::string(p.cols(), '.'));
  for (const auto& c : p.cells) {
    char ch = '.';
    switch (c.kind) {
      case PanelCellKind::Node: ch = 'O'; break;
      case PanelCellKind::Incomplete: ch = '@'; break;
      case PanelCellKind::Aux: ch = '+'; break;
      case PanelCellKind::Exit: ch = '~'; break;
    }
    grid[c.row][c.col] = ch;
  }
  std::ostringstream out;
  out << "round " << p.round << "  cycles " << p.t0 << ".." << p.t0 + p.span - 1 << "  " << p.rows << "x" << p.cols()
      << "\n";
  for (const auto& line : grid) {
    for (std::uint32_t c = 0; c < p.cols(); ++c) {
      if (c > 0 && c % p.layer_cols == 0) out << '|';
      out << line[c];
    }
    out << '\n';
  }
  return out.str();
}

inline std::string render_ascii(const std::vector<Panel>& panels) {
  std::string out;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    if (i > 0) out += '\n';
    out += render_ascii(panels[i]);
  }
  return out;
}

/// Panels stacked vertically in one SVG document.
inline std::string render_svg(const std::vector<Panel>& panels) {
  constexpr int kCell = 14, kMargin = 10, kTitle = 16, kGap = 12;
  for (const auto& p : panels) check_panel(p);
  std::uint32_t width_cells = 0;
  int height = kMargin;
  for (const auto& p : panels) {
    width_cells = std::max(width_cells, p.cols());
    height += kTitle + int(p.rows) * kCell + kGap;
  }
  const int width = 2 * kMargin + int(width_cells) * kCell;
  height += kMargin - (panels.empty() ? 0 : kGap);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
    << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  int y0 = kMargin;
  for (const auto& p : panels) {
    s << "<text x=\"" << kMargin << "\" y=\"" << y0 + kTitle - 4
      << "\" font-family=\"monospace\" font-size=\"12\">round " << p.round << ", cycles " << p.t0 << "-"
      << p.t0 + p.span - 1 << "</text>\n";
    const int top = y0 + kTitle;
    s << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (std::uint32_t r = 0; r <= p.rows; ++r)
      s << "<line x1=\"" << kMargin << "\" y1=\"" << top + int(r) * kCell << "\" x2=\"" << kMargin + int(p.cols()) * kCell
        << "\" y2=\"" << top + int(r) * kCell << "\"/>\n";
    for (std::uint32_t c = 0; c <= p.cols(); ++c)
      s << "<line x1=\"" << kMargin + int(c) * kCell << "\" y1=\"" << top << "\" x2=\"" << kMargin + int(c) * kCell
        << "\" y2=\"" << top + int(p.rows) * kCell << "\"/>\n";
    s << "</g>\n";
    for (std::uint32_t l = 1; l < p.span; ++l) {
      const int x = kMargin + int(l * p.layer_cols) * kCell;
      s << "<line class=\"layer-boundary\" x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\""
        << top + int(p.rows) * kCell << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    for (const auto& c : p.cells) {
      const int cx = kMargin + int(c.col) * kCell + kCell / 2, cy = top + int(c.row) * kCell + kCell / 2;
      switch (c.kind) {
        case PanelCellKind::Node:
          s << "<circle class=\"node\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"5\" fill=\"#1f5fbf\"/>\n";
          break;
        case PanelCellKind::Incomplete:
          s << "<circle class=\"incomplete\" cx=\"" << cx << "\" cy=\"" << cy
            << "\" r=\"5\" fill=\"white\" stroke=\"#1f5fbf\" stroke-width=\"2\"/>\n";
          break;
        case PanelCellKind::Aux:
          s << "<circle class=\"aux\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"4\" fill=\"#e88fb4\"/>\n";
          break;
        case PanelCellKind::Exit:
          s << "<rect class=\"exit\" x=\"" << cx - 3 << "\" y=\"" << cy - 3
            << "\" width=\"6\" height=\"6\" fill=\"#f0a030\"/>\n";
          break;
      }
    }
    y0 = top + int(p.rows) * kCell + kGap;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace mbqc
