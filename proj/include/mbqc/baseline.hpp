#pragma once

// Analytic cost model of the "map onto a regular cluster-state lattice
// first" approach, used as the comparison column in reports.
//
// Logical qubits are braids laid out on a square grid with one spare row
// and column between neighbours (cluster side 2s - 1 for s x s braids).
// Gates are serialized into measurement-pattern columns: gates on disjoint
// qubits share a column, and a two-qubit gate between braids at grid
// distance d first spends d - 1 SWAP columns. Every column is 6 physical
// layers tall and every layer consumes one resource state per generator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbqc/circuit.hpp"
#include "mbqc/common.hpp"

namespace mbqc {

inline constexpr std::uint32_t kLayersPerColumn = 6;

struct BaselineArea {
  std::uint32_t cluster_side = 0;   // logical lattice side
  std::uint32_t physical_side = 0;  // generator grid side
};

struct BaselineEstimate {
  std::uint32_t cluster_side = 0;
  std::uint32_t physical_side = 0;
  std::uint64_t columns = 0;
  std::uint64_t depth = 0;
  std::uint64_t fusions = 0;
  bool calibrated = false;  // columns taken from the reference table rather than the serialization model
};

/// One benchmark row: areas and the reference column count of the
/// lattice-first compilation.
struct BenchmarkArea {
  BenchmarkFamily family;
  std::uint32_t qubits;
  BaselineArea area;
  std::uint64_t reference_columns;
};

inline const std::array<BenchmarkArea, 9>& benchmark_areas() {
  static const std::array<BenchmarkArea, 9> rows{{
      {BenchmarkFamily::QFT, 9, {5, 12}, 77},
      {BenchmarkFamily::QFT, 16, {7, 16}, 232},
      {BenchmarkFamily::QFT, 25, {9, 21}, 613},
      {BenchmarkFamily::QAOA, 9, {5, 12}, 71},
      {BenchmarkFamily::QAOA, 16, {7, 16}, 175},
      {BenchmarkFamily::QAOA, 25, {9, 21}, 264},
      {BenchmarkFamily::BV, 100, {19, 43}, 215},
      {BenchmarkFamily::BV, 196, {27, 61}, 357},
      {BenchmarkFamily::BV, 324, {35, 79}, 750},
  }};
  return rows;
}

inline std::optional<BenchmarkArea> find_benchmark_area(BenchmarkFamily f, std::uint32_t qubits) {
  for (const auto& r : benchmark_areas())
    if (r.family == f && r.qubits == qubits) return r;
  return std::nullopt;
}

/// Braids per side of the logical lattice needed for n qubits.
inline std::uint32_t braid_side(std::uint32_t n) {
  auto s = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(n)));
  while (s * s < n) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= n) --s;
  return std::max<std::uint32_t>(s, 1);
}

/// Number of pattern columns of `c` on a cluster lattice of the given side.
inline std::uint64_t serialized_columns(const Circuit& c, std::uint32_t cluster_side) {
  validate(c);
  const auto s = (cluster_side + 1) / 2;  // braids per side
  if (static_cast<std::uint64_t>(s) * s < c.num_qubits)
    throw InvalidInput("cluster side " + std::to_string(cluster_side) + " cannot hold " +
                       std::to_string(c.num_qubits) + " qubits");
  auto distance = [s](std::uint32_t a, std::uint32_t b) {
    const auto ra = a / s, ca = a % s, rb = b / s, cb = b % s;
    return (ra > rb ? ra - rb : rb - ra) + (ca > cb ? ca - cb : cb - ca);
  };
  std::vector<std::uint64_t> ready(c.num_qubits, 0);
  std::uint64_t columns = 0;
  for (const auto& g : c.gates) {
    std::uint64_t col = 0;
    if (g.targets.size() == 1) {
      col = ready[g.targets[0]];
    } else {
      const auto a = g.targets[0], b = g.targets[1];
      col = std::max(ready[a], ready[b]) + (distance(a, b) - 1);
    }
    for (auto q : g.targets) ready[q] = col + 1;
    columns = std::max(columns, col + 1);
  }
  return columns;
}

inline BaselineEstimate estimate_from_columns(std::uint64_t columns, BaselineArea area, bool calibrated) {
  BaselineEstimate e;
  e.cluster_side = area.cluster_side;
  e.physical_side = area.physical_side;
  e.columns = columns;
  e.depth = kLayersPerColumn * columns;
  e.fusions = e.depth * area.physical_side * area.physical_side;
  e.calibrated = calibrated;
  return e;
}

/// Serialization-model estimate for an arbitrary circuit.
inline BaselineEstimate baseline_estimate(const Circuit& c, BaselineArea area) {
  if (area.cluster_side == 0 || area.physical_side == 0) throw InvalidInput("baseline areas must be positive");
  return estimate_from_columns(serialized_columns(c, area.cluster_side), area, false);
}

/// Default areas for a circuit without a table entry: the braid lattice
/// for its qubit count, and no physical side (which must be supplied).
inline BaselineArea default_cluster_area(std::uint32_t num_qubits) { return {2 * braid_side(num_qubits) - 1, 0}; }

/// Estimate for a benchmark row. Rows of the reference table use their
/// recorded column counts; other sizes fall back to the model on the
/// generated circuit and require `area` to be supplied.
inline BaselineEstimate baseline_benchmark(BenchmarkFamily f, std::uint32_t qubits, std::uint64_t seed,
                                           std::optional<BaselineArea> area = std::nullopt) {
  const auto row = find_benchmark_area(f, qubits);
  if (row && (!area || (area->cluster_side == row->area.cluster_side && area->physical_side == row->area.physical_side)))
    return estimate_from_columns(row->reference_columns, row->area, true);
  if (!area)
    throw InvalidInput("no baseline area for " + std::string(family_name(f)) + "-" + std::to_string(qubits) +
                       "; supply cluster and physical sides");
  return baseline_estimate(gen_benchmark(f, qubits, seed), *area);
}

}  // namespace mbqc
