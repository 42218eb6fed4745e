#include <gtest/gtest.h>

#include "mbqc/baseline.hpp"

using namespace mbqc;

namespace {

struct Golden {
  BenchmarkFamily family;
  std::uint32_t qubits;
  std::uint64_t depth;
  std::uint64_t fusions;
};

const Golden kGolden[] = {
    {BenchmarkFamily::QFT, 9, 462, 66528},        {BenchmarkFamily::QFT, 16, 1392, 356352},
    {BenchmarkFamily::QFT, 25, 3678, 1621998},    {BenchmarkFamily::QAOA, 9, 426, 61344},
    {BenchmarkFamily::QAOA, 16, 1050, 268800},    {BenchmarkFamily::QAOA, 25, 1584, 698544},
    {BenchmarkFamily::BV, 100, 1290, 2385210},    {BenchmarkFamily::BV, 196, 2142, 7970382},
    {BenchmarkFamily::BV, 324, 4500, 28084500},
};

}  // namespace

TEST(Baseline, ReferenceRowsExact) {
  for (const auto& g : kGolden) {
    auto e = baseline_benchmark(g.family, g.qubits, 1);
    EXPECT_EQ(e.depth, g.depth) << family_name(g.family) << "-" << g.qubits;
    EXPECT_EQ(e.fusions, g.fusions) << family_name(g.family) << "-" << g.qubits;
    EXPECT_TRUE(e.calibrated);
  }
}

TEST(Baseline, FusionsAreDepthTimesArea) {
  for (const auto& row : benchmark_areas()) {
    auto e = baseline_estimate(gen_benchmark(row.family, row.qubits, 3), row.area);
    EXPECT_EQ(e.fusions, e.depth * row.area.physical_side * row.area.physical_side);
    EXPECT_EQ(e.depth % kLayersPerColumn, 0u);
    EXPECT_FALSE(e.calibrated);
  }
}

TEST(Baseline, TableAreas) {
  EXPECT_EQ(find_benchmark_area(BenchmarkFamily::QFT, 9)->area.physical_side, 12u);
  EXPECT_EQ(find_benchmark_area(BenchmarkFamily::BV, 324)->area.cluster_side, 35u);
  EXPECT_FALSE(find_benchmark_area(BenchmarkFamily::BV, 7));
  for (const auto& row : benchmark_areas()) EXPECT_EQ(row.area.cluster_side, 2 * braid_side(row.qubits) - 1);
}

TEST(Baseline, SerializationModel) {
  // two qubits side by side: single-qubit gates in parallel share a column
  Circuit c;
  c.num_qubits = 2;
  c.gates = {Gate::j(0, 0.1), Gate::j(1, 0.2), Gate::cz(0, 1)};
  EXPECT_EQ(serialized_columns(c, 3), 2u);
  // opposite corners of a 2x2 braid grid are 2 apart: one SWAP column
  Circuit d;
  d.num_qubits = 4;
  d.gates = {Gate::cz(0, 3)};
  EXPECT_EQ(serialized_columns(d, 3), 2u);
  auto e = baseline_estimate(d, {3, 5});
  EXPECT_EQ(e.depth, 12u);
  EXPECT_EQ(e.fusions, 300u);
}

TEST(Baseline, Errors) {
  Circuit c;
  c.num_qubits = 10;
  EXPECT_THROW(baseline_estimate(c, {5, 12}), InvalidInput);  // 3x3 braids hold 9
  EXPECT_THROW(baseline_estimate(c, {0, 12}), InvalidInput);
  EXPECT_THROW(baseline_benchmark(BenchmarkFamily::QFT, 4, 1), InvalidInput);
  auto e = baseline_benchmark(BenchmarkFamily::QFT, 4, 1, BaselineArea{3, 6});
  EXPECT_FALSE(e.calibrated);
  EXPECT_EQ(e.fusions, e.depth * 36);
}
