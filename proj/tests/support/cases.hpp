#pragma once

// Random inputs and reference checks shared by the unit tests and the
// acceptance suite.

#include <cmath>
#include <random>
#include <vector>

#include "mbqc/circuit.hpp"
#include "mbqc/graph.hpp"
#include "mbqc/oracle.hpp"
#include "support/dense.hpp"

namespace cases {

/// Unitary of a circuit as its action on every basis state.
inline std::vector<dense::State> columns(const mbqc::Circuit& c) {
  std::vector<dense::State> cols;
  for (std::size_t b = 0; b < (std::size_t{1} << c.num_qubits); ++b) {
    dense::State s(c.num_qubits);
    s.amp[0] = 0;
    s.amp[b] = 1;
    dense::run(s, c);
    cols.push_back(s);
  }
  return cols;
}

/// Frobenius distance between the unitaries after removing the global phase.
inline double phase_free_distance(const mbqc::Circuit& a, const mbqc::Circuit& b) {
  const auto ca = columns(a), cb = columns(b);
  dense::cx tr = 0;
  for (std::size_t k = 0; k < ca.size(); ++k)
    for (std::size_t i = 0; i < ca[k].amp.size(); ++i) tr += std::conj(ca[k].amp[i]) * cb[k].amp[i];
  const dense::cx ph = std::abs(tr) > 0 ? tr / std::abs(tr) : 1.0;
  double d = 0;
  for (std::size_t k = 0; k < ca.size(); ++k)
    for (std::size_t i = 0; i < ca[k].amp.size(); ++i) d += std::norm(ca[k].amp[i] * ph - cb[k].amp[i]);
  return std::sqrt(d);
}

/// Random circuit over every gate kind.
inline mbqc::Circuit random_circuit(std::uint32_t n, std::size_t len, std::mt19937_64& rng) {
  using namespace mbqc;
  Circuit c;
  c.num_qubits = n;
  std::uniform_int_distribution<int> kind(0, 8);
  std::uniform_real_distribution<double> ang(0, kTwoPi);
  std::uniform_int_distribution<std::uint32_t> q(0, n - 1);
  for (std::size_t i = 0; i < len; ++i) {
    const auto k = static_cast<GateKind>(kind(rng));
    if (is_two_qubit(k)) {
      auto a = q(rng), b = q(rng);
      while (b == a) b = q(rng);
      c.gates.push_back({k, {a, b}, 0.0});
    } else {
      c.gates.push_back({k, {q(rng)}, has_angle(k) ? canonical_angle(ang(rng)) : 0.0});
    }
  }
  return c;
}

/// G(n, 1/2).
inline mbqc::Graph random_graph(std::uint32_t n, std::mt19937_64& rng) {
  mbqc::Graph g(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (rng() % 2) g.add_edge(a, b);
  return g;
}

/// One random fuse or Pauli measurement on a random graph state of 3..10
/// qubits, applied to both the tableau and a dense statevector; returns the
/// largest amplitude deviation between the two results (up to global
/// phase), or nullopt when the drawn fusion outcome is impossible.
inline std::optional<double> dense_cross_check(int i, std::mt19937_64& rng) {
  using namespace mbqc;
  const std::uint32_t n = 3 + rng() % 8;
  const auto g = random_graph(n, rng);
  auto st = graph_to_stabilizer(g);
  auto dn = dense::from_stabilizer(st);
  if (i % 2) {
    const std::uint32_t q = rng() % n;
    const auto b = static_cast<PauliBasis>(rng() % 3);
    const Pauli p = b == PauliBasis::X ? Pauli::X(q) : b == PauliBasis::Y ? Pauli::Y(q) : Pauli::Z(q);
    auto probe = dn;
    dense::project_pauli(probe, p, 0);
    const int out = st.measure(p, probe.norm() > 1e-6 ? 0 : 1);
    dense::project_pauli(dn, p, out);
    dn.normalize();
    st.discard({q});
    dn = dense::drop_product_qubits(dn, {q});
  } else {
    std::uint32_t c = rng() % n, d = rng() % n;
    while (d == c) d = rng() % n;
    const int o1 = static_cast<int>(rng() & 1), o2 = static_cast<int>(rng() & 1);
    auto probe = dn;
    dense::project_pauli(probe, Pauli::X(c) * Pauli::Z(d), o1);
    dense::project_pauli(probe, Pauli::Z(c) * Pauli::X(d), o2);
    if (probe.norm() < 1e-6) return std::nullopt;
    auto r = fuse(st, c, d, o1, o2);
    st = r.state;
    probe.normalize();
    dn = dense::drop_product_qubits(probe, {std::min(c, d), std::max(c, d)});
  }
  return dense::max_deviation(dn, dense::from_stabilizer(st));
}

}  // namespace cases
