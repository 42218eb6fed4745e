#pragma once

// Desk-scale stabilizer simulator: graph states, single- and two-qubit Pauli
// measurements, XZ/ZX fusions, qubit removal and equivalence up to a local
// Pauli frame.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mbqc/common.hpp"
#include "mbqc/graph.hpp"

namespace mbqc {

inline constexpr std::uint32_t kOracleMaxGraphQubits = 12;
inline constexpr std::uint32_t kOracleMaxQubits = 64;

/// i^phase * prod_j X_j^{x_j} Z_j^{z_j}
struct Pauli {
  std::uint64_t x = 0, z = 0;
  std::uint8_t phase = 0;  // mod 4

  static Pauli X(std::uint32_t q) { return {std::uint64_t{1} << q, 0, 0}; }
  static Pauli Z(std::uint32_t q) { return {0, std::uint64_t{1} << q, 0}; }
  /// Y = i X Z
  static Pauli Y(std::uint32_t q) { return {std::uint64_t{1} << q, std::uint64_t{1} << q, 1}; }

  bool commutes(const Pauli& o) const { return std::popcount((x & o.z) ^ (z & o.x)) % 2 == 0; }
  Pauli operator*(const Pauli& o) const {
    const auto ph = phase + o.phase + 2 * std::popcount(z & o.x);
    return {x ^ o.x, z ^ o.z, static_cast<std::uint8_t>(ph % 4)};
  }
  Pauli negated() const { return {x, z, static_cast<std::uint8_t>((phase + 2) % 4)}; }
  /// +1 / -1 sign of a Hermitian Pauli relative to its canonical (i^{|x&z|}) form.
  int sign() const {
    const int rel = (phase - std::popcount(x & z) % 4 + 4) % 4;
    if (rel % 2) throw InternalError("non-Hermitian Pauli");
    return rel == 0 ? 1 : -1;
  }
  bool same_operator(const Pauli& o) const { return x == o.x && z == o.z; }
  friend bool operator==(const Pauli& a, const Pauli& b) {
    return a.x == b.x && a.z == b.z && a.phase == b.phase;
  }

  std::string str(std::uint32_t n) const {
    std::string s = sign() > 0 ? "+" : "-";
    for (std::uint32_t q = 0; q < n; ++q) {
      const bool bx = x >> q & 1, bz = z >> q & 1;
      s += bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
    }
    return s;
  }
};

/// Pending local corrections, applied as X^x Z^z.
struct PauliFrame {
  std::uint64_t x = 0, z = 0;
  PauliFrame operator^(const PauliFrame& o) const { return {x ^ o.x, z ^ o.z}; }
  friend bool operator==(const PauliFrame&, const PauliFrame&) = default;
};

enum class PauliBasis { X, Y, Z };

class StabilizerState {
 public:
  StabilizerState() = default;

  /// |0...0> on n qubits.
  explicit StabilizerState(std::uint32_t n) : n_(n) {
    check_size(n);
    for (std::uint32_t q = 0; q < n; ++q) gens_.push_back(Pauli::Z(q));
  }

  static StabilizerState from_generators(std::uint32_t n, std::vector<Pauli> gens) {
    check_size(n);
    StabilizerState s;
    s.n_ = n;
    s.gens_ = std::move(gens);
    if (s.gens_.size() != n) throw InvalidInput("need exactly n generators");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!s.gens_[i].commutes(s.gens_[j])) throw InvalidInput("generators do not commute");
    if (s.rank() != n) throw InvalidInput("generators are dependent");
    return s;
  }

  std::uint32_t size() const { return n_; }
  const std::vector<Pauli>& generators() const { return gens_; }

  /// GF(2) rank of the generator matrix [x|z].
  std::uint32_t rank() const {
    std::uint32_t r = 0;
    for (const auto& g : canonical()) r += (g.x | g.z) != 0;
    return r;
  }

  /// Tensor product: qubits of `b` follow those of `a`.
  static StabilizerState tensor(const StabilizerState& a, const StabilizerState& b) {
    check_size(a.n_ + b.n_);
    StabilizerState s;
    s.n_ = a.n_ + b.n_;
    s.gens_ = a.gens_;
    for (auto g : b.gens_) s.gens_.push_back({g.x << a.n_, g.z << a.n_, g.phase});
    return s;
  }

  /// Measures a Hermitian Pauli observable. Returns the outcome bit (0 for
  /// the +1 eigenvalue). `forced` selects the outcome of a random
  /// measurement; forcing an impossible deterministic outcome throws.
  int measure(const Pauli& p, std::optional<int> forced, std::mt19937_64* rng = nullptr) {
    std::optional<std::size_t> k;
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (!gens_[i].commutes(p)) {
        if (!k)
          k = i;
        else
          gens_[i] = gens_[i] * gens_[*k];
      }
    if (!k) {
      const int out = deterministic_outcome(p);
      if (forced && *forced != out) throw InvalidInput("forced outcome has probability zero");
      return out;
    }
    int out = 0;
    if (forced)
      out = *forced;
    else if (rng)
      out = static_cast<int>((*rng)() & 1);
    gens_[*k] = out ? p.negated() : p;
    return out;
  }

  int measure_pauli(std::uint32_t q, PauliBasis b, std::optional<int> forced, std::mt19937_64* rng = nullptr) {
    if (q >= n_) throw InvalidInput("qubit out of range");
    const Pauli p = b == PauliBasis::X ? Pauli::X(q) : b == PauliBasis::Y ? Pauli::Y(q) : Pauli::Z(q);
    return measure(p, forced, rng);
  }

  /// Removes qubits that are not entangled with the rest (e.g. after they
  /// were measured). Remaining qubits keep their relative order.
  void discard(std::vector<std::uint32_t> qubits) {
    std::sort(qubits.begin(), qubits.end());
    qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
    std::uint64_t mask = 0;
    for (auto q : qubits) {
      if (q >= n_) throw InvalidInput("qubit out of range");
      mask |= std::uint64_t{1} << q;
    }
    // Eliminate on the discarded columns; pivot rows carry the discarded part.
    std::size_t r = 0;
    for (auto q : qubits)
      for (int part = 0; part < 2; ++part) {
        auto has = [&](const Pauli& g) { return ((part ? g.z : g.x) >> q) & 1; };
        std::size_t piv = r;
        while (piv < gens_.size() && !has(gens_[piv])) ++piv;
        if (piv == gens_.size()) continue;
        std::swap(gens_[r], gens_[piv]);
        for (std::size_t i = 0; i < gens_.size(); ++i)
          if (i != r && has(gens_[i])) gens_[i] = gens_[i] * gens_[r];
        ++r;
      }
    if (r != qubits.size()) throw InvalidInput("discarded qubits are entangled with the rest");
    std::vector<Pauli> rest;
    for (std::size_t i = r; i < gens_.size(); ++i) {
      const auto& g = gens_[i];
      if ((g.x | g.z) & mask) throw InternalError("discard elimination left support");
      rest.push_back({compress(g.x, mask), compress(g.z, mask), g.phase});
    }
    n_ -= static_cast<std::uint32_t>(qubits.size());
    gens_ = std::move(rest);
  }

  /// Conjugates the state by a Pauli frame (applies X^x Z^z).
  void apply(const PauliFrame& f) {
    const Pauli p{f.x, f.z, 0};
    for (auto& g : gens_)
      if (!g.commutes(p)) g = g.negated();
  }

  /// Canonical reduced row-echelon form over [x|z] with phases carried along.
  std::vector<Pauli> canonical() const {
    auto rows = gens_;
    std::size_t r = 0;
    for (std::uint32_t col = 0; col < 2 * n_ && r < rows.size(); ++col) {
      auto has = [&](const Pauli& g) { return col < n_ ? (g.x >> col & 1) : (g.z >> (col - n_) & 1); };
      std::size_t piv = r;
      while (piv < rows.size() && !has(rows[piv])) ++piv;
      if (piv == rows.size()) continue;
      std::swap(rows[r], rows[piv]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != r && has(rows[i])) rows[i] = rows[i] * rows[r];
      ++r;
    }
    return rows;
  }

 private:
  static void check_size(std::uint32_t n) {
    if (n > kOracleMaxQubits) throw InvalidInput("stabilizer oracle is limited to 64 qubits");
  }
  static std::uint64_t compress(std::uint64_t v, std::uint64_t removed) {
    std::uint64_t out = 0;
    int k = 0;
    for (int q = 0; q < 64; ++q) {
      if (removed >> q & 1) continue;
      if (v >> q & 1) out |= std::uint64_t{1} << k;
      ++k;
    }
    return out;
  }

  int deterministic_outcome(const Pauli& p) const {
    // Find generators whose product matches p up to sign (Gaussian elimination).
    auto rows = gens_;
    std::vector<std::uint64_t> combo(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) combo[i] = std::uint64_t{1} << i;
    std::size_t r = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> pivots;
    for (std::uint32_t col = 0; col < 2 * n_ && r < rows.size(); ++col) {
      auto has = [&](const Pauli& g) { return col < n_ ? (g.x >> col & 1) : (g.z >> (col - n_) & 1); };
      std::size_t piv = r;
      while (piv < rows.size() && !has(rows[piv])) ++piv;
      if (piv == rows.size()) continue;
      std::swap(rows[r], rows[piv]);
      std::swap(combo[r], combo[piv]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != r && has(rows[i])) {
          rows[i] = rows[i] * rows[r];
          combo[i] ^= combo[r];
        }
      pivots.push_back({col, r});
      ++r;
    }
    Pauli target{p.x, p.z, 0};
    std::uint64_t use = 0;
    for (auto [col, row] : pivots) {
      const bool need = col < n_ ? (target.x >> col & 1) : (target.z >> (col - n_) & 1);
      if (need) {
        target = target * rows[row];
        use ^= combo[row];
      }
    }
    if (target.x || target.z) throw InternalError("commuting observable outside the stabilizer group");
    Pauli prod{0, 0, 0};
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if (use >> i & 1) prod = prod * gens_[i];
    return prod.sign() == p.sign() ? 0 : 1;
  }

  std::uint32_t n_ = 0;
  std::vector<Pauli> gens_;
};

/// Canonical graph-state generators K_a = X_a prod_{b~a} Z_b.
inline StabilizerState graph_to_stabilizer(const Graph& g) {
  if (g.n > kOracleMaxGraphQubits) throw InvalidInput("graph exceeds the desk-scale cap of 12 nodes");
  if (!g.is_simple()) throw InvalidInput("graph must be simple");
  std::vector<Pauli> gens(g.n);
  for (std::uint32_t a = 0; a < g.n; ++a) gens[a] = Pauli::X(a);
  for (auto [a, b] : g.edges) {
    gens[a].z |= std::uint64_t{1} << b;
    gens[b].z |= std::uint64_t{1} << a;
  }
  return StabilizerState::from_generators(g.n, gens);
}

/// The graph and Z frame when `s` is a graph state up to Z corrections.
struct GraphForm {
  Graph graph;
  PauliFrame frame;
};

inline std::optional<GraphForm> to_graph_form(const StabilizerState& s) {
  const auto n = s.size();
  const auto rows = s.canonical();
  // A graph state's canonical form starts with X_a on the diagonal.
  for (std::uint32_t a = 0; a < n; ++a)
    if (rows[a].x != (std::uint64_t{1} << a)) return std::nullopt;
  GraphForm f{Graph(n), {}};
  for (std::uint32_t a = 0; a < n; ++a) {
    if (rows[a].z >> a & 1) return std::nullopt;  // Y on the diagonal
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const bool ab = rows[a].z >> b & 1, ba = rows[b].z >> a & 1;
      if (ab != ba) return std::nullopt;
      if (ab) f.graph.add_edge(a, b);
    }
    if (rows[a].sign() < 0) f.frame.z |= std::uint64_t{1} << a;
  }
  return f;
}

/// Frame F with F a F^dagger = b when both share the unsigned stabilizer
/// group; nullopt otherwise.
inline std::optional<PauliFrame> local_pauli_frame(const StabilizerState& a, const StabilizerState& b) {
  if (a.size() != b.size()) throw InvalidInput("states have different sizes");
  const auto ra = a.canonical(), rb = b.canonical();
  const auto n = a.size();
  // Equations: for each row i, commutation(F, row_i) = [signs differ].
  struct Eq {
    std::uint64_t u, w;  // coefficients of frame x (u) and z (w) bits
    bool rhs;
  };
  std::vector<Eq> eqs;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!ra[i].same_operator(rb[i])) return std::nullopt;
    // F = X^fx Z^fz anticommutes with row iff fx.z + fz.x = 1
    eqs.push_back({ra[i].z, ra[i].x, ra[i].sign() != rb[i].sign()});
  }
  // Gaussian elimination over 2n unknowns (fx bits 0..n-1, fz bits n..2n-1).
  std::vector<std::pair<std::uint32_t, std::size_t>> piv;
  std::size_t r = 0;
  auto coef = [&](const Eq& e, std::uint32_t c) { return c < n ? (e.u >> c & 1) : (e.w >> (c - n) & 1); };
  for (std::uint32_t c = 0; c < 2 * n && r < eqs.size(); ++c) {
    std::size_t p = r;
    while (p < eqs.size() && !coef(eqs[p], c)) ++p;
    if (p == eqs.size()) continue;
    std::swap(eqs[r], eqs[p]);
    for (std::size_t i = 0; i < eqs.size(); ++i)
      if (i != r && coef(eqs[i], c)) eqs[i] = {eqs[i].u ^ eqs[r].u, eqs[i].w ^ eqs[r].w, eqs[i].rhs != eqs[r].rhs};
    piv.push_back({c, r});
    ++r;
  }
  for (std::size_t i = r; i < eqs.size(); ++i)
    if (eqs[i].rhs) return std::nullopt;
  PauliFrame f;
  for (auto [c, row] : piv)
    if (eqs[row].rhs) {
      if (c < n)
        f.x |= std::uint64_t{1} << c;
      else
        f.z |= std::uint64_t{1} << (c - n);
    }
  return f;
}

inline bool equivalent_up_to_local_paulis(const StabilizerState& a, const StabilizerState& b) {
  return local_pauli_frame(a, b).has_value();
}

struct FusionResult {
  StabilizerState state;
  PauliFrame correction;  // Z frame towards the graph form, when one exists
  int outcome_xz = 0;     // X_c Z_d
  int outcome_zx = 0;     // Z_c X_d
};

/// XZ/ZX fusion of qubits c and d: measures X_c Z_d and Z_c X_d, then removes
/// c and d. When the survivor is a graph state up to Z signs, `correction`
/// holds that Z frame (applying it yields the sign-free graph state).
inline FusionResult fuse(StabilizerState s, std::uint32_t c, std::uint32_t d, std::optional<int> forced_xz = 0,
                         std::optional<int> forced_zx = 0, std::mt19937_64* rng = nullptr) {
  if (c == d) throw InvalidInput("fusion needs two distinct qubits");
  if (c >= s.size() || d >= s.size()) throw InvalidInput("fusion qubit out of range");
  FusionResult r;
  r.outcome_xz = s.measure(Pauli::X(c) * Pauli::Z(d), forced_xz, rng);
  r.outcome_zx = s.measure(Pauli::Z(c) * Pauli::X(d), forced_zx, rng);
  s.discard({c, d});
  if (auto gf = to_graph_form(s)) r.correction = gf->frame;
  r.state = std::move(s);
  return r;
}

}  // namespace mbqc
