#pragma once

// Circuit IR, the line-oriented text format, {J, CZ} normalization and the
// QFT / QAOA / BV benchmark generators.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbqc/common.hpp"

namespace mbqc {

enum class GateKind { J, CZ, H, X, Z, S, T, RZ, CNOT };

inline std::string_view mnemonic(GateKind k) {
  switch (k) {
    case GateKind::J: return "j";
    case GateKind::CZ: return "cz";
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::T: return "t";
    case GateKind::RZ: return "rz";
    case GateKind::CNOT: return "cnot";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from(std::string_view s) {
  for (auto k : {GateKind::J, GateKind::CZ, GateKind::H, GateKind::X, GateKind::Z,
                 GateKind::S, GateKind::T, GateKind::RZ, GateKind::CNOT}) {
    if (mnemonic(k) == s) return k;
  }
  return std::nullopt;
}

inline constexpr bool is_two_qubit(GateKind k) {
  return k == GateKind::CZ || k == GateKind::CNOT;
}

inline constexpr bool has_angle(GateKind k) {
  return k == GateKind::J || k == GateKind::RZ;
}

struct Gate {
  GateKind kind = GateKind::J;
  std::vector<std::uint32_t> targets;
  double angle = 0.0;  // canonical, only meaningful when has_angle(kind)

  static Gate j(std::uint32_t q, double a) { return {GateKind::J, {q}, canonical_angle(a)}; }
  static Gate rz(std::uint32_t q, double a) { return {GateKind::RZ, {q}, canonical_angle(a)}; }
  static Gate one(GateKind k, std::uint32_t q) { return {k, {q}, 0.0}; }
  static Gate cz(std::uint32_t a, std::uint32_t b) { return {GateKind::CZ, {a, b}, 0.0}; }
  static Gate cnot(std::uint32_t c, std::uint32_t t) { return {GateKind::CNOT, {c, t}, 0.0}; }

  friend bool operator==(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.targets != b.targets) return false;
    return !has_angle(a.kind) || angles_equal(a.angle, b.angle);
  }
};

struct Circuit {
  std::uint32_t num_qubits = 1;
  std::vector<Gate> gates;
  std::string name = "circuit";

  bool is_normalized() const {
    return std::all_of(gates.begin(), gates.end(), [](const Gate& g) {
      return g.kind == GateKind::J || g.kind == GateKind::CZ;
    });
  }
};

/// Throws InvalidInput when a gate breaks the arity / range invariants.
inline void validate(const Circuit& c) {
  if (c.num_qubits == 0) throw InvalidInput("circuit must have at least one qubit");
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    const std::size_t arity = is_two_qubit(g.kind) ? 2 : 1;
    if (g.targets.size() != arity)
      throw InvalidInput("gate " + std::to_string(i) + " has wrong number of targets");
    for (auto q : g.targets)
      if (q >= c.num_qubits)
        throw InvalidInput("gate " + std::to_string(i) + " targets qubit " + std::to_string(q) +
                           " >= " + std::to_string(c.num_qubits));
    if (arity == 2 && g.targets[0] == g.targets[1])
      throw InvalidInput("gate " + std::to_string(i) + " has repeated targets");
    if (!std::isfinite(g.angle)) throw InvalidInput("gate " + std::to_string(i) + " angle not finite");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::uint32_t> parse_uint(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  // from_chars for double is available in libstdc++ 11
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses the line-oriented circuit format:
///
///     # comment
///     name qft3          (optional)
///     qubits 3
///     h 0
///     cnot 0 1
///     rz 1 0.785398
inline Circuit parse_circuit(std::string_view text) {
  Circuit c;
  bool have_header = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto tok = detail::split_ws(line);

    if (tok[0] == "name") {
      if (tok.size() != 2) throw ParseError(lineno, "expected 'name <identifier>'");
      c.name = std::string(tok[1]);
      continue;
    }
    if (tok[0] == "qubits") {
      if (have_header) throw ParseError(lineno, "duplicate 'qubits' header");
      if (tok.size() != 2) throw ParseError(lineno, "expected 'qubits <count>'");
      auto n = detail::parse_uint(tok[1]);
      if (!n || *n == 0) throw ParseError(lineno, "qubit count must be a positive integer");
      c.num_qubits = *n;
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "gate before 'qubits' header");

    auto kind = gate_kind_from(tok[0]);
    if (!kind) throw ParseError(lineno, "unknown gate '" + std::string(tok[0]) + "'");
    const std::size_t arity = is_two_qubit(*kind) ? 2 : 1;
    const std::size_t want = arity + (has_angle(*kind) ? 1 : 0);
    if (tok.size() != 1 + want)
      throw ParseError(lineno, "gate '" + std::string(tok[0]) + "' expects " +
                                   std::to_string(want) + " operands");
    Gate g{*kind, {}, 0.0};
    for (std::size_t i = 0; i < arity; ++i) {
      auto q = detail::parse_uint(tok[1 + i]);
      if (!q) throw ParseError(lineno, "bad qubit index '" + std::string(tok[1 + i]) + "'");
      if (*q >= c.num_qubits)
        throw ParseError(lineno, "qubit index " + std::to_string(*q) + " out of range");
      g.targets.push_back(*q);
    }
    if (arity == 2 && g.targets[0] == g.targets[1])
      throw ParseError(lineno, "two-qubit gate needs distinct targets");
    if (has_angle(*kind)) {
      auto a = detail::parse_double(tok[1 + arity]);
      if (!a) throw ParseError(lineno, "bad angle '" + std::string(tok[1 + arity]) + "'");
      g.angle = canonical_angle(*a);
    }
    c.gates.push_back(std::move(g));
  }
  if (!have_header) throw ParseError(lineno, "missing 'qubits' header");
  return c;
}

/// Canonical text form; parse_circuit(render_circuit(c)) == c.
inline std::string render_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "name " << c.name << "\n";
  os << "qubits " << c.num_qubits << "\n";
  os << std::setprecision(17);
  for (const auto& g : c.gates) {
    os << mnemonic(g.kind);
    for (auto q : g.targets) os << ' ' << q;
    if (has_angle(g.kind)) os << ' ' << g.angle;
    os << '\n';
  }
  return os.str();
}

/// Rewrites every gate into J(angle) / CZ. J(a) is taken as
/// (1/sqrt2)[[1, e^{ia}], [1, -e^{ia}]] = H * RZ(a), so J(0) = H and adjacent
/// J(0) pairs on a qubit cancel. The result is unitarily equivalent up to a
/// global phase.
inline Circuit normalize_to_jcz(const Circuit& c) {
  validate(c);
  std::vector<Gate> expanded;
  expanded.reserve(c.gates.size() * 3);
  auto J = [&](std::uint32_t q, double a) { expanded.push_back(Gate::j(q, a)); };
  for (const auto& g : c.gates) {
    const auto q = g.targets[0];
    switch (g.kind) {
      case GateKind::J: J(q, g.angle); break;
      case GateKind::CZ: expanded.push_back(g); break;
      case GateKind::H: J(q, 0); break;
      case GateKind::X: J(q, 0); J(q, kPi); break;
      case GateKind::Z: J(q, kPi); J(q, 0); break;
      case GateKind::S: J(q, kPi / 2); J(q, 0); break;
      case GateKind::T: J(q, kPi / 4); J(q, 0); break;
      case GateKind::RZ: J(q, g.angle); J(q, 0); break;
      case GateKind::CNOT: {
        const auto t = g.targets[1];
        J(t, 0);
        expanded.push_back(Gate::cz(q, t));
        J(t, 0);
        break;
      }
    }
  }

  // Peephole: H*H = I. Track the last surviving gate on each qubit.
  std::vector<bool> alive(expanded.size(), true);
  std::vector<std::vector<std::size_t>> per_qubit(c.num_qubits);
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    const auto& g = expanded[i];
    if (g.kind == GateKind::J && g.angle == 0.0) {
      auto& st = per_qubit[g.targets[0]];
      if (!st.empty()) {
        const auto& prev = expanded[st.back()];
        if (prev.kind == GateKind::J && prev.angle == 0.0) {
          alive[st.back()] = false;
          alive[i] = false;
          st.pop_back();
          continue;
        }
      }
    }
    // a CZ lands on both stacks, so nothing cancels across it
    for (auto q : g.targets) per_qubit[q].push_back(i);
  }
  Circuit out{c.num_qubits, {}, c.name};
  for (std::size_t i = 0; i < expanded.size(); ++i)
    if (alive[i]) out.gates.push_back(expanded[i]);
  return out;
}

enum class BenchmarkFamily { QFT, QAOA, BV };

inline std::string_view family_name(BenchmarkFamily f) {
  switch (f) {
    case BenchmarkFamily::QFT: return "QFT";
    case BenchmarkFamily::QAOA: return "QAOA";
    case BenchmarkFamily::BV: return "BV";
  }
  return "?";
}

inline std::optional<BenchmarkFamily> family_from(std::string_view s) {
  std::string up(s);
  for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "QFT") return BenchmarkFamily::QFT;
  if (up == "QAOA") return BenchmarkFamily::QAOA;
  if (up == "BV") return BenchmarkFamily::BV;
  return std::nullopt;
}

namespace detail {

// Controlled phase diag(1,1,1,e^{i theta}) up to global phase.
inline void controlled_phase(std::vector<Gate>& g, std::uint32_t c, std::uint32_t t, double theta) {
  g.push_back(Gate::rz(c, theta / 2));
  g.push_back(Gate::cnot(c, t));
  g.push_back(Gate::rz(t, -theta / 2));
  g.push_back(Gate::cnot(c, t));
  g.push_back(Gate::rz(t, theta / 2));
}

// Random max-cut instance: every vertex has degree 3, except one vertex of
// degree 2 when n is odd. Configuration model with restarts.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> random_cubic_graph(std::uint32_t n,
                                                                               std::mt19937_64& rng) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  if (n < 2) return edges;
  if (n <= 3) {
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b) edges.emplace_back(a, b);
    return edges;
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::uint32_t> stubs;
    for (std::uint32_t v = 0; v < n; ++v) {
      const int deg = (n % 2 == 1 && v == n - 1) ? 2 : 3;
      for (int k = 0; k < deg; ++k) stubs.push_back(v);
    }
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(stubs[i - 1], stubs[pick(rng)]);
    }
    edges.clear();
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      auto a = std::min(stubs[i], stubs[i + 1]);
      auto b = std::max(stubs[i], stubs[i + 1]);
      if (a == b) ok = false;
      for (auto& e : edges)
        if (e.first == a && e.second == b) ok = false;
      edges.emplace_back(a, b);
    }
    if (ok) {
      std::sort(edges.begin(), edges.end());
      return edges;
    }
  }
  throw InternalError("failed to sample a cubic graph");
}

}  // namespace detail

inline constexpr double kQaoaGamma = 0.7;
inline constexpr double kQaoaBeta = 0.3;

/// Generates a textbook benchmark circuit over the sugar gate set.
/// QFT ignores the seed; QAOA draws its max-cut graph and BV its secret from
/// the seed.
inline Circuit gen_benchmark(BenchmarkFamily family, std::uint32_t num_qubits, std::uint64_t seed) {
  if (num_qubits < 2) throw InvalidInput("benchmarks need at least 2 qubits");
  Circuit c;
  c.num_qubits = num_qubits;
  c.name = std::string(family_name(family)) + "-" + std::to_string(num_qubits);
  auto& g = c.gates;
  std::mt19937_64 rng(seed);
  switch (family) {
    case BenchmarkFamily::QFT: {
      for (std::uint32_t i = 0; i < num_qubits; ++i) {
        g.push_back(Gate::one(GateKind::H, i));
        for (std::uint32_t j = i + 1; j < num_qubits; ++j)
          detail::controlled_phase(g, j, i, kPi / std::pow(2.0, j - i));
      }
      for (std::uint32_t i = 0; i < num_qubits / 2; ++i) {
        const auto k = num_qubits - 1 - i;
        g.push_back(Gate::cnot(i, k));
        g.push_back(Gate::cnot(k, i));
        g.push_back(Gate::cnot(i, k));
      }
      break;
    }
    case BenchmarkFamily::QAOA: {
      const auto edges = detail::random_cubic_graph(num_qubits, rng);
      for (std::uint32_t q = 0; q < num_qubits; ++q) g.push_back(Gate::one(GateKind::H, q));
      for (auto [a, b] : edges) {
        g.push_back(Gate::cnot(a, b));
        g.push_back(Gate::rz(b, 2 * kQaoaGamma));
        g.push_back(Gate::cnot(a, b));
      }
      for (std::uint32_t q = 0; q < num_qubits; ++q) {
        g.push_back(Gate::one(GateKind::H, q));
        g.push_back(Gate::rz(q, 2 * kQaoaBeta));
        g.push_back(Gate::one(GateKind::H, q));
      }
      break;
    }
    case BenchmarkFamily::BV: {
      const std::uint32_t anc = num_qubits - 1;
      std::bernoulli_distribution bit(0.5);
      std::vector<bool> secret(anc);
      for (std::uint32_t i = 0; i < anc; ++i) secret[i] = bit(rng);
      g.push_back(Gate::one(GateKind::X, anc));
      for (std::uint32_t q = 0; q < num_qubits; ++q) g.push_back(Gate::one(GateKind::H, q));
      for (std::uint32_t i = 0; i < anc; ++i)
        if (secret[i]) g.push_back(Gate::cnot(i, anc));
      for (std::uint32_t q = 0; q < num_qubits; ++q) g.push_back(Gate::one(GateKind::H, q));
      break;
    }
  }
  return c;
}

}  // namespace mbqc
