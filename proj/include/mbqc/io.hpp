#pragma once

// Persistence: run configuration, schedules, layouts, metrics and reports
// as JSON. Every document carries a schema version, the fully resolved run
// configuration and a SHA-256 of the input circuit text, and contains
// nothing time- or host-dependent, so identical runs write identical bytes.

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbqc/baseline.hpp"
#include "mbqc/circuit.hpp"
#include "mbqc/common.hpp"
#include "mbqc/pipeline.hpp"
#include "mbqc/render.hpp"

namespace mbqc {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// --- configuration --------------------------------------------------------

struct BenchmarkSpec {
  BenchmarkFamily family = BenchmarkFamily::QFT;
  std::uint32_t qubits = 0;
};

inline std::optional<BenchmarkSpec> parse_benchmark_spec(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto f = family_from(s.substr(0, colon));
  auto n = detail::parse_uint(s.substr(colon + 1));
  if (!f || !n || *n == 0) return std::nullopt;
  return BenchmarkSpec{*f, *n};
}

inline std::string benchmark_name(const BenchmarkSpec& b) {
  return std::string(family_name(b.family)) + "-" + std::to_string(b.qubits);
}

/// Fully explicit run configuration, echoed into every output.
struct RunConfig {
  std::optional<std::string> circuit_path;
  std::optional<BenchmarkSpec> bench;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t delay_limit = 3;
  double alpha = 1.0;
  double beta = 0.5;
  double lookahead = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string render = "none";  // svg | ascii | none
  // baseline areas; 0 = take them from the benchmark table
  std::uint32_t cluster_side = 0;
  std::uint32_t physical_side = 0;

  std::string name() const {
    if (bench) return benchmark_name(*bench);
    if (circuit_path) {
      auto p = *circuit_path;
      if (auto slash = p.find_last_of('/'); slash != std::string::npos) p = p.substr(slash + 1);
      if (auto dot = p.find_last_of('.'); dot != std::string::npos && dot > 0) p = p.substr(0, dot);
      return p;
    }
    return "circuit";
  }

  CompileOptions compile_options() const {
    CompileOptions o;
    o.hardware = {rows, cols, delay_limit, 3};
    o.mapper.alpha = alpha;
    o.mapper.beta = beta;
    o.mapper.lookahead = lookahead;
    return o;
  }
};

/// Fills defaults that depend on the input (grid and baseline areas from
/// the benchmark table) and checks the rest. Baseline-only runs need no grid.
inline RunConfig resolve(RunConfig cfg, bool need_grid = true) {
  if (cfg.circuit_path.has_value() == cfg.bench.has_value())
    throw InvalidInput("give exactly one of --circuit and --bench");
  if (cfg.bench) {
    if (auto row = find_benchmark_area(cfg.bench->family, cfg.bench->qubits)) {
      if (cfg.rows == 0) cfg.rows = row->area.physical_side;
      if (cfg.cols == 0) cfg.cols = row->area.physical_side;
      if (cfg.cluster_side == 0) cfg.cluster_side = row->area.cluster_side;
      if (cfg.physical_side == 0) cfg.physical_side = row->area.physical_side;
    }
  }
  if (!need_grid) return cfg;
  if (cfg.rows == 0 || cfg.cols == 0)
    throw InvalidInput("no default grid for " + cfg.name() + "; pass --rows and --cols");
  if (cfg.render != "svg" && cfg.render != "ascii" && cfg.render != "none")
    throw InvalidInput("render format must be svg, ascii or none");
  if (!(cfg.alpha > 0) || !(cfg.beta > 0) || cfg.lookahead < 0)
    throw InvalidInput("alpha and beta must be positive and lookahead non-negative");
  cfg.compile_options().hardware.validate();
  return cfg;
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["circuit"] = c.circuit_path ? Json(*c.circuit_path) : Json(nullptr);
  j["bench"] = c.bench ? Json(benchmark_name(*c.bench)) : Json(nullptr);
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["delay_limit"] = c.delay_limit;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["lookahead"] = c.lookahead;
  j["seed"] = c.seed;
  j["render"] = c.render;
  j["cluster_side"] = c.cluster_side;
  j["physical_side"] = c.physical_side;
  return j;
}

// --- hashing --------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

/// Hash of the circuit's canonical text form, so the same program hashes the
/// same whether it came from a file or a generator.
inline std::string circuit_hash(const Circuit& c) { return "sha256:" + sha256_hex(render_circuit(c)); }

// --- documents ------------------------------------------------------------

inline Json envelope(const RunConfig& cfg, const std::string& hash) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = to_json(cfg);
  j["circuit_hash"] = hash;
  j["name"] = cfg.name();
  return j;
}

inline Json cell_json(const Cell& c) { return Json{{"t", c.t}, {"row", c.row}, {"col", c.col}}; }

inline Json metrics_json(const Schedule& s) {
  return Json{{"physical_depth", s.physical_depth}, {"num_fusions", s.num_fusions}};
}

/// {cycles: [{t, ops: [{row, col, slot, op, partner?, angle?, node?}]}], metrics}
inline Json schedule_json(const Schedule& s) {
  Json cycles = Json::array();
  Json* current = nullptr;
  for (const auto& op : s.ops()) {
    if (!current || (*current)["t"] != op.t) {
      cycles.push_back(Json{{"t", op.t}, {"ops", Json::array()}});
      current = &cycles.back();
    }
    Json o{{"row", op.row}, {"col", op.col}, {"slot", op.slot}, {"op", to_string(op.kind)}};
    if (op.partner) {
      auto p = cell_json(*op.partner);
      p["slot"] = op.partner_slot;
      o["partner"] = p;
    }
    if (op.angle) o["angle"] = *op.angle;
    if (op.node) o["node"] = *op.node;
    (*current)["ops"].push_back(std::move(o));
  }
  return Json{{"cycles", std::move(cycles)}, {"metrics", metrics_json(s)}};
}

inline Json panel_json(const Panel& p) {
  Json cells = Json::array();
  for (const auto& c : p.cells) {
    Json o{{"row", c.row}, {"col", c.col}, {"kind", to_string(c.kind)}};
    if (c.node) o["node"] = *c.node;
    cells.push_back(std::move(o));
  }
  return Json{{"round", p.round}, {"t0", p.t0},          {"rows", p.rows},
              {"layer_cols", p.layer_cols}, {"span", p.span}, {"cells", std::move(cells)}};
}

inline Panel panel_from_json(const Json& j) {
  try {
    Panel p{j.at("round").get<std::uint32_t>(), j.at("t0").get<std::uint32_t>(), j.at("rows").get<std::uint32_t>(),
            j.at("layer_cols").get<std::uint32_t>(), j.at("span").get<std::uint32_t>(), {}};
    for (const auto& c : j.at("cells")) {
      auto kind = panel_cell_kind_from(c.at("kind").get<std::string>());
      if (!kind) throw InvalidInput("unknown cell kind " + c.at("kind").get<std::string>());
      PanelCell pc{c.at("row").get<std::uint32_t>(), c.at("col").get<std::uint32_t>(), *kind, std::nullopt};
      if (c.contains("node")) pc.node = c.at("node").get<NodeId>();
      p.cells.push_back(pc);
    }
    check_panel(p);
    return p;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed layout document: ") + e.what());
  }
}

inline Json layouts_json(const CompileResult& r) {
  Json rounds = Json::array();
  for (const auto& p : r.plans) rounds.push_back(panel_json(panel_of(p)));
  return rounds;
}

/// Panels of a layouts document (or of a bare panel array).
inline std::vector<Panel> panels_from_json(const Json& j) {
  const auto& rounds = j.is_object() && j.contains("rounds") ? j.at("rounds") : j;
  if (!rounds.is_array()) throw InvalidInput("layout document has no rounds");
  std::vector<Panel> out;
  for (const auto& r : rounds) out.push_back(panel_from_json(r));
  return out;
}

inline Json baseline_json(const BaselineEstimate& b) {
  return Json{{"cluster_side", b.cluster_side}, {"physical_side", b.physical_side}, {"columns", b.columns},
              {"depth", b.depth},           {"fusions", b.fusions},             {"calibrated", b.calibrated}};
}

inline Json compile_stats_json(const CompileResult& r) {
  return Json{{"normalized_gates", r.normalized.gates.size()},
              {"graph_nodes", r.graph.size()},
              {"graph_edges", r.graph.edges.size()},
              {"dependency_layers", r.layers.layers.size()},
              {"rounds", r.plans.size()},
              {"shuffle_layers", r.shuffle_layers()},
              {"cut_edges", r.cross.size()}};
}

/// Improvement factor baseline / framework; null when the framework value is 0.
inline Json ratio_json(double baseline, double framework) {
  if (framework <= 0) return nullptr;
  return baseline / framework;
}

inline Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"schema_version", kSchemaVersion}, {"error", Json{{"kind", kind}, {"message", message}}}};
}

inline std::string error_kind(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->kind();
  return "error";
}

// --- report ---------------------------------------------------------------

struct ReportRow {
  std::string name;
  std::uint64_t baseline_depth = 0, framework_depth = 0;
  std::uint64_t baseline_fusions = 0, framework_fusions = 0;

  std::optional<double> depth_improvement() const {
    if (framework_depth == 0) return std::nullopt;
    return double(baseline_depth) / double(framework_depth);
  }
  std::optional<double> fusion_improvement() const {
    if (framework_fusions == 0) return std::nullopt;
    return double(baseline_fusions) / double(framework_fusions);
  }
};

inline Json report_row_json(const ReportRow& r) {
  auto opt = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"name", r.name},
              {"baseline_depth", r.baseline_depth},
              {"framework_depth", r.framework_depth},
              {"depth_improvement", opt(r.depth_improvement())},
              {"baseline_fusions", r.baseline_fusions},
              {"framework_fusions", r.framework_fusions},
              {"fusion_improvement", opt(r.fusion_improvement())}};
}

/// Row of a metrics document written by `compile` (which carries the
/// baseline next to the framework metrics).
inline ReportRow report_row_from_metrics(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InvalidInput("unsupported schema version");
    ReportRow r;
    r.name = j.at("name").get<std::string>();
    r.framework_depth = j.at("metrics").at("physical_depth").get<std::uint64_t>();
    r.framework_fusions = j.at("metrics").at("num_fusions").get<std::uint64_t>();
    r.baseline_depth = j.at("baseline").at("depth").get<std::uint64_t>();
    r.baseline_fusions = j.at("baseline").at("fusions").get<std::uint64_t>();
    return r;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed metrics document: ") + e.what());
  }
}

inline std::optional<double> geomean(const std::vector<std::optional<double>>& xs) {
  double sum = 0;
  std::size_t n = 0;
  for (auto x : xs)
    if (x && *x > 0) {
      sum += std::log(*x);
      ++n;
    }
  if (n == 0) return std::nullopt;
  return std::exp(sum / double(n));
}

struct Report {
  std::vector<ReportRow> rows;
  std::optional<double> geomean_depth() const {
    std::vector<std::optional<double>> xs;
    for (const auto& r : rows) xs.push_back(r.depth_improvement());
    return geomean(xs);
  }
  std::optional<double> geomean_fusions() const {
    std::vector<std::optional<double>> xs;
    for (const auto& r : rows) xs.push_back(r.fusion_improvement());
    return geomean(xs);
  }
};

inline std::string format_factor(std::optional<double> v) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << *v;
  return s.str();
}

inline std::string report_csv(const Report& rep) {
  std::ostringstream s;
  s << "name,baseline_depth,framework_depth,depth_improvement,baseline_fusions,framework_fusions,fusion_improvement\n";
  for (const auto& r : rep.rows)
    s << r.name << ',' << r.baseline_depth << ',' << r.framework_depth << ',' << format_factor(r.depth_improvement())
      << ',' << r.baseline_fusions << ',' << r.framework_fusions << ',' << format_factor(r.fusion_improvement())
      << '\n';
  s << "geomean,,," << format_factor(rep.geomean_depth()) << ",,," << format_factor(rep.geomean_fusions()) << '\n';
  return s.str();
}

inline std::string report_markdown(const Report& rep) {
  std::ostringstream s;
  s << "| Benchmark | Baseline depth | Depth | Improv. | Baseline fusions | Fusions | Improv. |\n";
  s << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : rep.rows)
    s << "| " << r.name << " | " << r.baseline_depth << " | " << r.framework_depth << " | "
      << format_factor(r.depth_improvement()) << " | " << r.baseline_fusions << " | " << r.framework_fusions << " | "
      << format_factor(r.fusion_improvement()) << " |\n";
  s << "| geomean | | | " << format_factor(rep.geomean_depth()) << " | | | " << format_factor(rep.geomean_fusions())
    << " |\n";
  return s.str();
}

// --- files ----------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << data;
  if (!out) throw InvalidInput("failed writing " + path);
}

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mbqc
