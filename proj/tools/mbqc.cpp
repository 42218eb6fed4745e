// mbqc: compile circuits for a photonic fusion lattice, estimate the
// lattice-first baseline, verify synthesis, render layouts, and aggregate
// metrics into a comparison table.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbqc/baseline.hpp"
#include "mbqc/io.hpp"
#include "mbqc/pipeline.hpp"
#include "mbqc/render.hpp"
#include "mbqc/verify.hpp"

using namespace mbqc;

namespace {

struct InputFlags {
  std::string circuit;
  std::string bench;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mbqc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MBQC_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

RunConfig make_config(const InputFlags& in, RunConfig cfg, bool need_grid = true) {
  if (!in.circuit.empty()) cfg.circuit_path = in.circuit;
  if (!in.bench.empty()) {
    auto b = parse_benchmark_spec(in.bench);
    if (!b) throw InvalidInput("--bench expects FAMILY:N with FAMILY one of QFT, QAOA, BV");
    cfg.bench = b;
  }
  return resolve(cfg, need_grid);
}

/// Circuit and its canonical-text hash.
std::pair<Circuit, std::string> load_circuit(const RunConfig& cfg) {
  Circuit c = cfg.bench ? gen_benchmark(cfg.bench->family, cfg.bench->qubits, cfg.seed)
                        : parse_circuit(read_file(*cfg.circuit_path));
  if (!cfg.bench) c.name = cfg.name();
  auto hash = circuit_hash(c);
  return {std::move(c), std::move(hash)};
}

std::optional<BaselineEstimate> baseline_for(const RunConfig& cfg, const Circuit& c) {
  if (cfg.cluster_side == 0 || cfg.physical_side == 0) return std::nullopt;
  const BaselineArea area{cfg.cluster_side, cfg.physical_side};
  if (cfg.bench) return baseline_benchmark(cfg.bench->family, cfg.bench->qubits, cfg.seed, area);
  return baseline_estimate(c, area);
}

std::string out_path(const RunConfig& cfg, const std::string& suffix) {
  return (std::filesystem::path(cfg.out_dir) / (cfg.name() + suffix)).string();
}

int cmd_compile(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  auto [circuit, hash] = load_circuit(cfg);
  spdlog::info("compiling {} ({} qubits, {} gates) on {}x{}, tau={}", cfg.name(), circuit.num_qubits,
               circuit.gates.size(), cfg.rows, cfg.cols, cfg.delay_limit);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = compile(circuit, cfg.compile_options());
  spdlog::info("compiled in {:.0f} ms: {} rounds, {} shuffle layers, depth {}, fusions {}",
               std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count(),
               res.plans.size(), res.shuffle_layers(), res.schedule.physical_depth, res.schedule.num_fusions);
  if (auto bad = dependency_violations(res.schedule, res.graph); !bad.empty()) throw InternalError(bad.front());
  if (auto bad = delay_violations(res.schedule, cfg.delay_limit); !bad.empty()) throw DelayViolation(-1, bad.front());

  auto schedule = envelope(cfg, hash);
  schedule["schedule"] = schedule_json(res.schedule);
  write_file(out_path(cfg, ".schedule.json"), dump(schedule));

  auto layouts = envelope(cfg, hash);
  layouts["rounds"] = layouts_json(res);
  write_file(out_path(cfg, ".layouts.json"), dump(layouts));

  auto metrics = envelope(cfg, hash);
  metrics["metrics"] = metrics_json(res.schedule);
  metrics["stats"] = compile_stats_json(res);
  metrics["stats"]["input_gates"] = circuit.gates.size();
  const auto base = baseline_for(cfg, circuit);
  metrics["baseline"] = base ? baseline_json(*base) : Json(nullptr);
  metrics["depth_improvement"] = base ? ratio_json(double(base->depth), res.schedule.physical_depth) : Json(nullptr);
  metrics["fusion_improvement"] = base ? ratio_json(double(base->fusions), double(res.schedule.num_fusions)) : Json(nullptr);
  write_file(out_path(cfg, ".metrics.json"), dump(metrics));

  if (cfg.render != "none") {
    std::vector<Panel> panels;
    for (const auto& p : res.plans) panels.push_back(panel_of(p));
    if (cfg.render == "svg")
      write_file(out_path(cfg, ".svg"), render_svg(panels));
    else
      write_file(out_path(cfg, ".txt"), render_ascii(panels));
  }
  std::cout << dump(metrics);
  return 0;
}

int cmd_baseline(const RunConfig& cfg) {
  auto [circuit, hash] = load_circuit(cfg);
  const auto base = baseline_for(cfg, circuit);
  if (!base) throw InvalidInput("no baseline area for " + cfg.name() + "; pass --cluster-side and --physical-side");
  auto doc = envelope(cfg, hash);
  doc["baseline"] = baseline_json(*base);
  std::cout << dump(doc);
  return 0;
}

int cmd_verify(std::uint32_t max_nodes, const std::string& trials, std::uint64_t seed) {
  std::optional<std::uint32_t> n;
  if (trials != "all") {
    n = detail::parse_uint(trials);
    if (!n) throw InvalidInput("--trials expects a count or 'all'");
  }
  const auto s = verify_synthesis(max_nodes, n, seed);
  Json doc{{"schema_version", kSchemaVersion},
           {"max_nodes", max_nodes},
           {"trials", trials},
           {"seed", seed},
           {"checked", s.checked},
           {"failed", s.failed},
           {"passed", s.passed()}};
  if (s.counterexample) {
    Json edges = Json::array();
    for (auto [a, b] : s.counterexample->edges) edges.push_back({a, b});
    doc["counterexample"] = Json{{"nodes", s.counterexample->n}, {"edges", edges}};
  }
  std::cout << dump(doc);
  return s.passed() ? 0 : 1;
}

int cmd_render(const std::string& path, const std::string& format, const std::string& out) {
  const auto panels = panels_from_json(read_json(path));
  std::string text;
  if (format == "svg")
    text = render_svg(panels);
  else if (format == "ascii")
    text = render_ascii(panels);
  else
    throw InvalidInput("render format must be svg or ascii");
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& format, const std::string& out) {
  Report rep;
  for (const auto& f : files) rep.rows.push_back(report_row_from_metrics(read_json(f)));
  std::string text;
  if (format == "csv") {
    text = report_csv(rep);
  } else if (format == "md") {
    text = report_markdown(rep);
  } else if (format == "json") {
    Json rows = Json::array();
    for (const auto& r : rep.rows) rows.push_back(report_row_json(r));
    auto opt = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };
    text = dump(Json{{"schema_version", kSchemaVersion},
                     {"rows", rows},
                     {"geomean_depth_improvement", opt(rep.geomean_depth())},
                     {"geomean_fusion_improvement", opt(rep.geomean_fusions())}});
  } else {
    throw InvalidInput("report format must be csv, md or json");
  }
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

void add_run_flags(CLI::App* cmd, InputFlags& in, RunConfig& cfg) {
  auto* circuit = cmd->add_option("--circuit", in.circuit, "circuit file (text format)");
  auto* bench = cmd->add_option("--bench", in.bench, "benchmark FAMILY:N, e.g. QFT:9");
  circuit->excludes(bench);
  cmd->add_option("--rows", cfg.rows, "generator grid rows (default: benchmark table)");
  cmd->add_option("--cols", cfg.cols, "generator grid columns (default: benchmark table)");
  cmd->add_option("--delay", cfg.delay_limit, "delay-line limit tau in cycles")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "reward per mapped edge")->capture_default_str();
  cmd->add_option("--beta", cfg.beta, "penalty per routing cell")->capture_default_str();
  cmd->add_option("--lookahead", cfg.lookahead, "weight of the congestion look-ahead")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "benchmark generator seed")->capture_default_str();
  cmd->add_option("--cluster-side", cfg.cluster_side, "baseline logical lattice side");
  cmd->add_option("--physical-side", cfg.physical_side, "baseline generator grid side");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Compiler for photonic fusion-based measurement-based quantum computing"};
  app.require_subcommand(1);

  InputFlags in;
  RunConfig cfg;

  auto* compile_cmd = app.add_subcommand("compile", "compile a circuit or benchmark");
  add_run_flags(compile_cmd, in, cfg);
  compile_cmd->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  compile_cmd->add_option("--render", cfg.render, "also render layouts: svg, ascii or none")->capture_default_str();

  auto* baseline_cmd = app.add_subcommand("baseline", "lattice-first baseline estimate");
  add_run_flags(baseline_cmd, in, cfg);

  std::uint32_t max_nodes = 4;
  std::string trials = "100";
  std::uint64_t verify_seed = 7;
  auto* verify_cmd = app.add_subcommand("verify", "check fusion-graph synthesis against the stabilizer oracle");
  verify_cmd->add_option("--max-nodes", max_nodes, "largest graph size (1-5)")->capture_default_str();
  verify_cmd->add_option("--trials", trials, "random graphs to check, or 'all'")->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed, "random seed")->capture_default_str();

  std::string render_in, render_format = "ascii", render_out;
  auto* render_cmd = app.add_subcommand("render", "draw a layouts document");
  render_cmd->add_option("layouts", render_in, "layouts JSON written by compile")->required();
  render_cmd->add_option("--format", render_format, "svg or ascii")->capture_default_str();
  render_cmd->add_option("--out", render_out, "output file (default: stdout)");

  std::vector<std::string> report_in;
  std::string report_format = "md", report_out;
  auto* report_cmd = app.add_subcommand("report", "aggregate metrics documents into a comparison table");
  report_cmd->add_option("metrics", report_in, "metrics JSON files written by compile")->required();
  report_cmd->add_option("--format", report_format, "csv, md or json")->capture_default_str();
  report_cmd->add_option("--out", report_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (compile_cmd->parsed()) return cmd_compile(make_config(in, cfg));
    if (baseline_cmd->parsed()) return cmd_baseline(make_config(in, cfg, false));
    if (verify_cmd->parsed()) return cmd_verify(max_nodes, trials, verify_seed);
    if (render_cmd->parsed()) return cmd_render(render_in, render_format, render_out);
    if (report_cmd->parsed()) return cmd_report(report_in, report_format, report_out);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    std::cout << dump(error_json(error_kind(e), e.what()));
    return 1;
  }
  return 0;
}
