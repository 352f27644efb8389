// Command-line front end: instance generation, solving, benchmark sweeps,
// trace audits, and comparison-circuit statistics.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "pcsbb/audit.hpp"
#include "pcsbb/bench.hpp"
#include "pcsbb/circuit.hpp"
#include "pcsbb/engine.hpp"
#include "pcsbb/generators.hpp"
#include "pcsbb/solvers.hpp"
#include "pcsbb/stats.hpp"

namespace {

using namespace pcsbb;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  return file;
}

DcopInstance load_instance(const std::string& path) {
  if (path == "-") return parse_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_instance(in);
}

CostModel load_model(const std::string& path) {
  if (path.empty()) return CostModel{};
  return CostModel::from_file(path);
}

int cmd_gen(const std::string& family, int n, int domain, double p1, Cost q,
            int colors, int attach, std::uint64_t seed, const std::string& out) {
  DcopInstance inst;
  if (family == "random") {
    inst = gen_random(n, domain, p1, q, seed);
  } else if (family == "coloring") {
    inst = gen_graph_coloring(n, p1, q, colors, seed);
  } else if (family == "scalefree") {
    inst = gen_scale_free(n, attach, domain, q, seed);
  } else {
    throw std::runtime_error("unknown family '" + family + "'");
  }
  std::ofstream file;
  auto& os = open_out(file, out);
  os << "# family=" << family << " seed=" << seed << "\n";
  serialize(inst, os);
  return 0;
}

int cmd_solve(const std::string& in, const std::string& algo,
              const std::string& backend, int key_bits, std::uint64_t seed,
              double cutoff, const std::string& trace_out,
              const std::string& model_path) {
  auto inst = load_instance(in);
  auto model = load_model(model_path);

  auto print_assignment = [&](const Assignment& a) {
    std::cout << "assignment:";
    for (int i = 0; i < a.size(); ++i) {
      std::cout << " x" << (i + 1) << "=" << *a.values[static_cast<std::size_t>(i)];
    }
    std::cout << "\n";
  };

  if (algo == "brute") {
    auto res = brute_force(inst);
    std::cout << "cost: " << res.cost << "\n";
    print_assignment(res.assignment);
    return 0;
  }
  if (algo == "syncbb") {
    auto res = plaintext_syncbb(inst);
    std::cout << "cost: " << res.cost << "\n";
    print_assignment(res.assignment);
    std::cout << "comparisons: " << res.stats.comparisons << "\n"
              << "expansions: " << res.stats.expansions << "\n"
              << "messages: " << res.stats.messages << "\n";
    return 0;
  }
  if (algo != "pc-syncbb") throw std::runtime_error("unknown algorithm '" + algo + "'");

  EngineConfig cfg;
  cfg.backend = backend == "mpc" ? EngineConfig::Backend::Mpc : EngineConfig::Backend::Ideal;
  cfg.key_bits = key_bits;
  cfg.seed = seed;
  cfg.cutoff_seconds = cutoff;
  auto res = pc_syncbb(inst, cfg);
  res.metrics.sim_time_ms = simulated_time_ms(res.trace, res.metrics, model);

  std::cout << "cost: " << res.result.cost << "\n";
  print_assignment(res.result.assignment);
  std::cout << "backend: " << (cfg.backend == EngineConfig::Backend::Mpc ? "mpc" : "ideal")
            << "\n"
            << "comparisons: " << res.metrics.comparisons << "\n"
            << "messages: " << res.metrics.messages << "\n"
            << "bytes: " << res.metrics.bytes << "\n"
            << "paillier_ops: " << res.metrics.paillier_ops() << "\n"
            << "offline_triples: " << res.metrics.offline_triples << "\n"
            << "online_rounds: " << res.metrics.online_rounds << "\n"
            << "online_bits: " << res.metrics.online_bits << "\n"
            << "sim_time_ms: " << res.metrics.sim_time_ms << "\n";
  if (!trace_out.empty()) {
    std::ofstream tf(trace_out);
    if (!tf) throw std::runtime_error("cannot open " + trace_out);
    write_trace(tf, res.trace);
    std::cout << "trace: " << trace_out << " (" << res.trace.size() << " events)\n";
  }
  return 0;
}

int cmd_bench(BenchConfig cfg, const std::string& out, const std::string& metric,
              const std::string& model_path) {
  auto model = load_model(model_path);
  auto rows = run_bench(cfg, model);
  std::ofstream file;
  auto& os = open_out(file, out);
  write_bench_csv(os, rows);
  if (!out.empty() && out != "-") {
    std::string svg_path = out;
    auto dot = svg_path.rfind('.');
    if (dot != std::string::npos) svg_path.resize(dot);
    svg_path += ".svg";
    std::ofstream svg(svg_path);
    if (!svg) throw std::runtime_error("cannot open " + svg_path);
    std::string axis = cfg.ns.size() > 1 ? "n" : "p1";
    write_bench_svg(svg, rows, axis, metric, cfg.family);
    std::cerr << "wrote " << out << " and " << svg_path << "\n";
  }
  return 0;
}

int cmd_audit(const std::string& trace_path, const std::string& coalition_csv) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path);
  auto trace = parse_trace(in);
  int n = 0;
  for (const auto& e : trace) n = std::max({n, e.sender + 1, e.receiver + 1});
  std::optional<std::set<int>> coalition;
  if (!coalition_csv.empty()) coalition = parse_coalition(coalition_csv);

  auto report = audit_trace(trace, n, coalition ? &*coalition : nullptr);
  std::cout << "events: " << report.events << "\n";
  for (const auto& [kind, count] : report.kind_counts) {
    std::cout << "  " << kind_name(kind) << ": " << count << "\n";
  }
  if (report.passed) {
    std::cout << "audit: PASS\n";
    return 0;
  }
  std::cout << "audit: FAIL\n";
  for (const auto& v : report.violations) std::cout << "  " << v << "\n";
  return 1;
}

int cmd_circuit_info(const std::string& n_range, Cost q, int ell_override,
                     const std::string& out, const std::string& dump_path) {
  std::ofstream file;
  auto& os = open_out(file, out);
  os << "n,ell,gates,and_gates,depth\n";
  for (int n : parse_int_range(n_range)) {
    int ell = ell_override > 0 ? ell_override : public_params(n, q).ell;
    auto c = build_comparison_circuit(n, ell);
    os << n << ',' << ell << ',' << c.gates.size() << ',' << c.and_count() << ','
       << c.and_depth() << '\n';
    if (!dump_path.empty()) {
      std::ofstream dump(dump_path + "." + std::to_string(n));
      if (!dump) throw std::runtime_error("cannot open dump file");
      c.dump(dump);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PC-SyncBB: collusion-resistant private branch and bound for DCOPs"};
  app.require_subcommand(1);

  std::string family = "random", out, in = "-", algo = "pc-syncbb", backend = "ideal";
  std::string trace_out, trace_in, coalition, metric = "sim_time_ms", model_path;
  std::string n_range = "7", p1_range = "0.3", algos = "syncbb,pc-syncbb";
  int n = 7, domain = 6, colors = 3, attach = 2, key_bits = 2048, reps = 5;
  int ell_override = 0;
  double p1 = 0.3, cutoff = 0.0;
  pcsbb::Cost q = 100;
  std::uint64_t seed = 1;

  auto* gen = app.add_subcommand("gen", "generate a benchmark instance");
  gen->add_option("--family", family, "random | coloring | scalefree");
  gen->add_option("--n", n, "number of agents");
  gen->add_option("--domain", domain, "domain size");
  gen->add_option("--p1", p1, "constraint density");
  gen->add_option("--q", q, "maximal single-constraint cost");
  gen->add_option("--colors", colors, "colors (coloring family)");
  gen->add_option("--attach", attach, "attachments per node (scalefree family)");
  gen->add_option("--seed", seed, "generator seed")->envname("PCSBB_SEED");
  gen->add_option("--out", out, "output file, '-' for stdout");

  auto* solve = app.add_subcommand("solve", "solve an instance file");
  solve->add_option("--in", in, "instance file, '-' for stdin");
  solve->add_option("--algo", algo, "brute | syncbb | pc-syncbb");
  solve->add_option("--backend", backend, "ideal | mpc");
  solve->add_option("--keybits", key_bits, "Paillier key size");
  solve->add_option("--seed", seed, "protocol seed")->envname("PCSBB_SEED");
  solve->add_option("--cutoff-secs", cutoff, "abort after this many seconds");
  solve->add_option("--trace-out", trace_out, "write the delivery trace here");
  solve->add_option("--cost-model", model_path, "key=value cost model file");

  auto* bench = app.add_subcommand("bench", "sweep benchmark configurations");
  bench->add_option("--family", family, "random | coloring | scalefree");
  bench->add_option("--n", n_range, "agent count or range lo:hi:step");
  bench->add_option("--p1", p1_range, "density or range lo:hi:step");
  bench->add_option("--domain", domain, "domain size");
  bench->add_option("--q", q, "maximal single-constraint cost");
  bench->add_option("--colors", colors, "colors (coloring family)");
  bench->add_option("--attach", attach, "attachments per node (scalefree family)");
  bench->add_option("--reps", reps, "repetitions per configuration");
  bench->add_option("--seed", seed, "base seed")->envname("PCSBB_SEED");
  bench->add_option("--algo", algos, "comma list of brute|syncbb|pc-syncbb");
  bench->add_option("--backend", backend, "ideal | mpc");
  bench->add_option("--keybits", key_bits, "Paillier key size");
  bench->add_option("--cutoff-secs", cutoff, "per-run cutoff");
  bench->add_option("--metric", metric, "chart metric");
  bench->add_option("--cost-model", model_path, "key=value cost model file");
  bench->add_option("--out", out, "CSV path; chart lands next to it");

  auto* audit = app.add_subcommand("audit", "check a trace for structural leaks");
  audit->add_option("--trace", trace_in, "trace dump file")->required();
  audit->add_option("--coalition", coalition, "comma list of colluding agents (1-based)");

  auto* cinfo = app.add_subcommand("circuit-info", "comparison circuit statistics");
  cinfo->add_option("--n", n_range, "agent count or range lo:hi:step");
  cinfo->add_option("--q", q, "maximal single-constraint cost");
  cinfo->add_option("--ell", ell_override, "fixed input bit width (overrides q)");
  cinfo->add_option("--out", out, "CSV path, '-' for stdout");
  cinfo->add_option("--dump", trace_out, "gate list file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(family, n, domain, p1, q, colors, attach, seed, out);
    }
    if (solve->parsed()) {
      return cmd_solve(in, algo, backend, key_bits, seed, cutoff, trace_out, model_path);
    }
    if (bench->parsed()) {
      BenchConfig cfg;
      cfg.family = family;
      cfg.ns = parse_int_range(n_range);
      cfg.p1s = parse_range(p1_range);
      cfg.domain_size = domain;
      cfg.q = q;
      cfg.colors = colors;
      cfg.attach = attach;
      cfg.reps = reps;
      cfg.seed = seed;
      cfg.algos.clear();
      std::stringstream ss(algos);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) cfg.algos.push_back(tok);
      }
      cfg.backend = backend;
      cfg.key_bits = key_bits;
      cfg.cutoff_seconds = cutoff;
      return cmd_bench(cfg, out, metric, model_path);
    }
    if (audit->parsed()) {
      return cmd_audit(trace_in, coalition);
    }
    if (cinfo->parsed()) {
      return cmd_circuit_info(n_range, q, ell_override, out, trace_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
