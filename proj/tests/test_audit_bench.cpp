#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pcsbb/audit.hpp"
#include "pcsbb/bench.hpp"
#include "pcsbb/engine.hpp"
#include "pcsbb/generators.hpp"

using namespace pcsbb;

TEST_CASE("clean runs pass the audit, coalition view included") {
  auto inst = gen_random(4, 3, 0.6, 12, 5);
  EngineConfig cfg;
  cfg.key_bits = 512;
  cfg.seed = 3;
  auto res = pc_syncbb(inst, cfg);

  auto full = audit_trace(res.trace, inst.n);
  CHECK(full.passed);
  CHECK(full.events == res.trace.size());

  std::set<int> coalition = {1, 2};
  auto partial = audit_trace(res.trace, inst.n, &coalition);
  CHECK(partial.passed);
  CHECK(partial.events < full.events);
  CHECK(partial.events > 0);
}

TEST_CASE("audit covers the masked-bit traffic of the share backend") {
  auto inst = gen_random(3, 2, 1.0, 4, 8);
  EngineConfig cfg;
  cfg.backend = EngineConfig::Backend::Mpc;
  cfg.key_bits = 512;
  cfg.seed = 4;
  auto res = pc_syncbb(inst, cfg);
  auto report = audit_trace(res.trace, inst.n);
  CHECK(report.passed);
  CHECK(report.kind_counts[PayloadKind::MaskedBits] > 0);
  CHECK(report.kind_counts[PayloadKind::Ciphertext] > 0);
  CHECK(report.kind_counts[PayloadKind::Command] > 0);
  CHECK(report.kind_counts[PayloadKind::Index] >= 0);
}

TEST_CASE("audit flags malformed events") {
  std::vector<TraceEvent> trace;
  TraceEvent e;
  e.step = 0;
  e.sender = 0;
  e.receiver = 2;
  e.tag = MsgTag::Cpa;
  e.kind = PayloadKind::Command;
  e.bytes = 0;
  trace.push_back(e);  // CPA skipping an agent
  auto r1 = audit_trace(trace, 4);
  CHECK(!r1.passed);

  trace.clear();
  e.receiver = 1;
  e.bytes = 8;  // command smuggling a payload
  trace.push_back(e);
  auto r2 = audit_trace(trace, 4);
  CHECK(!r2.passed);

  trace.clear();
  e.tag = MsgTag::YValue;
  e.kind = PayloadKind::Ciphertext;
  e.bytes = 128;
  e.sender = 0;
  e.receiver = 1;  // share value sent forward
  trace.push_back(e);
  auto r3 = audit_trace(trace, 4);
  CHECK(!r3.passed);
}

TEST_CASE("audit works on a parsed trace dump") {
  auto inst = gen_random(3, 2, 1.0, 6, 9);
  EngineConfig cfg;
  cfg.key_bits = 512;
  cfg.seed = 6;
  auto res = pc_syncbb(inst, cfg);
  std::ostringstream os;
  write_trace(os, res.trace);
  std::istringstream is(os.str());
  auto parsed = parse_trace(is);
  auto report = audit_trace(parsed, inst.n);
  CHECK(report.passed);
  CHECK(report.events == res.trace.size());
}

TEST_CASE("coalition parsing accepts one-based lists") {
  auto c = parse_coalition("2,3");
  CHECK(c == std::set<int>{1, 2});
}

TEST_CASE("ranges parse singletons and sweeps") {
  CHECK(parse_range("0.5") == std::vector<double>{0.5});
  auto sweep = parse_range("0.3:0.9:0.2");
  REQUIRE(sweep.size() == 4u);
  CHECK(sweep[0] == Catch::Approx(0.3));
  CHECK(sweep[3] == Catch::Approx(0.9));
  CHECK(parse_int_range("5:9:2") == std::vector<int>{5, 7, 9});
  CHECK_THROWS_AS(parse_range("1:2:0"), std::invalid_argument);
}

TEST_CASE("bench sweeps produce one row per point and algorithm") {
  BenchConfig cfg;
  cfg.family = "random";
  cfg.ns = {4};
  cfg.p1s = {0.4, 0.8};
  cfg.domain_size = 3;
  cfg.q = 10;
  cfg.reps = 2;
  cfg.seed = 11;
  cfg.algos = {"brute", "syncbb", "pc-syncbb"};
  cfg.key_bits = 512;
  CostModel model;
  auto rows = run_bench(cfg, model);
  REQUIRE(rows.size() == 6u);

  // Equal cost across algorithms at every point.
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    CHECK(rows[i].cost == rows[i + 1].cost);
    CHECK(rows[i].cost == rows[i + 2].cost);
  }

  std::ostringstream csv;
  write_bench_csv(csv, rows);
  auto text = csv.str();
  CHECK(text.find("family,n,p1,domain,algo,backend,seed,cost,") == 0u);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // header + 6 rows

  // Deterministic given the seed.
  std::ostringstream csv2;
  write_bench_csv(csv2, run_bench(cfg, model));
  CHECK(csv.str() == csv2.str());
}

TEST_CASE("bench honors the cutoff with sentinel rows") {
  BenchConfig cfg;
  cfg.family = "random";
  cfg.ns = {6};
  cfg.p1s = {0.8};
  cfg.domain_size = 4;
  cfg.q = 40;
  cfg.reps = 1;
  cfg.seed = 13;
  cfg.algos = {"pc-syncbb"};
  cfg.key_bits = 512;
  cfg.cutoff_seconds = 1e-9;
  auto rows = run_bench(cfg, CostModel{});
  REQUIRE(rows.size() == 1u);
  CHECK(rows[0].cost == -1);
  CHECK(rows[0].sim_time_ms == -1);
}

TEST_CASE("svg chart renders a polyline per algorithm") {
  BenchConfig cfg;
  cfg.family = "coloring";
  cfg.ns = {3, 4, 5};
  cfg.p1s = {0.5};
  cfg.colors = 3;
  cfg.q = 10;
  cfg.reps = 1;
  cfg.seed = 17;
  cfg.algos = {"syncbb", "pc-syncbb"};
  cfg.key_bits = 512;
  auto rows = run_bench(cfg, CostModel{});
  std::ostringstream svg;
  write_bench_svg(svg, rows, "n", "sim_time_ms", "coloring sweep");
  auto text = svg.str();
  CHECK(text.find("<svg") == 0u);
  CHECK(std::count(text.begin(), text.end(), '\n') > 10);
  CHECK(text.find("polyline") != std::string::npos);
  CHECK(text.find("pc-syncbb") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
}
