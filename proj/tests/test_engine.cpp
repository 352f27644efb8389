#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pcsbb/engine.hpp"
#include "pcsbb/generators.hpp"

using namespace pcsbb;

namespace {

EngineConfig test_config(std::uint64_t seed,
                         EngineConfig::Backend backend = EngineConfig::Backend::Ideal) {
  EngineConfig cfg;
  cfg.backend = backend;
  cfg.key_bits = 512;
  cfg.seed = seed;
  return cfg;
}

std::vector<std::vector<int>> natural_orderings(const DcopInstance& inst) {
  return inst.domains;
}

}  // namespace

TEST_CASE("initial shares reconstruct the starting bound and a zero CPA") {
  struct InitProbe : RunObserver {
    std::uint64_t bound_sum = 0;
    std::uint64_t cpa_sum = 0;
    bool seen = false;
    void after_init(const EngineView& v) override {
      seen = true;
      for (const auto& a : v.agents) {
        bound_sum = (bound_sum + a.sub) % v.pp.S;
        cpa_sum = (cpa_sum + a.cpa_share_sum(v.pp.S)) % v.pp.S;
      }
    }
  } probe;

  auto inst = gen_random(3, 2, 1.0, 5, 4);
  PcSyncBbEngine engine(inst, test_config(1), &probe);
  engine.run();
  auto pp = public_params(3, 5);
  CHECK(probe.seen);
  CHECK(probe.bound_sum == static_cast<std::uint64_t>(pp.q_inf));
  CHECK(probe.cpa_sum == 0);
}

TEST_CASE("the first agent acts first after setup") {
  auto inst = gen_random(4, 3, 0.8, 10, 9);
  auto res = pc_syncbb(inst, test_config(2));
  REQUIRE(res.metrics.setup_messages < res.trace.size());
  CHECK(res.trace[res.metrics.setup_messages].sender == 0);
}

TEST_CASE("engine matches brute force on seeded instances") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto inst = gen_random(4, 3, 0.6, 20, seed);
    auto expect = brute_force(inst).cost;
    auto res = pc_syncbb(inst, test_config(seed));
    CHECK(res.result.cost == expect);
    CHECK(res.result.assignment.full());
  }
}

TEST_CASE("engine solves coloring instances to a proper coloring") {
  auto inst = gen_graph_coloring(5, 0.5, 30, 3, 3);
  auto expect = brute_force(inst).cost;
  auto res = pc_syncbb(inst, test_config(5));
  CHECK(res.result.cost == expect);
}

TEST_CASE("engine works with the share-based comparison backend") {
  auto inst = gen_random(3, 2, 1.0, 6, 11);
  auto expect = brute_force(inst).cost;
  auto res = pc_syncbb(inst, test_config(7, EngineConfig::Backend::Mpc));
  CHECK(res.result.cost == expect);
  CHECK(res.metrics.offline_triples > 0);
  CHECK(res.metrics.online_rounds > 0);
  // The backend's openings show up in the trace as masked bits.
  bool masked = false;
  for (const auto& e : res.trace) masked |= e.kind == PayloadKind::MaskedBits;
  CHECK(masked);
}

TEST_CASE("share identities hold at every checkpoint") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto inst = gen_random(4, 3, 0.7, 15, seed + 40);
    InvariantChecker checker(inst);
    PcSyncBbEngine engine(inst, test_config(seed), &checker);
    engine.run();
    CHECK(checker.checks() > 0);
    if (!checker.clean()) {
      for (const auto& v : checker.violations()) UNSCOPED_INFO(v);
    }
    CHECK(checker.clean());
  }
}

TEST_CASE("comparison outcomes equal the plaintext bound checks throughout") {
  auto inst = gen_graph_coloring(5, 0.5, 12, 3, 8);
  InvariantChecker checker(inst);
  PcSyncBbEngine engine(inst, test_config(3), &checker);
  engine.run();
  CHECK(checker.clean());
}

TEST_CASE("forced orderings replay the plaintext comparison sequence") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto inst = gen_random(4, 3, 0.5, 18, seed + 60);
    EngineConfig cfg = test_config(seed);
    cfg.forced_orderings = natural_orderings(inst);
    auto res = pc_syncbb(inst, cfg);

    std::vector<char> plain_log;
    SyncBbOptions opts;
    opts.comparison_log = &plain_log;
    auto plain = plaintext_syncbb(inst, opts);

    CHECK(res.result.cost == plain.cost);
    REQUIRE(res.comparisons.size() == plain_log.size());
    for (std::size_t i = 0; i < plain_log.size(); ++i) {
      CHECK(res.comparisons[i].second == (plain_log[i] != 0));
    }
  }
}

TEST_CASE("runs are reproducible bit-exactly from the seed") {
  auto inst = gen_random(4, 3, 0.6, 12, 77);
  auto r1 = pc_syncbb(inst, test_config(9));
  auto r2 = pc_syncbb(inst, test_config(9));
  std::ostringstream t1, t2;
  write_trace(t1, r1.trace);
  write_trace(t2, r2.trace);
  CHECK(t1.str() == t2.str());
  CHECK(r1.result.assignment == r2.result.assignment);

  auto r3 = pc_syncbb(inst, test_config(10));
  std::ostringstream t3;
  write_trace(t3, r3.trace);
  CHECK(t1.str() != t3.str());  // different seed, different traversals
}

TEST_CASE("messages flow only along constraint edges and the chain") {
  auto inst = gen_random(5, 3, 0.4, 10, 101);
  auto res = pc_syncbb(inst, test_config(4));
  for (const auto& e : res.trace) {
    switch (e.tag) {
      case MsgTag::YValue:
      case MsgTag::ZVector:
      case MsgTag::PubKey:
      case MsgTag::ZeroShare:
        CHECK(inst.constrained(e.sender, e.receiver));
        break;
      case MsgTag::Cpa:
        CHECK(e.receiver == e.sender + 1);
        break;
      case MsgTag::Backtrack:
        CHECK(e.receiver == e.sender - 1);
        break;
      default:
        break;
    }
    // Data always flows in the right chain direction.
    if (e.tag == MsgTag::YValue) CHECK(e.receiver < e.sender);
    if (e.tag == MsgTag::ZVector) CHECK(e.receiver > e.sender);
  }
}

TEST_CASE("control messages match the comparison outcomes") {
  auto inst = gen_random(4, 3, 0.7, 14, 55);
  auto res = pc_syncbb(inst, test_config(6));
  std::uint64_t cpa_msgs = 0, optimum_broadcast_copies = 0;
  for (const auto& e : res.trace) {
    if (e.tag == MsgTag::Cpa) ++cpa_msgs;
    if (e.tag == MsgTag::NewOptimum) ++optimum_broadcast_copies;
  }
  std::uint64_t true_below_last = 0, true_at_last = 0;
  for (auto [agent, outcome] : res.comparisons) {
    if (!outcome) continue;
    if (agent == inst.n - 1) ++true_at_last;
    else ++true_below_last;
  }
  CHECK(cpa_msgs == true_below_last);
  CHECK(true_at_last == res.metrics.new_optima);
  CHECK(optimum_broadcast_copies ==
        res.metrics.new_optima * static_cast<std::uint64_t>(inst.n - 1));
}

TEST_CASE("every agent adopts its optimal setting on completion") {
  auto inst = gen_random(4, 2, 0.9, 8, 31);
  PcSyncBbEngine engine(inst, test_config(12));
  auto res = engine.run();
  for (const auto& a : engine.agents()) {
    CHECK(a.terminated);
    REQUIRE(a.x.has_value());
    CHECK(a.x == a.optimal_setting);
  }
  CHECK(res.result.cost == brute_force(inst).cost);
}

TEST_CASE("agents hold matrices only for their own constraints") {
  auto inst = gen_random(6, 2, 0.4, 9, 71);
  PcSyncBbEngine engine(inst, test_config(13));
  for (const auto& a : engine.agents()) {
    for (const auto& [t, m] : a.pred_matrix) {
      CHECK(inst.constrained(t, a.k));
      CHECK(t < a.k);
    }
    for (int t : a.iplus) CHECK(inst.constrained(a.k, t));
  }
}

TEST_CASE("zero share handling is idempotent") {
  Agent a;
  a.k = 3;
  a.n = 4;
  a.scpa = {5, 9, 0, 0};
  a.handle_zero_share(1);
  CHECK(a.scpa[1] == 0);
  auto snapshot = a.scpa;
  a.handle_zero_share(1);
  CHECK(a.scpa == snapshot);
}

TEST_CASE("reconstructed bound decreases strictly across optima") {
  struct BoundProbe : RunObserver {
    std::vector<std::uint64_t> bounds;
    void after_new_optimum(const EngineView& v) override {
      std::uint64_t sum = 0;
      for (const auto& a : v.agents) sum = (sum + a.sub) % v.pp.S;
      bounds.push_back(sum);
    }
  } probe;
  auto inst = gen_random(5, 3, 0.6, 25, 19);
  PcSyncBbEngine engine(inst, test_config(14), &probe);
  engine.run();
  REQUIRE(!probe.bounds.empty());
  for (std::size_t i = 1; i < probe.bounds.size(); ++i) {
    CHECK(probe.bounds[i] < probe.bounds[i - 1]);
  }
}

TEST_CASE("cutoff aborts long runs") {
  auto inst = gen_random(6, 4, 0.9, 50, 23);
  EngineConfig cfg = test_config(15);
  cfg.cutoff_seconds = 1e-9;
  CHECK_THROWS_AS(pc_syncbb(inst, cfg), CutoffError);
}

TEST_CASE("forced orderings must be domain permutations") {
  auto inst = gen_random(3, 3, 1.0, 5, 2);
  EngineConfig cfg = test_config(16);
  cfg.forced_orderings = std::vector<std::vector<int>>{{0, 1, 2}, {0, 1, 1}, {0, 1, 2}};
  CHECK_THROWS_AS(PcSyncBbEngine(inst, cfg), std::invalid_argument);
}
