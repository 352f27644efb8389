#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcsbb/compare.hpp"
#include "pcsbb/dcop.hpp"
#include "pcsbb/indicator.hpp"
#include "pcsbb/paillier.hpp"
#include "pcsbb/rng.hpp"
#include "pcsbb/simnet.hpp"
#include "pcsbb/solvers.hpp"

// Privacy-preserving branch and bound over the simulated network. Agents
// never exchange a value, a cost, or a bound in the clear: partial-assignment
// costs live in additive shares refreshed through encrypted indicator-vector
// lookups, and every bound check runs through a joint comparison backend.

namespace pcsbb {

struct CutoffError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One protocol participant. It holds only its own domain, the cost matrices
// of constraints it is part of, and its share state; everything else it
// learns arrives as a message.
struct Agent {
  int k = 0;
  int n = 0;
  std::vector<int> domain;  // the public value ordering is this order
  std::vector<int> iminus;  // constrained predecessors
  std::vector<int> iplus;   // constrained successors
  std::map<int, CostMatrix> pred_matrix;  // t in iminus -> matrix (t, k)

  std::vector<std::uint64_t> scpa;
  std::uint64_t sub = 0;
  std::vector<int> w;  // secret traversal order, regenerated per traversal
  int p = 0;
  std::optional<int> x;
  std::optional<int> optimal_setting;
  bool terminated = false;

  std::optional<PaillierContext> key;  // own key; last agent has none
  IndicatorFamily indicators;
  std::map<int, PaillierPublicKey> peer_key;           // predecessor keys
  std::map<int, std::vector<Ciphertext>> received_z;   // latest vector per peer

  ChaChaRng rng{0};

  std::uint64_t cpa_share_sum(std::uint64_t S) const {
    std::uint64_t acc = 0;
    for (int t : iminus) acc = (acc + scpa[static_cast<std::size_t>(t)]) % S;
    for (int t : iplus) acc = (acc + scpa[static_cast<std::size_t>(t)]) % S;
    return acc;
  }

  // Passive message handlers.
  void handle_pub_key(int from, const PaillierPublicKey& pk) { peer_key[from] = pk; }

  void handle_z_vector(int from, std::vector<Ciphertext> cells) {
    received_z[from] = std::move(cells);
  }

  void handle_y_value(int from, const Ciphertext& c, std::uint64_t S,
                      RunMetrics& metrics) {
    if (!key) throw ProtocolError("agent without key received a share value");
    scpa[static_cast<std::size_t>(from)] = key->decrypt_u64(c) % S;
    ++metrics.paillier_decrypts;
  }

  void handle_zero_share(int from) { scpa[static_cast<std::size_t>(from)] = 0; }

  void handle_new_optimum(std::uint64_t S) {
    sub = cpa_share_sum(S);
    optimal_setting = x;
  }

  void handle_complete() {
    x = optimal_setting;
    terminated = true;
  }
};

struct EngineConfig {
  enum class Backend { Ideal, Mpc };
  Backend backend = Backend::Ideal;
  int key_bits = 2048;
  std::uint64_t seed = 0;
  // When set, replaces the per-traversal random orderings with fixed ones
  // (one value list per agent), e.g. to replay the plaintext solver exactly.
  std::optional<std::vector<std::vector<int>>> forced_orderings;
  double cutoff_seconds = 0.0;  // 0 disables the cutoff
  TripleProvider* triple_provider = nullptr;
  bool capture_trace = true;
};

// God's-eye view handed to observers; the agents themselves never see it.
struct EngineView {
  const DcopInstance& instance;
  const PublicParams& pp;
  const std::vector<Agent>& agents;
  const std::vector<std::optional<int>>& shadow;  // current plaintext CPA
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void after_init(const EngineView&) {}
  virtual void after_update_shares(const EngineView&, int agent) {}
  virtual void after_backtrack(const EngineView&, int agent) {}
  virtual void after_new_optimum(const EngineView&) {}
  virtual void on_comparison(const EngineView&, int agent, bool result) {}
};

struct EngineResult {
  SolveResult result;
  RunMetrics metrics;
  std::vector<TraceEvent> trace;
  std::vector<std::pair<int, bool>> comparisons;  // (invoking agent, outcome)
};

class PcSyncBbEngine {
 public:
  PcSyncBbEngine(const DcopInstance& inst, EngineConfig cfg,
                 RunObserver* observer = nullptr)
      : inst_(inst),
        cfg_(std::move(cfg)),
        pp_(public_params(inst.n, inst.q > 0 ? inst.q : 1)),
        net_(inst.n, cfg_.capture_trace),
        observer_(observer),
        shadow_(static_cast<std::size_t>(inst.n)) {
    validate(inst_);
    build_agents();
    if (cfg_.backend == EngineConfig::Backend::Ideal) {
      backend_ = std::make_unique<IdealCompareBackend>(pp_.S);
    } else {
      auto sink = [this](int from, int to, int bits) {
        net_.record_external(from, to, MsgTag::MaskedBits,
                             static_cast<std::uint64_t>((bits + 7) / 8));
      };
      backend_ = std::make_unique<MpcCompareBackend>(
          inst_.n, pp_.ell, ChaChaRng(cfg_.seed, kBackendStream),
          cfg_.triple_provider, sink);
    }
  }

  const PublicParams& params() const { return pp_; }
  const std::vector<Agent>& agents() const { return agents_; }

  EngineResult run() {
    start_ = std::chrono::steady_clock::now();
    setup_keys();
    init_protocol();
    assign_cpa(0);
    main_loop();
    return collect();
  }

 private:
  static constexpr std::uint64_t kBackendStream = 2;
  static constexpr std::uint64_t kAgentStreamBase = 1000;

  void build_agents() {
    const int n = inst_.n;
    ChaChaRng root(cfg_.seed);
    agents_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Agent& a = agents_[static_cast<std::size_t>(k)];
      a.k = k;
      a.n = n;
      a.domain = inst_.domains[static_cast<std::size_t>(k)];
      a.scpa.assign(static_cast<std::size_t>(n), 0);
      a.rng = root.stream(kAgentStreamBase + static_cast<std::uint64_t>(k));
      for (const auto& [key, m] : inst_.constraints) {
        auto [t, j] = key;
        if (j == k) {
          a.iminus.push_back(t);
          a.pred_matrix.emplace(t, m);
        } else if (t == k) {
          a.iplus.push_back(j);
        }
      }
    }
    if (cfg_.forced_orderings) {
      if (static_cast<int>(cfg_.forced_orderings->size()) != n) {
        throw std::invalid_argument("engine: forced ordering count != n");
      }
      for (int k = 0; k < n; ++k) {
        const auto& ord = (*cfg_.forced_orderings)[static_cast<std::size_t>(k)];
        auto sorted = ord;
        auto dom = agents_[static_cast<std::size_t>(k)].domain;
        std::sort(sorted.begin(), sorted.end());
        std::sort(dom.begin(), dom.end());
        if (sorted != dom) {
          throw std::invalid_argument("engine: forced ordering is not a domain permutation");
        }
      }
    }
  }

  EngineView view() const { return EngineView{inst_, pp_, agents_, shadow_}; }

  // Key pairs, indicator vectors, and the opening exchange. The first
  // vector each agent publishes encodes a random position, so later vectors
  // reveal no rotation offset relative to a known base.
  void setup_keys() {
    const int n = inst_.n;
    mpz_class s2 = mpz_class(static_cast<unsigned long>(pp_.S)) *
                   mpz_class(static_cast<unsigned long>(pp_.S));
    for (int k = 0; k + 1 < n; ++k) {
      Agent& a = agents_[static_cast<std::size_t>(k)];
      a.key = PaillierContext::generate(cfg_.key_bits, a.rng);
      if (a.key->pub().n <= s2) {
        throw ProtocolError("engine: key modulus not above S^2");
      }
      a.indicators = IndicatorFamily(*a.key, static_cast<int>(a.domain.size()), a.rng);
      metrics_.paillier_encrypts += a.domain.size();
      for (int t : a.iplus) {
        net_.send(Message::pub_key(k, t, a.key->pub()));
      }
    }
    drain_passive();
    for (int k = 0; k + 1 < n; ++k) {
      Agent& a = agents_[static_cast<std::size_t>(k)];
      int r0 = static_cast<int>(a.rng.below(a.domain.size()));
      for (int t : a.iplus) {
        net_.send(Message::z_vector(k, t, a.indicators.vector_for(r0).cells,
                                    a.key->pub().ciphertext_bytes()));
      }
    }
    drain_passive();
    metrics_.setup_messages = net_.delivered();
  }

  void init_protocol() {
    for (auto& a : agents_) {
      std::fill(a.scpa.begin(), a.scpa.end(), 0);
      a.p = 0;
      a.sub = a.k == 0 ? static_cast<std::uint64_t>(pp_.q_inf) % pp_.S : 0;
    }
    if (observer_) observer_->after_init(view());
  }

  void assign_cpa(int k) {
    Agent& a = agents_[static_cast<std::size_t>(k)];
    torch_ = k;
    for (;;) {
      if (a.p == 0) {
        if (cfg_.forced_orderings) {
          a.w = (*cfg_.forced_orderings)[static_cast<std::size_t>(k)];
        } else {
          a.w = a.domain;
          a.rng.shuffle(a.w);
        }
      }
      ++a.p;
      if (a.p > static_cast<int>(a.domain.size())) {
        do_backtrack(k);
        return;
      }
      int v = a.w[static_cast<std::size_t>(a.p - 1)];
      a.x = v;
      ++expansions_;
      update_shares_in_cpa(k, v);
      bool below = compare_cpa_cost_to_upper_bound(k);
      if (k == inst_.n - 1) {
        if (below) announce_new_optimum(k);
        continue;  // next value in the own domain
      }
      if (below) {
        net_.send(Message::command(MsgTag::Cpa, k, k + 1));
        return;
      }
      // At or above the bound: prune by moving to the next value.
    }
  }

  void update_shares_in_cpa(int k, int v) {
    Agent& a = agents_[static_cast<std::size_t>(k)];
    if (torch_ != k) throw ProtocolError("update_shares outside the agent's turn");
    int s = inst_.value_index(k, v);
    for (int t : a.iminus) {
      auto zit = a.received_z.find(t);
      if (zit == a.received_z.end()) {
        throw ProtocolError("missing indicator vector for predecessor");
      }
      const auto& pk = a.peer_key.at(t);
      const CostMatrix& m = a.pred_matrix.at(t);
      std::vector<Cost> column(static_cast<std::size_t>(m.rows));
      for (int r = 0; r < m.rows; ++r) column[static_cast<std::size_t>(r)] = m.at(r, s);
      std::uint64_t rho = a.rng.below(pp_.S);
      Ciphertext y = blinded_lookup(pk, zit->second, column, rho, pp_.S,
                                    &metrics_.paillier_hom_ops);
      net_.send(Message::y_value(k, t, std::move(y), pk.ciphertext_bytes()));
      a.scpa[static_cast<std::size_t>(t)] = rho;
    }
    if (k < inst_.n - 1) {
      int j = s;
      for (int t : a.iplus) {
        net_.send(Message::z_vector(k, t, a.indicators.vector_for(j).cells,
                                    a.key->pub().ciphertext_bytes()));
      }
    }
    shadow_[static_cast<std::size_t>(k)] = v;
    drain_passive();
    if (observer_) observer_->after_update_shares(view(), k);
  }

  void do_backtrack(int k) {
    Agent& a = agents_[static_cast<std::size_t>(k)];
    a.x.reset();
    shadow_[static_cast<std::size_t>(k)].reset();
    if (k > 0) {
      for (int t : a.iminus) {
        a.scpa[static_cast<std::size_t>(t)] = 0;
        net_.send(Message::zero_share(k, t, k));
      }
      drain_passive();
      if (observer_) observer_->after_backtrack(view(), k);
      net_.send(Message::command(MsgTag::Backtrack, k, k - 1));
    } else {
      if (observer_) observer_->after_backtrack(view(), k);
      net_.broadcast(Message::command(MsgTag::Complete, k));
      a.handle_complete();
    }
  }

  void announce_new_optimum(int k) {
    Agent& a = agents_[static_cast<std::size_t>(k)];
    net_.broadcast(Message::command(MsgTag::NewOptimum, k));
    a.handle_new_optimum(pp_.S);
    drain_passive();
    ++metrics_.new_optima;
    if (observer_) observer_->after_new_optimum(view());
  }

  bool compare_cpa_cost_to_upper_bound(int invoker) {
    check_cutoff();
    const int n = inst_.n;
    std::vector<std::uint64_t> x(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const Agent& a = agents_[static_cast<std::size_t>(k)];
      std::uint64_t a_k = a.cpa_share_sum(pp_.S);
      std::uint64_t b_k = a.sub % pp_.S;
      x[static_cast<std::size_t>(k)] = (b_k + pp_.S - a_k) % pp_.S;
    }
    bool result = backend_->compare(x);
    ++metrics_.comparisons;
    comparison_log_.emplace_back(invoker, result);
    if (observer_) observer_->on_comparison(view(), invoker, result);
    return result;
  }

  void drain_passive() {
    while (auto m = net_.deliver_next()) {
      dispatch(*m);
    }
  }

  void dispatch(const Message& m) {
    Agent& a = agents_[static_cast<std::size_t>(m.receiver)];
    switch (m.tag) {
      case MsgTag::PubKey: a.handle_pub_key(m.sender, m.pubkey); break;
      case MsgTag::ZVector: a.handle_z_vector(m.sender, m.cells); break;
      case MsgTag::YValue: a.handle_y_value(m.sender, m.cipher, pp_.S, metrics_); break;
      case MsgTag::ZeroShare: a.handle_zero_share(m.index); break;
      case MsgTag::NewOptimum: a.handle_new_optimum(pp_.S); break;
      case MsgTag::Complete: a.handle_complete(); break;
      case MsgTag::Cpa:
        a.p = 0;
        assign_cpa(m.receiver);
        break;
      case MsgTag::Backtrack: assign_cpa(m.receiver); break;
      case MsgTag::MaskedBits:
        throw ProtocolError("masked bits outside the comparison backend");
    }
  }

  void main_loop() {
    while (auto m = net_.deliver_next()) {
      dispatch(*m);
    }
    for (const auto& a : agents_) {
      if (!a.terminated) throw ProtocolError("engine: agent never terminated");
    }
  }

  void check_cutoff() {
    if (cfg_.cutoff_seconds <= 0) return;
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    if (elapsed.count() > cfg_.cutoff_seconds) {
      throw CutoffError("engine: cutoff exceeded");
    }
  }

  EngineResult collect() {
    EngineResult out;
    out.result.assignment = Assignment(inst_.n);
    for (int k = 0; k < inst_.n; ++k) {
      const auto& a = agents_[static_cast<std::size_t>(k)];
      if (!a.optimal_setting) throw ProtocolError("engine: agent finished without a value");
      out.result.assignment.values[static_cast<std::size_t>(k)] = a.optimal_setting;
    }
    out.result.cost = cost_of(inst_, out.result.assignment);
    out.result.stats.comparisons = metrics_.comparisons;
    out.result.stats.new_optima = metrics_.new_optima;
    out.result.stats.expansions = expansions_;
    out.result.stats.messages = net_.delivered();
    metrics_.messages = net_.delivered();
    metrics_.bytes = net_.bytes();
    const auto& usage = backend_->usage();
    metrics_.offline_triples = usage.offline_triples;
    metrics_.online_rounds = usage.online_rounds;
    metrics_.online_bits = usage.online_bits;
    out.metrics = metrics_;
    out.trace = net_.trace();
    out.comparisons = std::move(comparison_log_);
    return out;
  }

  const DcopInstance& inst_;
  EngineConfig cfg_;
  PublicParams pp_;
  SimNet net_;
  RunObserver* observer_;
  std::vector<Agent> agents_;
  std::unique_ptr<CompareBackend> backend_;
  RunMetrics metrics_;
  std::vector<std::optional<int>> shadow_;
  std::vector<std::pair<int, bool>> comparison_log_;
  std::uint64_t expansions_ = 0;
  int torch_ = 0;
  std::chrono::steady_clock::time_point start_;
};

// Convenience wrapper mirroring the plaintext solvers.
inline EngineResult pc_syncbb(const DcopInstance& inst, EngineConfig cfg = {},
                              RunObserver* observer = nullptr) {
  PcSyncBbEngine engine(inst, std::move(cfg), observer);
  return engine.run();
}

// ---------------------------------------------------------------------------
// Instrumented share-identity checks, evaluated from the god's-eye view.
// ---------------------------------------------------------------------------

class InvariantChecker : public RunObserver {
 public:
  explicit InvariantChecker(const DcopInstance& inst) : inst_(inst) {}

  std::uint64_t checks() const { return checks_; }
  const std::vector<std::string>& violations() const { return violations_; }
  bool clean() const { return violations_.empty(); }

  void after_init(const EngineView& v) override {
    bound_ = v.pp.q_inf;
    check_bound_shares(v, "init");
  }

  void after_update_shares(const EngineView& v, int agent) override {
    const Agent& a = v.agents[static_cast<std::size_t>(agent)];
    // Pairwise share identity toward every constrained predecessor.
    for (int t : a.iminus) {
      if (!v.shadow[static_cast<std::size_t>(t)]) continue;
      int r = inst_.value_index(t, *v.shadow[static_cast<std::size_t>(t)]);
      int s = inst_.value_index(agent, *v.shadow[static_cast<std::size_t>(agent)]);
      std::uint64_t want =
          static_cast<std::uint64_t>(inst_.matrix(t, agent).at(r, s)) % v.pp.S;
      std::uint64_t got =
          (a.scpa[static_cast<std::size_t>(t)] +
           v.agents[static_cast<std::size_t>(t)].scpa[static_cast<std::size_t>(agent)]) %
          v.pp.S;
      ++checks_;
      if (got != want) {
        violations_.push_back("pair share sum mismatch at agent " +
                              std::to_string(agent + 1));
      }
    }
    check_cpa_shares(v, "update");
  }

  void after_backtrack(const EngineView& v, int agent) override {
    (void)agent;
    check_cpa_shares(v, "backtrack");
  }

  void after_new_optimum(const EngineView& v) override {
    Cost cost = shadow_cost(v);
    ++checks_;
    if (cost >= bound_) {
      violations_.push_back("new optimum not strictly below the bound");
    }
    bound_ = cost;
    check_bound_shares(v, "new optimum");
  }

  void on_comparison(const EngineView& v, int agent, bool result) override {
    (void)agent;
    Cost cost = shadow_cost(v);
    ++checks_;
    if (result != (cost < bound_)) {
      violations_.push_back("comparison outcome disagrees with plaintext");
    }
  }

 private:
  Cost shadow_cost(const EngineView& v) const {
    Assignment pa(inst_.n);
    pa.values.assign(v.shadow.begin(), v.shadow.end());
    return cost_of(inst_, pa);
  }

  // Reconstructed CPA cost must match the plaintext cost of the shadow CPA.
  void check_cpa_shares(const EngineView& v, const char* where) {
    std::uint64_t sum = 0;
    for (const auto& a : v.agents) sum = (sum + a.cpa_share_sum(v.pp.S)) % v.pp.S;
    Cost plain = shadow_cost(v);
    ++checks_;
    if (sum != static_cast<std::uint64_t>(plain) % v.pp.S) {
      violations_.push_back(std::string("CPA share sum mismatch after ") + where);
    }
  }

  // Reconstructed bound must match the best full-assignment cost so far.
  void check_bound_shares(const EngineView& v, const char* where) {
    std::uint64_t sum = 0;
    for (const auto& a : v.agents) sum = (sum + a.sub) % v.pp.S;
    ++checks_;
    if (sum != static_cast<std::uint64_t>(bound_) % v.pp.S) {
      violations_.push_back(std::string("bound share sum mismatch after ") + where);
    }
  }

  const DcopInstance& inst_;
  Cost bound_ = -1;
  std::uint64_t checks_ = 0;
  std::vector<std::string> violations_;
};

}  // namespace pcsbb
