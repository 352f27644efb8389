#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pcsbb/circuit.hpp"
#include "pcsbb/rng.hpp"

namespace pcsbb {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reference functionality for the joint bound check: with every party
// contributing x_k = (b_k - a_k) mod S, the sum is (beta - alpha) mod S and
// the strict comparison alpha < beta holds exactly when the decremented sum
// stays below S/2. Matches the circuit on every input vector.
inline bool ideal_compare(std::span<const std::uint64_t> inputs, std::uint64_t S) {
  if (inputs.empty()) throw std::invalid_argument("ideal_compare: no inputs");
  std::uint64_t sum = 0;
  for (std::uint64_t x : inputs) {
    if (x >= S) throw std::invalid_argument("ideal_compare: input outside Z_S");
    sum = (sum + x) % S;
  }
  return (sum + S - 1) % S < S / 2;
}

// GF(2) multiplication triple shares, one triple consumed per AND gate.
struct BeaverTripleShare {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint8_t c = 0;
};

struct CorrelatedRandomness {
  std::uint64_t circuit_fingerprint = 0;
  int parties = 0;
  int party_index = 0;
  std::vector<BeaverTripleShare> triples;
};

class TripleProvider {
 public:
  virtual ~TripleProvider() = default;
  virtual std::vector<CorrelatedRandomness> deal(const ComparisonCircuit& circuit,
                                                 ChaChaRng& rng) = 0;
  virtual std::string_view name() const = 0;
};

// Local trusted dealer: samples each triple and additively shares it among
// the parties. Stands in for a distributed offline protocol behind the same
// interface.
class DealerTripleProvider final : public TripleProvider {
 public:
  std::vector<CorrelatedRandomness> deal(const ComparisonCircuit& circuit,
                                         ChaChaRng& rng) override {
    const int n = circuit.parties;
    const std::size_t count = circuit.and_count();
    std::vector<CorrelatedRandomness> out(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
      out[static_cast<std::size_t>(p)].circuit_fingerprint = circuit.fingerprint();
      out[static_cast<std::size_t>(p)].parties = n;
      out[static_cast<std::size_t>(p)].party_index = p;
      out[static_cast<std::size_t>(p)].triples.resize(count);
    }
    for (std::size_t t = 0; t < count; ++t) {
      std::uint8_t a = rng.next_bit(), b = rng.next_bit();
      std::uint8_t c = a & b;
      std::uint8_t sa = 0, sb = 0, sc = 0;
      for (int p = 0; p + 1 < n; ++p) {
        auto& sh = out[static_cast<std::size_t>(p)].triples[t];
        sh.a = rng.next_bit();
        sh.b = rng.next_bit();
        sh.c = rng.next_bit();
        sa ^= sh.a;
        sb ^= sh.b;
        sc ^= sh.c;
      }
      auto& last = out[static_cast<std::size_t>(n - 1)].triples[t];
      last.a = a ^ sa;
      last.b = b ^ sb;
      last.c = c ^ sc;
    }
    return out;
  }

  std::string_view name() const override { return "dealer"; }
};

inline std::vector<CorrelatedRandomness> offline_phase(
    const ComparisonCircuit& circuit, TripleProvider& provider, ChaChaRng& rng) {
  auto materials = provider.deal(circuit, rng);
  if (materials.size() != static_cast<std::size_t>(circuit.parties)) {
    throw ProtocolError("offline_phase: provider returned wrong party count");
  }
  for (const auto& m : materials) {
    if (m.triples.size() < circuit.and_count()) {
      throw ProtocolError("offline_phase: not enough triples");
    }
  }
  return materials;
}

struct OnlineStats {
  int rounds = 0;               // AND layers opened; equals the AND depth
  std::uint64_t bits_sent = 0;  // total bits across all parties, input
                                // sharing and output opening included
  std::uint64_t and_gates = 0;
  std::uint64_t input_bits = 0;
};

// Observer for every point-to-point transmission of the online phase.
using MpcMessageSink = std::function<void(int from, int to, int bits)>;

// Share-based circuit evaluation over the dealt triples: XOR and NOT are
// local, each AND costs one masked opening, ANDs at the same depth share a
// round. All parties end up with the opened output bit.
inline bool online_phase(const ComparisonCircuit& circuit,
                         std::span<const std::uint64_t> inputs,
                         std::vector<CorrelatedRandomness>& materials,
                         ChaChaRng& rng, OnlineStats* stats = nullptr,
                         std::vector<std::vector<std::uint8_t>>* transcripts = nullptr,
                         const MpcMessageSink& sink = {}) {
  const int n = circuit.parties;
  if (inputs.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("online_phase: wrong input count");
  }
  if (materials.size() != static_cast<std::size_t>(n)) {
    throw ProtocolError("online_phase: materials for wrong party count");
  }
  for (const auto& m : materials) {
    if (m.circuit_fingerprint != circuit.fingerprint()) {
      throw ProtocolError("online_phase: materials do not match circuit");
    }
  }

  OnlineStats local;
  if (transcripts) transcripts->assign(static_cast<std::size_t>(n), {});

  auto record_send = [&](int from, int to, int bits) {
    local.bits_sent += static_cast<std::uint64_t>(bits);
    if (sink) sink(from, to, bits);
  };

  // share[p][w] = party p's GF(2) share of wire w.
  std::vector<std::vector<std::uint8_t>> share(
      static_cast<std::size_t>(n), std::vector<std::uint8_t>(circuit.num_wires, 0));

  // Input sharing: the owner splits each bit and hands one share to every
  // other party.
  for (int k = 0; k < n; ++k) {
    for (int bit = 0; bit < circuit.ell; ++bit) {
      std::uint8_t v = static_cast<std::uint8_t>(
          (inputs[static_cast<std::size_t>(k)] >> bit) & 1);
      std::uint8_t own = v;
      for (int p = 0; p < n; ++p) {
        if (p == k) continue;
        std::uint8_t s = rng.next_bit();
        share[static_cast<std::size_t>(p)][circuit.input_wire(k, bit)] = s;
        own ^= s;
        record_send(k, p, 1);
        ++local.input_bits;
        if (transcripts) (*transcripts)[static_cast<std::size_t>(k)].push_back(s);
      }
      share[static_cast<std::size_t>(k)][circuit.input_wire(k, bit)] = own;
    }
  }

  // Dependency counters drive the layered evaluation.
  std::vector<std::uint8_t> wire_ready(circuit.num_wires, 0);
  for (std::size_t i = 0; i < circuit.input_count(); ++i) wire_ready[i] = 1;
  std::vector<int> missing(circuit.gates.size(), 0);
  std::vector<std::vector<std::uint32_t>> consumers(circuit.num_wires);
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    const auto& gate = circuit.gates[g];
    int need = 0;
    if (!wire_ready[gate.a]) {
      consumers[gate.a].push_back(static_cast<std::uint32_t>(g));
      ++need;
    }
    if (gate.op != GateOp::Not && !wire_ready[gate.b] && gate.b != gate.a) {
      consumers[gate.b].push_back(static_cast<std::uint32_t>(g));
      ++need;
    }
    missing[g] = need;
  }

  std::vector<std::uint32_t> local_queue;   // XOR/NOT ready to evaluate
  std::vector<std::uint32_t> and_ready;     // ANDs for the current round
  std::vector<std::uint32_t> and_next;      // ANDs unlocked mid-round
  for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
    if (missing[g] == 0) {
      (circuit.gates[g].op == GateOp::And ? and_ready : local_queue)
          .push_back(static_cast<std::uint32_t>(g));
    }
  }

  std::size_t done = 0;
  std::vector<std::size_t> next_triple(static_cast<std::size_t>(n), 0);

  auto mark_ready = [&](std::uint32_t wire, std::vector<std::uint32_t>& and_sink_list) {
    wire_ready[wire] = 1;
    for (std::uint32_t g : consumers[wire]) {
      if (--missing[g] == 0) {
        (circuit.gates[g].op == GateOp::And ? and_sink_list : local_queue).push_back(g);
      }
    }
  };

  auto drain_local = [&](std::vector<std::uint32_t>& and_sink_list) {
    while (!local_queue.empty()) {
      std::uint32_t g = local_queue.back();
      local_queue.pop_back();
      const auto& gate = circuit.gates[g];
      for (int p = 0; p < n; ++p) {
        auto& sh = share[static_cast<std::size_t>(p)];
        if (gate.op == GateOp::Xor) {
          sh[gate.out] = sh[gate.a] ^ sh[gate.b];
        } else {  // Not: a single designated party flips its share
          sh[gate.out] = static_cast<std::uint8_t>(sh[gate.a] ^ (p == 0 ? 1 : 0));
        }
      }
      ++done;
      mark_ready(gate.out, and_sink_list);
    }
  };

  drain_local(and_ready);

  while (!and_ready.empty()) {
    ++local.rounds;
    and_next.clear();
    // One communication round: masked openings for every AND in the layer.
    std::vector<std::uint8_t> opened_d(and_ready.size(), 0), opened_e(and_ready.size(), 0);
    for (std::size_t i = 0; i < and_ready.size(); ++i) {
      const auto& gate = circuit.gates[and_ready[i]];
      for (int p = 0; p < n; ++p) {
        auto& m = materials[static_cast<std::size_t>(p)];
        std::size_t t = next_triple[static_cast<std::size_t>(p)]++;
        if (t >= m.triples.size()) throw ProtocolError("online_phase: triples exhausted");
        const auto& triple = m.triples[t];
        std::uint8_t d = share[static_cast<std::size_t>(p)][gate.a] ^ triple.a;
        std::uint8_t e = share[static_cast<std::size_t>(p)][gate.b] ^ triple.b;
        opened_d[i] ^= d;
        opened_e[i] ^= e;
        if (transcripts) {
          (*transcripts)[static_cast<std::size_t>(p)].push_back(d);
          (*transcripts)[static_cast<std::size_t>(p)].push_back(e);
        }
        for (int q = 0; q < n; ++q) {
          if (q != p) record_send(p, q, 2);
        }
      }
    }
    for (std::size_t i = 0; i < and_ready.size(); ++i) {
      const auto& gate = circuit.gates[and_ready[i]];
      std::uint8_t d = opened_d[i], e = opened_e[i];
      for (int p = 0; p < n; ++p) {
        auto& m = materials[static_cast<std::size_t>(p)];
        // Triples were consumed in gate order above; index back into them.
        std::size_t t = next_triple[static_cast<std::size_t>(p)] - and_ready.size() + i;
        const auto& triple = m.triples[t];
        std::uint8_t z = static_cast<std::uint8_t>(
            triple.c ^ (d & triple.b) ^ (e & triple.a) ^ (p == 0 ? (d & e) : 0));
        share[static_cast<std::size_t>(p)][gate.out] = z;
      }
      ++done;
      ++local.and_gates;
      mark_ready(gate.out, and_next);
    }
    drain_local(and_next);
    std::swap(and_ready, and_next);
  }

  if (done != circuit.gates.size()) {
    throw ProtocolError("online_phase: circuit evaluation stalled");
  }

  // Output opening: every party reveals its share of the output wire.
  std::uint8_t result = 0;
  for (int p = 0; p < n; ++p) {
    std::uint8_t s = share[static_cast<std::size_t>(p)][circuit.output];
    result ^= s;
    if (transcripts) (*transcripts)[static_cast<std::size_t>(p)].push_back(s);
    for (int q = 0; q < n; ++q) {
      if (q != p) record_send(p, q, 1);
    }
  }

  if (stats) *stats = local;
  return result != 0;
}

// ---------------------------------------------------------------------------
// Backend selection used by the solver engine.
// ---------------------------------------------------------------------------

struct CompareUsage {
  std::uint64_t invocations = 0;
  std::uint64_t offline_triples = 0;
  std::uint64_t online_rounds = 0;
  std::uint64_t online_bits = 0;
};

class CompareBackend {
 public:
  virtual ~CompareBackend() = default;
  virtual bool compare(std::span<const std::uint64_t> inputs) = 0;
  virtual std::string_view name() const = 0;
  virtual const CompareUsage& usage() const { return usage_; }

 protected:
  CompareUsage usage_;
};

// Trusted-evaluator reference backend.
class IdealCompareBackend final : public CompareBackend {
 public:
  explicit IdealCompareBackend(std::uint64_t S) : S_(S) {}

  bool compare(std::span<const std::uint64_t> inputs) override {
    ++usage_.invocations;
    return ideal_compare(inputs, S_);
  }

  std::string_view name() const override { return "ideal"; }

 private:
  std::uint64_t S_;
};

// Triple-based evaluation of the comparison circuit; fresh offline materials
// per invocation.
class MpcCompareBackend final : public CompareBackend {
 public:
  MpcCompareBackend(int parties, int ell, ChaChaRng rng,
                    TripleProvider* provider = nullptr,
                    MpcMessageSink sink = {})
      : circuit_(build_comparison_circuit(parties, ell)),
        rng_(rng),
        provider_(provider),
        sink_(std::move(sink)) {}

  bool compare(std::span<const std::uint64_t> inputs) override {
    DealerTripleProvider dealer;
    TripleProvider& provider = provider_ ? *provider_ : static_cast<TripleProvider&>(dealer);
    auto materials = offline_phase(circuit_, provider, rng_);
    OnlineStats stats;
    bool out = online_phase(circuit_, inputs, materials, rng_, &stats, nullptr, sink_);
    ++usage_.invocations;
    usage_.offline_triples += circuit_.and_count();
    usage_.online_rounds += static_cast<std::uint64_t>(stats.rounds);
    usage_.online_bits += stats.bits_sent;
    return out;
  }

  std::string_view name() const override { return "mpc"; }
  const ComparisonCircuit& circuit() const { return circuit_; }

 private:
  ComparisonCircuit circuit_;
  ChaChaRng rng_;
  TripleProvider* provider_;
  MpcMessageSink sink_;
};

}  // namespace pcsbb
