#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcsbb {

enum class GateOp : std::uint8_t { Xor, And, Not };

struct Gate {
  GateOp op;
  std::uint32_t a = 0;
  std::uint32_t b = 0;  // unused for Not
  std::uint32_t out = 0;
};

// Boolean circuit deciding whether the sum of the party inputs modulo 2^ell
// lies in (0, 2^(ell-1)]: n-operand ripple-carry addition, subtract one via
// a borrow chain, and negate the resulting sign bit.
struct ComparisonCircuit {
  int parties = 0;
  int ell = 0;
  std::uint32_t num_wires = 0;
  std::uint32_t output = 0;
  std::vector<Gate> gates;

  std::uint32_t input_wire(int party, int bit) const {
    return static_cast<std::uint32_t>(party * ell + bit);
  }
  std::size_t input_count() const { return static_cast<std::size_t>(parties) * ell; }

  std::size_t and_count() const {
    std::size_t c = 0;
    for (const auto& g : gates) c += g.op == GateOp::And;
    return c;
  }

  // Longest chain of AND gates; the number of communication rounds a
  // share-based evaluation needs.
  int and_depth() const {
    std::vector<int> depth(num_wires, 0);
    int max_depth = 0;
    for (const auto& g : gates) {
      int d = depth[g.a];
      if (g.op != GateOp::Not) d = std::max(d, static_cast<int>(depth[g.b]));
      if (g.op == GateOp::And) ++d;
      depth[g.out] = d;
      max_depth = std::max(max_depth, d);
    }
    return max_depth;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
      }
    };
    mix(static_cast<std::uint64_t>(parties));
    mix(static_cast<std::uint64_t>(ell));
    for (const auto& g : gates) {
      mix(static_cast<std::uint64_t>(g.op));
      mix(g.a);
      mix(g.b);
      mix(g.out);
    }
    return h;
  }

  // One gate per line: AND|XOR|NOT in1 [in2] out
  void dump(std::ostream& os) const {
    for (const auto& g : gates) {
      switch (g.op) {
        case GateOp::And: os << "AND " << g.a << ' ' << g.b << ' ' << g.out << '\n'; break;
        case GateOp::Xor: os << "XOR " << g.a << ' ' << g.b << ' ' << g.out << '\n'; break;
        case GateOp::Not: os << "NOT " << g.a << ' ' << g.out << '\n'; break;
      }
    }
  }

  std::string dump() const {
    std::ostringstream os;
    dump(os);
    return os.str();
  }
};

inline ComparisonCircuit build_comparison_circuit(int parties, int ell) {
  if (parties < 2) throw std::invalid_argument("build_comparison_circuit: need n >= 2");
  if (ell < 2) throw std::invalid_argument("build_comparison_circuit: need ell >= 2");

  ComparisonCircuit c;
  c.parties = parties;
  c.ell = ell;
  c.num_wires = static_cast<std::uint32_t>(parties * ell);

  auto fresh = [&c]() { return c.num_wires++; };
  auto emit_xor = [&](std::uint32_t a, std::uint32_t b) {
    std::uint32_t w = fresh();
    c.gates.push_back({GateOp::Xor, a, b, w});
    return w;
  };
  auto emit_and = [&](std::uint32_t a, std::uint32_t b) {
    std::uint32_t w = fresh();
    c.gates.push_back({GateOp::And, a, b, w});
    return w;
  };
  auto emit_not = [&](std::uint32_t a) {
    std::uint32_t w = fresh();
    c.gates.push_back({GateOp::Not, a, 0, w});
    return w;
  };

  // Accumulate the operands with ell-bit ripple-carry adders, carry out of
  // the top bit discarded. carry' = c ^ ((a^c) & (b^c)) costs one AND per
  // full adder.
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(ell));
  for (int bit = 0; bit < ell; ++bit) acc[static_cast<std::size_t>(bit)] = c.input_wire(0, bit);
  for (int k = 1; k < parties; ++k) {
    std::vector<std::uint32_t> sum(static_cast<std::size_t>(ell));
    std::uint32_t carry = 0;
    for (int bit = 0; bit < ell; ++bit) {
      std::uint32_t a = acc[static_cast<std::size_t>(bit)];
      std::uint32_t b = c.input_wire(k, bit);
      if (bit == 0) {
        sum[0] = emit_xor(a, b);
        if (ell > 1) carry = emit_and(a, b);
      } else {
        std::uint32_t axc = emit_xor(a, carry);
        sum[static_cast<std::size_t>(bit)] = emit_xor(axc, b);
        if (bit < ell - 1) {
          std::uint32_t bxc = emit_xor(b, carry);
          carry = emit_xor(carry, emit_and(axc, bxc));
        }
      }
    }
    acc = std::move(sum);
  }

  // Subtract one: borrow ripples up through the low bits, so the borrow
  // reaching the top bit is the AND of all lower bits negated.
  std::uint32_t borrow = emit_not(acc[0]);
  for (int bit = 1; bit < ell - 1; ++bit) {
    borrow = emit_and(borrow, emit_not(acc[static_cast<std::size_t>(bit)]));
  }
  std::uint32_t sign = emit_xor(acc[static_cast<std::size_t>(ell - 1)], borrow);
  c.output = emit_not(sign);
  return c;
}

// Reference evaluation on plaintext bits, one entry per input wire.
inline bool eval_circuit_bits(const ComparisonCircuit& c,
                              std::span<const std::uint8_t> input_bits) {
  if (input_bits.size() != c.input_count()) {
    throw std::invalid_argument("eval_circuit_bits: wrong input count");
  }
  std::vector<std::uint8_t> wire(c.num_wires, 0);
  for (std::size_t i = 0; i < input_bits.size(); ++i) wire[i] = input_bits[i] & 1;
  for (const auto& g : c.gates) {
    switch (g.op) {
      case GateOp::Xor: wire[g.out] = wire[g.a] ^ wire[g.b]; break;
      case GateOp::And: wire[g.out] = wire[g.a] & wire[g.b]; break;
      case GateOp::Not: wire[g.out] = wire[g.a] ^ 1; break;
    }
  }
  return wire[c.output] != 0;
}

// Convenience wrapper taking the party inputs as integers modulo 2^ell.
inline bool eval_circuit(const ComparisonCircuit& c,
                         std::span<const std::uint64_t> inputs) {
  if (inputs.size() != static_cast<std::size_t>(c.parties)) {
    throw std::invalid_argument("eval_circuit: wrong party count");
  }
  std::vector<std::uint8_t> bits(c.input_count());
  for (int k = 0; k < c.parties; ++k) {
    for (int bit = 0; bit < c.ell; ++bit) {
      bits[c.input_wire(k, bit)] =
          static_cast<std::uint8_t>((inputs[static_cast<std::size_t>(k)] >> bit) & 1);
    }
  }
  return eval_circuit_bits(c, bits);
}

}  // namespace pcsbb
