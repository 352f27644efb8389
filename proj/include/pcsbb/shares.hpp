#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcsbb/rng.hpp"

namespace pcsbb {

// Arithmetic modulo the share modulus S. S is a power of two well below
// 2^63, so plain integer arithmetic never overflows here.
struct ModRing {
  std::uint64_t S;

  explicit ModRing(std::uint64_t s) : S(s) {
    if (s < 2) throw std::invalid_argument("ModRing: need S >= 2");
  }

  std::uint64_t reduce(std::uint64_t v) const { return v % S; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % S; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + S - b % S) % S; }
  std::uint64_t neg(std::uint64_t a) const { return (S - a % S) % S; }
};

// Additive sharing of v over Z_S: all but the last share are uniform, the
// last balances the sum.
inline std::vector<std::uint64_t> share_split(std::uint64_t v, int parts,
                                              ChaChaRng& rng, std::uint64_t S) {
  if (parts < 1) throw std::invalid_argument("share_split: need parts >= 1");
  if (v >= S) throw std::invalid_argument("share_split: value outside Z_S");
  std::vector<std::uint64_t> shares(static_cast<std::size_t>(parts));
  std::uint64_t acc = 0;
  for (int i = 0; i + 1 < parts; ++i) {
    shares[static_cast<std::size_t>(i)] = rng.below(S);
    acc = (acc + shares[static_cast<std::size_t>(i)]) % S;
  }
  shares[static_cast<std::size_t>(parts - 1)] = (v + S - acc) % S;
  return shares;
}

inline std::uint64_t share_reconstruct(std::span<const std::uint64_t> shares,
                                       std::uint64_t S) {
  if (shares.empty()) throw std::invalid_argument("share_reconstruct: no shares");
  std::uint64_t acc = 0;
  for (std::uint64_t s : shares) acc = (acc + s % S) % S;
  return acc;
}

}  // namespace pcsbb
