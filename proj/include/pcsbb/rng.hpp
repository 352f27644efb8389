#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace pcsbb {

// Deterministic ChaCha20-based random stream. All protocol randomness is
// drawn from these streams so that a whole run replays bit-exactly from a
// single seed. Distinct stream ids on the same seed give independent streams.
class ChaChaRng {
 public:
  using result_type = std::uint64_t;

  explicit ChaChaRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : nonce_(stream_id) {
    // Expand the 64-bit seed into a 256-bit key (splitmix64 chain).
    std::uint64_t x = seed;
    for (int i = 0; i < 4; ++i) {
      x += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z = z ^ (z >> 31);
      key_[2 * i] = static_cast<std::uint32_t>(z);
      key_[2 * i + 1] = static_cast<std::uint32_t>(z >> 32);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() { return next_u64(); }

  std::uint32_t next_u32() {
    if (pos_ >= 16) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Unbiased draw from [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("ChaChaRng::below: bound == 0");
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    const std::uint64_t limit = ~0ull - (~0ull % bound) - 1;
    for (;;) {
      std::uint64_t v = next_u64();
      if (v <= limit) return v % bound;
    }
  }

  bool next_bit() { return (next_u32() & 1u) != 0; }

  void fill_bytes(unsigned char* out, std::size_t n) {
    std::size_t i = 0;
    while (i < n) {
      std::uint32_t w = next_u32();
      for (int b = 0; b < 4 && i < n; ++b, ++i) {
        out[i] = static_cast<unsigned char>(w >> (8 * b));
      }
    }
  }

  // Independent child stream: same key, distinct nonce.
  ChaChaRng stream(std::uint64_t id) const {
    ChaChaRng child = *this;
    child.nonce_ = id;
    child.counter_ = 0;
    child.pos_ = 16;
    return child;
  }

  // Fisher-Yates; self-contained so shuffles are reproducible across
  // standard library implementations.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint32_t rotl(std::uint32_t x, int r) {
    return (x << r) | (x >> (32 - r));
  }

  static void quarter_round(std::uint32_t& a, std::uint32_t& b,
                            std::uint32_t& c, std::uint32_t& d) {
    a += b; d ^= a; d = rotl(d, 16);
    c += d; b ^= c; b = rotl(b, 12);
    a += b; d ^= a; d = rotl(d, 8);
    c += d; b ^= c; b = rotl(b, 7);
  }

  void refill() {
    std::array<std::uint32_t, 16> s;
    s[0] = 0x61707865u; s[1] = 0x3320646eu;
    s[2] = 0x79622d32u; s[3] = 0x6b206574u;
    for (int i = 0; i < 8; ++i) s[4 + i] = key_[i];
    s[12] = static_cast<std::uint32_t>(counter_);
    s[13] = static_cast<std::uint32_t>(counter_ >> 32);
    s[14] = static_cast<std::uint32_t>(nonce_);
    s[15] = static_cast<std::uint32_t>(nonce_ >> 32);

    std::array<std::uint32_t, 16> x = s;
    for (int round = 0; round < 10; ++round) {
      quarter_round(x[0], x[4], x[8], x[12]);
      quarter_round(x[1], x[5], x[9], x[13]);
      quarter_round(x[2], x[6], x[10], x[14]);
      quarter_round(x[3], x[7], x[11], x[15]);
      quarter_round(x[0], x[5], x[10], x[15]);
      quarter_round(x[1], x[6], x[11], x[12]);
      quarter_round(x[2], x[7], x[8], x[13]);
      quarter_round(x[3], x[4], x[9], x[14]);
    }
    for (int i = 0; i < 16; ++i) block_[i] = x[i] + s[i];
    ++counter_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 8> key_{};
  std::uint64_t nonce_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 16> block_{};
  int pos_ = 16;
};

}  // namespace pcsbb
