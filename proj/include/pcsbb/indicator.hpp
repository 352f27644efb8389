#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcsbb/dcop.hpp"
#include "pcsbb/paillier.hpp"

namespace pcsbb {

// Element-wise encryption of a unit vector: cell `index` holds an encryption
// of 1, every other cell an encryption of 0.
struct EncIndicatorVector {
  int index = 0;  // 0-based position of the encrypted 1
  std::vector<Ciphertext> cells;
};

// All |D| indicator vectors of one agent. Only the base vector is ever
// encrypted; the others are circular right-shifts of it, so every vector
// reuses the same ciphertexts in rotated positions.
class IndicatorFamily {
 public:
  IndicatorFamily() = default;

  IndicatorFamily(const PaillierContext& ctx, int domain_size, ChaChaRng& rng) {
    if (domain_size < 1) throw std::invalid_argument("IndicatorFamily: empty domain");
    base_.reserve(static_cast<std::size_t>(domain_size));
    base_.push_back(ctx.encrypt_u64(1, rng));
    // The zero cells must each use independently drawn randomness.
    for (int i = 1; i < domain_size; ++i) base_.push_back(ctx.encrypt_u64(0, rng));
  }

  int domain_size() const { return static_cast<int>(base_.size()); }

  // Vector whose 1 sits at `index`: base vector shifted right `index` times.
  EncIndicatorVector vector_for(int index) const {
    int d = domain_size();
    if (index < 0 || index >= d) throw std::invalid_argument("IndicatorFamily: index out of range");
    EncIndicatorVector v;
    v.index = index;
    v.cells.resize(static_cast<std::size_t>(d));
    for (int pos = 0; pos < d; ++pos) {
      v.cells[static_cast<std::size_t>(pos)] =
          base_[static_cast<std::size_t>(((pos - index) % d + d) % d)];
    }
    return v;
  }

 private:
  std::vector<Ciphertext> base_;
};

inline std::vector<EncIndicatorVector> build_indicator_vectors(
    const PaillierContext& ctx, int domain_size, ChaChaRng& rng) {
  IndicatorFamily fam(ctx, domain_size, rng);
  std::vector<EncIndicatorVector> out;
  out.reserve(static_cast<std::size_t>(domain_size));
  for (int i = 0; i < domain_size; ++i) out.push_back(fam.vector_for(i));
  return out;
}

// Blinded oblivious lookup over an indicator vector z encoding position r:
//   prod_i z(i)^((column[i] - rho) mod S)
// decrypts to (column[r] - rho) mod S without the evaluator learning r.
inline Ciphertext blinded_lookup(const PaillierPublicKey& pk,
                                 std::span<const Ciphertext> z,
                                 std::span<const Cost> column,
                                 std::uint64_t rho, std::uint64_t S,
                                 std::uint64_t* op_counter = nullptr) {
  if (z.size() != column.size() || z.empty()) {
    throw std::invalid_argument("blinded_lookup: column/vector size mismatch");
  }
  Ciphertext acc{mpz_class(1), pk.fingerprint};
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::uint64_t e = (static_cast<std::uint64_t>(column[i]) % S + S - rho % S) % S;
    if (e == 0) continue;  // z(i)^0 is the unit factor
    acc = hom_add(pk, acc, hom_scale(pk, z[i], e));
    if (op_counter) *op_counter += 2;
  }
  return acc;
}

}  // namespace pcsbb
