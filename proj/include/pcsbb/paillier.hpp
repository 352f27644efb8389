#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsbb/rng.hpp"

namespace pcsbb {

namespace detail {

inline mpz_class mpz_from_rng_bits(ChaChaRng& rng, std::size_t bits) {
  std::size_t bytes = (bits + 7) / 8;
  std::vector<unsigned char> buf(bytes);
  rng.fill_bytes(buf.data(), bytes);
  mpz_class out;
  mpz_import(out.get_mpz_t(), bytes, 1, 1, 0, 0, buf.data());
  // Trim to exactly `bits` bits.
  mpz_class mask = (mpz_class(1) << bits) - 1;
  out &= mask;
  return out;
}

inline mpz_class mpz_below(ChaChaRng& rng, const mpz_class& bound) {
  if (bound <= 0) throw std::invalid_argument("mpz_below: bound <= 0");
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  for (;;) {
    mpz_class v = mpz_from_rng_bits(rng, bits);
    if (v < bound) return v;
  }
}

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t mpz_fingerprint(const mpz_class& v) {
  std::size_t count = 0;
  std::vector<unsigned char> buf((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(buf.data(), &count, 1, 1, 0, 0, v.get_mpz_t());
  return fnv1a(buf.data(), count);
}

}  // namespace detail

struct KeyMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Public half of a Paillier key: modulus and derived constants. The
// generator is fixed to n+1, so encryption needs no extra state.
struct PaillierPublicKey {
  mpz_class n;
  mpz_class n_squared;
  int bits = 0;
  std::uint64_t fingerprint = 0;

  // Canonical wire size of one ciphertext (an element of Z_{n^2}).
  std::size_t ciphertext_bytes() const { return static_cast<std::size_t>(bits) / 4; }
  std::size_t key_bytes() const { return static_cast<std::size_t>(bits) / 8; }
};

struct Ciphertext {
  mpz_class value;        // element of Z*_{n^2}
  std::uint64_t key = 0;  // fingerprint of the owning public key
};

// Key pair plus decryption state. Decryption runs through the CRT split.
class PaillierContext {
 public:
  // Deterministic key generation from the supplied stream.
  static PaillierContext generate(int bits, ChaChaRng& rng) {
    if (bits < 512) throw std::invalid_argument("paillier: need at least 512-bit keys");
    for (int attempt = 0; attempt < 1000; ++attempt) {
      mpz_class p = random_prime(rng, bits / 2);
      mpz_class q = random_prime(rng, bits - bits / 2);
      if (p == q) continue;
      mpz_class n = p * q;
      mpz_class lambda;
      mpz_class pm1 = p - 1, qm1 = q - 1;
      mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), lambda.get_mpz_t());
      if (g != 1) continue;
      return PaillierContext(std::move(p), std::move(q), std::move(n), bits);
    }
    throw std::runtime_error("paillier: prime generation failed");
  }

  const PaillierPublicKey& pub() const { return pub_; }

  Ciphertext encrypt(const mpz_class& m, ChaChaRng& rng) const {
    if (m < 0 || m >= pub_.n) throw std::invalid_argument("paillier: plaintext outside Z_n");
    mpz_class r;
    do {
      r = detail::mpz_below(rng, pub_.n);
    } while (r == 0 || gcd_with_n(r) != 1);
    // (1 + m*n) * r^n mod n^2
    mpz_class c = 1 + m * pub_.n;
    c %= pub_.n_squared;
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pub_.n.get_mpz_t(),
             pub_.n_squared.get_mpz_t());
    c = c * rn % pub_.n_squared;
    return Ciphertext{std::move(c), pub_.fingerprint};
  }

  Ciphertext encrypt_u64(std::uint64_t m, ChaChaRng& rng) const {
    return encrypt(mpz_class(static_cast<unsigned long>(m)), rng);
  }

  mpz_class decrypt(const Ciphertext& c) const {
    if (c.key != pub_.fingerprint) throw KeyMismatchError("paillier: wrong key for ciphertext");
    // m mod p and m mod q, then CRT.
    mpz_class mp = half_decrypt(c.value, p_, p2_, hp_);
    mpz_class mq = half_decrypt(c.value, q_, q2_, hq_);
    mpz_class diff = (mp - mq) % p_;
    if (diff < 0) diff += p_;
    mpz_class m = mq + q_ * (diff * q_inv_p_ % p_);
    return m % pub_.n;
  }

  std::uint64_t decrypt_u64(const Ciphertext& c) const {
    mpz_class m = decrypt(c);
    if (!m.fits_ulong_p()) throw std::runtime_error("paillier: plaintext exceeds 64 bits");
    return static_cast<std::uint64_t>(m.get_ui());
  }

 private:
  PaillierContext(mpz_class p, mpz_class q, mpz_class n, int bits)
      : p_(std::move(p)), q_(std::move(q)) {
    pub_.n = std::move(n);
    pub_.n_squared = pub_.n * pub_.n;
    pub_.bits = bits;
    pub_.fingerprint = detail::mpz_fingerprint(pub_.n);
    p2_ = p_ * p_;
    q2_ = q_ * q_;
    mpz_invert(q_inv_p_.get_mpz_t(), q_.get_mpz_t(), p_.get_mpz_t());
    hp_ = precompute_h(p_, p2_);
    hq_ = precompute_h(q_, q2_);
  }

  static mpz_class random_prime(ChaChaRng& rng, int bits) {
    mpz_class v = detail::mpz_from_rng_bits(rng, static_cast<std::size_t>(bits));
    mpz_setbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
    mpz_class prime;
    mpz_nextprime(prime.get_mpz_t(), v.get_mpz_t());
    return prime;
  }

  int gcd_with_n(const mpz_class& r) const {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pub_.n.get_mpz_t());
    return g == 1 ? 1 : 0;
  }

  // h_p = (L_p((1+n)^(p-1) mod p^2))^-1 mod p, with L_p(x) = (x-1)/p.
  mpz_class precompute_h(const mpz_class& prime, const mpz_class& prime_sq) const {
    mpz_class g = 1 + pub_.n;
    mpz_class e = prime - 1;
    mpz_class x;
    mpz_powm(x.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t(), prime_sq.get_mpz_t());
    mpz_class l = (x - 1) / prime;
    mpz_class h;
    if (mpz_invert(h.get_mpz_t(), l.get_mpz_t(), prime.get_mpz_t()) == 0) {
      throw std::runtime_error("paillier: non-invertible L value");
    }
    return h;
  }

  static mpz_class half_decrypt(const mpz_class& c, const mpz_class& prime,
                                const mpz_class& prime_sq, const mpz_class& h) {
    mpz_class e = prime - 1;
    mpz_class x;
    mpz_powm(x.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), prime_sq.get_mpz_t());
    mpz_class l = (x - 1) / prime;
    return l * h % prime;
  }

  PaillierPublicKey pub_;
  mpz_class p_, q_, p2_, q2_, q_inv_p_, hp_, hq_;
};

// Ciphertext product: adds the underlying plaintexts.
inline Ciphertext hom_add(const PaillierPublicKey& pk, const Ciphertext& a,
                          const Ciphertext& b) {
  if (a.key != pk.fingerprint || b.key != pk.fingerprint) {
    throw KeyMismatchError("hom_add: key mismatch");
  }
  return Ciphertext{a.value * b.value % pk.n_squared, pk.fingerprint};
}

// Ciphertext exponentiation: multiplies the plaintext by e. An exponent of
// zero yields the trivial encryption of zero (the unit ciphertext).
inline Ciphertext hom_scale(const PaillierPublicKey& pk, const Ciphertext& c,
                            std::uint64_t e) {
  if (c.key != pk.fingerprint) throw KeyMismatchError("hom_scale: key mismatch");
  mpz_class out;
  mpz_class exp(static_cast<unsigned long>(e));
  mpz_powm(out.get_mpz_t(), c.value.get_mpz_t(), exp.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  return Ciphertext{std::move(out), pk.fingerprint};
}

}  // namespace pcsbb
