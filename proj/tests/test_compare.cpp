#include <catch2/catch_amalgamated.hpp>

#include "pcsbb/compare.hpp"
#include "pcsbb/dcop.hpp"
#include "pcsbb/shares.hpp"
#include "pcsbb/stats.hpp"

using namespace pcsbb;

namespace {

std::vector<std::uint64_t> random_inputs(int n, std::uint64_t S, ChaChaRng& rng) {
  std::vector<std::uint64_t> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = rng.below(S);
  return x;
}

bool run_online(const ComparisonCircuit& c, std::span<const std::uint64_t> inputs,
                ChaChaRng& rng, OnlineStats* stats = nullptr,
                std::vector<std::vector<std::uint8_t>>* transcripts = nullptr) {
  DealerTripleProvider dealer;
  auto materials = offline_phase(c, dealer, rng);
  return online_phase(c, inputs, materials, rng, stats, transcripts);
}

}  // namespace

TEST_CASE("circuit decides the forced examples") {
  auto c = build_comparison_circuit(2, 3);
  CHECK(eval_circuit(c, std::vector<std::uint64_t>{1, 0}) == true);
  CHECK(eval_circuit(c, std::vector<std::uint64_t>{0, 0}) == false);
  CHECK(eval_circuit(c, std::vector<std::uint64_t>{5, 3}) == false);  // sum 0 mod 8
}

TEST_CASE("circuit matches the plaintext comparison on random share vectors") {
  auto pp = public_params(5, 100);
  auto c = build_comparison_circuit(5, pp.ell);
  ChaChaRng rng(1001);
  for (int trial = 0; trial < 10000; ++trial) {
    std::uint64_t alpha = rng.below(static_cast<std::uint64_t>(pp.q_inf) + 1);
    std::uint64_t beta = rng.below(static_cast<std::uint64_t>(pp.q_inf) + 1);
    auto a = share_split(alpha, 5, rng, pp.S);
    auto b = share_split(beta, 5, rng, pp.S);
    std::vector<std::uint64_t> x(5);
    for (int k = 0; k < 5; ++k) {
      x[static_cast<std::size_t>(k)] =
          (b[static_cast<std::size_t>(k)] + pp.S - a[static_cast<std::size_t>(k)]) % pp.S;
    }
    CHECK(eval_circuit(c, x) == (alpha < beta));
  }
}

TEST_CASE("ideal backend handles the boundary cases") {
  auto pp = public_params(4, 10);
  std::vector<std::uint64_t> zeros(4, 0);
  CHECK(ideal_compare(zeros, pp.S) == false);

  // Maximal gap: beta - alpha = q_inf, still below S/2.
  ChaChaRng rng(7);
  auto a = share_split(0, 4, rng, pp.S);
  auto b = share_split(static_cast<std::uint64_t>(pp.q_inf), 4, rng, pp.S);
  std::vector<std::uint64_t> x(4);
  for (int k = 0; k < 4; ++k) {
    x[static_cast<std::size_t>(k)] =
        (b[static_cast<std::size_t>(k)] + pp.S - a[static_cast<std::size_t>(k)]) % pp.S;
  }
  CHECK(ideal_compare(x, pp.S) == true);

  CHECK_THROWS_AS(ideal_compare(std::vector<std::uint64_t>{pp.S}, pp.S),
                  std::invalid_argument);
}

TEST_CASE("ideal backend equals circuit evaluation everywhere, exhaustively") {
  // Every input vector, not only those in the protocol's reachable range.
  for (auto [n, ell] : {std::pair{2, 3}, std::pair{2, 6}, std::pair{3, 4}}) {
    auto c = build_comparison_circuit(n, ell);
    std::uint64_t S = 1ull << ell;
    std::uint64_t total = 1;
    for (int k = 0; k < n; ++k) total *= S;
    for (std::uint64_t code = 0; code < total; ++code) {
      std::vector<std::uint64_t> x(static_cast<std::size_t>(n));
      std::uint64_t rest = code;
      for (int k = 0; k < n; ++k) {
        x[static_cast<std::size_t>(k)] = rest % S;
        rest /= S;
      }
      REQUIRE(ideal_compare(x, S) == eval_circuit(c, x));
    }
  }
}

TEST_CASE("dealt triples are valid and sized to the circuit") {
  auto c = build_comparison_circuit(4, 5);
  DealerTripleProvider dealer;
  ChaChaRng rng(55);
  auto materials = offline_phase(c, dealer, rng);
  REQUIRE(materials.size() == 4u);
  for (const auto& m : materials) {
    CHECK(m.triples.size() == c.and_count());
    CHECK(m.circuit_fingerprint == c.fingerprint());
  }
  for (std::size_t t = 0; t < c.and_count(); ++t) {
    std::uint8_t a = 0, b = 0, cc = 0;
    for (const auto& m : materials) {
      a ^= m.triples[t].a;
      b ^= m.triples[t].b;
      cc ^= m.triples[t].c;
    }
    CHECK(cc == (a & b));
  }
}

TEST_CASE("triple share streams of two parties are independent") {
  auto c = build_comparison_circuit(3, 4);
  DealerTripleProvider dealer;
  ChaChaRng rng(66);
  // Joint frequency of (party0.a, party1.a) over many triples.
  std::uint64_t joint[2][2] = {{0, 0}, {0, 0}};
  std::size_t triples = 0;
  while (triples < 10000) {
    auto materials = dealer.deal(c, rng);
    for (std::size_t t = 0; t < materials[0].triples.size() && triples < 10000; ++t, ++triples) {
      ++joint[materials[0].triples[t].a][materials[1].triples[t].a];
    }
  }
  // Chi-square independence test on the 2x2 table, one degree of freedom.
  double total = 10000;
  double row0 = static_cast<double>(joint[0][0] + joint[0][1]);
  double col0 = static_cast<double>(joint[0][0] + joint[1][0]);
  double stat = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double r = i == 0 ? row0 : total - row0;
      double cc = j == 0 ? col0 : total - col0;
      double expected = r * cc / total;
      double d = static_cast<double>(joint[i][j]) - expected;
      stat += d * d / expected;
    }
  }
  CHECK(stat < chi_square_critical(1, 0.001));
}

TEST_CASE("online phase agrees with the ideal backend") {
  ChaChaRng rng(77);
  for (int n : {3, 5, 7}) {
    auto pp = public_params(n, 10);
    auto c = build_comparison_circuit(n, pp.ell);
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_inputs(n, pp.S, rng);
      CHECK(run_online(c, x, rng) == ideal_compare(x, pp.S));
    }
  }
}

TEST_CASE("online phase on all-zero inputs runs the whole circuit") {
  auto c = build_comparison_circuit(3, 4);
  ChaChaRng rng(88);
  std::vector<std::uint64_t> zeros(3, 0);
  OnlineStats stats;
  CHECK(run_online(c, zeros, rng, &stats) == false);
  CHECK(stats.and_gates == c.and_count());
}

TEST_CASE("online rounds equal the circuit AND depth") {
  ChaChaRng rng(99);
  for (int n : {2, 3, 5}) {
    auto c = build_comparison_circuit(n, 6);
    auto x = random_inputs(n, 64, rng);
    OnlineStats stats;
    run_online(c, x, rng, &stats);
    CHECK(stats.rounds == c.and_depth());
  }
}

TEST_CASE("rerunning with fresh randomness changes the transcript, not the output") {
  auto c = build_comparison_circuit(3, 5);
  std::vector<std::uint64_t> x = {7, 12, 30};
  ChaChaRng rng1(123), rng2(321);
  std::vector<std::vector<std::uint8_t>> t1, t2;
  bool out1 = run_online(c, x, rng1, nullptr, &t1);
  bool out2 = run_online(c, x, rng2, nullptr, &t2);
  CHECK(out1 == out2);
  CHECK(t1 != t2);
}

TEST_CASE("comparison output depends only on the input sum") {
  ChaChaRng rng(404);
  auto pp = public_params(4, 20);
  auto c = build_comparison_circuit(4, pp.ell);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_inputs(4, pp.S, rng);
    auto y = x;
    rng.shuffle(y);
    CHECK(ideal_compare(x, pp.S) == ideal_compare(y, pp.S));
    CHECK(eval_circuit(c, x) == eval_circuit(c, y));
  }
}

TEST_CASE("materials are rejected when they do not match the circuit") {
  auto c1 = build_comparison_circuit(3, 4);
  auto c2 = build_comparison_circuit(3, 5);
  DealerTripleProvider dealer;
  ChaChaRng rng(31);
  auto materials = offline_phase(c1, dealer, rng);
  std::vector<std::uint64_t> x = {1, 2, 3};
  CHECK_THROWS_AS(online_phase(c2, x, materials, rng), ProtocolError);
}

TEST_CASE("range soundness: exact decisions over the full cost range") {
  // Exhaustive over all (alpha, beta) pairs at n=3, q=3.
  auto pp = public_params(3, 3);
  auto c = build_comparison_circuit(3, pp.ell);
  ChaChaRng rng(17);
  for (std::uint64_t alpha = 0; alpha <= static_cast<std::uint64_t>(pp.q_inf); ++alpha) {
    for (std::uint64_t beta = 0; beta <= static_cast<std::uint64_t>(pp.q_inf); ++beta) {
      auto a = share_split(alpha, 3, rng, pp.S);
      auto b = share_split(beta, 3, rng, pp.S);
      std::vector<std::uint64_t> x(3);
      for (int k = 0; k < 3; ++k) {
        x[static_cast<std::size_t>(k)] =
            (b[static_cast<std::size_t>(k)] + pp.S - a[static_cast<std::size_t>(k)]) % pp.S;
      }
      bool expect = alpha < beta;
      REQUIRE(ideal_compare(x, pp.S) == expect);
      REQUIRE(eval_circuit(c, x) == expect);
      REQUIRE(run_online(c, x, rng) == expect);
    }
  }
}

TEST_CASE("backend wrappers report usage") {
  auto pp = public_params(3, 5);
  IdealCompareBackend ideal(pp.S);
  MpcCompareBackend mpc(3, pp.ell, ChaChaRng(5));
  std::vector<std::uint64_t> x = {1, 0, 0};
  CHECK(ideal.compare(x) == true);
  CHECK(mpc.compare(x) == true);
  CHECK(ideal.usage().invocations == 1);
  CHECK(mpc.usage().invocations == 1);
  CHECK(mpc.usage().offline_triples == mpc.circuit().and_count());
  CHECK(mpc.usage().online_rounds > 0);
}

TEST_CASE("circuit dump lists one gate per line") {
  auto c = build_comparison_circuit(2, 2);
  auto text = c.dump();
  std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == c.gates.size());
  CHECK(text.find("AND") != std::string::npos);
  CHECK(text.find("XOR") != std::string::npos);
  CHECK(text.find("NOT") != std::string::npos);
}

TEST_CASE("gate counts follow the adder layout") {
  for (int n : {2, 5, 9}) {
    for (int ell : {3, 8, 13}) {
      auto c = build_comparison_circuit(n, ell);
      CHECK(c.and_count() ==
            static_cast<std::size_t>((n - 1) * (ell - 1) + (ell - 2)));
    }
  }
}
