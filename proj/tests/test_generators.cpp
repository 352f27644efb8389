#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <functional>

#include "pcsbb/generators.hpp"
#include "pcsbb/solvers.hpp"

using namespace pcsbb;

namespace {

// Test-side oracle: proper coloring of the constraint graph by backtracking.
std::optional<std::vector<int>> find_proper_coloring(const DcopInstance& inst,
                                                     int colors) {
  std::vector<int> color(static_cast<std::size_t>(inst.n), -1);
  std::function<bool(int)> go = [&](int v) -> bool {
    if (v == inst.n) return true;
    for (int c = 0; c < colors; ++c) {
      bool ok = true;
      for (int u = 0; u < v; ++u) {
        if (color[static_cast<std::size_t>(u)] == c && inst.constrained(u, v)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        color[static_cast<std::size_t>(v)] = c;
        if (go(v + 1)) return true;
        color[static_cast<std::size_t>(v)] = -1;
      }
    }
    return false;
  };
  if (go(0)) return color;
  return std::nullopt;
}

}  // namespace

TEST_CASE("gen_random produces valid connected instances") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 42ull}) {
    auto inst = gen_random(7, 6, 0.3, 100, seed);
    validate(inst);
    CHECK(inst.n == 7);
    CHECK(inst.q == 100);
    for (const auto& d : inst.domains) CHECK(d.size() == 6);
    std::set<std::pair<int, int>> edges;
    for (const auto& [key, m] : inst.constraints) edges.insert(key);
    CHECK(detail::connected(inst.n, edges));
  }
}

TEST_CASE("gen_random with density one is the complete graph") {
  auto inst = gen_random(6, 3, 1.0, 50, 7);
  CHECK(inst.constraints.size() == 15u);
}

TEST_CASE("generators are deterministic per seed") {
  CHECK(serialize(gen_random(6, 4, 0.5, 30, 99)) ==
        serialize(gen_random(6, 4, 0.5, 30, 99)));
  CHECK(serialize(gen_graph_coloring(6, 0.4, 20, 3, 5)) ==
        serialize(gen_graph_coloring(6, 0.4, 20, 3, 5)));
  CHECK(serialize(gen_scale_free(9, 2, 4, 25, 11)) ==
        serialize(gen_scale_free(9, 2, 4, 25, 11)));
  CHECK(serialize(gen_random(6, 4, 0.5, 30, 99)) !=
        serialize(gen_random(6, 4, 0.5, 30, 100)));
}

TEST_CASE("gen_random gives up on hopeless densities") {
  CHECK_THROWS_AS(gen_random(7, 3, 0.001, 10, 1), std::runtime_error);
}

TEST_CASE("coloring instances have diagonal matrices") {
  auto inst = gen_graph_coloring(5, 0.4, 100, 3, 21);
  validate(inst);
  for (const auto& [key, m] : inst.constraints) {
    REQUIRE(m.rows == 3);
    REQUIRE(m.cols == 3);
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        if (r == s) {
          CHECK(m.at(r, s) >= 1);
          CHECK(m.at(r, s) <= 100);
        } else {
          CHECK(m.at(r, s) == 0);
        }
      }
    }
  }
}

TEST_CASE("a proper coloring costs nothing") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto inst = gen_graph_coloring(6, 0.4, 100, 3, seed);
    auto coloring = find_proper_coloring(inst, 3);
    if (!coloring) continue;  // dense draws may not be 3-colorable
    Assignment pa(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      pa.values[static_cast<std::size_t>(i)] = (*coloring)[static_cast<std::size_t>(i)];
    }
    CHECK(cost_of(inst, pa) == 0);
  }
}

TEST_CASE("scale-free generator covers the published configuration") {
  auto inst = gen_scale_free(7, 2, 5, 100, 3);
  validate(inst);
  CHECK(inst.n == 7);
  for (const auto& d : inst.domains) CHECK(d.size() == 5);
}

TEST_CASE("scale-free with n = attach_count + 1 is complete") {
  auto inst = gen_scale_free(5, 4, 3, 10, 17);
  CHECK(inst.constraints.size() == 10u);
}

TEST_CASE("scale-free degree distribution is right-skewed") {
  std::vector<int> degrees;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto inst = gen_scale_free(50, 2, 2, 5, seed);
    std::vector<int> deg(50, 0);
    for (const auto& [key, m] : inst.constraints) {
      ++deg[static_cast<std::size_t>(key.first)];
      ++deg[static_cast<std::size_t>(key.second)];
    }
    degrees.insert(degrees.end(), deg.begin(), deg.end());
  }
  std::sort(degrees.begin(), degrees.end());
  int median = degrees[degrees.size() / 2];
  int max = degrees.back();
  CHECK(max > 3 * median);
}

TEST_CASE("scale-free rejects bad attachment counts") {
  CHECK_THROWS_AS(gen_scale_free(5, 0, 3, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_scale_free(5, 5, 3, 10, 1), std::invalid_argument);
}
