#pragma once

#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcsbb/dcop.hpp"
#include "pcsbb/rng.hpp"

namespace pcsbb {

namespace detail {

inline bool connected(int n, const std::set<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{0};
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

inline std::vector<int> iota_domain(int size) {
  std::vector<int> d(static_cast<std::size_t>(size));
  std::iota(d.begin(), d.end(), 0);
  return d;
}

inline CostMatrix random_matrix(int rows, int cols, Cost q, ChaChaRng& rng) {
  CostMatrix m(rows, cols);
  for (Cost& c : m.data) c = static_cast<Cost>(rng.below(static_cast<std::uint64_t>(q) + 1));
  return m;
}

// Diagonal penalty matrix: equal values cost a uniform draw from [1, q],
// different values cost nothing.
inline CostMatrix coloring_matrix(int colors, Cost q, ChaChaRng& rng) {
  CostMatrix m(colors, colors);
  for (int i = 0; i < colors; ++i) {
    m.at(i, i) = 1 + static_cast<Cost>(rng.below(static_cast<std::uint64_t>(q)));
  }
  return m;
}

constexpr int kConnectivityRetries = 1000;

template <class EdgeGen>
std::set<std::pair<int, int>> connected_graph(int n, ChaChaRng& rng, EdgeGen&& gen) {
  for (int attempt = 0; attempt < kConnectivityRetries; ++attempt) {
    std::set<std::pair<int, int>> edges = gen(rng);
    if (connected(n, edges)) return edges;
  }
  throw std::runtime_error("generator: no connected graph after " +
                           std::to_string(kConnectivityRetries) + " attempts");
}

}  // namespace detail

// Unstructured random instance: each pair constrained with probability p1,
// entries uniform on [0, q]. Retries until the constraint graph is connected.
inline DcopInstance gen_random(int n, int domain_size, double p1, Cost q,
                               std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_random: need n >= 2");
  if (domain_size < 1) throw std::invalid_argument("gen_random: need domain size >= 1");
  if (!(p1 > 0.0) || p1 > 1.0) throw std::invalid_argument("gen_random: need p1 in (0,1]");
  if (q < 1) throw std::invalid_argument("gen_random: need q >= 1");

  ChaChaRng rng(seed);
  auto edges = detail::connected_graph(n, rng, [&](ChaChaRng& r) {
    std::set<std::pair<int, int>> e;
    for (int t = 0; t < n; ++t) {
      for (int k = t + 1; k < n; ++k) {
        // 53-bit draw compared against p1; exact for p1 == 1.
        double u = static_cast<double>(r.next_u64() >> 11) * 0x1.0p-53;
        if (u < p1) e.insert({t, k});
      }
    }
    return e;
  });

  DcopInstance inst;
  inst.n = n;
  inst.q = q;
  inst.domains.assign(static_cast<std::size_t>(n), detail::iota_domain(domain_size));
  for (auto [t, k] : edges) {
    inst.constraints.emplace(std::make_pair(t, k),
                             detail::random_matrix(domain_size, domain_size, q, rng));
  }
  return inst;
}

// Graph coloring instance: domains are the colors, matrices are diagonal
// with private positive costs on equal colors.
inline DcopInstance gen_graph_coloring(int n, double p1, Cost q, int colors,
                                       std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_graph_coloring: need n >= 2");
  if (colors < 2) throw std::invalid_argument("gen_graph_coloring: need colors >= 2");
  if (!(p1 > 0.0) || p1 > 1.0) throw std::invalid_argument("gen_graph_coloring: need p1 in (0,1]");
  if (q < 1) throw std::invalid_argument("gen_graph_coloring: need q >= 1");

  ChaChaRng rng(seed);
  auto edges = detail::connected_graph(n, rng, [&](ChaChaRng& r) {
    std::set<std::pair<int, int>> e;
    for (int t = 0; t < n; ++t) {
      for (int k = t + 1; k < n; ++k) {
        double u = static_cast<double>(r.next_u64() >> 11) * 0x1.0p-53;
        if (u < p1) e.insert({t, k});
      }
    }
    return e;
  });

  DcopInstance inst;
  inst.n = n;
  inst.q = q;
  inst.domains.assign(static_cast<std::size_t>(n), detail::iota_domain(colors));
  for (auto [t, k] : edges) {
    inst.constraints.emplace(std::make_pair(t, k),
                             detail::coloring_matrix(colors, q, rng));
  }
  return inst;
}

// Barabasi-Albert preferential attachment: a clique on the first
// `attach_count` nodes, then every new node attaches to `attach_count`
// distinct existing nodes with probability proportional to degree.
inline DcopInstance gen_scale_free(int n, int attach_count, int domain_size,
                                   Cost q, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_scale_free: need n >= 2");
  if (attach_count < 1 || attach_count >= n) {
    throw std::invalid_argument("gen_scale_free: need 1 <= attach_count < n");
  }
  if (domain_size < 1) throw std::invalid_argument("gen_scale_free: need domain size >= 1");
  if (q < 1) throw std::invalid_argument("gen_scale_free: need q >= 1");

  ChaChaRng rng(seed);
  std::set<std::pair<int, int>> edges;
  // Each edge contributes both endpoints; sampling an entry of this list is
  // degree-proportional sampling.
  std::vector<int> endpoints;

  auto add_edge = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    if (edges.insert({a, b}).second) {
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  };

  for (int a = 0; a < attach_count; ++a) {
    for (int b = a + 1; b < attach_count; ++b) add_edge(a, b);
  }
  for (int v = attach_count; v < n; ++v) {
    std::set<int> targets;
    int want = attach_count;
    while (static_cast<int>(targets.size()) < want) {
      int candidate;
      if (endpoints.empty()) {
        candidate = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
      } else {
        candidate = endpoints[rng.below(endpoints.size())];
      }
      targets.insert(candidate);
    }
    for (int t : targets) add_edge(t, v);
  }

  if (!detail::connected(n, edges)) {
    throw std::runtime_error("gen_scale_free: generated graph not connected");
  }

  DcopInstance inst;
  inst.n = n;
  inst.q = q;
  inst.domains.assign(static_cast<std::size_t>(n), detail::iota_domain(domain_size));
  for (auto [t, k] : edges) {
    inst.constraints.emplace(std::make_pair(t, k),
                             detail::random_matrix(domain_size, domain_size, q, rng));
  }
  return inst;
}

}  // namespace pcsbb
