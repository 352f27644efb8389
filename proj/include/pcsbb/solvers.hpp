#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pcsbb/dcop.hpp"

namespace pcsbb {

struct SearchStats {
  std::uint64_t comparisons = 0;
  std::uint64_t expansions = 0;   // value assignments performed
  std::uint64_t messages = 0;     // CPA passes + backtracks + broadcast copies
  std::uint64_t new_optima = 0;
};

struct SolveResult {
  Assignment assignment;
  Cost cost = 0;
  SearchStats stats;
};

// Exhaustive minimum over the full search space. Ties resolve to the
// lexicographically smallest value-index tuple because the scan is
// lexicographic and only strict improvements are kept.
inline SolveResult brute_force(const DcopInstance& inst) {
  const int n = inst.n;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<int> best_idx;
  Cost best = -1;

  for (;;) {
    Assignment pa(n);
    for (int i = 0; i < n; ++i) {
      pa.values[static_cast<std::size_t>(i)] =
          inst.domains[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx[i])];
    }
    Cost c = cost_of(inst, pa);
    if (best < 0 || c < best) {
      best = c;
      best_idx = idx;
    }
    int i = n - 1;
    while (i >= 0) {
      if (++idx[static_cast<std::size_t>(i)] <
          static_cast<int>(inst.domains[static_cast<std::size_t>(i)].size())) {
        break;
      }
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }

  SolveResult res;
  res.assignment = Assignment(n);
  for (int i = 0; i < n; ++i) {
    res.assignment.values[static_cast<std::size_t>(i)] =
        inst.domains[static_cast<std::size_t>(i)][static_cast<std::size_t>(best_idx[i])];
  }
  res.cost = best;
  return res;
}

struct SyncBbOptions {
  // Chain order: position i is handled by variable agent_order[i].
  // Defaults to the identity.
  std::optional<std::vector<int>> agent_order;
  // Per-variable value traversal order (domain values). Defaults to the
  // public (natural) domain order. Lets a caller replay any fixed ordering.
  std::optional<std::vector<std::vector<int>>> value_orders;
  // Optional logs, appended to when non-null.
  std::vector<char>* comparison_log = nullptr;  // one entry per bound comparison
  std::vector<Cost>* bound_log = nullptr;       // upper bound after each update
};

// Sequential branch-and-bound sweep over the chain. A partial assignment is
// extended only while its cost is strictly below the upper bound; the bound
// starts at q_inf and tightens to each strictly better full assignment.
inline SolveResult plaintext_syncbb(const DcopInstance& inst,
                                    const SyncBbOptions& opts = {}) {
  const int n = inst.n;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (opts.agent_order) {
    order = *opts.agent_order;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    if (static_cast<int>(order.size()) != n) {
      throw std::invalid_argument("plaintext_syncbb: order size != n");
    }
    for (int v : order) {
      if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
        throw std::invalid_argument("plaintext_syncbb: order not a permutation");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  std::vector<std::vector<int>> traversal(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int var = order[static_cast<std::size_t>(i)];
    traversal[static_cast<std::size_t>(i)] =
        opts.value_orders ? (*opts.value_orders)[static_cast<std::size_t>(var)]
                          : inst.domains[static_cast<std::size_t>(var)];
  }

  const Cost q_inf = public_params(n, inst.q > 0 ? inst.q : 1).q_inf;
  Cost bound = q_inf;
  Assignment cur(n);
  Assignment best(n);
  bool have_best = false;
  SearchStats stats;

  // Pointer per chain position; 0 means a fresh traversal.
  std::vector<int> p(static_cast<std::size_t>(n), 0);
  int level = 0;

  auto prefix_cost = [&]() { return cost_of(inst, cur); };

  while (level >= 0) {
    int var = order[static_cast<std::size_t>(level)];
    const auto& vals = traversal[static_cast<std::size_t>(level)];
    if (p[static_cast<std::size_t>(level)] >=
        static_cast<int>(vals.size())) {
      // Domain exhausted: step back.
      cur.values[static_cast<std::size_t>(var)].reset();
      p[static_cast<std::size_t>(level)] = 0;
      --level;
      if (level >= 0) ++stats.messages;  // backtrack notification
      continue;
    }
    int v = vals[static_cast<std::size_t>(p[static_cast<std::size_t>(level)])];
    ++p[static_cast<std::size_t>(level)];
    cur.values[static_cast<std::size_t>(var)] = v;
    ++stats.expansions;

    Cost c = prefix_cost();
    bool below = c < bound;
    ++stats.comparisons;
    if (opts.comparison_log) opts.comparison_log->push_back(below ? 1 : 0);

    if (level == n - 1) {
      if (below) {
        bound = c;
        best = cur;
        have_best = true;
        ++stats.new_optima;
        stats.messages += static_cast<std::uint64_t>(n - 1);  // optimum broadcast
      }
      if (opts.bound_log) opts.bound_log->push_back(bound);
      // Stay on this level, try the next value.
    } else {
      if (below) {
        ++level;  // pass the partial assignment onward
        ++stats.messages;
      }
      // Otherwise prune: stay and try the next value.
    }
  }
  stats.messages += static_cast<std::uint64_t>(n - 1);  // completion broadcast

  if (!have_best) throw std::logic_error("plaintext_syncbb: no full assignment reached");
  SolveResult res;
  res.assignment = best;
  res.cost = cost_of(inst, best);
  res.stats = stats;
  return res;
}

}  // namespace pcsbb
