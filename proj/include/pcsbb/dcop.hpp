#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcsbb {

using Cost = std::int64_t;

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

// Cost table of a binary constraint between variables t < k.
// Row r is the r-th value of D_t in its public ordering, column s the s-th
// value of D_k.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Cost> data;

  CostMatrix() = default;
  CostMatrix(int r, int c, Cost fill = 0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  Cost& at(int r, int s) { return data[static_cast<std::size_t>(r) * cols + s]; }
  Cost at(int r, int s) const {
    return data[static_cast<std::size_t>(r) * cols + s];
  }

  bool operator==(const CostMatrix&) const = default;
};

// Partial or full assignment: values[i] holds the value of variable i, or
// nothing if i is unassigned.
struct Assignment {
  std::vector<std::optional<int>> values;

  explicit Assignment(int n = 0) : values(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(values.size()); }
  bool assigned(int i) const { return values[i].has_value(); }
  bool full() const {
    return std::all_of(values.begin(), values.end(),
                       [](const auto& v) { return v.has_value(); });
  }

  bool operator==(const Assignment&) const = default;
};

// A binary DCOP: n agents, one variable each, costs in [0, q].
// Constraint keys are unordered pairs stored as (t, k) with t < k.
struct DcopInstance {
  int n = 0;
  Cost q = 0;
  std::vector<std::vector<int>> domains;
  std::map<std::pair<int, int>, CostMatrix> constraints;

  bool constrained(int a, int b) const {
    if (a > b) std::swap(a, b);
    return constraints.count({a, b}) != 0;
  }

  const CostMatrix& matrix(int t, int k) const { return constraints.at({t, k}); }

  // Position of `value` in the public ordering of D_i; throws if absent.
  int value_index(int i, int value) const {
    const auto& dom = domains[static_cast<std::size_t>(i)];
    auto it = std::find(dom.begin(), dom.end(), value);
    if (it == dom.end()) {
      throw std::invalid_argument("value " + std::to_string(value) +
                                  " not in domain of variable " +
                                  std::to_string(i + 1));
    }
    return static_cast<int>(it - dom.begin());
  }

  bool operator==(const DcopInstance&) const = default;
};

// Shared protocol parameters derived from n and q.
struct PublicParams {
  Cost q_inf = 0;        // strict upper bound on any solution cost
  std::uint64_t S = 0;   // share modulus, smallest power of two > 2*q_inf
  int ell = 0;           // log2(S)
};

inline PublicParams public_params(int n, Cost q) {
  if (n < 2) throw std::invalid_argument("public_params: need n >= 2");
  if (q < 1) throw std::invalid_argument("public_params: need q >= 1");
  PublicParams pp;
  pp.q_inf = static_cast<Cost>(n) * (n - 1) / 2 * q + 1;
  std::uint64_t target = 2 * static_cast<std::uint64_t>(pp.q_inf);
  pp.S = 1;
  pp.ell = 0;
  while (pp.S <= target) {
    pp.S <<= 1;
    ++pp.ell;
  }
  return pp;
}

// Sum of all constraints applicable to the partial assignment.
inline Cost cost_of(const DcopInstance& inst, const Assignment& pa) {
  Cost total = 0;
  for (const auto& [key, m] : inst.constraints) {
    auto [t, k] = key;
    if (!pa.assigned(t) || !pa.assigned(k)) continue;
    int r = inst.value_index(t, *pa.values[t]);
    int s = inst.value_index(k, *pa.values[k]);
    total += m.at(r, s);
  }
  return total;
}

inline void validate(const DcopInstance& inst) {
  if (inst.n < 2) throw std::invalid_argument("instance: need n >= 2");
  if (inst.q < 0) throw std::invalid_argument("instance: need q >= 0");
  if (static_cast<int>(inst.domains.size()) != inst.n) {
    throw std::invalid_argument("instance: domain count != n");
  }
  for (int i = 0; i < inst.n; ++i) {
    const auto& dom = inst.domains[static_cast<std::size_t>(i)];
    if (dom.empty()) {
      throw std::invalid_argument("instance: empty domain for variable " +
                                  std::to_string(i + 1));
    }
    for (std::size_t a = 0; a < dom.size(); ++a) {
      for (std::size_t b = a + 1; b < dom.size(); ++b) {
        if (dom[a] == dom[b]) {
          throw std::invalid_argument("instance: duplicate value in domain " +
                                      std::to_string(i + 1));
        }
      }
    }
  }
  for (const auto& [key, m] : inst.constraints) {
    auto [t, k] = key;
    if (t < 0 || k >= inst.n || t >= k) {
      throw std::invalid_argument("instance: bad constraint pair");
    }
    if (m.rows != static_cast<int>(inst.domains[t].size()) ||
        m.cols != static_cast<int>(inst.domains[k].size())) {
      throw std::invalid_argument(
          "instance: matrix shape mismatch for constraint (" +
          std::to_string(t + 1) + "," + std::to_string(k + 1) + ")");
    }
    for (Cost c : m.data) {
      if (c < 0 || c > inst.q) {
        throw std::invalid_argument("instance: cost " + std::to_string(c) +
                                    " outside [0," + std::to_string(inst.q) +
                                    "]");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Line-oriented instance format.
//
//   # comment
//   dcop <n> <q>
//   dom <i> <v1> ... <vd>          one per variable, 1-based index
//   con <t> <k>                    t < k, followed by |D_t| rows of |D_k| costs
// ---------------------------------------------------------------------------

inline void serialize(const DcopInstance& inst, std::ostream& out) {
  out << "dcop " << inst.n << ' ' << inst.q << '\n';
  for (int i = 0; i < inst.n; ++i) {
    out << "dom " << (i + 1);
    for (int v : inst.domains[static_cast<std::size_t>(i)]) out << ' ' << v;
    out << '\n';
  }
  for (const auto& [key, m] : inst.constraints) {
    out << "con " << (key.first + 1) << ' ' << (key.second + 1) << '\n';
    for (int r = 0; r < m.rows; ++r) {
      for (int s = 0; s < m.cols; ++s) {
        if (s) out << ' ';
        out << m.at(r, s);
      }
      out << '\n';
    }
  }
}

inline std::string serialize(const DcopInstance& inst) {
  std::ostringstream os;
  serialize(inst, os);
  return os.str();
}

inline DcopInstance parse_instance(std::istream& in) {
  DcopInstance inst;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<bool> dom_seen;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos) continue;
      if (line[start] == '#') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string cur;
  while (next_line(cur)) {
    std::istringstream ls(cur);
    std::string kw;
    ls >> kw;
    if (kw == "dcop") {
      if (have_header) throw ParseError(lineno, "duplicate dcop header");
      if (!(ls >> inst.n >> inst.q)) throw ParseError(lineno, "bad dcop header");
      if (inst.n < 2) throw ParseError(lineno, "need n >= 2");
      inst.domains.resize(static_cast<std::size_t>(inst.n));
      dom_seen.assign(static_cast<std::size_t>(inst.n), false);
      have_header = true;
    } else if (kw == "dom") {
      if (!have_header) throw ParseError(lineno, "dom before dcop header");
      int idx;
      if (!(ls >> idx) || idx < 1 || idx > inst.n) {
        throw ParseError(lineno, "bad variable index in dom");
      }
      if (dom_seen[static_cast<std::size_t>(idx - 1)]) {
        throw ParseError(lineno, "duplicate dom for variable " + std::to_string(idx));
      }
      int v;
      std::vector<int> dom;
      while (ls >> v) dom.push_back(v);
      if (dom.empty()) throw ParseError(lineno, "empty domain");
      inst.domains[static_cast<std::size_t>(idx - 1)] = std::move(dom);
      dom_seen[static_cast<std::size_t>(idx - 1)] = true;
    } else if (kw == "con") {
      if (!have_header) throw ParseError(lineno, "con before dcop header");
      int t, k;
      if (!(ls >> t >> k) || t < 1 || k < 1 || t > inst.n || k > inst.n || t >= k) {
        throw ParseError(lineno, "bad constraint pair");
      }
      if (!dom_seen[static_cast<std::size_t>(t - 1)] ||
          !dom_seen[static_cast<std::size_t>(k - 1)]) {
        throw ParseError(lineno, "constraint references variable without domain");
      }
      if (inst.constraints.count({t - 1, k - 1})) {
        throw ParseError(lineno, "duplicate constraint");
      }
      int rows = static_cast<int>(inst.domains[static_cast<std::size_t>(t - 1)].size());
      int cols = static_cast<int>(inst.domains[static_cast<std::size_t>(k - 1)].size());
      CostMatrix m(rows, cols);
      for (int r = 0; r < rows; ++r) {
        std::string rowline;
        if (!next_line(rowline)) throw ParseError(lineno, "unexpected end of matrix");
        std::istringstream rs(rowline);
        for (int s = 0; s < cols; ++s) {
          Cost c;
          if (!(rs >> c)) throw ParseError(lineno, "short matrix row");
          if (c < 0 || c > inst.q) {
            throw ParseError(lineno, "cost " + std::to_string(c) + " outside [0," +
                                         std::to_string(inst.q) + "]");
          }
          m.at(r, s) = c;
        }
        Cost extra;
        if (rs >> extra) throw ParseError(lineno, "matrix row too long");
      }
      inst.constraints.emplace(std::make_pair(t - 1, k - 1), std::move(m));
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  if (!have_header) throw ParseError(lineno, "missing dcop header");
  for (int i = 0; i < inst.n; ++i) {
    if (!dom_seen[static_cast<std::size_t>(i)]) {
      throw ParseError(lineno, "missing domain for variable " + std::to_string(i + 1));
    }
  }
  validate(inst);
  return inst;
}

inline DcopInstance parse_instance(const std::string& text) {
  std::istringstream is(text);
  return parse_instance(is);
}

}  // namespace pcsbb
