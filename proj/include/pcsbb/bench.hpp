#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsbb/engine.hpp"
#include "pcsbb/generators.hpp"
#include "pcsbb/simnet.hpp"
#include "pcsbb/solvers.hpp"

namespace pcsbb {

// "lo:hi:step" inclusive sweep, or a single value.
inline std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> out;
  std::size_t c1 = spec.find(':');
  if (c1 == std::string::npos) {
    out.push_back(std::stod(spec));
    return out;
  }
  std::size_t c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw std::invalid_argument("range: expected lo:hi:step");
  double lo = std::stod(spec.substr(0, c1));
  double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  double step = std::stod(spec.substr(c2 + 1));
  if (step <= 0) throw std::invalid_argument("range: step must be positive");
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

inline std::vector<int> parse_int_range(const std::string& spec) {
  std::vector<int> out;
  for (double v : parse_range(spec)) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

struct BenchConfig {
  std::string family = "random";  // random | coloring | scalefree
  std::vector<int> ns = {7};
  std::vector<double> p1s = {0.3};
  int domain_size = 6;
  Cost q = 100;
  int colors = 3;
  int attach = 2;
  int reps = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> algos = {"syncbb", "pc-syncbb"};
  std::string backend = "ideal";  // ideal | mpc
  int key_bits = 2048;
  double cutoff_seconds = 0.0;
};

struct BenchRow {
  std::string family;
  int n = 0;
  double p1 = 0;
  int domain = 0;
  std::string algo;
  std::string backend;
  std::uint64_t seed = 0;
  // Averages over the repetitions; -1 throughout when every rep hit the cutoff.
  double cost = 0;
  double comparisons = 0;
  double messages = 0;
  double bytes = 0;
  double paillier_ops = 0;
  double sim_time_ms = 0;
};

inline DcopInstance bench_instance(const BenchConfig& cfg, int n, double p1,
                                   std::uint64_t seed) {
  if (cfg.family == "random") {
    return gen_random(n, cfg.domain_size, p1, cfg.q, seed);
  }
  if (cfg.family == "coloring") {
    return gen_graph_coloring(n, p1, cfg.q, cfg.colors, seed);
  }
  if (cfg.family == "scalefree") {
    return gen_scale_free(n, cfg.attach, cfg.domain_size, cfg.q, seed);
  }
  throw std::invalid_argument("bench: unknown family '" + cfg.family + "'");
}

inline std::vector<BenchRow> run_bench(const BenchConfig& cfg, const CostModel& model) {
  std::vector<BenchRow> rows;
  for (int n : cfg.ns) {
    for (double p1 : cfg.p1s) {
      for (const auto& algo : cfg.algos) {
        BenchRow row;
        row.family = cfg.family;
        row.n = n;
        row.p1 = p1;
        row.domain = cfg.family == "coloring" ? cfg.colors : cfg.domain_size;
        row.algo = algo;
        row.backend = algo == "pc-syncbb" ? cfg.backend : "-";
        row.seed = cfg.seed;
        int completed = 0;
        for (int rep = 0; rep < cfg.reps; ++rep) {
          std::uint64_t inst_seed = cfg.seed + static_cast<std::uint64_t>(rep);
          auto inst = bench_instance(cfg, n, p1, inst_seed);
          try {
            if (algo == "brute") {
              auto res = brute_force(inst);
              row.cost += static_cast<double>(res.cost);
            } else if (algo == "syncbb") {
              auto res = plaintext_syncbb(inst);
              row.cost += static_cast<double>(res.cost);
              row.comparisons += static_cast<double>(res.stats.comparisons);
              row.messages += static_cast<double>(res.stats.messages);
              // Plaintext baseline: command-sized traffic, no crypto.
              RunMetrics m;
              m.messages = res.stats.messages;
              CostModel plain = model;
              plain.compare_offline_ms = plain.compare_online_ms = 0;
              plain.per_paillier_op_ms = 0;
              row.sim_time_ms += simulated_time_ms({}, m, plain);
            } else if (algo == "pc-syncbb") {
              EngineConfig ec;
              ec.backend = cfg.backend == "mpc" ? EngineConfig::Backend::Mpc
                                                : EngineConfig::Backend::Ideal;
              ec.key_bits = cfg.key_bits;
              ec.seed = inst_seed ^ 0x5DEECE66Dull;
              ec.cutoff_seconds = cfg.cutoff_seconds;
              ec.capture_trace = false;
              auto res = pc_syncbb(inst, ec);
              res.metrics.sim_time_ms = simulated_time_ms({}, res.metrics, model);
              row.cost += static_cast<double>(res.result.cost);
              row.comparisons += static_cast<double>(res.metrics.comparisons);
              row.messages += static_cast<double>(res.metrics.messages);
              row.bytes += static_cast<double>(res.metrics.bytes);
              row.paillier_ops += static_cast<double>(res.metrics.paillier_ops());
              row.sim_time_ms += res.metrics.sim_time_ms;
            } else {
              throw std::invalid_argument("bench: unknown algorithm '" + algo + "'");
            }
            ++completed;
          } catch (const CutoffError&) {
            // Skipped rep; reflected in the completion count.
          }
        }
        if (completed == 0) {
          row.cost = row.comparisons = row.messages = -1;
          row.bytes = row.paillier_ops = row.sim_time_ms = -1;
        } else {
          double d = static_cast<double>(completed);
          row.cost /= d;
          row.comparisons /= d;
          row.messages /= d;
          row.bytes /= d;
          row.paillier_ops /= d;
          row.sim_time_ms /= d;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "family,n,p1,domain,algo,backend,seed,cost,comparisons,messages,bytes,"
        "paillier_ops,sim_time_ms\n";
  for (const auto& r : rows) {
    os << r.family << ',' << r.n << ',' << r.p1 << ',' << r.domain << ',' << r.algo
       << ',' << r.backend << ',' << r.seed << ',' << r.cost << ',' << r.comparisons
       << ',' << r.messages << ',' << r.bytes << ',' << r.paillier_ops << ','
       << r.sim_time_ms << '\n';
  }
}

// Log-scale line chart of one metric against the sweep axis, one polyline
// per algorithm. Self-contained SVG, no plotting dependency.
inline void write_bench_svg(std::ostream& os, const std::vector<BenchRow>& rows,
                            const std::string& x_axis,  // "p1" or "n"
                            const std::string& metric = "sim_time_ms",
                            const std::string& title = "") {
  const double width = 640, height = 420;
  const double ml = 70, mr = 30, mt = 40, mb = 50;

  auto x_of = [&](const BenchRow& r) { return x_axis == "n" ? static_cast<double>(r.n) : r.p1; };
  auto y_of = [&](const BenchRow& r) {
    if (metric == "comparisons") return r.comparisons;
    if (metric == "messages") return r.messages;
    if (metric == "bytes") return r.bytes;
    return r.sim_time_ms;
  };

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    double y = y_of(r);
    if (y <= 0) continue;  // cutoff sentinel or metric not applicable
    double x = x_of(r);
    series[r.algo].push_back({x, y});
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (series.empty() || xmin >= xmax) {
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='320' height='40'>"
          "<text x='10' y='25'>no data</text></svg>\n";
    return;
  }
  double ly_min = std::floor(std::log10(ymin));
  double ly_max = std::ceil(std::log10(ymax));
  if (ly_max <= ly_min) ly_max = ly_min + 1;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) {
    return height - mb - (std::log10(y) - ly_min) / (ly_max - ly_min) * (height - mt - mb);
  };

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
     << height << "' font-family='sans-serif' font-size='12'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  if (!title.empty()) {
    os << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='14'>"
       << title << "</text>\n";
  }
  // Axes.
  os << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr
     << "' y2='" << height - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << height - mb << "' stroke='black'/>\n";
  // Log ticks.
  for (double e = ly_min; e <= ly_max + 1e-9; e += 1.0) {
    double y = py(std::pow(10.0, e));
    os << "<line x1='" << ml - 4 << "' y1='" << y << "' x2='" << width - mr
       << "' y2='" << y << "' stroke='#dddddd'/>\n";
    os << "<text x='" << ml - 8 << "' y='" << y + 4 << "' text-anchor='end'>1e"
       << static_cast<int>(e) << "</text>\n";
  }
  // X ticks at the swept points.
  std::vector<double> xticks;
  for (const auto& [algo, pts] : series) {
    for (auto [x, y] : pts) xticks.push_back(x);
  }
  std::sort(xticks.begin(), xticks.end());
  xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
  for (double x : xticks) {
    os << "<line x1='" << px(x) << "' y1='" << height - mb << "' x2='" << px(x)
       << "' y2='" << height - mb + 4 << "' stroke='black'/>\n";
    std::ostringstream lbl;
    lbl << x;
    os << "<text x='" << px(x) << "' y='" << height - mb + 18
       << "' text-anchor='middle'>" << lbl.str() << "</text>\n";
  }
  os << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 10
     << "' text-anchor='middle'>" << x_axis << "</text>\n";
  os << "<text x='16' y='" << (mt + height - mb) / 2
     << "' text-anchor='middle' transform='rotate(-90 16 " << (mt + height - mb) / 2
     << ")'>" << metric << "</text>\n";

  int ci = 0;
  double legend_y = mt + 4;
  for (auto& [algo, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = colors[ci % 5];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='2' points='";
    for (auto [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "'/>\n";
    for (auto [x, y] : pts) {
      os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='" << color
         << "'/>\n";
    }
    os << "<line x1='" << width - mr - 130 << "' y1='" << legend_y << "' x2='"
       << width - mr - 110 << "' y2='" << legend_y << "' stroke='" << color
       << "' stroke-width='2'/>\n";
    os << "<text x='" << width - mr - 104 << "' y='" << legend_y + 4 << "'>" << algo
       << "</text>\n";
    legend_y += 16;
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace pcsbb
