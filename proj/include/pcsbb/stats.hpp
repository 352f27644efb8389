#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcsbb {

// Pearson chi-square statistic for observed counts against a uniform
// expectation.
inline double chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("chi_square_uniform: empty");
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  double expected = total / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// Upper critical value of the chi-square distribution.
// Exact for 1 and 2 degrees of freedom at the significance levels used here;
// Wilson-Hilferty for larger dof (relative error well under 1% for dof >= 10).
inline double chi_square_critical(int dof, double significance = 0.001) {
  if (dof < 1) throw std::invalid_argument("chi_square_critical: dof < 1");
  double z;
  if (significance == 0.001) {
    z = 3.090232306167813;
  } else if (significance == 0.01) {
    z = 2.3263478740408408;
  } else if (significance == 0.05) {
    z = 1.6448536269514722;
  } else {
    throw std::invalid_argument("chi_square_critical: unsupported significance");
  }
  if (dof == 1) {
    // chi2(1) is the square of a standard normal; two-sided quantile.
    double z2 = significance == 0.001 ? 3.2905267314918945
               : significance == 0.01 ? 2.5758293035489004
                                      : 1.959963984540054;
    return z2 * z2;
  }
  if (dof == 2) return -2.0 * std::log(significance);
  double k = static_cast<double>(dof);
  double h = 2.0 / (9.0 * k);
  double t = 1.0 - h + z * std::sqrt(h);
  return k * t * t * t;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need matching series of length >= 2");
  }
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("linear_fit: degenerate x");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += e * e;
  }
  fit.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

// Slope of log(y) against log(x): the fitted growth exponent.
inline LinearFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw std::invalid_argument("log_log_fit: need positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

}  // namespace pcsbb
