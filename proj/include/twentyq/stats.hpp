#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace twentyq {

/// Sample mean with its standard error.
struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
};

inline MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = xs.size();
  if (out.n == 0) return out;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(out.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  out.mean = mean;
  if (out.n > 1) {
    out.stderr_ = std::sqrt(ss / static_cast<double>(out.n - 1) /
                            static_cast<double>(out.n));
  }
  return out;
}

/// Empirical quantile with the ceil(level * n) order statistic, so
/// quantile(resolutions, 1 - eps) is "the resolution at excess probability
/// eps": at most an eps fraction of trials exceed it.
inline double quantile(std::vector<double> xs, double level) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("quantile: level outside [0,1]");
  }
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return xs[k - 1];
}

/// Ordinary least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_slope: need >= 2 matched points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate x values");
  return sxy / sxx;
}

}  // namespace twentyq
