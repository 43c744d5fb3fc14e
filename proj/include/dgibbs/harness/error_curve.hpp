#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgibbs/errors.hpp"

namespace dgibbs {

// Iteration-indexed error values for a set of replicates, with the mean and
// the 0.1/0.9 quantile band across replicates.
struct ErrorCurve {
  std::vector<long> iterations;
  std::vector<std::vector<double>> per_replicate;  // [replicate][record]
  std::vector<double> mean, q10, q90;

  static double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double w = h - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
  }

  void finalize() {
    const std::size_t records = iterations.size();
    mean.assign(records, 0.0);
    q10.assign(records, 0.0);
    q90.assign(records, 0.0);
    std::vector<double> column(per_replicate.size());
    for (std::size_t i = 0; i < records; ++i) {
      for (std::size_t r = 0; r < per_replicate.size(); ++r) column[r] = per_replicate[r][i];
      double s = 0.0;
      for (double v : column) s += v;
      mean[i] = s / static_cast<double>(column.size());
      std::sort(column.begin(), column.end());
      q10[i] = quantile_sorted(column, 0.1);
      q90[i] = quantile_sorted(column, 0.9);
    }
  }
};

// Least-squares slope of log(error) against log(iteration) over the records
// whose iteration lies in [it_lo, it_hi].
inline double loglog_slope(const ErrorCurve& curve, long it_lo, long it_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < curve.iterations.size(); ++i) {
    const long it = curve.iterations[i];
    if (it < it_lo || it > it_hi) continue;
    const double err = curve.mean[i];
    if (!(err > 0.0))
      throw std::domain_error("loglog_slope: non-positive error in fit window");
    const double lx = std::log(static_cast<double>(it));
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::domain_error("loglog_slope: fewer than two records in window");
  const double d = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / d;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Schema: iteration,mean_error,q10,q90 after '#' provenance lines. The
// content is a pure function of config and seed, so repeated runs produce
// byte-identical files.
inline void write_curve_csv(const std::string& path, const ErrorCurve& curve,
                            const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "iteration,mean_error,q10,q90\n";
  for (std::size_t i = 0; i < curve.iterations.size(); ++i) {
    out << curve.iterations[i] << ',' << format_double(curve.mean[i]) << ','
        << format_double(curve.q10[i]) << ',' << format_double(curve.q90[i]) << "\n";
  }
}

}  // namespace dgibbs
