#pragma once

// Test-only helpers: statistics and brute-force oracles kept independent of
// the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace testsupport {

// Kolmogorov-Smirnov statistic of samples against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    ks = std::max(ks, std::fabs((static_cast<double>(i) + 1.0) / n - f));
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
  }
  return ks;
}

// Trial-division primes, an independent check on the sieve.
inline std::vector<long> primes_by_trial_division(int n) {
  std::vector<long> out;
  for (long cand = 2; static_cast<int>(out.size()) < n; ++cand) {
    bool prime = true;
    for (long d = 2; d * d <= cand; ++d)
      if (cand % d == 0) {
        prime = false;
        break;
      }
    if (prime) out.push_back(cand);
  }
  return out;
}

// Row-major brute-force sum along one axis of a dense table.
inline double brute_axis_sum(std::span<const double> mass, std::span<const int> dims, int axis,
                             std::span<const int> state) {
  std::vector<int> s(state.begin(), state.end());
  double sum = 0.0;
  for (int v = 0; v < dims[static_cast<std::size_t>(axis)]; ++v) {
    s[static_cast<std::size_t>(axis)] = v;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < dims.size(); ++j)
      idx = idx * static_cast<std::size_t>(dims[j]) + static_cast<std::size_t>(s[j]);
    sum += mass[idx];
  }
  return sum;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

}  // namespace testsupport
