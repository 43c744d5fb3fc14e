#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "dgibbs/chart.hpp"
#include "dgibbs/continuous.hpp"
#include "dgibbs/discrete.hpp"

namespace dgibbs {

struct CoverageReport {
  double coverage = 0.0;          // fraction of cells visited
  std::optional<long> period;     // smallest exact repeat lag of the cell sequence
};

namespace detail {

// Smallest P with s[i] == s[i+P] for all i < len-P, via the KMP prefix
// function. P close to len means no repetition was found.
inline long smallest_period(std::span<const std::size_t> s) {
  const std::size_t m = s.size();
  if (m < 2) return static_cast<long>(m);
  std::vector<std::size_t> pi(m, 0);
  for (std::size_t i = 1; i < m; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && s[i] != s[k]) k = pi[k - 1];
    if (s[i] == s[k]) ++k;
    pi[i] = k;
  }
  return static_cast<long>(m - pi[m - 1]);
}

}  // namespace detail

// Coverage counts cells whose dwell fraction exceeds tolerance/num_cells, so
// corner-grazing visits of O(ulp) dwell do not count as coverage. The period
// is the smallest lag at which the second half of the cell sequence repeats
// exactly, reported only if it fits at least three times.
inline CoverageReport coverage_and_period(const EventTrace& trace, std::span<const int> dims,
                                          double tolerance = 1e-9) {
  CoverageReport rep;
  std::size_t cells = 1;
  for (int d : dims) cells *= static_cast<std::size_t>(d);
  std::vector<double> dwell(cells, 0.0);
  std::vector<std::size_t> seq;
  seq.reserve(trace.samples.size());
  for (const WeightedSample& w : trace.samples) {
    const std::size_t idx = flat_index(w.state, dims);
    dwell[idx] += w.dwell;
    seq.push_back(idx);
  }
  if (trace.total_time > 0.0) {
    const double threshold = tolerance / static_cast<double>(cells);
    std::size_t covered = 0;
    for (double d : dwell)
      if (d / trace.total_time > threshold) ++covered;
    rep.coverage = static_cast<double>(covered) / static_cast<double>(cells);
  }
  const std::size_t tail_len = seq.size() / 2;
  if (tail_len >= 3) {
    std::span<const std::size_t> tail(seq.data() + (seq.size() - tail_len), tail_len);
    const long p = detail::smallest_period(tail);
    if (p >= 1 && p <= static_cast<long>(tail_len) / 3) rep.period = p;
  }
  return rep;
}

// Continuous variant: bin chart coordinates of the recorded points into a
// resolution^dim grid. No period detection for continuous trajectories.
inline CoverageReport coverage_and_period(const Trajectory& traj, const TorusChart& chart,
                                          int resolution) {
  CoverageReport rep;
  const int n = chart.dim();
  std::size_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= static_cast<std::size_t>(resolution);
  std::vector<char> hit(cells, 0);
  for (const Vec& x : traj.points) {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
      double u = frac(chart.to_chart(i, x[static_cast<std::size_t>(i)]));
      int b = static_cast<int>(u * resolution);
      if (b >= resolution) b = resolution - 1;
      idx = idx * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(b);
    }
    hit[idx] = 1;
  }
  std::size_t covered = 0;
  for (char h : hit) covered += h;
  rep.coverage = static_cast<double>(covered) / static_cast<double>(cells);
  return rep;
}

}  // namespace dgibbs
