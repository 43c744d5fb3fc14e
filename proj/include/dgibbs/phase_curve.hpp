#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgibbs/field.hpp"

namespace dgibbs {

namespace detail {

inline double sq_dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// squared distance from point p to segment [a, b]
inline double sq_dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
  double ab2 = 0.0, ap_ab = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = b[i] - a[i];
    ab2 += d * d;
    ap_ab += (p[i] - a[i]) * d;
  }
  double t = ab2 > 0.0 ? ap_ab / ab2 : 0.0;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = a[i] + t * (b[i] - a[i]);
    s += (p[i] - c) * (p[i] - c);
  }
  return s;
}

inline double directed_hausdorff(std::span<const Vec> pts, std::span<const Vec> poly) {
  double worst = 0.0;
  for (const Vec& p : pts) {
    double best = sq_dist(p, poly[0]);
    for (std::size_t j = 0; j + 1 < poly.size(); ++j) {
      const double d = sq_dist_point_segment(p, poly[j], poly[j + 1]);
      if (d < best) best = d;
    }
    if (best > worst) worst = best;
  }
  return std::sqrt(worst);
}

}  // namespace detail

// Symmetric Hausdorff distance between two polyline traces. Rescaling a field
// by a positive scalar changes the clock but not the curve, so matched-arc
// trajectories of v and s*v should be close in this metric.
inline double phase_curve_distance(std::span<const Vec> traj_a, std::span<const Vec> traj_b) {
  if (traj_a.empty() || traj_b.empty())
    throw std::invalid_argument("phase_curve_distance: empty trajectory");
  const double ab = detail::directed_hausdorff(traj_a, traj_b);
  const double ba = detail::directed_hausdorff(traj_b, traj_a);
  return ab > ba ? ab : ba;
}

inline double phase_curve_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  return phase_curve_distance(std::span<const Vec>(a), std::span<const Vec>(b));
}

}  // namespace dgibbs
