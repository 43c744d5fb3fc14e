#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgibbs/errors.hpp"

namespace dgibbs {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Velocity evaluator over R^dim.
struct VectorField {
  int dim = 0;
  std::function<Vec(const Vec&)> velocity_at;
};

// Axis-aligned support box; +/-inf bounds mean the whole line.
struct Box {
  Vec lo, hi;

  static Box whole_space(int dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return Box{Vec(static_cast<std::size_t>(dim), -inf), Vec(static_cast<std::size_t>(dim), inf)};
  }
  static Box unit_cube(int dim) {
    return Box{Vec(static_cast<std::size_t>(dim), 0.0), Vec(static_cast<std::size_t>(dim), 1.0)};
  }

  bool strictly_inside(const Vec& x, double margin = 0.0) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] > lo[i] + margin && x[i] < hi[i] - margin)) return false;
    return true;
  }
};

// Pointwise unnormalized density with its support.
struct DensityModel {
  int dim = 0;
  std::function<double(const Vec&)> unnorm_density;
  Box support;
};

// Central-difference estimate of sum_i d/dx_i (p * v_i) at a point. Works on
// the product directly so no density gradients are needed; for a product that
// is exactly constant along each differenced axis the result is rounding
// noise only.
inline double finite_diff_divergence(const VectorField& field, const DensityModel& density,
                                     const Vec& point, double h) {
  if (static_cast<int>(point.size()) != field.dim)
    throw std::invalid_argument("finite_diff_divergence: dimension mismatch");
  if (!density.support.strictly_inside(point, h))
    throw std::domain_error("finite_diff_divergence: point (or its stencil) outside support");
  auto pv = [&](const Vec& x, int i) {
    return density.unnorm_density(x) * field.velocity_at(x)[static_cast<std::size_t>(i)];
  };
  double div = 0.0;
  Vec x = point;
  for (int i = 0; i < field.dim; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    x[static_cast<std::size_t>(i)] = xi + h;
    const double fp = pv(x, i);
    x[static_cast<std::size_t>(i)] = xi - h;
    const double fm = pv(x, i);
    x[static_cast<std::size_t>(i)] = xi;
    div += (fp - fm) / (2.0 * h);
  }
  return div;
}

// Classical 4th-order step; throws if any stage sees a non-finite velocity.
inline Vec rk4_step(const VectorField& field, const Vec& x, double dt) {
  const std::size_t n = x.size();
  auto eval = [&](const Vec& p) {
    Vec v = field.velocity_at(p);
    if (!all_finite(v)) throw IntegrationError("rk4_step: non-finite velocity", p);
    return v;
  };
  Vec k1 = eval(x);
  Vec tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  Vec k2 = eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  Vec k3 = eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
  Vec k4 = eval(tmp);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

inline std::vector<Vec> rk4_integrate(const VectorField& field, const Vec& x0, double dt,
                                      long n_steps) {
  std::vector<Vec> traj;
  traj.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.push_back(x0);
  Vec x = x0;
  for (long s = 0; s < n_steps; ++s) {
    x = rk4_step(field, x, dt);
    traj.push_back(x);
  }
  return traj;
}

// Integrate until the polyline (chord) length reaches `arc`. Useful when
// comparing a field against a rescaled copy: the two run on different clocks
// but trace the same curve.
inline std::vector<Vec> rk4_integrate_arc_length(const VectorField& field, const Vec& x0,
                                                 double dt, double arc,
                                                 long max_steps = 100000000L) {
  std::vector<Vec> traj;
  traj.push_back(x0);
  Vec x = x0;
  double len = 0.0;
  for (long s = 0; s < max_steps && len < arc; ++s) {
    Vec y = rk4_step(field, x, dt);
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (y[i] - x[i]) * (y[i] - x[i]);
    len += std::sqrt(d2);
    x = std::move(y);
    traj.push_back(x);
  }
  return traj;
}

// h(x, y) evaluated on the concatenated point (x_1..x_dimx, y_1..y_dimy).
struct Hamiltonian {
  int dim_x = 0;
  int dim_y = 0;
  std::function<double(const Vec&)> h;
};

// v = (grad_y H, -grad_x H) / p. Gradients are central differences with step
// 1e-5 * max(1, |coordinate|) so H stays a black box; the resulting product
// p*v is divergence-free up to the finite-difference error.
inline VectorField hamiltonian_field(const Hamiltonian& ham, const DensityModel& density) {
  const int n = ham.dim_x + ham.dim_y;
  if (ham.dim_x != ham.dim_y)
    throw std::invalid_argument("hamiltonian_field: x and y blocks must have equal dimension");
  if (density.dim != n) throw std::invalid_argument("hamiltonian_field: dimension mismatch");
  const int dim_x = ham.dim_x;
  auto h = ham.h;
  auto p = density.unnorm_density;
  VectorField f;
  f.dim = n;
  f.velocity_at = [n, dim_x, h, p](const Vec& s) {
    const double ps = p(s);
    if (!(ps > 0.0)) throw std::domain_error("hamiltonian_field: density is zero at point");
    Vec grad(static_cast<std::size_t>(n));
    Vec q = s;
    for (int i = 0; i < n; ++i) {
      const double si = q[static_cast<std::size_t>(i)];
      const double step = 1e-5 * std::max(1.0, std::fabs(si));
      q[static_cast<std::size_t>(i)] = si + step;
      const double hp = h(q);
      q[static_cast<std::size_t>(i)] = si - step;
      const double hm = h(q);
      q[static_cast<std::size_t>(i)] = si;
      grad[static_cast<std::size_t>(i)] = (hp - hm) / (2.0 * step);
    }
    Vec v(static_cast<std::size_t>(n));
    for (int i = 0; i < dim_x; ++i) v[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(dim_x + i)] / ps;
    for (int i = 0; i < n - dim_x; ++i)
      v[static_cast<std::size_t>(dim_x + i)] = -grad[static_cast<std::size_t>(i)] / ps;
    return v;
  };
  return f;
}

}  // namespace dgibbs
