#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgibbs/chart.hpp"
#include "dgibbs/coefficients.hpp"
#include "dgibbs/errors.hpp"
#include "dgibbs/field.hpp"
#include "dgibbs/math.hpp"

namespace dgibbs {

// A continuous target exposed through its full conditionals p(x_i | x_\i).
template <class M>
concept ConditionalModel = requires(const M& m, int i, const Vec& x) {
  { m.dim() } -> std::convertible_to<int>;
  { m.conditional_density(i, x) } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Concrete test models
// ---------------------------------------------------------------------------

struct UniformProduct {
  int n = 1;

  int dim() const { return n; }
  double conditional_density(int, const Vec&) const { return 1.0; }
  double joint_density(const Vec& x) const {
    for (double xi : x)
      if (xi < 0.0 || xi > 1.0) return 0.0;
    return 1.0;
  }
  TorusChart chart() const {
    std::vector<Chart1D> axes(static_cast<std::size_t>(n));
    for (auto& a : axes) a = identity_chart();
    return product_chart(std::move(axes));
  }
  DensityModel density() const {
    return DensityModel{n, [*this](const Vec& x) { return joint_density(x); },
                        Box::unit_cube(n)};
  }
};

struct ExponentialProduct {
  int n = 1;  // unit rate on each axis

  int dim() const { return n; }
  double conditional_density(int i, const Vec& x) const {
    return std::exp(-x[static_cast<std::size_t>(i)]);
  }
  double joint_density(const Vec& x) const {
    double s = 0.0;
    for (double xi : x) {
      if (xi < 0.0) return 0.0;
      s += xi;
    }
    return std::exp(-s);
  }
  TorusChart chart() const {
    std::vector<Chart1D> axes(static_cast<std::size_t>(n));
    for (auto& a : axes) a = exponential_cdf_chart();
    return product_chart(std::move(axes));
  }
  DensityModel density() const {
    Box b = Box::whole_space(n);
    for (auto& lo : b.lo) lo = 0.0;
    return DensityModel{n, [*this](const Vec& x) { return joint_density(x); }, b};
  }
};

// Bivariate normal with standard margins and correlation rho; the conditional
// of either coordinate given the other is N(rho * other, 1 - rho^2).
struct GaussianPair {
  double rho = 0.0;

  int dim() const { return 2; }
  double conditional_density(int i, const Vec& x) const {
    const double var = 1.0 - rho * rho;
    const double mean = rho * x[static_cast<std::size_t>(1 - i)];
    const double d = x[static_cast<std::size_t>(i)] - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
  }
  double joint_density(const Vec& x) const {
    const double det = 1.0 - rho * rho;
    const double q = (x[0] * x[0] - 2.0 * rho * x[0] * x[1] + x[1] * x[1]) / det;
    return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
  }
  TorusChart chart() const {
    return product_chart({gaussian_cdf_chart(), gaussian_cdf_chart()});
  }
  DensityModel density() const {
    return DensityModel{2, [*this](const Vec& x) { return joint_density(x); },
                        Box::whole_space(2)};
  }
};

// ---------------------------------------------------------------------------
// The flow field and its integration on the torus
// ---------------------------------------------------------------------------

// v_i(x) = c_i / p(x_i | x_\i)
template <ConditionalModel M>
VectorField gibbs_field(const M& model, const Coefficients& c) {
  if (c.dim() != model.dim()) throw std::invalid_argument("gibbs_field: coefficient count");
  VectorField f;
  f.dim = model.dim();
  f.velocity_at = [model, c](const Vec& x) {
    Vec v(x.size());
    for (int i = 0; i < c.dim(); ++i) {
      const double cond = model.conditional_density(i, x);
      if (!(cond > 0.0))
        throw std::domain_error("gibbs_field: zero conditional on axis " + std::to_string(i));
      v[static_cast<std::size_t>(i)] = c[i] / cond;
    }
    return v;
  };
  return f;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> points;        // native coordinates
  long clamped_queries = 0;       // chart-edge clamps seen while integrating
};

namespace detail {

// chart-coordinate velocity: w_i(u) = F_i'(x_i) * c_i / p(x_i | x_\i),
// evaluated with every u wrapped into [0,1)
template <ConditionalModel M>
struct ChartFlow {
  const M& model;
  const TorusChart& chart;
  const Coefficients& c;
  mutable long clamped = 0;

  Vec native(const Vec& u) const {
    Vec x(u.size());
    for (int i = 0; i < chart.dim(); ++i) {
      bool cl = false;
      x[static_cast<std::size_t>(i)] = chart.to_native(i, frac(u[static_cast<std::size_t>(i)]), &cl);
      if (cl) ++clamped;
    }
    return x;
  }

  Vec velocity(const Vec& u) const {
    Vec x = native(u);
    Vec w(u.size());
    for (int i = 0; i < chart.dim(); ++i) {
      const double cond = model.conditional_density(i, x);
      if (!(cond > 0.0))
        throw std::domain_error("flow_on_torus: zero conditional on axis " + std::to_string(i));
      w[static_cast<std::size_t>(i)] =
          chart.speed_factor(i, x[static_cast<std::size_t>(i)]) * c[i] / cond;
    }
    return w;
  }
};

}  // namespace detail

// RK4 in chart coordinates with a mod-1 wrap after every step, recording each
// visited point in native coordinates.
template <ConditionalModel M>
Trajectory flow_on_torus(const M& model, const TorusChart& chart, const Coefficients& c,
                         const Vec& x0, double dt, long n_steps, long record_every = 1) {
  if (dt <= 0.0) throw std::invalid_argument("flow_on_torus: dt must be positive");
  if (record_every < 1) throw std::invalid_argument("flow_on_torus: record_every must be >= 1");
  detail::ChartFlow<M> flow{model, chart, c};
  VectorField f;
  f.dim = model.dim();
  f.velocity_at = [&flow](const Vec& u) { return flow.velocity(u); };

  Vec u(x0.size());
  for (int i = 0; i < chart.dim(); ++i)
    u[static_cast<std::size_t>(i)] = frac(chart.to_chart(i, x0[static_cast<std::size_t>(i)]));

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(n_steps / record_every) + 1);
  traj.points.reserve(static_cast<std::size_t>(n_steps / record_every) + 1);
  traj.times.push_back(0.0);
  traj.points.push_back(flow.native(u));
  for (long s = 1; s <= n_steps; ++s) {
    try {
      u = rk4_step(f, u, dt);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string(e.what()) + " at step " + std::to_string(s),
                             e.stage_point);
    }
    for (double& ui : u) ui = frac(ui);
    if (s % record_every == 0) {
      traj.times.push_back(static_cast<double>(s) * dt);
      traj.points.push_back(flow.native(u));
    }
  }
  traj.clamped_queries = flow.clamped;
  return traj;
}

}  // namespace dgibbs
