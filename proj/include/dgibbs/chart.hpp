#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dgibbs/errors.hpp"
#include "dgibbs/math.hpp"

namespace dgibbs {

// One axis of the torus chart: a strictly increasing bijection from the
// axis's native support onto [0,1), gluing the two ends of the support
// together. `derivative` is dF/dx, the speed factor picked up when the flow
// is integrated in chart coordinates.
struct Chart1D {
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<double(double)> derivative;
};

inline Chart1D identity_chart() {
  return Chart1D{[](double x) { return x; }, [](double u) { return u; },
                 [](double) { return 1.0; }};
}

inline Chart1D cdf_chart(std::function<double(double)> cdf,
                         std::function<double(double)> quantile,
                         std::function<double(double)> pdf) {
  return Chart1D{std::move(cdf), std::move(quantile), std::move(pdf)};
}

inline Chart1D gaussian_cdf_chart() {
  return cdf_chart([](double x) { return normal_cdf(x); },
                   [](double u) { return normal_quantile(u); },
                   [](double x) { return normal_pdf(x); });
}

// unit-rate exponential on [0, inf)
inline Chart1D exponential_cdf_chart() {
  return cdf_chart([](double x) { return -std::expm1(-x); },
                   [](double u) { return -std::log1p(-u); },
                   [](double x) { return std::exp(-x); });
}

inline Chart1D tanh_chart(double scale = 1.0) {
  return Chart1D{[scale](double x) { return 0.5 * (std::tanh(x / scale) + 1.0); },
                 [scale](double u) { return scale * std::atanh(2.0 * u - 1.0); },
                 [scale](double x) {
                   const double t = std::tanh(x / scale);
                   return (1.0 - t * t) / (2.0 * scale);
                 }};
}

// Per-axis charts gluing the support into a torus. Inverse queries are
// clamped away from the glue point, which maps back to zero density.
struct TorusChart {
  std::vector<Chart1D> axes;
  bool cdf_based = true;

  static constexpr double kEdge = 1e-12;

  int dim() const { return static_cast<int>(axes.size()); }

  // u clamped to [kEdge, 1-kEdge]; *clamped set when the clamp engaged
  double to_native(int i, double u, bool* clamped = nullptr) const {
    double uu = u;
    if (uu < kEdge) {
      uu = kEdge;
      if (clamped) *clamped = true;
    } else if (uu > 1.0 - kEdge) {
      uu = 1.0 - kEdge;
      if (clamped) *clamped = true;
    }
    return axes[static_cast<std::size_t>(i)].inverse(uu);
  }

  double to_chart(int i, double x) const { return axes[static_cast<std::size_t>(i)].forward(x); }

  double speed_factor(int i, double x) const {
    return axes[static_cast<std::size_t>(i)].derivative(x);
  }
};

inline TorusChart product_chart(std::vector<Chart1D> axes, bool cdf_based = true) {
  TorusChart c;
  c.axes = std::move(axes);
  c.cdf_based = cdf_based;
  return c;
}

// F_p^{-1}((c t + F_p(x0)) mod 1): the closed-form flow of the 1D sampler.
inline double exact_1d_step(const Chart1D& chart, double x0, double c, double t) {
  if (!chart.inverse)
    throw UnsupportedModelError("exact_1d_step: chart provides no inverse");
  return chart.inverse(frac(c * t + chart.forward(x0)));
}

}  // namespace dgibbs
