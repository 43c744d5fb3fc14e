#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgibbs/coefficients.hpp"
#include "dgibbs/math.hpp"

namespace dgibbs {

// Access pattern every discrete target provides. Masses are often only
// representable in log space (lattice energies overflow exp), so the sampler
// works through the conditionals p(x_j | x_\j) = mass(s) / axis_sum(j, s),
// which every target can evaluate stably.
//
//   dims()               per-axis sizes d_1..d_n
//   log_mass(s)          log of the unnormalized mass; -inf allowed
//   conditional(j, s)    mass(s)/axis_sum(j, s) in [0,1]; 0 when mass is 0
//   axis_log_sum(j, s)   log axis_sum(j, s) up to an additive constant that
//                        may depend on s but not on j (enough for ranking)
//   axis_log_masses(j,s,out)  log masses along axis j up to a common shift
template <class T>
concept DiscreteTarget = requires(const T& t, int axis, std::span<const int> s,
                                  std::span<double> out) {
  { t.dims() } -> std::convertible_to<std::span<const int>>;
  { t.log_mass(s) } -> std::convertible_to<double>;
  { t.conditional(axis, s) } -> std::convertible_to<double>;
  { t.axis_log_sum(axis, s) } -> std::convertible_to<double>;
  { t.axis_log_masses(axis, s, out) };
};

// Position in the dequantized grid: integer cell plus fractional offset.
struct CellState {
  std::vector<int> cell;
  std::vector<double> offset;   // in [0,1)
  double time = 0.0;

  int dim() const { return static_cast<int>(cell.size()); }
};

inline CellState default_cell_state(std::span<const int> dims) {
  CellState s;
  s.cell.assign(dims.size(), 0);
  s.offset.assign(dims.size(), 0.5);
  return s;
}

struct WeightedSample {
  std::vector<int> state;
  double dwell = 0.0;
};

struct EventTrace {
  std::vector<WeightedSample> samples;
  double total_time = 0.0;
  long zero_dwell_events = 0;   // zero-mass cells crossed in zero time
};

// tau_j = (1 - offset_j) * cond_j / c_j: remaining distance over velocity
// with v_j = c_j / cond_j, arranged as a product so zero-mass cells give
// tau = 0 instead of 0/0.
template <DiscreteTarget T>
void boundary_times(const T& target, const Coefficients& c, const CellState& s,
                    std::span<double> tau) {
  const int n = s.dim();
  for (int j = 0; j < n; ++j) {
    const double cond = target.conditional(j, s.cell);
    tau[static_cast<std::size_t>(j)] =
        (1.0 - s.offset[static_cast<std::size_t>(j)]) * cond / c[j];
  }
}

template <DiscreteTarget T>
std::vector<double> boundary_times(const T& target, const Coefficients& c, const CellState& s) {
  std::vector<double> tau(static_cast<std::size_t>(s.dim()));
  boundary_times(target, c, s, std::span<double>(tau));
  return tau;
}

struct EventResult {
  int exit_axis = 0;
  double dwell = 0.0;
};

namespace detail {

// One boundary crossing given the conditionals of the current cell. The
// particle moves in a straight line inside the cell, so the first axis to
// reach its boundary decides the event; the dwell it emits is the weight of
// the cell just left.
//
// Non-exit offsets advance by dwell * v_k, written as the convex step
// o += (dwell/tau_k) * (1 - o): since dwell = min tau, the ratio is <= 1 and
// the update cannot overshoot 1. An exact tie parks the tied axis at the
// predecessor of 1, so it crosses at the next event with an O(ulp) dwell --
// the grazed-corner case.
//
// A zero-mass cell has all tau = 0; it is crossed in zero time along the axis
// with the largest c_j * axis_sum, which is the fastest way out in the
// continuum limit.
template <DiscreteTarget T>
EventResult advance_with_conditionals(const T& target, const Coefficients& c, CellState& s,
                                      std::span<const double> cond, std::span<double> tau) {
  const int n = s.dim();
  auto dims = target.dims();
  for (int j = 0; j < n; ++j)
    tau[static_cast<std::size_t>(j)] =
        (1.0 - s.offset[static_cast<std::size_t>(j)]) * cond[static_cast<std::size_t>(j)] / c[j];

  int exit = 0;
  for (int j = 1; j < n; ++j)
    if (tau[static_cast<std::size_t>(j)] < tau[static_cast<std::size_t>(exit)]) exit = j;
  double dwell = tau[static_cast<std::size_t>(exit)];

  if (dwell <= 0.0) {
    dwell = 0.0;
    exit = 0;
    double best = std::log(c[0]) + target.axis_log_sum(0, s.cell);
    for (int j = 1; j < n; ++j) {
      const double v = std::log(c[j]) + target.axis_log_sum(j, s.cell);
      if (v > best) {
        best = v;
        exit = j;
      }
    }
  } else {
    for (int k = 0; k < n; ++k) {
      if (k == exit) continue;
      double& o = s.offset[static_cast<std::size_t>(k)];
      o += (dwell / tau[static_cast<std::size_t>(k)]) * (1.0 - o);
      if (o >= 1.0) o = std::nextafter(1.0, 0.0);
    }
  }
  s.offset[static_cast<std::size_t>(exit)] = 0.0;
  int& ce = s.cell[static_cast<std::size_t>(exit)];
  ce = (ce + 1) % dims[static_cast<std::size_t>(exit)];
  s.time += dwell;
  return EventResult{exit, dwell};
}

}  // namespace detail

template <DiscreteTarget T>
EventResult advance_event_inplace(const T& target, const Coefficients& c, CellState& s,
                                  std::vector<double>& scratch) {
  const std::size_t n = static_cast<std::size_t>(s.dim());
  scratch.resize(2 * n);
  std::span<double> cond(scratch.data(), n);
  std::span<double> tau(scratch.data() + n, n);
  for (int j = 0; j < static_cast<int>(n); ++j)
    cond[static_cast<std::size_t>(j)] = target.conditional(j, s.cell);
  return detail::advance_with_conditionals(target, c, s, cond, tau);
}

// Targets can declare which conditionals a move along one axis invalidates
// (themselves included); nearest-neighbor models keep refreshes local.
template <class T>
concept LocallyCoupled = DiscreteTarget<T> && requires(const T& t, int axis,
                                                       std::vector<int>& out) {
  { t.affected_axes(axis, out) };
};

// Event loop with cached conditionals. Produces exactly the same trajectory
// as advance_event_inplace; the cache only skips recomputing conditionals the
// move provably left unchanged.
template <DiscreteTarget T>
class EventSampler {
 public:
  EventSampler(const T& target, Coefficients c, CellState s0)
      : target_(&target), c_(std::move(c)), s_(std::move(s0)) {
    const std::size_t n = static_cast<std::size_t>(s_.dim());
    cond_.resize(n);
    tau_.resize(n);
    refresh_all();
  }

  const CellState& state() const { return s_; }

  EventResult step() {
    const EventResult r = detail::advance_with_conditionals(
        *target_, c_, s_, std::span<const double>(cond_), std::span<double>(tau_));
    if constexpr (LocallyCoupled<T>) {
      target_->affected_axes(r.exit_axis, affected_);
      for (int j : affected_)
        cond_[static_cast<std::size_t>(j)] = target_->conditional(j, s_.cell);
    } else {
      refresh_all();
    }
    return r;
  }

 private:
  void refresh_all() {
    for (int j = 0; j < s_.dim(); ++j)
      cond_[static_cast<std::size_t>(j)] = target_->conditional(j, s_.cell);
  }

  const T* target_;
  Coefficients c_;
  CellState s_;
  std::vector<double> cond_;
  std::vector<double> tau_;
  std::vector<int> affected_;
};

// Pure form: returns the advanced state and the sample emitted for the cell
// that was just left.
template <DiscreteTarget T>
std::pair<CellState, WeightedSample> advance_event(const T& target, const Coefficients& c,
                                                   CellState s) {
  WeightedSample w;
  w.state = s.cell;
  std::vector<double> tau;
  w.dwell = advance_event_inplace(target, c, s, tau).dwell;
  return {std::move(s), std::move(w)};
}

// Streams (cell, dwell) to the visitor after every event; the trace is never
// materialized. Returns the final state.
template <DiscreteTarget T, class Visitor>
CellState run_events_visit(const T& target, const Coefficients& c, CellState s0, long n_events,
                           Visitor&& visit) {
  if (n_events < 1) throw std::invalid_argument("run_events: n_events must be >= 1");
  std::vector<double> tau;
  std::vector<int> prev(s0.cell.size());
  for (long e = 0; e < n_events; ++e) {
    prev = s0.cell;
    const EventResult r = advance_event_inplace(target, c, s0, tau);
    visit(std::span<const int>(prev), r.dwell);
  }
  return s0;
}

template <DiscreteTarget T>
EventTrace run_events(const T& target, const Coefficients& c, CellState s0, long n_events) {
  EventTrace trace;
  trace.samples.reserve(static_cast<std::size_t>(n_events));
  run_events_visit(target, c, std::move(s0), n_events,
                   [&trace](std::span<const int> cell, double dwell) {
                     trace.samples.push_back(
                         WeightedSample{std::vector<int>(cell.begin(), cell.end()), dwell});
                     trace.total_time += dwell;
                     if (dwell == 0.0) ++trace.zero_dwell_events;
                   });
  return trace;
}

// sum_k t_k f(x[k]) / sum_k t_k, accumulated left to right in doubles;
// `compensated` switches to Kahan summation.
template <class F>
std::vector<double> weighted_expectation(const EventTrace& trace, F&& f,
                                         bool compensated = false) {
  if (trace.samples.empty() || !(trace.total_time > 0.0))
    throw std::domain_error("weighted_expectation: degenerate trace (total time is zero)");
  std::vector<double> acc = f(std::span<const int>(trace.samples[0].state));
  const std::size_t m = acc.size();
  for (double& a : acc) a = 0.0;
  std::vector<double> comp(m, 0.0);
  double tsum = 0.0, tcomp = 0.0;
  for (const WeightedSample& w : trace.samples) {
    const std::vector<double> fx = f(std::span<const int>(w.state));
    for (std::size_t i = 0; i < m; ++i) {
      const double term = w.dwell * fx[i];
      if (compensated) {
        const double y = term - comp[i];
        const double t = acc[i] + y;
        comp[i] = (t - acc[i]) - y;
        acc[i] = t;
      } else {
        acc[i] += term;
      }
    }
    if (compensated) {
      const double y = w.dwell - tcomp;
      const double t = tsum + y;
      tcomp = (t - tsum) - y;
      tsum = t;
    } else {
      tsum += w.dwell;
    }
  }
  for (double& a : acc) a /= tsum;
  return acc;
}

inline std::size_t flat_index(std::span<const int> state, std::span<const int> dims) {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < dims.size(); ++j)
    idx = idx * static_cast<std::size_t>(dims[j]) + static_cast<std::size_t>(state[j]);
  return idx;
}

// Per-state dwell fractions, row-major over dims; sums to 1.
inline std::vector<double> weighted_histogram(const EventTrace& trace,
                                              std::span<const int> dims) {
  if (!(trace.total_time > 0.0))
    throw std::domain_error("weighted_histogram: degenerate trace (total time is zero)");
  std::size_t cells = 1;
  for (int d : dims) cells *= static_cast<std::size_t>(d);
  std::vector<double> hist(cells, 0.0);
  for (const WeightedSample& w : trace.samples)
    hist[flat_index(w.state, dims)] += w.dwell;
  for (double& h : hist) h /= trace.total_time;
  return hist;
}

}  // namespace dgibbs
