#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgibbs/discrete.hpp"
#include "dgibbs/errors.hpp"
#include "dgibbs/math.hpp"
#include "dgibbs/targets.hpp"

namespace dgibbs {

// SplitMix64 (Steele, Lea & Flood, 2014): a 64-bit counter generator with
// fixed constants, so the same seed yields the same stream on every platform.
// This is the only random number source in the project.
struct RandomStream {
  std::uint64_t state = 0;

  explicit RandomStream(std::uint64_t seed) : state(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix(state);
  }

  // uniform in [0, 1) with 53 random bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // independent stream k derived from the current state
  RandomStream split(std::uint64_t k) const {
    return RandomStream(mix(state + (k + 1) * 0x9E3779B97F4A7C15ULL));
  }
};

template <class R>
concept UniformRng = requires(R& r) {
  { r.next_double() } -> std::convertible_to<double>;
};

// Resample one coordinate from its exact conditional by inverse CDF over the
// unnormalized axis masses.
template <DiscreteTarget T, UniformRng Rng>
void gibbs_axis_update(const T& target, std::vector<int>& state, int axis, Rng& rng,
                       std::vector<double>& scratch) {
  const int d = target.dims()[static_cast<std::size_t>(axis)];
  scratch.resize(static_cast<std::size_t>(d));
  target.axis_log_masses(axis, state, std::span<double>(scratch));
  double lmax = kNegInf;
  for (double lm : scratch) lmax = std::max(lmax, lm);
  if (lmax == kNegInf)
    throw std::domain_error("gibbs_axis_update: all-zero conditional on axis " +
                            std::to_string(axis));
  double total = 0.0;
  for (double& w : scratch) {
    w = std::exp(w - lmax);
    total += w;
  }
  const double u = rng.next_double() * total;
  double cum = 0.0;
  int pick = d - 1;
  for (int v = 0; v < d; ++v) {
    cum += scratch[static_cast<std::size_t>(v)];
    if (u < cum) {
      pick = v;
      break;
    }
  }
  state[static_cast<std::size_t>(axis)] = pick;
}

template <DiscreteTarget T, UniformRng Rng>
void gibbs_sweep(const T& target, std::vector<int>& state, std::span<const int> order, Rng& rng) {
  std::vector<double> scratch;
  for (int axis : order) gibbs_axis_update(target, state, axis, rng, scratch);
}

// Exact categorical sampler over the flattened normalized table; only for
// targets small enough to enumerate.
struct CategoricalTable {
  std::vector<int> dims;
  std::vector<double> cdf;   // cumulative, last entry 1

  template <DiscreteTarget T>
  static CategoricalTable build(const T& target) {
    const ExactMoments mom = enumerate_exact(target, /*want_table=*/true);
    CategoricalTable tab;
    auto d = target.dims();
    tab.dims.assign(d.begin(), d.end());
    tab.cdf.resize(mom.table.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < mom.table.size(); ++i) {
      cum += mom.table[i];
      tab.cdf[i] = cum;
    }
    tab.cdf.back() = 1.0;
    return tab;
  }

  template <UniformRng Rng>
  std::vector<int> sample(Rng& rng) const {
    const double u = rng.next_double();
    const std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    std::vector<int> state(dims.size());
    std::size_t rem = std::min(idx, cdf.size() - 1);
    for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
      state[static_cast<std::size_t>(j)] = static_cast<int>(rem % static_cast<std::size_t>(dims[static_cast<std::size_t>(j)]));
      rem /= static_cast<std::size_t>(dims[static_cast<std::size_t>(j)]);
    }
    return state;
  }
};

template <DiscreteTarget T, UniformRng Rng>
std::vector<int> independent_sample(const T& target, const CategoricalTable& table, Rng& rng) {
  (void)target;
  return table.sample(rng);
}

}  // namespace dgibbs
