#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dgibbs/baselines.hpp"
#include "dgibbs/coefficients.hpp"
#include "dgibbs/discrete.hpp"
#include "dgibbs/errors.hpp"
#include "dgibbs/harness/config.hpp"
#include "dgibbs/harness/error_curve.hpp"
#include "dgibbs/math.hpp"
#include "dgibbs/targets.hpp"

namespace dgibbs {

namespace harness_detail {

// sub-stream ids carved out of the experiment seed
inline constexpr std::uint64_t kStreamTarget = 0x100;
inline constexpr std::uint64_t kStreamChain = 0x200;
inline constexpr std::uint64_t kStreamNoise = 0x300;
inline constexpr std::uint64_t kStreamReference = 0x400;
inline constexpr std::uint64_t kStreamStart = 0x500;

inline double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// The flow sampler has no seed; replicates vary the starting offset along a
// Kronecker sequence (replicate 0 keeps the centered default).
inline CellState replicate_start(std::span<const int> dims, int rep) {
  CellState s = default_cell_state(dims);
  if (rep > 0) {
    const Coefficients alpha = sqrt_prime_coefficients(static_cast<int>(dims.size()));
    for (std::size_t j = 0; j < dims.size(); ++j)
      s.offset[j] = frac(0.5 + static_cast<double>(rep) * frac(alpha[static_cast<int>(j)]));
  }
  return s;
}

template <class Fn>
void for_each_replicate(int n, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min<int>(n, static_cast<int>(hw));
  if (workers <= 1) {
    for (int r = 0; r < n; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= n) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<long> record_iterations(long events, long stride) {
  if (stride <= 0) stride = std::max<long>(1, events / 1000);
  std::vector<long> iters;
  for (long it = stride; it <= events; it += stride) iters.push_back(it);
  if (iters.empty() || iters.back() != events) iters.push_back(events);
  return iters;
}

// Runs the deterministic flow and reports the running time-weighted mean (in
// cell units) plus the current cell at each record point.
template <DiscreteTarget T, class RecordFn>
void run_flow_curve(const T& target, const Coefficients& c, CellState s0,
                    std::span<const long> record_iters, RecordFn&& rec) {
  auto dims = target.dims();
  const std::size_t n = dims.size();
  EventSampler<T> sampler(target, c, std::move(s0));
  std::vector<double> wsum(n, 0.0), est(n);
  double total_time = 0.0;
  std::size_t next = 0;
  for (long it = 1; next < record_iters.size(); ++it) {
    const EventResult r = sampler.step();
    const std::vector<int>& cell = sampler.state().cell;
    if (r.dwell > 0.0) {
      total_time += r.dwell;
      for (std::size_t j = 0; j < n; ++j) wsum[j] += r.dwell * cell[j];
      // the dwell belongs to the cell just left: undo the advanced coordinate
      const int d = dims[static_cast<std::size_t>(r.exit_axis)];
      const int now = cell[static_cast<std::size_t>(r.exit_axis)];
      wsum[static_cast<std::size_t>(r.exit_axis)] += r.dwell * (((now + d - 1) % d) - now);
    }
    if (it == record_iters[next]) {
      if (total_time > 0.0) {
        for (std::size_t j = 0; j < n; ++j) est[j] = wsum[j] / total_time;
      } else {
        for (std::size_t j = 0; j < n; ++j) est[j] = cell[j];
      }
      rec(next, std::span<const double>(est), sampler.state().cell);
      ++next;
    }
  }
}

// Systematic-scan stochastic baseline; one iteration = one axis update, and
// the state after each update counts as one sample.
template <DiscreteTarget T, class RecordFn>
void run_gibbs_curve(const T& target, std::vector<int> state, RandomStream rng,
                     std::span<const long> record_iters, RecordFn&& rec) {
  auto dims = target.dims();
  const std::size_t n = dims.size();
  std::vector<double> sums(n, 0.0), est(n);
  std::vector<double> scratch;
  std::size_t next = 0;
  for (long it = 1; next < record_iters.size(); ++it) {
    const int axis = static_cast<int>((it - 1) % static_cast<long>(n));
    gibbs_axis_update(target, state, axis, rng, scratch);
    for (std::size_t j = 0; j < n; ++j) sums[j] += state[j];
    if (it == record_iters[next]) {
      for (std::size_t j = 0; j < n; ++j) est[j] = sums[j] / static_cast<double>(it);
      rec(next, std::span<const double>(est), state);
      ++next;
    }
  }
}

// One iteration = one exact draw from the full table.
template <class RecordFn>
void run_independent_curve(const CategoricalTable& table, RandomStream rng,
                           std::span<const long> record_iters, RecordFn&& rec) {
  const std::size_t n = table.dims.size();
  std::vector<double> sums(n, 0.0), est(n);
  std::size_t next = 0;
  for (long it = 1; next < record_iters.size(); ++it) {
    const std::vector<int> draw = table.sample(rng);
    for (std::size_t j = 0; j < n; ++j) sums[j] += draw[j];
    if (it == record_iters[next]) {
      for (std::size_t j = 0; j < n; ++j) est[j] = sums[j] / static_cast<double>(it);
      rec(next, std::span<const double>(est), draw);
      ++next;
    }
  }
}

inline Coefficients flow_coefficients(const ExperimentConfig& cfg, int n) {
  if (cfg.sampler == "suzuki" || cfg.coefficients == "ones") return unit_coefficients(n);
  return sqrt_prime_coefficients(n);
}

// Error-vs-reference curve for any discrete target, all samplers.
template <DiscreteTarget T>
ErrorCurve curve_vs_reference(const ExperimentConfig& cfg, const T& target,
                              std::span<const double> ref) {
  const std::vector<long> iters = record_iterations(cfg.events, cfg.record_stride);
  ErrorCurve curve;
  curve.iterations = iters;
  curve.per_replicate.assign(static_cast<std::size_t>(cfg.replicates),
                             std::vector<double>(iters.size(), 0.0));

  const CategoricalTable* table_ptr = nullptr;
  CategoricalTable table;
  if (cfg.sampler == "independent") {
    try {
      table = CategoricalTable::build(target);
    } catch (const CapacityError& e) {
      throw ConfigError(std::string("independent sampler needs a full table: ") + e.what());
    }
    table_ptr = &table;
  }
  const RandomStream root(cfg.seed);
  for_each_replicate(cfg.replicates, [&](int rep) {
    std::vector<double>& errors = curve.per_replicate[static_cast<std::size_t>(rep)];
    auto rec = [&](std::size_t i, std::span<const double> est, const std::vector<int>&) {
      errors[i] = euclid(est, ref);
    };
    if (cfg.sampler == "dgibbs" || cfg.sampler == "suzuki") {
      const Coefficients c = flow_coefficients(cfg, static_cast<int>(target.dims().size()));
      run_flow_curve(target, c, replicate_start(target.dims(), rep), iters, rec);
    } else if (cfg.sampler == "gibbs") {
      std::vector<int> state(target.dims().size(), 0);
      run_gibbs_curve(target, std::move(state),
                      root.split(harness_detail::kStreamChain + static_cast<std::uint64_t>(rep)),
                      iters, rec);
    } else {
      run_independent_curve(*table_ptr,
                            root.split(harness_detail::kStreamChain + static_cast<std::uint64_t>(rep)),
                            iters, rec);
    }
  });
  curve.finalize();
  return curve;
}

}  // namespace harness_detail

struct ExperimentResult {
  ErrorCurve curve;
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Target construction per kind
// ---------------------------------------------------------------------------

inline TabledTarget make_validate_target(const ExperimentConfig& cfg) {
  const std::vector<int> dims = parse_dims(cfg.dims);
  std::size_t cells = 1;
  for (int d : dims) cells *= static_cast<std::size_t>(d);
  if (!(cfg.mass_min >= 0.0) || !(cfg.mass_max > cfg.mass_min))
    throw ConfigError("validate: need 0 <= mass_min < mass_max");
  RandomStream rng = RandomStream(cfg.seed).split(harness_detail::kStreamTarget);
  std::vector<double> mass(cells);
  for (double& m : mass) m = cfg.mass_min + (cfg.mass_max - cfg.mass_min) * rng.next_double();
  return TabledTarget(dims, std::move(mass));
}

inline ImageTarget make_image_target_from_config(const ExperimentConfig& cfg) {
  if (!cfg.image_path.empty()) return load_pgm(cfg.image_path, cfg.floor);
  if (cfg.synthetic.empty())
    throw ConfigError("image: need image=<path> or synthetic=<kind:HxW>");
  std::string kind;
  int h = 0, w = 0;
  parse_synthetic(cfg.synthetic, kind, h, w);
  return make_image_target(h, w, synthetic_image(kind, h, w), cfg.floor);
}

inline std::vector<double> image_exact_means(const ImageTarget& t) {
  double total = 0.0, mr = 0.0, mc = 0.0;
  for (int r = 0; r < t.height; ++r) {
    total += t.row_sum_[static_cast<std::size_t>(r)];
    mr += static_cast<double>(r) * t.row_sum_[static_cast<std::size_t>(r)];
  }
  for (int c = 0; c < t.width; ++c) mc += static_cast<double>(c) * t.col_sum_[static_cast<std::size_t>(c)];
  return {mr / total, mc / total};
}

// clean synthetic spins for the denoising benchmark; mass > 0.5 maps to +1
inline std::vector<int> clean_spin_image(const std::string& synthetic_spec) {
  std::string kind;
  int h = 0, w = 0;
  parse_synthetic(synthetic_spec, kind, h, w);
  const std::vector<double> m = synthetic_image(kind, h, w);
  std::vector<int> spins(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) spins[i] = m[i] > 0.5 ? 1 : -1;
  return spins;
}

// flip exactly round(fraction * n) distinct pixels, chosen by partial shuffle
inline std::vector<int> flip_pixels(std::vector<int> spins, double fraction, RandomStream rng) {
  const std::size_t n = spins.size();
  const std::size_t k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_double() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
    spins[idx[i]] = -spins[idx[i]];
  }
  return spins;
}

// ---------------------------------------------------------------------------
// Kind drivers
// ---------------------------------------------------------------------------

namespace harness_detail {

inline ExperimentResult run_validate(const ExperimentConfig& cfg) {
  const TabledTarget target = make_validate_target(cfg);
  const ExactMoments mom = enumerate_exact(target, /*want_table=*/false);
  ExperimentResult res;
  res.curve = curve_vs_reference(cfg, target, mom.axis_mean);
  res.notes.push_back("reference: exact enumeration");
  return res;
}

inline ExperimentResult run_image(const ExperimentConfig& cfg) {
  const ImageTarget target = make_image_target_from_config(cfg);
  const std::vector<double> ref = image_exact_means(target);
  ExperimentResult res;
  res.curve = curve_vs_reference(cfg, target, ref);
  res.notes.push_back("reference: exact pixel-mass means");
  return res;
}

inline ExperimentResult run_ising(const ExperimentConfig& cfg) {
  const IsingTarget target = IsingTarget::plain(cfg.lattice);
  const std::size_t n = target.dims().size();
  ExperimentResult res;
  if (cfg.sampler == "independent")
    throw ConfigError("ising: no full table for the independent sampler");

  std::size_t states = 1;
  bool exact = true;
  for (std::size_t i = 0; i < n && exact; ++i) {
    states *= 2;
    if (states > kEnumerationCap) exact = false;
  }
  if (exact) {
    const ExactMoments mom = enumerate_exact(target, /*want_table=*/false);
    res.curve = curve_vs_reference(cfg, target, mom.axis_mean);
    res.notes.push_back("reference: exact enumeration");
    return res;
  }

  // Mode reference: samplers park near one checkerboard; measure against the
  // one the chain converged to, decided by the sign of the overlap of the
  // final mean with the even checkerboard.
  const std::vector<long> iters = record_iterations(cfg.events, cfg.record_stride);
  ErrorCurve curve;
  curve.iterations = iters;
  curve.per_replicate.assign(static_cast<std::size_t>(cfg.replicates),
                             std::vector<double>(iters.size(), 0.0));
  const int side = cfg.lattice;
  std::vector<double> even(n), odd(n);  // checkerboards in cell units
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      even[static_cast<std::size_t>(r * side + c)] = (r + c) % 2 == 0 ? 1.0 : 0.0;
      odd[static_cast<std::size_t>(r * side + c)] = (r + c) % 2 == 0 ? 0.0 : 1.0;
    }
  const RandomStream root(cfg.seed);
  for_each_replicate(cfg.replicates, [&](int rep) {
    std::vector<std::vector<double>> snapshots(iters.size());
    auto rec = [&](std::size_t i, std::span<const double> est, const std::vector<int>&) {
      snapshots[i].assign(est.begin(), est.end());
    };
    if (cfg.sampler == "dgibbs" || cfg.sampler == "suzuki") {
      const Coefficients c = flow_coefficients(cfg, static_cast<int>(n));
      run_flow_curve(target, c, replicate_start(target.dims(), rep), iters, rec);
    } else {
      std::vector<int> state(n, 0);
      // random start so either mode is reachable
      RandomStream start = root.split(kStreamStart + static_cast<std::uint64_t>(rep));
      for (auto& v : state) v = start.next_double() < 0.5 ? 0 : 1;
      run_gibbs_curve(target, std::move(state),
                      root.split(kStreamChain + static_cast<std::uint64_t>(rep)), iters, rec);
    }
    double overlap = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      overlap += (2.0 * snapshots.back()[j] - 1.0) * (2.0 * even[j] - 1.0);
    const std::vector<double>& ref = overlap >= 0.0 ? even : odd;
    for (std::size_t i = 0; i < iters.size(); ++i)
      curve.per_replicate[static_cast<std::size_t>(rep)][i] = euclid(snapshots[i], ref);
  });
  curve.finalize();
  res.curve = std::move(curve);
  res.notes.push_back("reference: nearer checkerboard mode (sign of final overlap)");
  return res;
}

inline ExperimentResult run_denoise(const ExperimentConfig& cfg) {
  const std::string spec = cfg.synthetic.empty() ? std::string("disk:64x64") : cfg.synthetic;
  const std::vector<int> clean = clean_spin_image(spec);
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(clean.size()))));
  if (side * side != static_cast<int>(clean.size()))
    throw ConfigError("denoise: image must be square");
  const std::size_t n = clean.size();
  if (cfg.sampler == "independent")
    throw ConfigError("denoise: no full table for the independent sampler");

  const std::vector<long> iters = record_iterations(cfg.events, cfg.record_stride);
  ErrorCurve curve;
  curve.iterations = iters;
  curve.per_replicate.assign(static_cast<std::size_t>(cfg.replicates),
                             std::vector<double>(iters.size(), 0.0));
  const RandomStream root(cfg.seed);
  for_each_replicate(cfg.replicates, [&](int rep) {
    const std::vector<int> noisy =
        flip_pixels(clean, cfg.flip_fraction,
                    root.split(kStreamNoise + static_cast<std::uint64_t>(rep)));
    const IsingTarget target = IsingTarget::denoising(side, cfg.beta, cfg.eta, noisy);
    std::vector<int> start_cells(n);
    for (std::size_t i = 0; i < n; ++i) start_cells[i] = (noisy[i] + 1) / 2;
    auto rec = [&](std::size_t i, std::span<const double>, const std::vector<int>& state) {
      long wrong = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (2 * state[j] - 1 != clean[j]) ++wrong;
      curve.per_replicate[static_cast<std::size_t>(rep)][i] =
          static_cast<double>(wrong) / static_cast<double>(n);
    };
    if (cfg.sampler == "dgibbs" || cfg.sampler == "suzuki") {
      const Coefficients c = flow_coefficients(cfg, static_cast<int>(n));
      CellState s0 = replicate_start(target.dims(), rep);
      if (cfg.start != "zeros") s0.cell = start_cells;  // default: observed image
      run_flow_curve(target, c, std::move(s0), iters, rec);
    } else {
      run_gibbs_curve(target, std::move(start_cells),
                      root.split(kStreamChain + static_cast<std::uint64_t>(rep)), iters, rec);
    }
  });
  curve.finalize();
  ExperimentResult res;
  res.curve = std::move(curve);
  res.notes.push_back("error: pixel disagreement fraction with the clean image");
  return res;
}

inline ExperimentResult run_logreg(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("logreg: dataset=<csv path> is required");
  const LogRegTarget target = load_csv_dataset(cfg.dataset, cfg.label_column, cfg.positive_label);
  const std::size_t n = target.dims().size();
  ExperimentResult res;
  std::vector<double> ref;
  if (n <= 20) {
    ref = enumerate_exact(target, /*want_table=*/false).axis_mean;
    res.notes.push_back("reference: exact enumeration");
  } else {
    // long stochastic run, pinned by the seed
    const long budget = 5000L * static_cast<long>(n);
    std::vector<long> last = {budget};
    ref.assign(n, 0.0);
    RandomStream rng = RandomStream(cfg.seed).split(kStreamReference);
    run_gibbs_curve(target, std::vector<int>(n, 0), rng, last,
                    [&](std::size_t, std::span<const double> est, const std::vector<int>&) {
                      ref.assign(est.begin(), est.end());
                    });
    res.notes.push_back("reference: long stochastic run, 5000 updates per parameter");
  }
  res.curve = curve_vs_reference(cfg, target, ref);
  return res;
}

}  // namespace harness_detail

// Runs the configured experiment and, when cfg.out is set, writes the
// iteration,mean_error,q10,q90 CSV (byte-identical across runs for the same
// config and seed).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult res;
  if (cfg.kind == "validate") res = harness_detail::run_validate(cfg);
  else if (cfg.kind == "image") res = harness_detail::run_image(cfg);
  else if (cfg.kind == "ising") res = harness_detail::run_ising(cfg);
  else if (cfg.kind == "denoise") res = harness_detail::run_denoise(cfg);
  else res = harness_detail::run_logreg(cfg);

  std::vector<std::string> comments;
  comments.push_back("kind=" + cfg.kind + " sampler=" + cfg.sampler +
                     " events=" + std::to_string(cfg.events) +
                     " replicates=" + std::to_string(cfg.replicates) +
                     " seed=" + std::to_string(cfg.seed) + " coefficients=" + cfg.coefficients);
  for (const std::string& note : res.notes) comments.push_back(note);
  res.notes = comments;
  if (!cfg.out.empty()) write_curve_csv(cfg.out, res.curve, comments);
  return res;
}

// ---------------------------------------------------------------------------
// Energy-descent race on the plain lattice model
// ---------------------------------------------------------------------------

struct EnergyReach {
  double threshold = 0.0;
  long cap = 0;
  std::vector<long> flow_iterations;    // per replicate; cap if never reached
  std::vector<long> gibbs_iterations;
};

// Iterations until the running state's energy first drops within
// energy_tol of the ground energy -2L(L-1), for the flow sampler and the
// stochastic baseline from the same random start.
inline EnergyReach ising_energy_reach(const ExperimentConfig& cfg) {
  const IsingTarget target = IsingTarget::plain(cfg.lattice);
  const std::size_t n = target.dims().size();
  const double ground = -2.0 * cfg.lattice * (cfg.lattice - 1);
  EnergyReach out;
  out.threshold = ground + cfg.energy_tol * std::fabs(ground);
  out.cap = cfg.events;
  out.flow_iterations.assign(static_cast<std::size_t>(cfg.replicates), cfg.events);
  out.gibbs_iterations.assign(static_cast<std::size_t>(cfg.replicates), cfg.events);
  const RandomStream root(cfg.seed);

  harness_detail::for_each_replicate(cfg.replicates, [&](int rep) {
    RandomStream start = root.split(harness_detail::kStreamStart + static_cast<std::uint64_t>(rep));
    std::vector<int> cells0(n);
    for (auto& v : cells0) v = start.next_double() < 0.5 ? 0 : 1;

    {  // deterministic flow
      const Coefficients c = harness_detail::flow_coefficients(cfg, static_cast<int>(n));
      CellState s0 = harness_detail::replicate_start(target.dims(), rep);
      s0.cell = cells0;
      EventSampler<IsingTarget> sampler(target, c, std::move(s0));
      double energy = target.energy(cells0);
      for (long it = 1; it <= cfg.events; ++it) {
        const EventResult r = sampler.step();
        // flipping site j from sigma to -sigma changes E by -2*sigma_new*a_j
        energy += -2.0 * IsingTarget::spin(sampler.state().cell[static_cast<std::size_t>(r.exit_axis)]) *
                  target.local_field(r.exit_axis, sampler.state().cell);
        if (energy <= out.threshold) {
          out.flow_iterations[static_cast<std::size_t>(rep)] = it;
          break;
        }
      }
    }
    {  // stochastic baseline
      std::vector<int> state = cells0;
      RandomStream rng = root.split(harness_detail::kStreamChain + static_cast<std::uint64_t>(rep));
      std::vector<double> scratch;
      double energy = target.energy(state);
      for (long it = 1; it <= cfg.events; ++it) {
        const int axis = static_cast<int>((it - 1) % static_cast<long>(n));
        const int before = state[static_cast<std::size_t>(axis)];
        gibbs_axis_update(target, state, axis, rng, scratch);
        if (state[static_cast<std::size_t>(axis)] != before)
          energy += -2.0 * IsingTarget::spin(state[static_cast<std::size_t>(axis)]) *
                    target.local_field(axis, state);
        if (energy <= out.threshold) {
          out.gibbs_iterations[static_cast<std::size_t>(rep)] = it;
          break;
        }
      }
    }
  });
  return out;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace dgibbs
