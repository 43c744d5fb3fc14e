#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dgibbs/baselines.hpp"
#include "dgibbs/coefficients.hpp"
#include "dgibbs/discrete.hpp"
#include "dgibbs/harness/diagnostics.hpp"
#include "dgibbs/targets.hpp"
#include "support/stats.hpp"

using namespace dgibbs;

namespace {

TabledTarget uniform2x2() { return TabledTarget({2, 2}, {1.0, 1.0, 1.0, 1.0}); }

TabledTarget random_positive(std::vector<int> dims, std::uint64_t seed) {
  std::size_t cells = 1;
  for (int d : dims) cells *= static_cast<std::size_t>(d);
  RandomStream rng(seed);
  std::vector<double> mass(cells);
  for (double& m : mass) m = 0.1 + rng.next_double();
  return TabledTarget(std::move(dims), std::move(mass));
}

}  // namespace

TEST_CASE("boundary times") {
  const TabledTarget t = uniform2x2();
  CellState s = default_cell_state(t.dims());

  const auto tau = boundary_times(t, unit_coefficients(2), s);
  CHECK(tau[0] == Catch::Approx(0.25).margin(1e-15));
  CHECK(tau[1] == Catch::Approx(0.25).margin(1e-15));

  s.offset = {0.0, 0.0};
  const Coefficients irr{{std::sqrt(2.0), std::sqrt(3.0)}};
  const auto tau2 = boundary_times(t, irr, s);
  CHECK(tau2[0] == Catch::Approx(0.5 / std::sqrt(2.0)).margin(1e-15));
  CHECK(tau2[1] == Catch::Approx(0.5 / std::sqrt(3.0)).margin(1e-15));

  // 1D (1, 3): axis sum 4 by brute force, so tau = 1 * (1/4) / 1
  const TabledTarget skew({2}, {1.0, 3.0});
  CellState s1;
  s1.cell = {0};
  s1.offset = {0.0};
  CHECK(testsupport::brute_axis_sum(skew.mass_, skew.dims(), 0, s1.cell) == 4.0);
  CHECK(boundary_times(skew, unit_coefficients(1), s1)[0] == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("advance event arithmetic") {
  const TabledTarget t = uniform2x2();
  CellState s = default_cell_state(t.dims());
  const Coefficients c{{1.0, 2.0}};
  auto [next, sample] = advance_event(t, c, s);
  CHECK(sample.state == std::vector<int>{0, 0});
  CHECK(sample.dwell == Catch::Approx(0.125).margin(1e-16));
  CHECK(next.cell == std::vector<int>{0, 1});
  CHECK(next.offset[0] == Catch::Approx(0.75).margin(1e-15));
  CHECK(next.offset[1] == 0.0);
}

TEST_CASE("symmetric 1D target alternates cells") {
  const TabledTarget t({2}, {1.0, 1.0});
  CellState s;
  s.cell = {0};
  s.offset = {0.0};
  const EventTrace trace = run_events(t, unit_coefficients(1), s, 6);
  for (std::size_t k = 0; k < trace.samples.size(); ++k) {
    CHECK(trace.samples[k].state[0] == static_cast<int>(k % 2));
    CHECK(trace.samples[k].dwell == Catch::Approx(0.5).margin(1e-15));
  }
}

TEST_CASE("dwell fractions equal the normalized target in 1D") {
  const TabledTarget t({2}, {1.0, 3.0});
  CellState s;
  s.cell = {0};
  s.offset = {0.0};
  const EventTrace trace = run_events(t, unit_coefficients(1), s, 1001);
  const auto hist = weighted_histogram(trace, t.dims());
  CHECK(hist[0] == Catch::Approx(0.25).margin(1e-3));
  CHECK(hist[1] == Catch::Approx(0.75).margin(1e-3));
  const auto mean = weighted_expectation(trace, [](std::span<const int> st) {
    return std::vector<double>{static_cast<double>(st[0])};
  });
  CHECK(mean[0] == Catch::Approx(0.75).margin(1e-3));
}

TEST_CASE("four-event replay on the uniform 2x2 grid") {
  // hand replay with c = (1, 2) from offsets (0.5, 0.5): velocities (2, 4),
  // crossing times and offsets stay exactly representable
  const TabledTarget t = uniform2x2();
  const Coefficients c{{1.0, 2.0}};
  const EventTrace trace = run_events(t, c, default_cell_state(t.dims()), 4);
  REQUIRE(trace.samples.size() == 4);
  const std::vector<std::vector<int>> cells = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  const std::vector<double> dwells = {0.125, 0.125, 0.125, 0.25};
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(trace.samples[k].state == cells[k]);
    CHECK(trace.samples[k].dwell == dwells[k]);
  }
  CHECK(trace.total_time == 0.625);
}

TEST_CASE("weighted expectation basics") {
  EventTrace trace;
  trace.samples = {{{0}, 1.0}, {{1}, 3.0}, {{0}, 2.0}};
  trace.total_time = 6.0;
  auto id = [](std::span<const int> st) {
    return std::vector<double>{static_cast<double>(st[0])};
  };
  CHECK(weighted_expectation(trace, id)[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(weighted_expectation(trace, id, /*compensated=*/true)[0] ==
        Catch::Approx(0.5).margin(1e-15));

  EventTrace single;
  single.samples = {{{7}, 2.5}};
  single.total_time = 2.5;
  CHECK(weighted_expectation(single, id)[0] == 7.0);

  EventTrace degenerate;
  degenerate.samples = {{{0}, 0.0}};
  degenerate.total_time = 0.0;
  CHECK_THROWS_AS(weighted_expectation(degenerate, id), std::domain_error);
}

TEST_CASE("weighted histogram basics") {
  EventTrace single;
  single.samples = {{{1, 0}, 2.0}};
  single.total_time = 2.0;
  const std::vector<int> dims{2, 2};
  const auto hist = weighted_histogram(single, dims);
  CHECK(hist == std::vector<double>{0.0, 0.0, 1.0, 0.0});
}

TEST_CASE("long uniform runs converge to the flat histogram") {
  const TabledTarget t = uniform2x2();
  const Coefficients c{{std::sqrt(2.0), std::sqrt(3.0)}};
  const EventTrace trace = run_events(t, c, default_cell_state(t.dims()), 100000);
  const auto hist = weighted_histogram(trace, t.dims());
  for (double h : hist) CHECK(h == Catch::Approx(0.25).margin(1e-3));
  double sum = 0.0;
  for (double h : hist) sum += h;
  CHECK(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("weighted histogram approaches exact enumeration on a random target") {
  const TabledTarget t = random_positive({4, 4}, 99);
  const ExactMoments mom = enumerate_exact(t);
  // independent normalization for the oracle
  std::vector<double> expect(t.mass_.size());
  double z = 0.0;
  for (double m : t.mass_) z += m;
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = t.mass_[i] / z;
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(mom.table[i] == Catch::Approx(expect[i]).epsilon(1e-12));

  const Coefficients c = sqrt_prime_coefficients(2);
  std::vector<double> l1_at;
  for (long n : {1000L, 10000L, 100000L}) {
    const EventTrace trace = run_events(t, c, default_cell_state(t.dims()), n);
    l1_at.push_back(testsupport::l1_distance(weighted_histogram(trace, t.dims()), expect));
  }
  CHECK(l1_at[2] < 1e-2);
  // windowed decrease across decades
  CHECK(l1_at[1] < l1_at[0]);
  CHECK(l1_at[2] < l1_at[1]);
}

TEST_CASE("traces are deterministic and time accounting is exact") {
  const TabledTarget t = random_positive({3, 5, 2}, 1234);
  const Coefficients c = sqrt_prime_coefficients(3);
  const EventTrace a = run_events(t, c, default_cell_state(t.dims()), 5000);
  const EventTrace b = run_events(t, c, default_cell_state(t.dims()), 5000);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    CHECK(a.samples[k].state == b.samples[k].state);
    CHECK(a.samples[k].dwell == b.samples[k].dwell);
  }

  CellState s = default_cell_state(t.dims());
  std::vector<double> scratch;
  double dwell_sum = 0.0;
  for (int e = 0; e < 5000; ++e) dwell_sum += advance_event_inplace(t, c, s, scratch).dwell;
  CHECK(std::fabs(dwell_sum - s.time) <= 1e-9 * s.time);
}

TEST_CASE("offsets stay inside the unit cell") {
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    const TabledTarget t = random_positive({3, 4}, seed);
    CellState s = default_cell_state(t.dims());
    std::vector<double> scratch;
    const Coefficients c = sqrt_prime_coefficients(2);
    for (int e = 0; e < 2000; ++e) {
      advance_event_inplace(t, c, s, scratch);
      for (double o : s.offset) {
        CHECK(o >= 0.0);
        CHECK(o < 1.0);
      }
    }
  }
}

TEST_CASE("cached-conditional sampler reproduces the reference path") {
  const IsingTarget t = IsingTarget::plain(3);
  const Coefficients c = sqrt_prime_coefficients(9);
  CellState ref_state = default_cell_state(t.dims());
  EventSampler<IsingTarget> cached(t, c, default_cell_state(t.dims()));
  std::vector<double> scratch;
  for (int e = 0; e < 2000; ++e) {
    const EventResult a = advance_event_inplace(t, c, ref_state, scratch);
    const EventResult b = cached.step();
    REQUIRE(a.exit_axis == b.exit_axis);
    REQUIRE(a.dwell == b.dwell);
  }
  CHECK(cached.state().cell == ref_state.cell);
  CHECK(cached.state().offset == ref_state.offset);
}

TEST_CASE("rational coefficients lock the orbit onto a periodic cycle") {
  const TabledTarget t = uniform2x2();
  const Coefficients ones = unit_coefficients(2);
  const EventTrace trace = run_events(t, ones, default_cell_state(t.dims()), 10000);
  const CoverageReport rep = coverage_and_period(trace, t.dims());
  REQUIRE(rep.period.has_value());
  CHECK(*rep.period == 4);
  // only the two diagonal cells accumulate dwell; the others are corner grazes
  CHECK(rep.coverage == Catch::Approx(0.5).margin(1e-12));

  // perturbed target: the closed orbit still alternates between the two
  // equal-mass diagonal cells, so the histogram converges to (1/2, 0, 0, 1/2)
  // instead of the target (1/6, 1/3, 1/3, 1/6)
  const TabledTarget perturbed({2, 2}, {1.0, 2.0, 2.0, 1.0});
  std::vector<double> expect_target;
  for (double m : perturbed.mass_) expect_target.push_back(m / 6.0);
  std::vector<double> l1s;
  for (long n : {1000L, 100000L}) {
    const EventTrace tr = run_events(perturbed, ones, default_cell_state(perturbed.dims()), n);
    l1s.push_back(testsupport::l1_distance(weighted_histogram(tr, perturbed.dims()),
                                           expect_target));
  }
  CHECK(l1s[1] > 0.1);
  CHECK(l1s[1] > 0.5 * l1s[0]);
  const EventTrace tr = run_events(perturbed, ones, default_cell_state(perturbed.dims()), 100000);
  const auto hist = weighted_histogram(tr, perturbed.dims());
  CHECK(hist[0] == Catch::Approx(0.5).margin(0.05));
  CHECK(hist[3] == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("irrational coefficients cover the grid") {
  const TabledTarget t = uniform2x2();
  const Coefficients irr{{std::sqrt(2.0), std::sqrt(3.0)}};
  const EventTrace trace = run_events(t, irr, default_cell_state(t.dims()), 100000);
  const CoverageReport rep = coverage_and_period(trace, t.dims());
  CHECK(rep.coverage == 1.0);
  CHECK_FALSE(rep.period.has_value());
}

TEST_CASE("zero-mass cells are crossed in zero time") {
  // middle cell of a 1D chain carries no mass
  const TabledTarget t({3}, {1.0, 0.0, 3.0});
  CellState s;
  s.cell = {0};
  s.offset = {0.0};
  const EventTrace trace = run_events(t, unit_coefficients(1), s, 4000);
  CHECK(trace.zero_dwell_events > 0);
  const auto hist = weighted_histogram(trace, t.dims());
  CHECK(hist[0] == Catch::Approx(0.25).margin(1e-3));
  CHECK(hist[1] == 0.0);
  CHECK(hist[2] == Catch::Approx(0.75).margin(1e-3));

  // a zero column in 2D: the escape picks the axis with positive cross-sum
  const TabledTarget grid({3, 3}, {1, 0, 1, 1, 0, 1, 1, 0, 1});
  CellState g;
  g.cell = {0, 1};
  g.offset = {0.5, 0.5};
  auto [next, sample] = advance_event(grid, unit_coefficients(2), g);
  CHECK(sample.dwell == 0.0);
  CHECK(next.cell == std::vector<int>{0, 2});
}

TEST_CASE("single event trace diagnostics") {
  const TabledTarget t = uniform2x2();
  const EventTrace trace =
      run_events(t, sqrt_prime_coefficients(2), default_cell_state(t.dims()), 1);
  const CoverageReport rep = coverage_and_period(trace, t.dims());
  CHECK(rep.coverage == Catch::Approx(0.25).margin(1e-12));
  CHECK_FALSE(rep.period.has_value());
}
