#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dgibbs/baselines.hpp"
#include "dgibbs/targets.hpp"

using namespace dgibbs;

namespace {

// rng stub that replays a fixed sequence
struct ForcedRng {
  std::vector<double> values;
  std::size_t next = 0;
  double next_double() { return values[next++ % values.size()]; }
};

}  // namespace

TEST_CASE("random stream is reproducible and splittable") {
  RandomStream a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 32; ++i) {
    const std::uint64_t x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RandomStream root(7);
  CHECK(root.split(0).next_u64() == RandomStream(7).split(0).next_u64());
  CHECK(root.split(0).next_u64() != root.split(1).next_u64());

  RandomStream u(999);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("axis update follows the inverse conditional CDF") {
  const TabledTarget uni({2, 2}, {1.0, 1.0, 1.0, 1.0});
  std::vector<int> state{0, 0};
  std::vector<double> scratch;
  ForcedRng rng{{0.3}};
  gibbs_axis_update(uni, state, 0, rng, scratch);
  CHECK(state[0] == 0);  // 0.3 < 0.5

  const TabledTarget skew({2}, {1.0, 3.0});
  std::vector<int> s1{1};
  ForcedRng low{{0.2}};
  gibbs_axis_update(skew, s1, 0, low, scratch);
  CHECK(s1[0] == 0);  // 0.2 < 0.25
  ForcedRng high{{0.6}};
  gibbs_axis_update(skew, s1, 0, high, scratch);
  CHECK(s1[0] == 1);
}

TEST_CASE("per-axis kernel satisfies detailed balance on a 1D target") {
  // kernel resamples from the conditional, built here from the same masses
  const std::vector<double> mass{1.0, 3.0};
  const double z = 4.0;
  double k[2][2];
  for (int from = 0; from < 2; ++from)
    for (int to = 0; to < 2; ++to) k[from][to] = mass[static_cast<std::size_t>(to)] / z;
  const double pi0 = mass[0] / z, pi1 = mass[1] / z;
  CHECK(std::fabs(pi0 * k[0][0] + pi1 * k[1][0] - pi0) < 1e-12);
  CHECK(std::fabs(pi0 * k[0][1] + pi1 * k[1][1] - pi1) < 1e-12);
  CHECK(std::fabs(pi0 * k[0][1] - pi1 * k[1][0]) < 1e-12);
}

TEST_CASE("lattice conditional frequencies match the sigmoid") {
  const IsingTarget t = IsingTarget::plain(3);
  // fix a neighborhood of the center with spin sum 2
  std::vector<int> base{1, 1, 1, 0, 1, 1, 0, 1, 0};
  REQUIRE(t.neighbor_spin_sum(4, base) == 2);
  const double p_up = sigmoid(-2.0 * 2.0);  // conditional of sigma = +1

  RandomStream rng(2024);
  std::vector<double> scratch;
  const long n = 100000;
  long ups = 0;
  for (long i = 0; i < n; ++i) {
    std::vector<int> s = base;
    gibbs_axis_update(t, s, 4, rng, scratch);
    ups += s[4];
  }
  const double freq = static_cast<double>(ups) / static_cast<double>(n);
  const double se = std::sqrt(p_up * (1.0 - p_up) / static_cast<double>(n));
  CHECK(std::fabs(freq - p_up) < 3.0 * se);
}

TEST_CASE("independent sampler draws exactly from the table") {
  {
    const TabledTarget point({2, 2}, {0.0, 0.0, 1.0, 0.0});
    const CategoricalTable table = CategoricalTable::build(point);
    RandomStream rng(5);
    for (int i = 0; i < 20; ++i)
      CHECK(independent_sample(point, table, rng) == std::vector<int>{1, 0});
  }
  {
    const TabledTarget uni({2, 2}, {1.0, 1.0, 1.0, 1.0});
    const CategoricalTable table = CategoricalTable::build(uni);
    ForcedRng rng{{0.6}};
    CHECK(table.sample(rng) == std::vector<int>{1, 0});  // third state row-major
  }
  {
    const TabledTarget skew({2}, {1.0, 3.0});
    const CategoricalTable table = CategoricalTable::build(skew);
    RandomStream rng(11);
    long ones = 0;
    const long n = 100000;
    for (long i = 0; i < n; ++i) ones += table.sample(rng)[0];
    CHECK(static_cast<double>(ones) / static_cast<double>(n) ==
          Catch::Approx(0.75).margin(0.01));
  }
}

TEST_CASE("degenerate conditionals are reported") {
  const TabledTarget t({2, 2}, {0.0, 0.0, 1.0, 1.0});
  std::vector<int> state{0, 0};  // axis 1 has masses (0, 0) at row 0
  std::vector<double> scratch;
  RandomStream rng(1);
  CHECK_THROWS_AS(gibbs_axis_update(t, state, 1, rng, scratch), std::domain_error);
}
