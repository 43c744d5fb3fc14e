#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dgibbs/baselines.hpp"
#include "dgibbs/targets.hpp"
#include "support/stats.hpp"

using namespace dgibbs;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("test_tmp_") + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// independent full-energy evaluation for the plain lattice model
double brute_ising_energy(int side, std::span<const int> cells) {
  double e = 0.0;
  auto spin = [&](int r, int c) { return 2 * cells[static_cast<std::size_t>(r * side + c)] - 1; };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      if (r + 1 < side) e += spin(r, c) * spin(r + 1, c);
      if (c + 1 < side) e += spin(r, c) * spin(r, c + 1);
    }
  return e;
}

}  // namespace

TEST_CASE("pgm ascii round trip with floors") {
  const std::string path = temp_path("a.pgm");
  write_file(path, "P2\n# checker\n2 2\n255\n0 255\n255 0\n");

  const ImageTarget zero_floor = load_pgm(path, 0.0);
  CHECK(zero_floor.mass_ == std::vector<double>{0.0, 255.0, 255.0, 0.0});
  CHECK(zero_floor.row_sum_ == std::vector<double>{255.0, 255.0});
  CHECK(zero_floor.col_sum_ == std::vector<double>{255.0, 255.0});

  const ImageTarget with_floor = load_pgm(path);
  CHECK(with_floor.mass_[0] == Catch::Approx(255.0 * 1e-6).epsilon(1e-12));
  CHECK(with_floor.mass_[1] == 255.0);
  std::remove(path.c_str());
}

TEST_CASE("pgm binary matches ascii") {
  const std::string apath = temp_path("b_ascii.pgm");
  const std::string bpath = temp_path("b_bin.pgm");
  PgmImage img;
  img.width = 3;
  img.height = 2;
  img.maxval = 255;
  img.pixels = {0, 10, 200, 255, 5, 17};
  write_pgm(apath, img, /*binary=*/false);
  write_pgm(bpath, img, /*binary=*/true);
  const ImageTarget a = load_pgm(apath, 0.0);
  const ImageTarget b = load_pgm(bpath, 0.0);
  CHECK(a.mass_ == b.mass_);
  CHECK(a.dims() == b.dims());
  std::remove(apath.c_str());
  std::remove(bpath.c_str());
}

TEST_CASE("pgm parse errors carry context") {
  const std::string path = temp_path("bad.pgm");
  write_file(path, "P3\n2 2\n255\n");
  CHECK_THROWS_AS(read_pgm(path), ParseError);
  write_file(path, "P5\n4 4\n255\nxy");  // truncated raster
  CHECK_THROWS_AS(read_pgm(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("image target exposes exact conditionals") {
  const std::vector<double> raw{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const ImageTarget t = make_image_target(2, 3, raw, 0.0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) {
      const std::vector<int> s{r, c};
      for (int axis = 0; axis < 2; ++axis) {
        const double brute = testsupport::brute_axis_sum(raw, t.dims(), axis, s);
        CHECK(t.axis_sum(axis, s) == Catch::Approx(brute).epsilon(1e-12));
        CHECK(t.conditional(axis, s) ==
              Catch::Approx(t.mass(s) / brute).epsilon(1e-12));
      }
    }
}

TEST_CASE("lattice conditional ratios against brute-force energies") {
  const IsingTarget t = IsingTarget::plain(3);

  // an interior site with balanced neighbors has conditional 1/2
  std::vector<int> balanced{1, 1, 1, 0, 1, 1, 0, 0, 1};
  // neighbors of center (site 4): sites 1, 3, 5, 7 -> spins +1, -1, +1, -1
  CHECK(t.neighbor_spin_sum(4, balanced) == 0);
  CHECK(t.conditional(4, balanced) == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(t.axis_sum_ratio(4, balanced) == Catch::Approx(2.0).epsilon(1e-15));

  // all neighbors up and the site up: conditional e^-4 / (e^-4 + e^4)
  std::vector<int> allup(9, 1);
  CHECK(t.neighbor_spin_sum(4, allup) == 4);
  const double expect = std::exp(-4.0) / (std::exp(-4.0) + std::exp(4.0));
  CHECK(t.conditional(4, allup) == Catch::Approx(expect).epsilon(1e-10));
  CHECK(t.axis_sum_ratio(4, allup) == Catch::Approx(1.0 / expect).epsilon(1e-10));

  // brute force over random configurations: ratio of summed Boltzmann weights
  RandomStream rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> s(9);
    for (auto& v : s) v = rng.next_double() < 0.5 ? 0 : 1;
    for (int site = 0; site < 9; ++site) {
      std::vector<int> plus = s, minus = s;
      plus[static_cast<std::size_t>(site)] = 1;
      minus[static_cast<std::size_t>(site)] = 0;
      const double ep = brute_ising_energy(3, plus);
      const double em = brute_ising_energy(3, minus);
      const double ecur = brute_ising_energy(3, s);
      const double ratio = (std::exp(-ep) + std::exp(-em)) / std::exp(-ecur);
      CHECK(t.axis_sum_ratio(site, s) == Catch::Approx(ratio).epsilon(1e-10));
    }
  }
}

TEST_CASE("lattice energies and ground states") {
  for (int side : {3, 4}) {
    const IsingTarget t = IsingTarget::plain(side);
    const std::vector<int> ones(static_cast<std::size_t>(side * side), 1);
    CHECK(t.energy(ones) == Catch::Approx(2.0 * side * (side - 1)).epsilon(1e-15));

    std::vector<int> checker(static_cast<std::size_t>(side * side));
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c)
        checker[static_cast<std::size_t>(r * side + c)] = (r + c) % 2;
    CHECK(t.energy(checker) == Catch::Approx(-2.0 * side * (side - 1)).epsilon(1e-15));
    // no single flip improves a ground state
    for (int site = 0; site < side * side; ++site)
      CHECK(t.flip_delta_energy(site, checker) > 0.0);
  }
}

TEST_CASE("denoising energy favours data agreement") {
  std::vector<int> xi(9, 1);
  const IsingTarget t = IsingTarget::denoising(3, 1.0, 2.1, xi);
  std::vector<int> agree(9, 1);
  std::vector<int> disagree(9, 1);
  disagree[4] = 0;
  CHECK(t.energy(agree) < t.energy(disagree));
  // flipping the center back toward the data lowers the energy
  CHECK(t.flip_delta_energy(4, disagree) < 0.0);
}

TEST_CASE("binary-weight posterior conditionals") {
  {
    // all-zero features: flat posterior, every axis ratio is 2
    LogRegTarget t(3, 2, std::vector<double>(6, 0.0), {1.0, -1.0, 1.0});
    const std::vector<int> s{1, 0};
    CHECK(t.conditional(0, s) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(std::exp(t.axis_log_sum(0, s) - t.log_mass(s)) == Catch::Approx(2.0).epsilon(1e-12));
  }
  {
    // single example x = (1), y = +1
    LogRegTarget t(1, 1, {1.0}, {1.0});
    const double sp = 1.0 / (1.0 + std::exp(-1.0));
    const double sm = 1.0 / (1.0 + std::exp(1.0));
    const std::vector<int> plus{1};
    CHECK(t.conditional(0, plus) == Catch::Approx(sp / (sp + sm)).epsilon(1e-12));
  }
}

TEST_CASE("iris and wine load with the expected shapes") {
  const LogRegTarget iris =
      load_csv_dataset(std::string(DGIBBS_DATA_DIR) + "/iris.csv", "class", "0");
  CHECK(iris.n_examples == 150);
  CHECK(iris.n_params == 5);

  const LogRegTarget wine =
      load_csv_dataset(std::string(DGIBBS_DATA_DIR) + "/wine.csv", "class", "0");
  CHECK(wine.n_examples == 178);
  CHECK(wine.n_params == 14);

  // features are standardized and the bias column is ones
  for (int j = 0; j < iris.n_params - 1; ++j) {
    double mean = 0.0, var = 0.0;
    for (int m = 0; m < iris.n_examples; ++m)
      mean += iris.x[static_cast<std::size_t>(m * iris.n_params + j)];
    mean /= iris.n_examples;
    for (int m = 0; m < iris.n_examples; ++m) {
      const double d = iris.x[static_cast<std::size_t>(m * iris.n_params + j)] - mean;
      var += d * d;
    }
    CHECK(std::fabs(mean) < 1e-12);
    CHECK(var / iris.n_examples == Catch::Approx(1.0).epsilon(1e-10));
  }
  for (int m = 0; m < iris.n_examples; ++m)
    CHECK(iris.x[static_cast<std::size_t>(m * iris.n_params + iris.n_params - 1)] == 1.0);

  // axis terms at the all-ones state against direct likelihood evaluation
  auto brute_ll = [&](std::span<const int> s) {
    double ll = 0.0;
    for (int m = 0; m < iris.n_examples; ++m) {
      double dot = 0.0;
      for (int j = 0; j < iris.n_params; ++j)
        dot += iris.x[static_cast<std::size_t>(m * iris.n_params + j)] *
               (2 * s[static_cast<std::size_t>(j)] - 1);
      ll += -std::log1p(std::exp(-iris.y[static_cast<std::size_t>(m)] * dot));
    }
    return ll;
  };
  std::vector<int> ones_state(5, 1);
  for (int axis = 0; axis < 5; ++axis) {
    double lm[2];
    iris.axis_log_masses(axis, ones_state, lm);
    std::vector<int> v0 = ones_state, v1 = ones_state;
    v0[static_cast<std::size_t>(axis)] = 0;
    v1[static_cast<std::size_t>(axis)] = 1;
    CHECK(lm[0] == Catch::Approx(brute_ll(v0)).epsilon(1e-12));
    CHECK(lm[1] == Catch::Approx(brute_ll(v1)).epsilon(1e-12));
  }
}

TEST_CASE("posterior symmetric under flipping all labels and weights") {
  const LogRegTarget t =
      load_csv_dataset(std::string(DGIBBS_DATA_DIR) + "/iris.csv", "class", "0");
  LogRegTarget flipped = t;
  for (double& yv : flipped.y) yv = -yv;
  RandomStream rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> s(5), neg(5);
    for (int j = 0; j < 5; ++j) {
      s[static_cast<std::size_t>(j)] = rng.next_double() < 0.5 ? 0 : 1;
      neg[static_cast<std::size_t>(j)] = 1 - s[static_cast<std::size_t>(j)];
    }
    CHECK(t.log_mass(s) == Catch::Approx(flipped.log_mass(neg)).epsilon(1e-12));
  }
}

TEST_CASE("toy csv standardization") {
  const std::string path = temp_path("toy.csv");
  write_file(path, "f,label\n0,A\n2,B\n");
  const LogRegTarget t = load_csv_dataset(path, "label", "A");
  REQUIRE(t.n_examples == 2);
  REQUIRE(t.n_params == 2);
  CHECK(t.x[0] == Catch::Approx(-1.0).epsilon(1e-12));
  CHECK(t.x[2] == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(t.x[1] == 1.0);
  CHECK(t.x[3] == 1.0);
  CHECK(t.y[0] == 1.0);
  CHECK(t.y[1] == -1.0);

  write_file(path, "f,label\nabc,A\n2,B\n");
  CHECK_THROWS_AS(load_csv_dataset(path, "label", "A"), ParseError);
  write_file(path, "f,label\n0,A\n2,B\n");
  CHECK_THROWS_AS(load_csv_dataset(path, "missing", "A"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("exact enumeration moments") {
  const TabledTarget skew({2}, {1.0, 3.0});
  const ExactMoments m1 = enumerate_exact(skew);
  CHECK(std::exp(m1.log_z) == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(m1.axis_mean[0] == Catch::Approx(0.75).epsilon(1e-12));

  const TabledTarget uni({2, 2}, {1.0, 1.0, 1.0, 1.0});
  const ExactMoments m2 = enumerate_exact(uni);
  CHECK(std::exp(m2.log_z) == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(m2.axis_mean[0] == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(m2.axis_mean[1] == Catch::Approx(0.5).epsilon(1e-12));

  // 512-state lattice: compare the normalizer against a direct sum and use
  // the global flip symmetry for the means
  const IsingTarget ising = IsingTarget::plain(3);
  const ExactMoments m3 = enumerate_exact(ising, /*want_table=*/false);
  double z = 0.0;
  for (int mask = 0; mask < 512; ++mask) {
    std::vector<int> cells(9);
    for (int b = 0; b < 9; ++b) cells[static_cast<std::size_t>(b)] = (mask >> b) & 1;
    z += std::exp(-brute_ising_energy(3, cells));
  }
  CHECK(m3.log_z == Catch::Approx(std::log(z)).epsilon(1e-12));
  for (double mean : m3.axis_mean) CHECK(mean == Catch::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(enumerate_exact(IsingTarget::plain(28)), CapacityError);
}
