#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgibbs/csv.hpp"
#include "dgibbs/discrete.hpp"
#include "dgibbs/errors.hpp"
#include "dgibbs/math.hpp"
#include "dgibbs/pgm.hpp"

namespace dgibbs {

// ---------------------------------------------------------------------------
// TabledTarget: dense masses for small state spaces
// ---------------------------------------------------------------------------

struct TabledTarget {
  std::vector<int> dims_;
  std::vector<double> mass_;     // row-major
  std::vector<std::size_t> stride_;

  TabledTarget() = default;
  TabledTarget(std::vector<int> dims, std::vector<double> mass)
      : dims_(std::move(dims)), mass_(std::move(mass)) {
    stride_.assign(dims_.size(), 1);
    for (int j = static_cast<int>(dims_.size()) - 2; j >= 0; --j)
      stride_[static_cast<std::size_t>(j)] =
          stride_[static_cast<std::size_t>(j + 1)] * static_cast<std::size_t>(dims_[static_cast<std::size_t>(j + 1)]);
    std::size_t cells = stride_.empty() ? 0 : stride_[0] * static_cast<std::size_t>(dims_[0]);
    if (mass_.size() != cells) throw std::invalid_argument("TabledTarget: size mismatch");
    double best = 0.0;
    for (double m : mass_) {
      if (m < 0.0) throw std::invalid_argument("TabledTarget: negative mass");
      best = std::max(best, m);
    }
    if (!(best > 0.0)) throw std::invalid_argument("TabledTarget: all masses zero");
  }

  const std::vector<int>& dims() const { return dims_; }

  double mass(std::span<const int> s) const { return mass_[flat_index(s, dims_)]; }
  double log_mass(std::span<const int> s) const {
    const double m = mass(s);
    return m > 0.0 ? std::log(m) : kNegInf;
  }
  double axis_sum(int axis, std::span<const int> s) const {
    std::size_t base = flat_index(s, dims_);
    const std::size_t st = stride_[static_cast<std::size_t>(axis)];
    base -= st * static_cast<std::size_t>(s[static_cast<std::size_t>(axis)]);
    double sum = 0.0;
    for (int v = 0; v < dims_[static_cast<std::size_t>(axis)]; ++v)
      sum += mass_[base + st * static_cast<std::size_t>(v)];
    return sum;
  }
  double conditional(int axis, std::span<const int> s) const {
    const double m = mass(s);
    if (!(m > 0.0)) return 0.0;
    return m / axis_sum(axis, s);
  }
  double axis_log_sum(int axis, std::span<const int> s) const {
    const double sum = axis_sum(axis, s);
    return sum > 0.0 ? std::log(sum) : kNegInf;
  }
  void axis_log_masses(int axis, std::span<const int> s, std::span<double> out) const {
    std::size_t base = flat_index(s, dims_);
    const std::size_t st = stride_[static_cast<std::size_t>(axis)];
    base -= st * static_cast<std::size_t>(s[static_cast<std::size_t>(axis)]);
    for (int v = 0; v < dims_[static_cast<std::size_t>(axis)]; ++v) {
      const double m = mass_[base + st * static_cast<std::size_t>(v)];
      out[static_cast<std::size_t>(v)] = m > 0.0 ? std::log(m) : kNegInf;
    }
  }
};

// ---------------------------------------------------------------------------
// ImageTarget: 2D grayscale mass with O(1) conditionals via row/column sums
// ---------------------------------------------------------------------------

// axis 0 = row index, axis 1 = column index
struct ImageTarget {
  int height = 0;
  int width = 0;
  std::vector<double> mass_;      // row-major
  std::vector<double> row_sum_;   // per row: sum over columns
  std::vector<double> col_sum_;   // per column: sum over rows
  double floor_value = 0.0;
  std::vector<int> dims_;

  const std::vector<int>& dims() const { return dims_; }

  double mass(std::span<const int> s) const {
    return mass_[static_cast<std::size_t>(s[0]) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(s[1])];
  }
  double log_mass(std::span<const int> s) const {
    const double m = mass(s);
    return m > 0.0 ? std::log(m) : kNegInf;
  }
  double axis_sum(int axis, std::span<const int> s) const {
    // moving along rows keeps the column fixed and vice versa
    return axis == 0 ? col_sum_[static_cast<std::size_t>(s[1])]
                     : row_sum_[static_cast<std::size_t>(s[0])];
  }
  double conditional(int axis, std::span<const int> s) const {
    const double m = mass(s);
    if (!(m > 0.0)) return 0.0;
    return m / axis_sum(axis, s);
  }
  double axis_log_sum(int axis, std::span<const int> s) const {
    const double sum = axis_sum(axis, s);
    return sum > 0.0 ? std::log(sum) : kNegInf;
  }
  void axis_log_masses(int axis, std::span<const int> s, std::span<double> out) const {
    int idx[2] = {s[0], s[1]};
    const int d = dims_[static_cast<std::size_t>(axis)];
    for (int v = 0; v < d; ++v) {
      idx[axis] = v;
      const double m = mass_[static_cast<std::size_t>(idx[0]) * static_cast<std::size_t>(width) +
                             static_cast<std::size_t>(idx[1])];
      out[static_cast<std::size_t>(v)] = m > 0.0 ? std::log(m) : kNegInf;
    }
  }
};

// floor < 0 requests the default: 1e-6 * max pixel, substituted where the
// raw value is exactly zero
inline ImageTarget make_image_target(int height, int width, std::span<const double> raw,
                                     double floor = -1.0) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("make_image_target: bad dims");
  if (raw.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width))
    throw std::invalid_argument("make_image_target: size mismatch");
  ImageTarget t;
  t.height = height;
  t.width = width;
  t.dims_ = {height, width};
  double maxpix = 0.0;
  for (double p : raw) {
    if (p < 0.0) throw std::invalid_argument("make_image_target: negative pixel");
    maxpix = std::max(maxpix, p);
  }
  if (!(maxpix > 0.0)) throw std::invalid_argument("make_image_target: all pixels zero");
  t.floor_value = floor < 0.0 ? 1e-6 * maxpix : floor;
  t.mass_.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    t.mass_[i] = raw[i] == 0.0 ? t.floor_value : raw[i];
  t.row_sum_.assign(static_cast<std::size_t>(height), 0.0);
  t.col_sum_.assign(static_cast<std::size_t>(width), 0.0);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const double m = t.mass_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(c)];
      t.row_sum_[static_cast<std::size_t>(r)] += m;
      t.col_sum_[static_cast<std::size_t>(c)] += m;
    }
  return t;
}

inline ImageTarget load_pgm(const std::string& path, double floor = -1.0) {
  const PgmImage img = read_pgm(path);
  std::vector<double> raw(img.pixels.begin(), img.pixels.end());
  return make_image_target(img.height, img.width, raw, floor);
}

// Deterministic synthetic images for benchmarks: a smooth positive blob over
// a gradient, a flat field, or a binary disk (for denoising inputs).
inline std::vector<double> synthetic_image(const std::string& kind, int height, int width) {
  std::vector<double> m(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i =
          static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c);
      if (kind == "uniform") {
        m[i] = 1.0;
      } else if (kind == "smooth") {
        const double dr = (r - height / 3.0) / (height / 6.0);
        const double dc = (c - width / 2.0) / (width / 6.0);
        m[i] = 0.2 + std::exp(-0.5 * (dr * dr + dc * dc)) + 0.4 * (c + 1.0) / width;
      } else if (kind == "disk") {
        const double dr = r - (height - 1) / 2.0;
        const double dc = c - (width - 1) / 2.0;
        const double rad = 0.3 * std::min(height, width);
        m[i] = (dr * dr + dc * dc <= rad * rad) ? 1.0 : 0.0;
      } else {
        throw std::invalid_argument("synthetic_image: unknown kind '" + kind + "'");
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// IsingTarget: L x L lattice of spins, O(1) conditionals via the local field
// ---------------------------------------------------------------------------

// E(sigma) = coupling * sum_<ij> sigma_i sigma_j - field * sum_i sigma_i xi_i,
// p ∝ exp(-E). coupling=+1, field=0 is the plain antiferromagnet whose ground
// states are the two checkerboards; coupling=-beta with field=eta is the
// smoothing-plus-data denoising energy. Axis value v in {0,1} encodes spin
// 2v-1.
struct IsingTarget {
  int side = 0;
  double coupling = 1.0;
  double field = 0.0;
  std::vector<int> pixels;    // xi in {-1,+1}; empty when field == 0
  std::vector<int> dims_;

  static IsingTarget plain(int side) {
    IsingTarget t;
    t.side = side;
    t.coupling = 1.0;
    t.field = 0.0;
    t.dims_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), 2);
    return t;
  }
  static IsingTarget denoising(int side, double beta, double eta, std::vector<int> xi) {
    if (static_cast<int>(xi.size()) != side * side)
      throw std::invalid_argument("IsingTarget: pixel count mismatch");
    IsingTarget t;
    t.side = side;
    t.coupling = -beta;
    t.field = eta;
    t.pixels = std::move(xi);
    t.dims_.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), 2);
    return t;
  }

  const std::vector<int>& dims() const { return dims_; }
  int sites() const { return side * side; }

  static int spin(int v) { return 2 * v - 1; }

  int neighbor_spin_sum(int site, std::span<const int> s) const {
    const int r = site / side, c = site % side;
    int sum = 0;
    if (r > 0) sum += spin(s[static_cast<std::size_t>(site - side)]);
    if (r + 1 < side) sum += spin(s[static_cast<std::size_t>(site + side)]);
    if (c > 0) sum += spin(s[static_cast<std::size_t>(site - 1)]);
    if (c + 1 < side) sum += spin(s[static_cast<std::size_t>(site + 1)]);
    return sum;
  }

  // a_i such that log p(sigma_i = t | rest) = t * a_i + const
  double local_field(int site, std::span<const int> s) const {
    double a = -coupling * neighbor_spin_sum(site, s);
    if (field != 0.0) a += field * pixels[static_cast<std::size_t>(site)];
    return a;
  }

  double energy(std::span<const int> s) const {
    double e = 0.0;
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) {
        const int i = r * side + c;
        const int si = spin(s[static_cast<std::size_t>(i)]);
        if (r + 1 < side) e += coupling * si * spin(s[static_cast<std::size_t>(i + side)]);
        if (c + 1 < side) e += coupling * si * spin(s[static_cast<std::size_t>(i + 1)]);
        if (field != 0.0) e -= field * si * pixels[static_cast<std::size_t>(i)];
      }
    return e;
  }

  // change in energy if site flips from its current value
  double flip_delta_energy(int site, std::span<const int> s) const {
    return 2.0 * spin(s[static_cast<std::size_t>(site)]) * local_field(site, s);
  }

  double log_mass(std::span<const int> s) const { return -energy(s); }
  double conditional(int axis, std::span<const int> s) const {
    const double a = local_field(axis, s);
    return sigmoid(2.0 * spin(s[static_cast<std::size_t>(axis)]) * a);
  }
  // axis_sum(j, s) / mass(s), exact because the shared Boltzmann factor
  // cancels; this is the form large lattices can afford
  double axis_sum_ratio(int axis, std::span<const int> s) const {
    return 1.0 / conditional(axis, s);
  }
  // up to the additive constant log_mass(s), shared by all axes at s
  double axis_log_sum(int axis, std::span<const int> s) const {
    const double a = local_field(axis, s);
    const double lcosh = std::fabs(a) + std::log1p(std::exp(-2.0 * std::fabs(a)));
    return lcosh - spin(s[static_cast<std::size_t>(axis)]) * a;
  }
  void axis_log_masses(int axis, std::span<const int> s, std::span<double> out) const {
    const double a = local_field(axis, s);
    out[0] = -a;   // sigma = -1
    out[1] = a;    // sigma = +1
  }

  // a move at `site` changes only its own conditional and its neighbors'
  void affected_axes(int site, std::vector<int>& out) const {
    out.clear();
    out.push_back(site);
    const int r = site / side, c = site % side;
    if (r > 0) out.push_back(site - side);
    if (r + 1 < side) out.push_back(site + side);
    if (c > 0) out.push_back(site - 1);
    if (c + 1 < side) out.push_back(site + 1);
  }
};

// ---------------------------------------------------------------------------
// LogRegTarget: logistic regression posterior over binary weights
// ---------------------------------------------------------------------------

// theta_i in {-1,+1} encoded as axis value v with theta = 2v-1; uniform
// prior, so log mass = sum_m log sigmoid(y_m theta^T x_m).
struct LogRegTarget {
  int n_params = 0;               // features including the bias column
  int n_examples = 0;
  std::vector<double> x;          // row-major n_examples x n_params
  std::vector<double> y;          // labels in {-1,+1}
  std::vector<int> dims_;

  LogRegTarget() = default;
  LogRegTarget(int m, int n, std::vector<double> xs, std::vector<double> ys)
      : n_params(n), n_examples(m), x(std::move(xs)), y(std::move(ys)) {
    dims_.assign(static_cast<std::size_t>(n), 2);
  }

  const std::vector<int>& dims() const { return dims_; }

  double log_mass(std::span<const int> s) const {
    double ll = 0.0;
    for (int m = 0; m < n_examples; ++m) {
      const double* row = &x[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_params)];
      double dot = 0.0;
      for (int j = 0; j < n_params; ++j)
        dot += row[j] * (2 * s[static_cast<std::size_t>(j)] - 1);
      ll += log_sigmoid(y[static_cast<std::size_t>(m)] * dot);
    }
    return ll;
  }

  // log masses of the two settings of one axis, others fixed
  void axis_log_masses(int axis, std::span<const int> s, std::span<double> out) const {
    double ll0 = 0.0, ll1 = 0.0;
    for (int m = 0; m < n_examples; ++m) {
      const double* row = &x[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_params)];
      double base = 0.0;
      for (int j = 0; j < n_params; ++j)
        if (j != axis) base += row[j] * (2 * s[static_cast<std::size_t>(j)] - 1);
      const double ym = y[static_cast<std::size_t>(m)];
      ll0 += log_sigmoid(ym * (base - row[axis]));
      ll1 += log_sigmoid(ym * (base + row[axis]));
    }
    out[0] = ll0;
    out[1] = ll1;
  }

  double conditional(int axis, std::span<const int> s) const {
    double lm[2];
    axis_log_masses(axis, s, lm);
    const int cur = s[static_cast<std::size_t>(axis)];
    return sigmoid(lm[cur] - lm[1 - cur]);
  }
  double axis_log_sum(int axis, std::span<const int> s) const {
    double lm[2];
    axis_log_masses(axis, s, lm);
    return log_add_exp(lm[0], lm[1]);
  }
};

// Standardize features to zero mean and unit (population) variance, append a
// bias column of ones, and map the label column to +1 for the positive class
// and -1 otherwise.
inline LogRegTarget load_csv_dataset(const std::string& path, const std::string& label_column,
                                     const std::string& positive_label) {
  const CsvTable table = read_csv(path);
  const int label_col = table.column(label_column);
  if (label_col < 0)
    throw ParseError("csv: missing label column '" + label_column + "'", 0);
  const int m = static_cast<int>(table.rows.size());
  if (m < 2) throw ParseError("csv: need at least two rows", 0);
  const int n_features = static_cast<int>(table.header.size()) - 1;
  const int n = n_features + 1;  // + bias

  std::vector<double> feat(static_cast<std::size_t>(m) * static_cast<std::size_t>(n_features));
  std::vector<double> y(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    int k = 0;
    for (int cidx = 0; cidx < static_cast<int>(table.header.size()); ++cidx) {
      const std::string& cell = table.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(cidx)];
      if (cidx == label_col) {
        y[static_cast<std::size_t>(r)] = (cell == positive_label) ? 1.0 : -1.0;
      } else {
        feat[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_features) +
             static_cast<std::size_t>(k++)] =
            csv_numeric(cell, static_cast<std::size_t>(r) + 2, table.header[static_cast<std::size_t>(cidx)]);
      }
    }
  }
  // standardize each feature column
  for (int j = 0; j < n_features; ++j) {
    double mean = 0.0;
    for (int r = 0; r < m; ++r)
      mean += feat[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_features) +
                   static_cast<std::size_t>(j)];
    mean /= m;
    double var = 0.0;
    for (int r = 0; r < m; ++r) {
      const double d = feat[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_features) +
                            static_cast<std::size_t>(j)] - mean;
      var += d * d;
    }
    var /= m;
    const double sd = std::sqrt(var);
    if (!(sd > 0.0))
      throw ParseError("csv: constant feature column " + table.header[static_cast<std::size_t>(j)], 0);
    for (int r = 0; r < m; ++r) {
      double& v = feat[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_features) +
                       static_cast<std::size_t>(j)];
      v = (v - mean) / sd;
    }
  }
  std::vector<double> x(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n_features; ++j)
      x[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
          feat[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_features) +
               static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(n_features)] = 1.0;
  }
  return LogRegTarget(m, n, std::move(x), std::move(y));
}

// ---------------------------------------------------------------------------
// Exact enumeration oracle
// ---------------------------------------------------------------------------

struct ExactMoments {
  double log_z = 0.0;
  std::vector<double> axis_mean;     // E[i_j] in cell units
  std::vector<double> table;         // normalized, empty unless requested
};

inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

template <DiscreteTarget T>
ExactMoments enumerate_exact(const T& target, bool want_table = true) {
  auto dims = target.dims();
  const int n = static_cast<int>(dims.size());
  std::size_t cells = 1;
  for (int d : dims) {
    cells *= static_cast<std::size_t>(d);
    if (cells > kEnumerationCap)
      throw CapacityError("enumerate_exact: state space exceeds 2^20");
  }
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  std::vector<double> logm(cells);
  double lmax = kNegInf;
  for (std::size_t i = 0; i < cells; ++i) {
    logm[i] = target.log_mass(s);
    lmax = std::max(lmax, logm[i]);
    for (int j = n - 1; j >= 0; --j) {
      if (++s[static_cast<std::size_t>(j)] < dims[static_cast<std::size_t>(j)]) break;
      s[static_cast<std::size_t>(j)] = 0;
    }
  }
  if (lmax == kNegInf) throw std::domain_error("enumerate_exact: target has no mass");

  ExactMoments mom;
  mom.axis_mean.assign(static_cast<std::size_t>(n), 0.0);
  if (want_table) mom.table.assign(cells, 0.0);
  double zs = 0.0;
  std::fill(s.begin(), s.end(), 0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double w = std::exp(logm[i] - lmax);
    zs += w;
    for (int j = 0; j < n; ++j)
      mom.axis_mean[static_cast<std::size_t>(j)] += w * s[static_cast<std::size_t>(j)];
    if (want_table) mom.table[i] = w;
    for (int j = n - 1; j >= 0; --j) {
      if (++s[static_cast<std::size_t>(j)] < dims[static_cast<std::size_t>(j)]) break;
      s[static_cast<std::size_t>(j)] = 0;
    }
  }
  mom.log_z = lmax + std::log(zs);
  for (double& v : mom.axis_mean) v /= zs;
  if (want_table)
    for (double& v : mom.table) v /= zs;
  return mom;
}

}  // namespace dgibbs
