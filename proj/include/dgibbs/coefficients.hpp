#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dgibbs {

// Per-axis speed constants c_i. Ergodicity of the torus flow needs them
// rationally independent, which the sqrt-of-distinct-primes construction
// guarantees; setting all of them to 1 recovers the non-ergodic scheme used
// as a baseline.
struct Coefficients {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

inline std::vector<std::uint64_t> first_primes(int n) {
  if (n < 1) throw std::invalid_argument("first_primes: n must be >= 1");
  // p_n < n (ln n + ln ln n) for n >= 6; small n handled by the floor below
  double nn = static_cast<double>(n);
  std::size_t limit = 16;
  if (n >= 6) {
    limit = static_cast<std::size_t>(nn * (std::log(nn) + std::log(std::log(nn)))) + 2;
  }
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  primes.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 2; i <= limit && primes.size() < static_cast<std::size_t>(n); ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::size_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  if (primes.size() < static_cast<std::size_t>(n))
    throw std::logic_error("first_primes: sieve bound too small");
  return primes;
}

inline Coefficients sqrt_prime_coefficients(int n) {
  if (n < 1) throw std::invalid_argument("sqrt_prime_coefficients: n must be >= 1");
  Coefficients c;
  c.values.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t p : first_primes(n)) c.values.push_back(std::sqrt(static_cast<double>(p)));
  return c;
}

inline Coefficients unit_coefficients(int n) {
  if (n < 1) throw std::invalid_argument("unit_coefficients: n must be >= 1");
  Coefficients c;
  c.values.assign(static_cast<std::size_t>(n), 1.0);
  return c;
}

}  // namespace dgibbs
