#pragma once

// Reference implementations for the tests. They share no code with the
// library beyond the AdditiveFunctionSpec value rule (the definition of f)
// and are deliberately slow and direct.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/sieve.hpp"

namespace oracle {

using shiftconc::AdditiveFunctionSpec;
using shiftconc::AdditiveKind;
using shiftconc::PrimePower;

inline std::uint64_t smallest_factor(std::uint64_t n) {
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return d;
  }
  return n;
}

inline bool is_prime(std::uint64_t n) { return n >= 2 && smallest_factor(n) == n; }

inline std::vector<PrimePower> trial_factor(std::uint64_t n) {
  std::vector<PrimePower> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    PrimePower pp{d, 0};
    while (n % d == 0) {
      n /= d;
      ++pp.exponent;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline std::uint64_t phi_by_gcd(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t r = 1; r <= n; ++r) c += std::gcd(r, n) == 1;
  return c;
}

inline std::vector<std::uint64_t> primes_upto(std::uint64_t x) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

// f(n) from the trial factorisation, summed in ascending prime order.
inline double f(const AdditiveFunctionSpec& spec, std::uint64_t n) {
  long double s = 0.0L;
  for (const auto& [p, k] : trial_factor(n)) s += spec.prime_power_value(p, k);
  return static_cast<double>(s);
}

// Exact h < v <= h + 1 over the rationals.
inline bool in_window(double v, double h) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational rv(v), rh(h);
  return rv > rh && rv <= rh + 1;
}

// Exact v - 1 < u <= v.
inline bool in_window_ending_at(double u, double v) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational ru(u), rv(v);
  return ru > rv - 1 && ru <= rv;
}

inline double fejer(double u) {
  if (u == 0.0) return 1.0;
  const double s = std::sin(u / 2.0) / (u / 2.0);
  return s * s;
}

// Composite Simpson on (1 - |t|) cos(t u) over [0, 1], doubled.
inline double fejer_simpson(double u, int panels = 20000) {
  const double step = 1.0 / panels;
  long double s = 0.0L;
  for (int i = 0; i <= panels; ++i) {
    const double t = i * step;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * (1.0 - t) * std::cos(t * u);
  }
  return static_cast<double>(2.0L * s * step / 3.0L);
}

}  // namespace oracle

namespace oracle {

// lambda^2 + sum (1/p) min(1, |f(p) - lambda log p|)^2 by a direct loop.
inline double objective(const std::vector<double>& fp, const std::vector<std::uint64_t>& primes, double lambda) {
  long double s = static_cast<long double>(lambda) * lambda;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const long double d = fp[i] - lambda * std::log(static_cast<long double>(primes[i]));
    s += std::min<long double>(1.0L, d * d) / primes[i];
  }
  return static_cast<double>(s);
}

// Minimum over a grid of the given step on [-bound, bound]. The objective is
// at least lambda^2, so points with lambda^2 > objective(0) are skipped.
inline double dense_grid_min(const std::vector<double>& fp, const std::vector<std::uint64_t>& primes, double bound,
                             double step) {
  const double at_zero = objective(fp, primes, 0.0);
  const double reach = std::min(bound, std::sqrt(at_zero) + step);
  double best = at_zero;
  const auto k_max = static_cast<std::int64_t>(std::floor(reach / step));
  for (std::int64_t k = -k_max; k <= k_max; ++k) best = std::min(best, objective(fp, primes, k * step));
  return best;
}

}  // namespace oracle
