#pragma once

// Fejer-kernel majorants of the window frequencies.
//
// Since (1 - |t|) on [-1, 1] has the nonnegative transform
//   K(u) = int_{-1}^{1} (1 - |t|) e^{itu} dt = (sin(u/2) / (u/2))^2,
// and K >= 1/3 on [-1, 1], the frequency Q_h is at most
//   3 pi(x)^{-1} sum_{p <= x} int_{-1}^{1} (1 - |t|) e^{-ith} g(p + a) dt,
// g(n) = exp(i t f(n)). Every majorant here is computed both by swapping sum
// and integral (closed-form kernel values) and by quadrature in t split at
// the kink t = 0.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/concentration.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/quadrature.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

inline constexpr std::size_t kDefaultNodesPerHalf = 512;

inline double fejer_kernel(double u) {
  const double v = 0.5 * u;
  if (std::abs(v) < 1e-4) {
    const double v2 = v * v;
    const double s = 1.0 - v2 / 6.0 + v2 * v2 / 120.0;
    return s * s;
  }
  const double s = std::sin(v) / v;
  return s * s;
}

// int_{-1}^{1} (1 - |t|) e^{itu} dt by Gauss-Legendre on each half.
inline std::complex<double> fejer_kernel_quadrature(double u, std::size_t nodes_per_half = kDefaultNodesPerHalf) {
  const GaussLegendreRule rule(nodes_per_half);
  auto integrand = [u](double t) { return (1.0 - std::abs(t)) * std::polar(1.0, t * u); };
  return rule.integrate(integrand, -1.0, 0.0) + rule.integrate(integrand, 0.0, 1.0);
}

// Distinct f-values with aggregated weights, in ascending value order.
using WeightedValues = std::vector<std::pair<double, double>>;

inline WeightedValues aggregate_values(const std::map<double, CompensatedSum>& buckets) {
  WeightedValues out;
  out.reserve(buckets.size());
  for (const auto& [value, weight] : buckets) out.emplace_back(value, weight.value());
  return out;
}

// sum_v c_v K(v - h).
inline double kernel_swap_sum(const WeightedValues& values, double h) {
  CompensatedSum sum;
  for (const auto& [v, c] : values) sum += c * fejer_kernel(v - h);
  return sum.value();
}

// int_{-1}^{1} (1 - |t|) e^{-ith} sum_v c_v e^{itv} dt by quadrature in t.
inline std::complex<double> fejer_integral(const WeightedValues& values, double h, std::size_t nodes_per_half) {
  require(nodes_per_half >= 2, "quadrature needs at least 2 nodes per half");
  const GaussLegendreRule rule(nodes_per_half);
  auto integrand = [&](double t) {
    CompensatedComplexSum inner;
    for (const auto& [v, c] : values) inner += c * std::polar(1.0, t * (v - h));
    return (1.0 - std::abs(t)) * inner.value();
  };
  return rule.integrate(integrand, -1.0, 0.0) + rule.integrate(integrand, 0.0, 1.0);
}

struct FejerEvaluation {
  double h = 0.0;
  std::uint64_t x = 0;
  std::int64_t a = 0;
  std::size_t quadrature_nodes = 0;
  double majorant = 0.0;             // kernel-swap path
  double majorant_quadrature = 0.0;  // quadrature path, real part
  double quadrature_imag = 0.0;
  double q_h = 0.0;
  double slack = 0.0;
};

struct QuadratureTolerance {
  double agreement = 1e-6;
  double imaginary = 1e-9;
};

inline void check_quadrature(double swap_value, std::complex<double> quad_value, double scale,
                             const QuadratureTolerance& tol, const char* what) {
  if (std::abs(swap_value - quad_value.real()) > tol.agreement * std::max(1.0, std::abs(swap_value))) {
    throw NumericalInconsistency(std::string(what) + ": kernel and quadrature paths disagree", swap_value,
                                 quad_value.real());
  }
  if (std::abs(quad_value.imag()) > tol.imaginary * std::max(1.0, scale)) {
    throw NumericalInconsistency(std::string(what) + ": imaginary part does not vanish", 0.0, quad_value.imag());
  }
}

inline FejerEvaluation fejer_majorant_Q(const AdditiveFunctionSpec& spec, std::uint64_t x, std::int64_t a, double h,
                                        const FactorTable& table, std::size_t nodes_per_half = kDefaultNodesPerHalf,
                                        const QuadratureTolerance& tol = {}) {
  require(nodes_per_half >= 2, "quadrature needs at least 2 nodes per half");
  const auto sample = population_sample(spec, Population::shifted(x, a), table);
  const double scale = 3.0 / static_cast<double>(sample.sample_size);

  FejerEvaluation out;
  out.h = h;
  out.x = x;
  out.a = a;
  out.quadrature_nodes = nodes_per_half;

  CompensatedSum swap;
  std::map<double, CompensatedSum> buckets;
  for (const double v : sample.values) {
    swap += fejer_kernel(v - h);
    buckets[v] += 1.0;
  }
  const auto values = aggregate_values(buckets);
  const auto quad = fejer_integral(values, h, nodes_per_half);

  out.majorant = scale * swap.value();
  out.majorant_quadrature = scale * quad.real();
  out.quadrature_imag = scale * quad.imag();
  out.q_h = SortedSample(sample.values, sample.sample_size).frequency(h);
  out.slack = out.majorant - out.q_h;
  check_quadrature(out.majorant, scale * quad, scale * static_cast<double>(sample.values.size()), tol,
                   "Fejer majorant");
  return out;
}

// prod_{p | n, p > y} (p - 1)/(p - 2) for n = 0..x (entry 0 unused).
inline std::vector<double> prime_weight_array(std::uint64_t x, std::uint64_t y, const FactorTable& table) {
  require(y >= 3, "the weight (p-1)/(p-2) needs a threshold y >= 3");
  require(x <= table.limit(), "x exceeds the factor table limit");
  std::vector<double> w(x + 1, 1.0);
  w[0] = 0.0;
  for (std::uint64_t n = 2; n <= x; ++n) {
    double prod = 1.0;
    table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) {
      if (p > y) prod *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
    });
    w[n] = prod;
  }
  return w;
}

inline void require_prime(std::optional<std::uint64_t> q, const FactorTable& table) {
  if (q) require(*q <= table.limit() && table.is_prime(*q), "excluded modulus q must be a prime within the table");
}

// sum_{n <= x} g(n) prod_{p | n, p > y} (p-1)/(p-2), optionally over (n, q) = 1.
inline std::complex<double> weighted_mean_value(const UnitDiscFunction& g, std::uint64_t x, std::uint64_t y,
                                                const FactorTable& table,
                                                std::optional<std::uint64_t> exclude_q = std::nullopt) {
  require(y >= 3, "weighted_mean_value needs y >= 3");
  require_prime(exclude_q, table);
  const auto weights = prime_weight_array(x, y, table);
  const auto f = eval_on_range(g.base(), x, table);
  CompensatedComplexSum sum;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (exclude_q && n % *exclude_q == 0) continue;
    sum += weights[n] * g.from_additive(f[n]);
  }
  return sum.value();
}

// A majorant of the form normaliser * Re int (1-|t|) e^{-ith} sum c_n g(n) dt
// + additive_term, with both evaluation paths kept.
struct MajorantReport {
  double h = 0.0;
  std::uint64_t argument = 0;
  std::size_t quadrature_nodes = 0;
  double normaliser = 0.0;
  double integral_term = 0.0;       // quadrature path times normaliser
  double integral_term_swap = 0.0;  // kernel-swap path times normaliser
  double quadrature_imag = 0.0;
  double additive_term = 0.0;
  double total = 0.0;
  double frequency = 0.0;  // Q_h or S_h at the same h
  std::optional<std::uint64_t> exclude_q;
};

namespace detail {

inline MajorantReport finish_majorant(const WeightedValues& values, double h, double normaliser,
                                      double additive_term, std::size_t nodes, const QuadratureTolerance& tol,
                                      const char* what) {
  MajorantReport r;
  r.h = h;
  r.quadrature_nodes = nodes;
  r.normaliser = normaliser;
  const auto quad = fejer_integral(values, h, nodes);
  double mass = 0.0;
  for (const auto& [v, c] : values) mass += std::abs(c);
  r.integral_term = normaliser * quad.real();
  r.integral_term_swap = normaliser * kernel_swap_sum(values, h);
  r.quadrature_imag = normaliser * quad.imag();
  r.additive_term = additive_term;
  r.total = r.integral_term + additive_term;
  check_quadrature(r.integral_term_swap, normaliser * quad, normaliser * mass, tol, what);
  return r;
}

}  // namespace detail

// x^{-1} Re int (1-|t|) e^{-ith} sum_{n <= x} g(n) prod_{p | n, p > 3|a|} (p-1)/(p-2) dt
// + (log x)^{-1/12}, with g = exp(i t f).
inline MajorantReport majorant_eq5(const AdditiveFunctionSpec& spec, std::uint64_t x, std::int64_t a, double h,
                                   const FactorTable& table, std::size_t nodes = kDefaultNodesPerHalf,
                                   std::optional<std::uint64_t> exclude_q = std::nullopt,
                                   const QuadratureTolerance& tol = {}) {
  require(a != 0, "majorant needs a nonzero shift a");
  require(x >= 2, "majorant needs x >= 2");
  require_prime(exclude_q, table);
  const auto y = static_cast<std::uint64_t>(3 * std::llabs(a));
  const auto weights = prime_weight_array(x, y, table);
  const auto f = eval_on_range(spec, x, table);
  std::map<double, CompensatedSum> buckets;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (exclude_q && n % *exclude_q == 0) continue;
    buckets[f[n]] += weights[n];
  }
  const double log_x = std::log(static_cast<double>(x));
  auto r = detail::finish_majorant(aggregate_values(buckets), h, 1.0 / static_cast<double>(x),
                                   std::pow(log_x, -1.0 / 12.0), nodes, tol, "eq5 majorant");
  r.argument = x;
  r.exclude_q = exclude_q;
  r.frequency = concentration_shifted(spec, x, a, h, table);
  return r;
}

// x^{-1} log w Re int (1-|t|) e^{-ith} sum_{n <= x, (n, P) = 1} g(n + a) dt
// + (log x)^{-1} (log log x)^2, P the product of primes in (3|a|, w].
// Terms with n + a < 1 fall outside the domain of f and are skipped.
inline MajorantReport majorant_eq4(const AdditiveFunctionSpec& spec, std::uint64_t x, std::int64_t a, double h,
                                   std::uint64_t w, const FactorTable& table,
                                   std::size_t nodes = kDefaultNodesPerHalf, const QuadratureTolerance& tol = {}) {
  require(a != 0, "majorant needs a nonzero shift a");
  require(x >= 3, "majorant needs x >= 3");
  const auto lo = static_cast<std::uint64_t>(3 * std::llabs(a));
  require(w >= lo && w >= 2, "eq4 needs w >= 3|a|");
  const auto limit = x + static_cast<std::uint64_t>(std::llabs(a));
  require(limit <= table.limit() && w <= table.limit(), "eq4 range exceeds the factor table limit");
  const auto f = eval_on_range(spec, limit, table);
  std::map<double, CompensatedSum> buckets;
  for (std::uint64_t n = 1; n <= x; ++n) {
    bool coprime = true;
    table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) { coprime = coprime && !(p > lo && p <= w); });
    if (!coprime) continue;
    const std::int64_t m = static_cast<std::int64_t>(n) + a;
    if (m < 1) continue;
    buckets[f[static_cast<std::uint64_t>(m)]] += 1.0;
  }
  const double log_x = std::log(static_cast<double>(x));
  const double log_log_x = std::log(log_x);
  auto r = detail::finish_majorant(aggregate_values(buckets), h,
                                   std::log(static_cast<double>(w)) / static_cast<double>(x),
                                   log_log_x * log_log_x / log_x, nodes, tol, "eq4 majorant");
  r.argument = x;
  r.frequency = concentration_shifted(spec, x, a, h, table);
  return r;
}

// phi(N)^{-1} Re int (1-|t|) e^{-ith} sum_{n <= N, (n, N) = 1} g(n) prod_{p | n, p > 3} (p-1)/(p-2) dt
// + (log N)^{-1/10}.
inline MajorantReport majorant_goldbach(const AdditiveFunctionSpec& spec, std::uint64_t n_big, double h,
                                        const FactorTable& table, std::size_t nodes = kDefaultNodesPerHalf,
                                        std::optional<std::uint64_t> exclude_q = std::nullopt,
                                        const QuadratureTolerance& tol = {}) {
  require(n_big >= 3, "Goldbach majorant needs N >= 3");
  require(n_big <= table.limit(), "N exceeds the factor table limit");
  require_prime(exclude_q, table);
  const auto weights = prime_weight_array(n_big, 3, table);
  const auto f = eval_on_range(spec, n_big, table);
  std::map<double, CompensatedSum> buckets;
  for (std::uint64_t n = 1; n <= n_big; ++n) {
    if (std::gcd(n, n_big) != 1) continue;
    if (exclude_q && n % *exclude_q == 0) continue;
    buckets[f[n]] += weights[n];
  }
  const double phi = static_cast<double>(euler_phi(n_big, table));
  auto r = detail::finish_majorant(aggregate_values(buckets), h, 1.0 / phi,
                                   std::pow(std::log(static_cast<double>(n_big)), -0.1), nodes, tol,
                                   "Goldbach majorant");
  r.argument = n_big;
  r.exclude_q = exclude_q;
  r.frequency = concentration_goldbach(spec, n_big, h, table);
  return r;
}

}  // namespace shiftconc
