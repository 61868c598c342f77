#pragma once

// Selberg Lambda^2 upper-bound weights on the rough primes (w, z], and the
// expansion of the square-weighted Fejer majorant over divisor pairs.
//
// For sifting density 1/p the weights at level z are
//   lambda_d = mu(d) prod_{p | d} p/(p-1) * G_d(z/d) / G(z),
//   G_d(t) = sum_{e <= t, e | R, (e, d) = 1} prod_{p | e} 1/(p-1),
// with G = G_1. Then lambda_1 = 1, lambda_d = 0 for d > z and |lambda_d| <= 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/concentration.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/fourier.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

struct SelbergWeight {
  std::uint64_t d = 1;
  double lambda = 1.0;
  std::vector<std::uint64_t> primes;  // prime factors of d, ascending
};

struct SelbergWeights {
  std::uint64_t w = 0;
  std::uint64_t z = 0;
  std::vector<std::uint64_t> r_primes;
  std::vector<SelbergWeight> weights;  // ascending in d, weights.front().d == 1

  double lambda(std::uint64_t d) const {
    auto it = std::lower_bound(weights.begin(), weights.end(), d,
                               [](const SelbergWeight& s, std::uint64_t v) { return s.d < v; });
    return it != weights.end() && it->d == d ? it->lambda : 0.0;
  }

  bool is_r_prime(std::uint64_t p) const { return p > w && p <= z && std::binary_search(r_primes.begin(), r_primes.end(), p); }
};

struct SelbergOptions {
  std::size_t max_weights = 2'000'000;
};

namespace detail {

// Squarefree products <= bound of the given ascending primes, each with its
// prime list, in ascending order of the product.
inline std::vector<SelbergWeight> squarefree_products(const std::vector<std::uint64_t>& primes, std::uint64_t bound,
                                                      std::size_t budget) {
  std::vector<SelbergWeight> out;
  std::vector<std::uint64_t> stack;
  auto dfs = [&](auto&& self, std::size_t start, std::uint64_t d) -> void {
    if (out.size() >= budget) {
      fail(ErrorKind::resource_limit, "Selberg support exceeds " + std::to_string(budget) + " divisors");
    }
    out.push_back({d, 0.0, stack});
    for (std::size_t i = start; i < primes.size(); ++i) {
      if (d > bound / primes[i]) break;
      stack.push_back(primes[i]);
      self(self, i + 1, d * primes[i]);
      stack.pop_back();
    }
  };
  dfs(dfs, 0, 1);
  std::sort(out.begin(), out.end(), [](const SelbergWeight& a, const SelbergWeight& b) { return a.d < b.d; });
  return out;
}

}  // namespace detail

inline SelbergWeights build_selberg_weights(std::uint64_t w, std::uint64_t z, const FactorTable& table,
                                            const SelbergOptions& options = {}) {
  require(w >= 3, "Selberg weights need w >= 3");
  require(w <= z, "Selberg weights need w <= z");
  require(z <= table.limit(), "z exceeds the factor table limit");
  SelbergWeights out;
  out.w = w;
  out.z = z;
  if (z > w) {
    for (const auto p : primes_in(w + 1, z, table)) out.r_primes.push_back(p);
  }
  out.weights = detail::squarefree_products(out.r_primes, z, options.max_weights);

  std::vector<double> density(out.weights.size());
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    double g = 1.0;
    for (const auto p : out.weights[i].primes) g /= static_cast<double>(p - 1);
    density[i] = g;
  }
  CompensatedSum total;
  for (const double g : density) total += g;
  const double big_g = total.value();

  for (std::size_t i = 1; i < out.weights.size(); ++i) {
    auto& entry = out.weights[i];
    const std::uint64_t cap = z / entry.d;
    CompensatedSum partial;
    for (std::size_t j = 0; j < out.weights.size() && out.weights[j].d <= cap; ++j) {
      if (std::gcd(out.weights[j].d, entry.d) == 1) partial += density[j];
    }
    double factor = 1.0;
    for (const auto p : entry.primes) factor *= static_cast<double>(p) / static_cast<double>(p - 1);
    const double mu = entry.primes.size() % 2 == 0 ? 1.0 : -1.0;
    entry.lambda = mu * factor * partial.value() / big_g;
  }
  out.weights.front().lambda = 1.0;
  return out;
}

// (sum_{d | (n, R)} lambda_d)^2.
inline double square_majorant(std::uint64_t n, const SelbergWeights& weights, const FactorTable& table) {
  require(n >= 1, "square_majorant needs n >= 1");
  std::vector<std::uint64_t> divisors_of_r;
  table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) {
    if (p > weights.w && p <= weights.z) divisors_of_r.push_back(p);
  });
  CompensatedSum sum;
  const std::size_t k = divisors_of_r.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::uint64_t d = 1;
    bool within = true;
    for (std::size_t i = 0; i < k && within; ++i) {
      if (mask >> i & 1) {
        if (d > weights.z / divisors_of_r[i]) within = false;
        d *= divisors_of_r[i];
      }
    }
    if (within) sum += weights.lambda(d);
  }
  const double s = sum.value();
  return s * s;
}

// sum_{d1, d2} lambda_{d1} lambda_{d2} sum_{n <= x, [d1, d2] | n} terms[n]
// evaluated literally over divisor pairs; terms is indexed 0..x.
inline double pair_expansion_sum(const SelbergWeights& weights, const std::vector<double>& terms,
                                 std::size_t pair_budget = 50'000'000) {
  const std::uint64_t x = terms.size() - 1;
  const std::size_t k = weights.weights.size();
  if (k * k > pair_budget) {
    fail(ErrorKind::resource_limit, "divisor-pair count " + std::to_string(k * k) + " exceeds the budget");
  }
  std::unordered_map<std::uint64_t, double> inner_cache;
  auto inner = [&](std::uint64_t modulus) {
    if (auto it = inner_cache.find(modulus); it != inner_cache.end()) return it->second;
    CompensatedSum s;
    for (std::uint64_t n = modulus; n <= x; n += modulus) s += terms[n];
    return inner_cache[modulus] = s.value();
  };
  CompensatedSum total;
  for (const auto& a : weights.weights) {
    for (const auto& b : weights.weights) {
      const std::uint64_t l = a.d / std::gcd(a.d, b.d) * b.d;
      if (l > x) continue;
      total += a.lambda * b.lambda * inner(l);
    }
  }
  return total.value();
}

// sum_{n <= x} (sum_{d | (n, R)} lambda_d)^2 terms[n].
inline double direct_square_sum(const SelbergWeights& weights, const std::vector<double>& terms,
                                const FactorTable& table) {
  CompensatedSum total;
  for (std::uint64_t n = 1; n < terms.size(); ++n) {
    if (terms[n] == 0.0) continue;
    total += square_majorant(n, weights, table) * terms[n];
  }
  return total.value();
}

struct SieveParameters {
  std::uint64_t w = 0;
  std::uint64_t z = 0;
};

// z = x^{1/4}, w = (log x)^3, then clamped so that 3|a| <= w <= z.
inline SieveParameters default_sieve_parameters(std::uint64_t x, std::int64_t a) {
  const double lx = std::log(static_cast<double>(x));
  const auto floor_w = static_cast<std::uint64_t>(std::max<std::int64_t>(3, 3 * std::llabs(a)));
  SieveParameters p;
  p.z = std::max<std::uint64_t>(floor_w, static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(x), 0.25))));
  p.w = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::floor(lx * lx * lx)), floor_w, p.z);
  return p;
}

struct Eq2Report {
  std::uint64_t x = 0;
  std::int64_t a = 0;
  std::uint64_t w = 0;
  std::uint64_t z = 0;
  double h = 0.0;
  std::size_t quadrature_nodes = 0;
  std::size_t weight_count = 0;
  std::size_t pair_count = 0;
  double expansion = 0.0;       // pair-expansion sum, quadrature integrand
  double expansion_swap = 0.0;  // pair-expansion sum, closed-form kernel
  double direct = 0.0;          // square-weighted direct sum, quadrature integrand
  double tail = 0.0;            // 3z / pi(x)
  double rhs = 0.0;             // 3/pi(x) * expansion + tail
  double rhs_swap = 0.0;
  double prime_restricted = 0.0;  // 3/pi(x) sum over primes p <= x, (p, P) = 1, plus tail
  double q_h = 0.0;
  std::uint64_t sieved_violations = 0;  // n coprime to PR with square < 1
};

struct Eq2Options {
  std::size_t nodes_per_half = kDefaultNodesPerHalf;
  std::size_t pair_budget = 50'000'000;
  QuadratureTolerance tolerance{};
};

// Right side of
//   Q_h <= 3/pi(x) int (1-|t|) e^{-ith} sum_{d_j | R} lambda_{d1} lambda_{d2}
//          sum_{n <= x, (n, P) = 1, [d1, d2] | n} g(n + a) dt + 3z/pi(x),
// P the product of primes in (3|a|, w], R of primes in (w, z].
inline Eq2Report expanded_bound_eq2(const AdditiveFunctionSpec& spec, std::uint64_t x, std::int64_t a,
                                    std::uint64_t w, std::uint64_t z, double h, const FactorTable& table,
                                    const Eq2Options& options = {}) {
  require(a != 0, "eq2 needs a nonzero shift a");
  const auto p_lo = static_cast<std::uint64_t>(3 * std::llabs(a));
  require(p_lo <= w && w <= z, "eq2 needs 3|a| <= w <= z");
  require(x >= 2, "eq2 needs x >= 2");
  const auto limit = x + static_cast<std::uint64_t>(std::llabs(a));
  require(limit <= table.limit() && z <= table.limit(), "eq2 range exceeds the factor table limit");

  Eq2Report r;
  r.x = x;
  r.a = a;
  r.w = w;
  r.z = z;
  r.h = h;
  r.quadrature_nodes = options.nodes_per_half;

  const auto weights = build_selberg_weights(std::max<std::uint64_t>(w, 3), z, table);
  r.weight_count = weights.weights.size();
  r.pair_count = r.weight_count * r.weight_count;

  const auto f = eval_on_range(spec, limit, table);
  const GaussLegendreRule rule(options.nodes_per_half);
  std::map<double, double> quad_cache;
  auto quad_kernel = [&](double v) {
    if (auto it = quad_cache.find(v); it != quad_cache.end()) return it->second;
    const WeightedValues one{{v, 1.0}};
    const auto q = fejer_integral(one, h, options.nodes_per_half);
    check_quadrature(fejer_kernel(v - h), q, 1.0, options.tolerance, "eq2 kernel");
    return quad_cache[v] = q.real();
  };

  std::vector<double> terms(x + 1, 0.0);
  std::vector<double> terms_swap(x + 1, 0.0);
  auto coprime_to_p = [&](std::uint64_t n) {
    bool ok = true;
    table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) { ok = ok && !(p > p_lo && p <= w); });
    return ok;
  };
  for (std::uint64_t n = 1; n <= x; ++n) {
    const std::int64_t m = static_cast<std::int64_t>(n) + a;
    if (m < 1 || !coprime_to_p(n)) continue;
    const double v = f[static_cast<std::uint64_t>(m)];
    terms[n] = quad_kernel(v);
    terms_swap[n] = fejer_kernel(v - h);
  }

  const double pi_x = static_cast<double>(prime_count(x, table));
  r.expansion = pair_expansion_sum(weights, terms, options.pair_budget);
  r.expansion_swap = pair_expansion_sum(weights, terms_swap, options.pair_budget);
  r.direct = direct_square_sum(weights, terms, table);
  r.tail = 3.0 * static_cast<double>(z) / pi_x;
  r.rhs = 3.0 / pi_x * r.expansion + r.tail;
  r.rhs_swap = 3.0 / pi_x * r.expansion_swap + r.tail;

  CompensatedSum prime_sum;
  for (const std::uint64_t p : table.primes()) {
    if (p > x) break;
    const std::int64_t m = static_cast<std::int64_t>(p) + a;
    if (m < 1 || !coprime_to_p(p)) continue;
    prime_sum += square_majorant(p, weights, table) * fejer_kernel(f[static_cast<std::uint64_t>(m)] - h);
  }
  r.prime_restricted = 3.0 / pi_x * prime_sum.value() + r.tail;

  for (std::uint64_t n = 1; n <= x; ++n) {
    bool coprime_pr = true;
    table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) { coprime_pr = coprime_pr && !(p > p_lo && p <= z); });
    if (coprime_pr && square_majorant(n, weights, table) < 1.0) ++r.sieved_violations;
  }

  r.q_h = concentration_shifted(spec, x, a, h, table);
  if (r.rhs < r.q_h) throw NumericalInconsistency("eq2 right side is below Q_h", r.rhs, r.q_h);
  return r;
}

}  // namespace shiftconc
