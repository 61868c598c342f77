#pragma once

// The dispersion functionals
//
//   W(x) = 4 + min_lambda ( lambda^2 + sum_{p <= x} (1/p) min(1, |f(p) - lambda log p|)^2 )
//   Y(N) = the same with the prime sum over p < N, (p, N) = 1
//   E(x) = 4 + sum_{p <= x, f(p) != 0} 1/p
//
// with lambda restricted to |lambda| <= (log x)^2 (resp. (log N)^2), and the
// empirical constants sup_h Q_h * W(x)^{1/2}, sup_h S_h * Y(N)^{1/2}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/concentration.hpp"
#include "shiftconc/golden_section.hpp"
#include "shiftconc/parallel.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

enum class Functional { W, Y, E };

inline const char* to_string(Functional f) {
  switch (f) {
    case Functional::W: return "W";
    case Functional::Y: return "Y";
    case Functional::E: return "E";
  }
  return "unknown";
}

// Per-prime data shared read-only by every objective evaluation.
class DispersionObjective {
 public:
  DispersionObjective(const AdditiveFunctionSpec& spec, std::span<const std::uint32_t> primes) {
    f_.reserve(primes.size());
    log_p_.reserve(primes.size());
    inv_p_.reserve(primes.size());
    for (const std::uint64_t p : primes) {
      f_.push_back(spec.prime_value(p));
      log_p_.push_back(std::log(static_cast<double>(p)));
      inv_p_.push_back(1.0 / static_cast<double>(p));
    }
  }

  // lambda^2 + sum (1/p) min(1, |f(p) - lambda log p|)^2, without the 4.
  double operator()(double lambda) const {
    CompensatedSum sum;
    sum += lambda * lambda;
    for (std::size_t i = 0; i < f_.size(); ++i) {
      const double d = f_[i] - lambda * log_p_[i];
      sum += inv_p_[i] * std::min(1.0, d * d);
    }
    return sum.value();
  }

  std::size_t prime_count() const { return f_.size(); }

 private:
  std::vector<double> f_;
  std::vector<double> log_p_;
  std::vector<double> inv_p_;
};

inline std::vector<std::uint32_t> primes_up_to(std::uint64_t x, const FactorTable& table) {
  require(x <= table.limit(), "prime range exceeds the factor table limit");
  const auto primes = table.primes();
  return {primes.begin(), std::upper_bound(primes.begin(), primes.end(), x)};
}

// Primes p < N coprime to N.
inline std::vector<std::uint32_t> primes_coprime_below(std::uint64_t n, const FactorTable& table) {
  require(n <= table.limit(), "N exceeds the factor table limit");
  std::vector<std::uint32_t> out;
  for (const std::uint32_t p : table.primes()) {
    if (p >= n) break;
    if (n % p != 0) out.push_back(p);
  }
  return out;
}

inline double objective_W(const AdditiveFunctionSpec& spec, std::uint64_t x, double lambda, const FactorTable& table) {
  require(x >= 2, "W(x) needs x >= 2");
  return DispersionObjective(spec, primes_up_to(x, table))(lambda);
}

inline double objective_Y(const AdditiveFunctionSpec& spec, std::uint64_t n, double lambda, const FactorTable& table) {
  require(n >= 3, "Y(N) needs N >= 3");
  return DispersionObjective(spec, primes_coprime_below(n, table))(lambda);
}

struct MinimizerOptions {
  std::size_t grid_half_points = 10000;  // grid step = bound / grid_half_points
  std::size_t refine_candidates = 32;
  double lambda_tolerance = 1e-6;
  unsigned threads = 1;
  bool keep_samples = false;
};

struct DispersionResult {
  Functional functional = Functional::W;
  std::uint64_t argument = 0;
  std::optional<double> lambda_star;
  double value = 4.0;
  double lambda_bound = 0.0;
  std::size_t grid_points = 0;
  std::size_t prime_terms = 0;
  std::vector<std::pair<double, double>> objective_samples;
};

// Global minimum over [-bound, bound]: the objective is continuous and
// piecewise smooth but not convex, so it is sampled on a uniform grid and
// every discrete local minimum (best ones first) is refined by golden
// section on its two neighbouring cells.
inline ScalarMinimum minimize_on_bound(const DispersionObjective& objective, double bound,
                                       const MinimizerOptions& options,
                                       std::vector<std::pair<double, double>>* samples = nullptr) {
  const std::size_t m = std::max<std::size_t>(1, options.grid_half_points);
  const std::size_t count = 2 * m + 1;
  auto grid_lambda = [&](std::size_t k) {
    const auto offset = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(m);
    return bound * static_cast<double>(offset) / static_cast<double>(m);
  };
  std::vector<double> values(count);
  parallel_chunks(count, options.threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k) values[k] = objective(grid_lambda(k));
  });
  if (samples != nullptr) {
    samples->clear();
    for (std::size_t k = 0; k < count; ++k) samples->emplace_back(grid_lambda(k), values[k]);
  }

  std::vector<std::size_t> minima;
  for (std::size_t k = 0; k < count; ++k) {
    const bool left_ok = k == 0 || values[k] <= values[k - 1];
    const bool right_ok = k + 1 == count || values[k] <= values[k + 1];
    if (left_ok && right_ok) minima.push_back(k);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  if (minima.size() > options.refine_candidates) minima.resize(options.refine_candidates);

  ScalarMinimum best{grid_lambda(minima.front()), values[minima.front()], count};
  for (const std::size_t k : minima) {
    const double lo = grid_lambda(k == 0 ? 0 : k - 1);
    const double hi = grid_lambda(k + 1 == count ? k : k + 1);
    const auto refined = golden_section_minimize(objective, lo, hi, options.lambda_tolerance);
    best.evaluations += refined.evaluations;
    if (refined.value < best.value) {
      best.argument = refined.argument;
      best.value = refined.value;
    }
  }
  return best;
}

namespace detail {

inline DispersionResult minimized(Functional which, std::uint64_t argument, const DispersionObjective& objective,
                                  const MinimizerOptions& options) {
  DispersionResult result;
  result.functional = which;
  result.argument = argument;
  const double log_arg = std::log(static_cast<double>(argument));
  result.lambda_bound = log_arg * log_arg;
  result.grid_points = 2 * std::max<std::size_t>(1, options.grid_half_points) + 1;
  result.prime_terms = objective.prime_count();
  const auto best = minimize_on_bound(objective, result.lambda_bound, options,
                                      options.keep_samples ? &result.objective_samples : nullptr);
  result.lambda_star = best.argument;
  result.value = 4.0 + best.value;
  return result;
}

}  // namespace detail

inline DispersionResult dispersion_W(const AdditiveFunctionSpec& spec, std::uint64_t x, const FactorTable& table,
                                     const MinimizerOptions& options = {}) {
  require(x >= 2, "W(x) needs x >= 2");
  return detail::minimized(Functional::W, x, DispersionObjective(spec, primes_up_to(x, table)), options);
}

inline DispersionResult dispersion_Y(const AdditiveFunctionSpec& spec, std::uint64_t n, const FactorTable& table,
                                     const MinimizerOptions& options = {}) {
  require(n >= 3, "Y(N) needs N >= 3");
  return detail::minimized(Functional::Y, n, DispersionObjective(spec, primes_coprime_below(n, table)), options);
}

inline DispersionResult dispersion_E(const AdditiveFunctionSpec& spec, std::uint64_t x, const FactorTable& table) {
  require(x >= 2, "E(x) needs x >= 2");
  DispersionResult result;
  result.functional = Functional::E;
  result.argument = x;
  CompensatedSum sum;
  for (const std::uint64_t p : primes_up_to(x, table)) {
    if (spec.nonzero_at_prime(p)) {
      sum += 1.0 / static_cast<double>(p);
      ++result.prime_terms;
    }
  }
  result.value = 4.0 + sum.value();
  return result;
}

struct TheoremRatioReport {
  std::string spec;
  Population population;
  ConcentrationReport concentration;
  DispersionResult dispersion;
  double sup_concentration = 0.0;
  double dispersion_value = 4.0;
  double ratio = 0.0;
};

// sup_h of the population frequency times the square root of the matching
// functional: W(x) for integers and shifted primes, Y(N) for Goldbach.
inline TheoremRatioReport theorem_ratio(const AdditiveFunctionSpec& spec, const Population& pop,
                                        const FactorTable& table, const MinimizerOptions& options = {}) {
  TheoremRatioReport report;
  report.spec = spec.describe();
  report.population = pop;
  report.concentration = sup_concentration(spec, pop, table);
  report.dispersion = pop.kind == PopulationKind::goldbach ? dispersion_Y(spec, pop.size_parameter, table, options)
                                                           : dispersion_W(spec, pop.size_parameter, table, options);
  report.sup_concentration = report.concentration.sup_value;
  report.dispersion_value = report.dispersion.value;
  report.ratio = report.sup_concentration * std::sqrt(report.dispersion_value);
  return report;
}

}  // namespace shiftconc
