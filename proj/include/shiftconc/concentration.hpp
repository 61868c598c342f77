#pragma once

// Frequencies of additive-function values in the unit window (h, h+1] over
// three populations: the integers n <= x, the shifted primes p + a with
// p <= x, and the Goldbach differences N - p with p < N.
//
// Window membership is decided in exact real arithmetic: h < v is a plain
// double comparison and v <= h + 1 uses the rounding error of fl(h + 1), so
// a window never picks up a neighbour through rounding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/sieve.hpp"

namespace shiftconc {

namespace detail {

// Exact test of v <= h + 1 for doubles v, h.
inline bool leq_plus_one(double v, double h) {
  const double s = h + 1.0;
  const double bb = s - h;
  const double err = (h - (s - bb)) + (1.0 - bb);
  return v < s || (v == s && err >= 0.0);
}

// Exact test of u > v - 1, i.e. u + 1 > v.
inline bool gt_minus_one(double u, double v) {
  const double s = u + 1.0;
  const double bb = s - u;
  const double err = (u - (s - bb)) + (1.0 - bb);
  return s > v || (s == v && err > 0.0);
}

}  // namespace detail

inline bool in_unit_window(double value, double h) { return value > h && detail::leq_plus_one(value, h); }

enum class PopulationKind { integers, shifted_primes, goldbach };

inline const char* to_string(PopulationKind kind) {
  switch (kind) {
    case PopulationKind::integers: return "integers";
    case PopulationKind::shifted_primes: return "shifted-primes";
    case PopulationKind::goldbach: return "goldbach";
  }
  return "unknown";
}

struct Population {
  PopulationKind kind = PopulationKind::integers;
  std::uint64_t size_parameter = 0;  // x, or N for goldbach
  std::int64_t shift = 0;            // a, shifted primes only

  static Population integers(std::uint64_t x) { return {PopulationKind::integers, x, 0}; }
  static Population shifted(std::uint64_t x, std::int64_t a) { return {PopulationKind::shifted_primes, x, a}; }
  static Population goldbach(std::uint64_t n) { return {PopulationKind::goldbach, n, 0}; }

  // Largest argument of f touched by the population.
  std::uint64_t required_limit() const {
    switch (kind) {
      case PopulationKind::integers:
      case PopulationKind::goldbach: return size_parameter;
      case PopulationKind::shifted_primes:
        return size_parameter + static_cast<std::uint64_t>(std::llabs(shift));
    }
    return size_parameter;
  }
};

// The multiset of f-values over a population, with the frequency
// denominator (x, pi(x) or pi(N-1)). Shifted primes with p + a < 1 are
// dropped from the values but still count in the denominator.
struct PopulationSample {
  Population population;
  std::vector<double> values;
  std::uint64_t sample_size = 0;
  std::uint64_t excluded = 0;
};

inline PopulationSample population_sample(const AdditiveFunctionSpec& spec, const Population& pop,
                                          const FactorTable& table) {
  PopulationSample out;
  out.population = pop;
  switch (pop.kind) {
    case PopulationKind::integers: {
      require(pop.size_parameter >= 1, "integer population needs x >= 1");
      require(pop.size_parameter <= table.limit(), "x exceeds the factor table limit");
      auto f = eval_on_range(spec, pop.size_parameter, table);
      out.values.assign(f.begin() + 1, f.end());
      out.sample_size = pop.size_parameter;
      break;
    }
    case PopulationKind::shifted_primes: {
      require(pop.shift != 0, "shifted primes need a nonzero shift a");
      require(pop.size_parameter >= 2, "shifted primes need x >= 2");
      require(pop.required_limit() <= table.limit(), "x + |a| exceeds the factor table limit");
      const auto x = pop.size_parameter;
      const auto f = eval_on_range(spec, pop.required_limit(), table);
      for (const std::uint64_t p : table.primes()) {
        if (p > x) break;
        ++out.sample_size;
        const std::int64_t n = static_cast<std::int64_t>(p) + pop.shift;
        if (n < 1) {
          ++out.excluded;
          continue;
        }
        out.values.push_back(f[static_cast<std::uint64_t>(n)]);
      }
      break;
    }
    case PopulationKind::goldbach: {
      require(pop.size_parameter >= 3, "Goldbach population needs N >= 3");
      require(pop.size_parameter <= table.limit(), "N exceeds the factor table limit");
      const auto n_big = pop.size_parameter;
      const auto f = eval_on_range(spec, n_big, table);
      for (const std::uint64_t p : table.primes()) {
        if (p >= n_big) break;
        ++out.sample_size;
        out.values.push_back(f[n_big - p]);
      }
      break;
    }
  }
  if (out.sample_size == 0) fail(ErrorKind::empty_population, "population has no members");
  return out;
}

// Sorted view of a sample answering window queries by binary search.
class SortedSample {
 public:
  explicit SortedSample(std::vector<double> values, std::uint64_t sample_size)
      : values_(std::move(values)), sample_size_(sample_size) {
    std::sort(values_.begin(), values_.end());
  }

  std::uint64_t window_count(double h) const {
    const auto above_h = std::upper_bound(values_.begin(), values_.end(), h);
    // first element with v > h + 1 (exactly)
    const auto past = std::partition_point(above_h, values_.end(),
                                           [h](double v) { return detail::leq_plus_one(v, h); });
    return static_cast<std::uint64_t>(past - above_h);
  }

  double frequency(double h) const {
    return static_cast<double>(window_count(h)) / static_cast<double>(sample_size_);
  }

  const std::vector<double>& sorted_values() const { return values_; }
  std::uint64_t sample_size() const { return sample_size_; }

 private:
  std::vector<double> values_;
  std::uint64_t sample_size_;
};

inline double concentration_integers(const AdditiveFunctionSpec& spec, std::uint64_t x, double h,
                                     const FactorTable& table) {
  const auto s = population_sample(spec, Population::integers(x), table);
  return SortedSample(s.values, s.sample_size).frequency(h);
}

inline double concentration_shifted(const AdditiveFunctionSpec& spec, std::uint64_t x, std::int64_t a, double h,
                                    const FactorTable& table) {
  const auto s = population_sample(spec, Population::shifted(x, a), table);
  return SortedSample(s.values, s.sample_size).frequency(h);
}

inline double concentration_goldbach(const AdditiveFunctionSpec& spec, std::uint64_t n, double h,
                                     const FactorTable& table) {
  const auto s = population_sample(spec, Population::goldbach(n), table);
  return SortedSample(s.values, s.sample_size).frequency(h);
}

struct ConcentrationReport {
  Population population;
  std::uint64_t sample_size = 0;
  std::uint64_t excluded = 0;
  double h_star = 0.0;
  std::uint64_t sup_count = 0;
  double sup_value = 0.0;
  std::vector<std::pair<double, double>> samples;  // (h, frequency)
};

// Exact supremum over real h of the window count. The maximum is attained
// by a window (v - 1, v] whose right end is an attained value v, so one
// two-pointer pass over the sorted values suffices. Ties count with
// multiplicity; the first maximal anchor in ascending order wins.
inline ConcentrationReport sup_concentration(const SortedSample& sample) {
  ConcentrationReport report;
  report.sample_size = sample.sample_size();
  const auto& v = sample.sorted_values();
  std::size_t lo = 0;
  std::size_t best = 0;
  double anchor = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j + 1 < v.size() && v[j + 1] == v[j]) continue;  // anchor on the last copy
    while (!detail::gt_minus_one(v[lo], v[j])) ++lo;
    const std::size_t count = j + 1 - lo;
    if (count > best) {
      best = count;
      anchor = v[j];
    }
  }
  report.sup_count = best;
  report.sup_value = static_cast<double>(best) / static_cast<double>(sample.sample_size());
  report.h_star = best == 0 ? 0.0 : anchor - 1.0;
  return report;
}

inline ConcentrationReport sup_concentration(const AdditiveFunctionSpec& spec, const Population& pop,
                                             const FactorTable& table) {
  auto s = population_sample(spec, pop, table);
  const auto excluded = s.excluded;
  SortedSample sorted(std::move(s.values), s.sample_size);
  auto report = sup_concentration(sorted);
  report.population = pop;
  report.excluded = excluded;
  return report;
}

// Frequencies on an h grid, appended to the report as per-h samples.
inline void sample_h_grid(ConcentrationReport& report, const SortedSample& sample, double h_min, double h_max,
                          std::size_t points) {
  require(points >= 1, "h grid needs at least one point");
  require(h_min <= h_max, "h grid needs h_min <= h_max");
  report.samples.clear();
  for (std::size_t i = 0; i < points; ++i) {
    const double h =
        points == 1 ? h_min : h_min + (h_max - h_min) * static_cast<double>(i) / static_cast<double>(points - 1);
    report.samples.emplace_back(h, sample.frequency(h));
  }
}

}  // namespace shiftconc
