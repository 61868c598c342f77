#pragma once

// Three-series diagnostics and empirical distributions of f(N - p).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/concentration.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

enum class SeriesVerdict { convergent_evidence, divergent_evidence, inconclusive };

inline const char* to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::convergent_evidence: return "convergent-evidence";
    case SeriesVerdict::divergent_evidence: return "divergent-evidence";
    case SeriesVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

inline constexpr double kConvergentIncrement = 1e-3;
inline constexpr double kDivergentIncrement = 1e-1;

inline SeriesVerdict verdict_from_increment(double increment) {
  const double m = std::abs(increment);
  if (m < kConvergentIncrement) return SeriesVerdict::convergent_evidence;
  if (m > kDivergentIncrement) return SeriesVerdict::divergent_evidence;
  return SeriesVerdict::inconclusive;
}

struct SeriesTriple {
  double large = 0.0;   // sum_{|f(p)| > 1} 1/p
  double mean = 0.0;    // sum_{|f(p)| <= 1} f(p)/p
  double square = 0.0;  // sum_{|f(p)| <= 1} f(p)^2/p
};

struct ThreeSeriesDiagnostic {
  std::uint64_t cutoff = 0;
  SeriesTriple sums;
  SeriesTriple tail_increments;  // contribution of primes in (cutoff/10, cutoff]
  SeriesVerdict verdicts[3] = {SeriesVerdict::inconclusive, SeriesVerdict::inconclusive,
                               SeriesVerdict::inconclusive};
};

// Partial sums over p <= cutoff; the split puts |f(p)| == 1 with the small
// values. `reverse` sums in descending prime order.
inline SeriesTriple three_series_sums(const AdditiveFunctionSpec& spec, std::uint64_t lo_exclusive,
                                      std::uint64_t cutoff, const FactorTable& table, bool reverse = false) {
  require(cutoff <= table.limit(), "cutoff exceeds the factor table limit");
  const auto primes = table.primes();
  const auto first = std::upper_bound(primes.begin(), primes.end(), lo_exclusive);
  const auto last = std::upper_bound(primes.begin(), primes.end(), cutoff);
  CompensatedSum s1, s2, s3;
  auto add = [&](std::uint64_t p) {
    const double f = spec.prime_value(p);
    const double inv = 1.0 / static_cast<double>(p);
    if (std::abs(f) > 1.0) {
      s1 += inv;
    } else {
      s2 += f * inv;
      s3 += f * f * inv;
    }
  };
  if (reverse) {
    for (auto it = last; it != first;) add(*--it);
  } else {
    for (auto it = first; it != last; ++it) add(*it);
  }
  return {s1.value(), s2.value(), s3.value()};
}

inline ThreeSeriesDiagnostic three_series(const AdditiveFunctionSpec& spec, std::uint64_t cutoff,
                                          const FactorTable& table) {
  require(cutoff >= 2, "three-series cutoff must be >= 2");
  ThreeSeriesDiagnostic d;
  d.cutoff = cutoff;
  d.sums = three_series_sums(spec, 0, cutoff, table);
  d.tail_increments = three_series_sums(spec, cutoff / 10, cutoff, table);
  d.verdicts[0] = verdict_from_increment(d.tail_increments.large);
  d.verdicts[1] = verdict_from_increment(d.tail_increments.mean);
  d.verdicts[2] = verdict_from_increment(d.tail_increments.square);
  return d;
}

// Right-continuous step CDF of an equally weighted sample.
class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  EmpiricalCDF(std::uint64_t n, std::vector<double> sample) : n_(n), sorted_(std::move(sample)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::uint64_t parameter() const { return n_; }
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }

  double operator()(double z) const {
    const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), z) - sorted_.begin();
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
  }

  // "value,cum_freq" rows, one per distinct jump point, ascending.
  void write_csv(std::ostream& out) const {
    out << "value,cum_freq\n";
    out.precision(17);
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
      out << sorted_[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(sorted_.size()) << '\n';
    }
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<double> sorted_;
};

// f(N - p) over primes p < N, each with weight 1/pi(N-1).
inline EmpiricalCDF empirical_goldbach_cdf(const AdditiveFunctionSpec& spec, std::uint64_t n,
                                           const FactorTable& table) {
  auto sample = population_sample(spec, Population::goldbach(n), table);
  return {n, std::move(sample.values)};
}

// sup_z |F1(z) - F2(z)|, exact: both CDFs are constant between merged jump
// points, so the supremum is attained at one of them.
inline double ks_distance(const EmpiricalCDF& c1, const EmpiricalCDF& c2) {
  require(!c1.empty() && !c2.empty(), "ks_distance needs nonempty samples");
  const auto& a = c1.sorted();
  const auto& b = c2.sorted();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    double z;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      z = a[i];
    } else {
      z = b[j];
    }
    while (i < a.size() && a[i] <= z) ++i;
    while (j < b.size() && b[j] <= z) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

struct LadderStep {
  std::uint64_t n = 0;
  double sup_concentration = 0.0;
  double ks_to_previous = 0.0;  // 0 for the first rung
};

struct LimitVerdict {
  std::vector<LadderStep> steps;
  ThreeSeriesDiagnostic series;
  bool ks_shrinking = false;           // final KS step smaller than the one before it
  bool concentration_nonincreasing = false;
  bool all_convergent = false;
  bool any_divergent = false;
  bool consistent = false;
};

// Evidence only: pairs consecutive-rung KS distances and sup_h S_h with the
// three-series verdicts at the top rung.
inline LimitVerdict limit_verdict(const AdditiveFunctionSpec& spec, const std::vector<std::uint64_t>& ladder,
                                  const FactorTable& table) {
  require(!ladder.empty(), "ladder must not be empty");
  for (std::size_t i = 1; i < ladder.size(); ++i) require(ladder[i] > ladder[i - 1], "ladder must be increasing");
  LimitVerdict v;
  EmpiricalCDF previous;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    LadderStep step;
    step.n = ladder[i];
    auto cdf = empirical_goldbach_cdf(spec, ladder[i], table);
    step.sup_concentration = sup_concentration(SortedSample(cdf.sorted(), cdf.size())).sup_value;
    if (i > 0) step.ks_to_previous = ks_distance(previous, cdf);
    previous = std::move(cdf);
    v.steps.push_back(step);
  }
  v.series = three_series(spec, ladder.back(), table);

  v.concentration_nonincreasing = true;
  for (std::size_t i = 1; i < v.steps.size(); ++i) {
    v.concentration_nonincreasing =
        v.concentration_nonincreasing && v.steps[i].sup_concentration <= v.steps[i - 1].sup_concentration;
  }
  const std::size_t k = v.steps.size();
  if (k >= 3) {
    v.ks_shrinking = v.steps[k - 1].ks_to_previous < v.steps[k - 2].ks_to_previous;
  } else {
    v.ks_shrinking = k < 2 || v.steps[k - 1].ks_to_previous == 0.0;
  }
  v.all_convergent = true;
  for (const auto verdict : v.series.verdicts) {
    v.all_convergent = v.all_convergent && verdict == SeriesVerdict::convergent_evidence;
    v.any_divergent = v.any_divergent || verdict == SeriesVerdict::divergent_evidence;
  }
  bool ks_all_zero = true;
  for (const auto& s : v.steps) ks_all_zero = ks_all_zero && s.ks_to_previous == 0.0;
  v.consistent = (v.all_convergent && (v.ks_shrinking || ks_all_zero)) ||
                 (v.any_divergent && v.concentration_nonincreasing);
  return v;
}

}  // namespace shiftconc
