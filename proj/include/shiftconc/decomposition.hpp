#pragma once

// The factorisation g = h * g1 with g1 exponentially multiplicative
// (g1(p^k) = g(p)^k / k!), the correction functions beta_1, beta_2 and
// beta = g - beta_1 - beta_2, and exact desk-scale discrepancies of the
// progression estimates that these functions feed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "shiftconc/additive.hpp"
#include "shiftconc/error.hpp"
#include "shiftconc/fourier.hpp"
#include "shiftconc/sieve.hpp"
#include "shiftconc/summation.hpp"

namespace shiftconc {

using Complex = std::complex<double>;

// h(p^k) for k = 0..max_k from g(p^j) and g1(p^j) = g(p)^j / j!, via
//   h(p^k) = g(p^k) - sum_{j=1..k} g1(p^j) h(p^{k-j}),  h(1) = 1.
inline std::vector<Complex> h_prime_power_series(const UnitDiscFunction& g, std::uint64_t p, unsigned max_k) {
  std::vector<Complex> g1(max_k + 1), h(max_k + 1);
  const Complex gp = g.at_prime_power(p, 1);
  g1[0] = 1.0;
  for (unsigned j = 1; j <= max_k; ++j) g1[j] = g1[j - 1] * gp / static_cast<double>(j);
  h[0] = 1.0;
  for (unsigned k = 1; k <= max_k; ++k) {
    Complex acc = g.at_prime_power(p, k);
    for (unsigned j = 1; j <= k; ++j) acc -= g1[j] * h[k - j];
    h[k] = acc;
  }
  return h;
}

struct DecompositionTables {
  std::uint64_t x = 0;
  double A = 0.0;
  double u_cap = 0.0;  // (log x)^{2A}
  double p_cap = 0.0;  // (log x)^{6A+15}
  // Indexed 0..x, entry 0 unused.
  std::vector<Complex> g_values, g1_values, h_values, beta1, beta2, beta;

  // Post-checks.
  double h_prime_power_max = 0.0;  // max |h(p^k)| over prime powers p^k <= x, k >= 2
  double h_prime_max = 0.0;        // max |h(p)|, exactly 0 in exact arithmetic
  double beta1_max = 0.0;
  double beta2_max = 0.0;
  double beta_heuristic_level = 0.0;  // log log x / log x
  double beta1_fraction_above = 0.0;  // share of n <= x with |beta_1(n)| above the level
  double beta2_fraction_above = 0.0;
};

inline DecompositionTables decompose(const UnitDiscFunction& g, std::uint64_t x, double A, const FactorTable& table) {
  require(x >= 2, "decomposition needs x >= 2");
  require(x <= table.limit(), "x exceeds the factor table limit");
  require(A >= 0.0, "decomposition needs A >= 0");

  DecompositionTables t;
  t.x = x;
  t.A = A;
  const double log_x = std::log(static_cast<double>(x));
  t.u_cap = std::pow(log_x, 2.0 * A);
  t.p_cap = std::pow(log_x, 6.0 * A + 15.0);
  t.g_values = eval_on_range(g, x, table);
  t.g1_values.assign(x + 1, Complex{});
  t.h_values.assign(x + 1, Complex{});
  t.g1_values[1] = 1.0;
  t.h_values[1] = 1.0;

  const auto spf = table.spf_cells();
  for (std::uint64_t n = 2; n <= x; ++n) {
    const std::uint64_t p = spf[n];
    std::uint64_t rest = n;
    unsigned k = 0;
    do {
      rest /= p;
      ++k;
    } while (rest % p == 0);
    const Complex gp = g.at_prime_power(p, 1);
    Complex g1pk = 1.0;
    for (unsigned j = 1; j <= k; ++j) g1pk = g1pk * gp / static_cast<double>(j);
    t.g1_values[n] = t.g1_values[rest] * g1pk;
    const Complex hpk = h_prime_power_series(g, p, k)[k];
    t.h_values[n] = t.h_values[rest] * hpk;
    if (rest == 1) {
      if (k == 1) {
        t.h_prime_max = std::max(t.h_prime_max, std::abs(hpk));
      } else {
        t.h_prime_power_max = std::max(t.h_prime_power_max, std::abs(hpk));
      }
    }
  }

  std::vector<double> logs(x + 1, 0.0);
  for (std::uint64_t n = 2; n <= x; ++n) logs[n] = std::log(static_cast<double>(n));

  std::vector<std::uint64_t> u_support;
  for (std::uint64_t u = 1; u <= x && static_cast<double>(u) <= t.u_cap; ++u) {
    if (t.h_values[u] != Complex{}) u_support.push_back(u);
  }

  t.beta1.assign(x + 1, Complex{});
  t.beta2.assign(x + 1, Complex{});
  const auto primes = table.primes();
  // beta_1: n = u m p with p <= p_cap; beta_2: n = u r p with r <= p_cap.
  for (const std::uint64_t u : u_support) {
    const Complex hu = t.h_values[u];
    const std::uint64_t room = x / u;
    for (const std::uint64_t p : primes) {
      if (p > room) break;
      const Complex hg = hu * t.g_values[p];
      const std::uint64_t m_max = room / p;
      for (std::uint64_t m = 1; m <= m_max; ++m) {
        const Complex term = hg * t.g1_values[m] * (logs[p] / logs[m * p]);
        if (static_cast<double>(p) <= t.p_cap) t.beta1[u * m * p] += term;
        if (static_cast<double>(m) <= t.p_cap) t.beta2[u * m * p] += term;
      }
    }
  }

  t.beta.assign(x + 1, Complex{});
  t.beta_heuristic_level = std::log(log_x) / log_x;
  std::uint64_t above1 = 0, above2 = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    t.beta[n] = t.g_values[n] - t.beta1[n] - t.beta2[n];
    const double b1 = std::abs(t.beta1[n]);
    const double b2 = std::abs(t.beta2[n]);
    t.beta1_max = std::max(t.beta1_max, b1);
    t.beta2_max = std::max(t.beta2_max, b2);
    above1 += b1 > t.beta_heuristic_level;
    above2 += b2 > t.beta_heuristic_level;
  }
  t.beta1_fraction_above = static_cast<double>(above1) / static_cast<double>(x);
  t.beta2_fraction_above = static_cast<double>(above2) / static_cast<double>(x);
  return t;
}

// ---------------------------------------------------------------------------
// Progression discrepancies of beta over moduli D = D1 D2 (D1 w-smooth,
// D2 w-rough); every D <= x^delta splits this way in exactly one manner.

struct Lemma1Row {
  std::uint64_t d1 = 1;
  std::uint64_t d2 = 1;
  std::uint64_t residue = 1;  // maximising r
  std::uint64_t y = 0;        // maximising cutoff
  Complex lhs_sum{};
  Complex reference_sum{};  // (1/phi(D1 D2)) sum_{n <= y, (n, D2) = 1, n = r (D1)} beta(n)
  double discrepancy = 0.0;
};

struct Lemma1Report {
  std::uint64_t x = 0;
  double delta = 0.0;
  std::uint64_t w = 0;
  double A = 0.0;
  std::uint64_t modulus_bound = 0;
  std::vector<Lemma1Row> rows;
  double total = 0.0;
  double rhs_budget = 0.0;
  // The normaliser is read as 1/phi(D1 D2).
  const char* normaliser_note = "1/phi(D) read as 1/phi(D1*D2)";
};

inline std::uint64_t smooth_part(std::uint64_t d, std::uint64_t w, const FactorTable& table) {
  std::uint64_t s = 1;
  table.for_each_prime_power(d, [&](std::uint64_t p, unsigned k) {
    if (p <= w) {
      for (unsigned i = 0; i < k; ++i) s *= p;
    }
  });
  return s;
}

inline double lemma1_rhs_budget(std::uint64_t x, double A, std::uint64_t w) {
  const double lx = std::log(static_cast<double>(x));
  const double llx = std::log(lx);
  const double xd = static_cast<double>(x);
  const double wd = static_cast<double>(w);
  return xd * std::pow(lx, -A) * llx * llx + xd * std::pow(lx, 2 * A + 8) * llx * llx / wd +
         xd * std::pow(lx, 2.5) * llx / std::sqrt(wd);
}

inline Lemma1Report lemma1_discrepancy(const DecompositionTables& tables, double delta, std::uint64_t w,
                                       const FactorTable& table, std::uint64_t scan_budget = 2'000'000'000) {
  require(delta > 0.0 && delta < 0.5, "lemma1: needs 0 < delta < 1/2");
  require(w >= 1, "lemma1: needs w >= 1");
  const std::uint64_t x = tables.x;
  Lemma1Report report;
  report.x = x;
  report.delta = delta;
  report.w = w;
  report.A = tables.A;
  report.modulus_bound = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(x), delta) * (1 + 1e-12)));
  report.rhs_budget = lemma1_rhs_budget(x, tables.A, w);
  require(report.modulus_bound <= table.limit(), "modulus bound exceeds the factor table limit");

  std::uint64_t cost = 0;
  for (std::uint64_t d = 1; d <= report.modulus_bound; ++d) {
    cost += euler_phi(d, table) * (x / smooth_part(d, w, table) + 1);
  }
  if (cost > scan_budget) fail(ErrorKind::resource_limit, "lemma1: scan needs " + std::to_string(cost) + " steps");

  const auto& beta = tables.beta;
  CompensatedSum total;
  for (std::uint64_t d = 1; d <= report.modulus_bound; ++d) {
    Lemma1Row row;
    row.d1 = smooth_part(d, w, table);
    row.d2 = d / row.d1;
    const double inv_phi = 1.0 / static_cast<double>(euler_phi(d, table));
    for (std::uint64_t r = 1; r <= d; ++r) {
      if (std::gcd(r, d) != 1) continue;
      const std::uint64_t start = (r - 1) % row.d1 + 1;
      Complex s1{}, s2{};
      for (std::uint64_t n = start; n <= x; n += row.d1) {
        if (n % d == r % d) s1 += beta[n];
        if (std::gcd(n, row.d2) == 1) s2 += beta[n];
        const double disc = std::abs(s1 - s2 * inv_phi);
        if (disc > row.discrepancy) {
          row.discrepancy = disc;
          row.residue = r % d;
          row.y = n;
          row.lhs_sum = s1;
          row.reference_sum = s2 * inv_phi;
        }
      }
    }
    total += row.discrepancy;
    report.rows.push_back(row);
  }
  report.total = total.value();
  return report;
}

// |sum_{n <= x, n = r (D)} g(n) - (1/phi(D)) sum_{n <= x, (n, D) = 1} g(n)|.
inline double lemma2_discrepancy(const UnitDiscFunction& g, std::uint64_t x, std::uint64_t modulus,
                                 std::uint64_t residue, const FactorTable& table) {
  require(modulus >= 1, "lemma2: needs D >= 1");
  require(std::gcd(residue % modulus, modulus) == 1 || modulus == 1, "lemma2: needs (r, D) = 1");
  require(x <= table.limit(), "x exceeds the factor table limit");
  const auto values = eval_on_range(g, x, table);
  CompensatedComplexSum in_class, coprime;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (n % modulus == residue % modulus) in_class += values[n];
    if (std::gcd(n, modulus) == 1) coprime += values[n];
  }
  return std::abs(in_class.value() - coprime.value() / static_cast<double>(euler_phi(modulus, table)));
}

struct Lemma2Row {
  std::uint64_t modulus = 1;
  std::uint64_t worst_residue = 1;
  double discrepancy = 0.0;
  double normalized = 0.0;  // discrepancy * phi(D) / x
  bool flagged = false;
};

struct Lemma2Scan {
  std::uint64_t x = 0;
  std::uint64_t max_modulus = 0;
  double flag_factor = 0.0;
  double median_normalized = 0.0;
  std::vector<Lemma2Row> rows;
  std::vector<std::uint64_t> flagged;
  std::optional<std::uint64_t> exceptional_modulus;  // gcd of flagged moduli when > 1
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Worst-residue discrepancy for every D <= max_modulus. Moduli whose
// normalized discrepancy exceeds flag_factor times the median (and 0.05
// absolutely) are flagged; the gcd of the flagged moduli is the candidate
// exceptional modulus.
inline Lemma2Scan lemma2_scan(const UnitDiscFunction& g, std::uint64_t x, std::uint64_t max_modulus,
                              const FactorTable& table, double flag_factor = 10.0) {
  require(max_modulus >= 1, "lemma2 scan: needs a modulus bound >= 1");
  require(x <= table.limit() && max_modulus <= table.limit(), "lemma2 scan: exceeds the factor table limit");
  Lemma2Scan scan;
  scan.x = x;
  scan.max_modulus = max_modulus;
  scan.flag_factor = flag_factor;
  const auto values = eval_on_range(g, x, table);
  std::vector<double> normalized;
  for (std::uint64_t d = 1; d <= max_modulus; ++d) {
    std::vector<CompensatedComplexSum> classes(d);
    for (std::uint64_t n = 1; n <= x; ++n) classes[n % d] += values[n];
    CompensatedComplexSum coprime;
    for (std::uint64_t r = 0; r < d; ++r) {
      if (std::gcd(r, d) == 1) coprime += classes[r].value();
    }
    const double phi = static_cast<double>(euler_phi(d, table));
    const Complex reference = coprime.value() / phi;
    Lemma2Row row;
    row.modulus = d;
    row.worst_residue = d == 1 ? 0 : 1;
    for (std::uint64_t r = 0; r < d; ++r) {
      if (std::gcd(r, d) != 1) continue;
      const double disc = std::abs(classes[r].value() - reference);
      if (disc > row.discrepancy) {
        row.discrepancy = disc;
        row.worst_residue = r;
      }
    }
    row.normalized = row.discrepancy * phi / static_cast<double>(x);
    normalized.push_back(row.normalized);
    scan.rows.push_back(row);
  }
  scan.median_normalized = median(normalized);
  std::uint64_t common = 0;
  for (auto& row : scan.rows) {
    row.flagged = row.normalized > flag_factor * scan.median_normalized && row.normalized > 0.05;
    if (row.flagged) {
      scan.flagged.push_back(row.modulus);
      common = std::gcd(common, row.modulus);
    }
  }
  if (common > 1) scan.exceptional_modulus = common;
  return scan;
}

struct Lemma3Row {
  std::optional<std::uint64_t> q;  // empty for the first alternative
  double product = 0.0;
  Complex weighted_sum{};
  Complex rhs{};
  double residual = 0.0;
};

struct Lemma3Report {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::uint64_t w = 0;
  std::int64_t a = 0;
  std::vector<std::uint64_t> sieve_primes;  // primes in (y, w]
  Complex lhs{};
  Lemma3Row alternative1;
  std::vector<Lemma3Row> alternative2;  // one per q | P
  std::optional<std::uint64_t> best_q;
  bool alternative1_wins = true;
  double rhs_budget = 0.0;  // x (log x)^{-1/10}
};

inline Lemma3Report lemma3_compare(const UnitDiscFunction& g, std::uint64_t x, std::uint64_t y, std::uint64_t w,
                                   std::int64_t a, const FactorTable& table) {
  require(a != 0, "lemma3: needs a nonzero shift a");
  require(y >= 3, "lemma3: needs y >= 3 so that (p-1)/(p-2) is finite");
  require(static_cast<std::uint64_t>(3 * std::llabs(a)) <= y && y <= w, "lemma3: needs 3|a| <= y <= w");
  require(x >= 2 && x <= table.limit() && w <= table.limit(), "lemma3: range exceeds the factor table limit");

  Lemma3Report r;
  r.x = x;
  r.y = y;
  r.w = w;
  r.a = a;
  if (w > y) {
    for (const auto p : primes_in(y + 1, w, table)) r.sieve_primes.push_back(p);
  }
  r.rhs_budget = static_cast<double>(x) * std::pow(std::log(static_cast<double>(x)), -0.1);

  const auto values = eval_on_range(g, x, table);
  const auto weights = prime_weight_array(x, y, table);

  CompensatedComplexSum lhs, weighted;
  for (std::uint64_t n = 1; n <= x; ++n) {
    const std::int64_t shifted = static_cast<std::int64_t>(n) - a;
    bool coprime = true;
    for (const auto p : r.sieve_primes) {
      if (shifted % static_cast<std::int64_t>(p) == 0) {
        coprime = false;
        break;
      }
    }
    if (coprime) lhs += values[n];
    weighted += weights[n] * values[n];
  }
  r.lhs = lhs.value();

  double full_product = 1.0;
  for (const auto p : r.sieve_primes) full_product *= 1.0 - 1.0 / static_cast<double>(p - 1);
  r.alternative1.product = full_product;
  r.alternative1.weighted_sum = weighted.value();
  r.alternative1.rhs = full_product * weighted.value();
  r.alternative1.residual = std::abs(r.lhs - r.alternative1.rhs);

  double best = r.alternative1.residual;
  for (const auto q : r.sieve_primes) {
    Lemma3Row row;
    row.q = q;
    double product = 1.0;
    for (const auto p : r.sieve_primes) {
      if (p != q) product *= 1.0 - 1.0 / static_cast<double>(p - 1);
    }
    CompensatedComplexSum multiples;
    for (std::uint64_t n = q; n <= x; n += q) multiples += weights[n] * values[n];
    row.product = product;
    row.weighted_sum = weighted.value() - multiples.value();
    row.rhs = product * row.weighted_sum;
    row.residual = std::abs(r.lhs - row.rhs);
    if (row.residual < best) {
      best = row.residual;
      r.best_q = q;
      r.alternative1_wins = false;
    }
    r.alternative2.push_back(row);
  }
  return r;
}

}  // namespace shiftconc
