#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "shiftconc/decomposition.hpp"

using namespace shiftconc;

namespace {

const FactorTable& table() {
  static const auto t = build_factor_table(1'000'000);
  return t;
}

// Nonprincipal character mod 3 on (n, 3) = 1: f counts prime factors
// = 2 mod 3 with multiplicity, and t = pi.
UnitDiscFunction character_mod3() {
  return exp_twist(specs::residue_indicator(3, 2, AdditiveKind::completely_additive), std::numbers::pi);
}

// Sum over divisors d | n of h(d) g1(n/d) by trial division of every n.
double max_convolution_error(const DecompositionTables& t) {
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= t.x; ++n) {
    std::complex<double> s = 0.0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
      if (n % d != 0) continue;
      s += t.h_values[d] * t.g1_values[n / d];
      if (d * d != n) s += t.h_values[n / d] * t.g1_values[d];
    }
    worst = std::max(worst, std::abs(s - t.g_values[n]));
  }
  return worst;
}

}  // namespace

TEST(Decompose, PrimePowerValues) {
  const auto g = exp_twist(specs::log_prime(AdditiveKind::strongly_additive), 0.9);
  const auto t = decompose(g, 30000, 1.0, table());
  for (const std::uint64_t p : {2, 3, 5, 7, 11, 13, 31}) {
    const auto gp = g.at_prime_power(p, 1);
    EXPECT_EQ(t.h_values[p], std::complex<double>(0.0, 0.0)) << p;
    EXPECT_LT(std::abs(t.h_values[p * p] - (g.at_prime_power(p, 2) - gp * gp / 2.0)), 1e-15);
    EXPECT_LT(std::abs(t.g1_values[p * p * p] - gp * gp * gp / 6.0), 1e-15);
  }
  EXPECT_EQ(t.h_prime_max, 0.0);
}

TEST(Decompose, ConvolutionIdentityForRandomTwists) {
  std::mt19937_64 rng(17);
  const std::vector<AdditiveFunctionSpec> base = {specs::omega(), specs::big_omega(), specs::log_prime(),
                                                  specs::residue_indicator(4, 1), specs::reciprocal()};
  for (int i = 0; i < 4; ++i) {
    const double t = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    const auto tables = decompose(exp_twist(base[i % base.size()], t), 30000, 0.5, table());
    EXPECT_LT(max_convolution_error(tables), 1e-9) << base[i % base.size()].describe() << " t=" << t;
  }
}

TEST(Decompose, HPrimePowersBoundedByE) {
  for (const double t : {0.3, 1.0, 2.0, std::numbers::pi}) {
    const auto g = exp_twist(specs::big_omega(), t);
    for (const auto p : table().primes()) {
      if (static_cast<std::uint64_t>(p) * p > 1'000'000) break;
      std::uint64_t pk = p;
      unsigned k = 1;
      while (pk <= 1'000'000 / p) {
        pk *= p;
        ++k;
      }
      const auto h = h_prime_power_series(g, p, k);
      for (unsigned j = 1; j <= k; ++j) ASSERT_LE(std::abs(h[j]), std::exp(1.0));
      ASSERT_LT(std::abs(h[1]), 1e-15);
    }
  }
}

TEST(Decompose, BetaMatchesTripleDivisorOracle) {
  const auto g = exp_twist(specs::omega(), 1.3);
  const std::uint64_t x = 2000;
  const double A = 0.3;
  const auto t = decompose(g, x, A, table());
  const double lx = std::log(static_cast<double>(x));
  const double u_cap = std::pow(lx, 2 * A), p_cap = std::pow(lx, 6 * A + 15);
  double worst = 0.0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    std::complex<double> b1 = 0.0, b2 = 0.0;
    for (std::uint64_t u = 1; u <= n && u <= u_cap; ++u) {
      if (n % u != 0) continue;
      for (std::uint64_t p = 2; p <= n / u; ++p) {
        if ((n / u) % p != 0 || !oracle::is_prime(p)) continue;
        const std::uint64_t m = n / u / p;
        const auto term = t.h_values[u] * t.g1_values[m] * t.g_values[p] *
                          (std::log(static_cast<double>(p)) / std::log(static_cast<double>(m * p)));
        if (p <= p_cap) b1 += term;
        if (m <= p_cap) b2 += term;
      }
    }
    worst = std::max({worst, std::abs(b1 - t.beta1[n]), std::abs(b2 - t.beta2[n]),
                      std::abs(t.beta[n] - (t.g_values[n] - t.beta1[n] - t.beta2[n]))});
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Decompose, BetaSmallCasesByHand) {
  // g = 1 (t = 0), A = 0: only u = 1 survives and both caps exceed n. Since
  // g1(p^{k-1}) = k g1(p^k), sum_{mp = n} g1(m) log p = g1(n) log n, so
  // beta_1 = beta_2 = g1(n) = 1 / prod k! and beta = 1 - 2 g1(n) for n > 1.
  const auto t = decompose(exp_twist(specs::omega(), 0.0), 12, 0.0, table());
  EXPECT_EQ(t.beta1[1], std::complex<double>(0.0, 0.0));
  EXPECT_EQ(t.beta[1], std::complex<double>(1.0, 0.0));
  const std::vector<double> g1 = {0, 1, 1, 1, 0.5, 1, 1, 1, 1.0 / 6, 0.5, 1, 1, 0.5};
  for (std::uint64_t n = 2; n <= 12; ++n) {
    EXPECT_NEAR(t.g1_values[n].real(), g1[n], 1e-15) << n;
    EXPECT_NEAR(t.beta1[n].real(), g1[n], 1e-15) << n;
    EXPECT_NEAR(t.beta2[n].real(), g1[n], 1e-15) << n;
    EXPECT_NEAR(t.beta[n].real(), 1.0 - 2.0 * g1[n], 1e-15) << n;
  }
}

TEST(Lemma1, TrivialRowAndNaiveRecomputation) {
  const std::uint64_t x = 10000;
  const auto g = exp_twist(specs::omega(), 0.8);
  const auto tables = decompose(g, x, 1.0, table());
  const double lx = std::log(static_cast<double>(x));
  const auto w = static_cast<std::uint64_t>(lx * lx);
  const auto r = lemma1_discrepancy(tables, 0.3, w, table());
  ASSERT_FALSE(r.rows.empty());
  EXPECT_EQ(r.rows[0].d1 * r.rows[0].d2, 1u);
  EXPECT_EQ(r.rows[0].discrepancy, 0.0);

  // Second implementation: every y, every reduced residue, divisor tests only.
  double total = 0.0;
  for (std::uint64_t d = 1; d <= r.modulus_bound; ++d) {
    std::uint64_t d1 = 1;
    for (const auto& [p, k] : oracle::trial_factor(d)) {
      if (p <= w) d1 *= static_cast<std::uint64_t>(std::pow(p, k));
    }
    const std::uint64_t d2 = d / d1;
    const double phi = static_cast<double>(oracle::phi_by_gcd(d));
    double best = 0.0;
    for (std::uint64_t res = 0; res < d; ++res) {
      if (std::gcd(res, d) != 1) continue;
      std::complex<double> s1 = 0.0, s2 = 0.0;
      for (std::uint64_t y = 1; y <= x; ++y) {
        if (y % d == res) s1 += tables.beta[y];
        if (y % d1 == res % d1 && std::gcd(y, d2) == 1) s2 += tables.beta[y];
        best = std::max(best, std::abs(s1 - s2 / phi));
      }
    }
    EXPECT_NEAR(r.rows[d - 1].discrepancy, best, 1e-9 * std::max(1.0, best)) << d;
    total += best;
  }
  EXPECT_NEAR(r.total, total, 1e-9 * total);
  EXPECT_GT(r.rhs_budget, 0.0);
}

TEST(Lemma1, ScanBudget) {
  const auto tables = decompose(exp_twist(specs::omega(), 0.5), 10000, 1.0, table());
  try {
    lemma1_discrepancy(tables, 0.3, 50, table(), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resource_limit);
  }
}

TEST(Lemma2, Examples) {
  const auto g = exp_twist(specs::log_prime(), 0.4);
  EXPECT_EQ(lemma2_discrepancy(g, 5000, 1, 1, table()), 0.0);
  EXPECT_EQ(lemma2_discrepancy(exp_twist(specs::omega(), 0.0), 10, 2, 1, table()), 0.0);
  EXPECT_THROW(lemma2_discrepancy(g, 100, 6, 3, table()), Error);
}

TEST(Lemma2, CharacterCounterexample) {
  const std::uint64_t x = 100000;
  const auto chi = character_mod3();
  for (std::uint64_t n = 1; n <= 100; ++n) {
    if (n % 3 == 0) continue;
    EXPECT_NEAR(chi(n, table()).real(), n % 3 == 1 ? 1.0 : -1.0, 1e-12) << n;
  }
  const double d = lemma2_discrepancy(chi, x, 3, 1, table());
  EXPECT_GT(d, 0.3 * x / 2.0 / std::log(static_cast<double>(x)));
  EXPECT_NEAR(d, std::ceil(x / 3.0), 1.0);
}

TEST(Lemma2, ScanMatchesDirectDiscrepancies) {
  const auto g = exp_twist(specs::omega(), 0.1);
  const auto scan = lemma2_scan(g, 20000, 30, table());
  for (const auto& row : scan.rows) {
    double worst = 0.0;
    for (std::uint64_t r = 0; r < row.modulus; ++r) {
      if (std::gcd(r, row.modulus) == 1) worst = std::max(worst, lemma2_discrepancy(g, 20000, row.modulus, r, table()));
    }
    EXPECT_NEAR(row.discrepancy, worst, 1e-9 * std::max(1.0, worst)) << row.modulus;
  }
  EXPECT_EQ(scan.rows[0].discrepancy, 0.0);
  const auto chi_scan = lemma2_scan(character_mod3(), 20000, 30, table());
  ASSERT_TRUE(chi_scan.exceptional_modulus.has_value());
  EXPECT_EQ(*chi_scan.exceptional_modulus, 3u);
}

TEST(Lemma3, NaiveOracle) {
  const auto g = exp_twist(specs::omega(), 0.0);
  const auto r = lemma3_compare(g, 100, 3, 7, 1, table());
  EXPECT_EQ(r.sieve_primes, (std::vector<std::uint64_t>{5, 7}));
  double lhs = 0, weighted = 0, weighted_no5 = 0, weighted_no7 = 0;
  for (std::uint64_t n = 1; n <= 100; ++n) {
    const std::int64_t m = static_cast<std::int64_t>(n) - 1;
    if (m % 5 != 0 && m % 7 != 0) lhs += 1;
    double wt = 1.0;
    for (const auto& [p, k] : oracle::trial_factor(n)) {
      if (p > 3) wt *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
    }
    weighted += wt;
    if (n % 5) weighted_no5 += wt;
    if (n % 7) weighted_no7 += wt;
  }
  const double f5 = 1 - 1.0 / 4, f7 = 1 - 1.0 / 6;
  EXPECT_NEAR(r.lhs.real(), lhs, 1e-12);
  EXPECT_NEAR(r.alternative1.rhs.real(), f5 * f7 * weighted, 1e-12);
  ASSERT_EQ(r.alternative2.size(), 2u);
  EXPECT_NEAR(r.alternative2[0].rhs.real(), f7 * weighted_no5, 1e-12);
  EXPECT_NEAR(r.alternative2[1].rhs.real(), f5 * weighted_no7, 1e-12);
}

TEST(Lemma3, EmptySieveAndDeterminism) {
  const auto g = exp_twist(specs::omega(), 1.0);
  const auto e = lemma3_compare(g, 1000, 5, 5, 1, table());
  EXPECT_TRUE(e.sieve_primes.empty());
  std::complex<double> s = 0.0;
  for (std::uint64_t n = 1; n <= 1000; ++n) s += g(n, table());
  EXPECT_LT(std::abs(e.lhs - s), 1e-9);
  EXPECT_TRUE(e.alternative1_wins);

  const auto a = lemma3_compare(g, 10000, 3, 781, 1, table());
  const auto b = lemma3_compare(g, 10000, 3, 781, 1, table());
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.alternative1.residual, b.alternative1.residual);
  EXPECT_EQ(a.best_q, b.best_q);
}
