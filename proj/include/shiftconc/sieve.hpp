#pragma once

// Smallest-prime-factor tables and the elementary arithmetic built on them.
//
// spf cells are 32-bit, so the hard ceiling on a table limit is 2^32 - 1.
// Construction is a segmented sieve of Eratosthenes: base primes up to
// sqrt(limit) are found first, then each segment of the final array is
// filled independently, which keeps the build deterministic under any
// thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "shiftconc/error.hpp"
#include "shiftconc/parallel.hpp"

namespace shiftconc {

inline constexpr std::uint64_t kMaxTableLimit = 0xFFFFFFFFull;

struct PrimePower {
  std::uint64_t prime = 0;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Ascending primes, exponents >= 1; empty for n = 1.
struct PrimePowerFactorization {
  std::vector<PrimePower> factors;

  std::uint64_t product() const {
    std::uint64_t n = 1;
    for (const auto& [p, k] : factors) {
      for (unsigned i = 0; i < k; ++i) n *= p;
    }
    return n;
  }

  friend bool operator==(const PrimePowerFactorization&, const PrimePowerFactorization&) = default;
};

struct SieveOptions {
  unsigned threads = 1;
  std::uint64_t memory_budget_bytes = std::uint64_t{4} << 30;
  std::uint64_t segment_size = std::uint64_t{1} << 16;
};

class FactorTable {
 public:
  FactorTable() = default;

  static FactorTable build(std::uint64_t limit, const SieveOptions& options = {});

  // Adopts a previously built spf array (cache loader). Validates the
  // table invariants cheaply: spf[n] divides n and spf[p] == p marks primes.
  static FactorTable from_spf(std::uint64_t limit, std::vector<std::uint32_t> spf);

  static std::uint64_t required_bytes(std::uint64_t limit) {
    // spf cells plus a generous bound on the prime list.
    return (limit + 1) * sizeof(std::uint32_t) + (limit / 2 + 16) * sizeof(std::uint32_t);
  }

  std::uint64_t limit() const { return limit_; }

  std::uint32_t spf(std::uint64_t n) const {
    check_index(n);
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const {
    check_index(n);
    return n >= 2 && spf_[n] == n;
  }

  std::span<const std::uint32_t> primes() const { return primes_; }
  std::span<const std::uint32_t> spf_cells() const { return spf_; }

  // Calls fn(p, k) for each prime power in n, ascending in p.
  template <typename Fn>
  void for_each_prime_power(std::uint64_t n, Fn&& fn) const {
    check_index(n);
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      unsigned k = 0;
      do {
        n /= p;
        ++k;
      } while (n % p == 0);
      fn(p, k);
    }
  }

 private:
  void check_index(std::uint64_t n) const {
    if (n > limit_) {
      fail(ErrorKind::invalid_argument,
           "index " + std::to_string(n) + " exceeds factor table limit " + std::to_string(limit_));
    }
  }

  void collect_primes() {
    primes_.clear();
    for (std::uint64_t n = 2; n <= limit_; ++n) {
      if (spf_[n] == n) primes_.push_back(static_cast<std::uint32_t>(n));
    }
  }

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

inline FactorTable FactorTable::build(std::uint64_t limit, const SieveOptions& options) {
  require(limit >= 2, "factor table limit must be at least 2");
  if (limit > kMaxTableLimit) {
    fail(ErrorKind::resource_limit, "factor table limit exceeds the 32-bit spf ceiling");
  }
  if (required_bytes(limit) > options.memory_budget_bytes) {
    fail(ErrorKind::resource_limit,
         "factor table to " + std::to_string(limit) + " needs " + std::to_string(required_bytes(limit)) +
             " bytes, budget is " + std::to_string(options.memory_budget_bytes));
  }

  FactorTable table;
  table.limit_ = limit;
  table.spf_.assign(limit + 1, 0);

  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<std::uint32_t> base;
  {
    std::vector<char> composite(root + 1, 0);
    for (std::uint64_t p = 2; p <= root; ++p) {
      if (composite[p]) continue;
      base.push_back(static_cast<std::uint32_t>(p));
      for (std::uint64_t m = p * p; m <= root; m += p) composite[m] = 1;
    }
  }

  const std::uint64_t seg = std::max<std::uint64_t>(options.segment_size, 64);
  const std::uint64_t segments = (limit + 1 + seg - 1) / seg;
  std::uint32_t* cells = table.spf_.data();

  parallel_chunks(segments, options.threads, [&](std::size_t first, std::size_t last) {
    for (std::size_t s = first; s < last; ++s) {
      const std::uint64_t lo = std::max<std::uint64_t>(2, s * seg);
      const std::uint64_t hi = std::min<std::uint64_t>(limit + 1, (s + 1) * seg);
      if (lo >= hi) continue;
      for (const std::uint64_t p : base) {
        if (p * p >= hi) break;
        std::uint64_t m = std::max(p * p, (lo + p - 1) / p * p);
        for (; m < hi; m += p) {
          if (cells[m] == 0) cells[m] = static_cast<std::uint32_t>(p);
        }
      }
      for (std::uint64_t n = lo; n < hi; ++n) {
        if (cells[n] == 0) cells[n] = static_cast<std::uint32_t>(n);
      }
    }
  });

  table.collect_primes();
  return table;
}

inline FactorTable FactorTable::from_spf(std::uint64_t limit, std::vector<std::uint32_t> spf) {
  require(limit >= 2 && limit <= kMaxTableLimit, "cached factor table limit out of range");
  require(spf.size() == limit + 1, "cached spf array has the wrong length");
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = spf[n];
    if (p < 2 || p > n || n % p != 0) {
      fail(ErrorKind::invalid_argument, "cached spf entry for " + std::to_string(n) + " is invalid");
    }
  }
  FactorTable table;
  table.limit_ = limit;
  table.spf_ = std::move(spf);
  table.spf_[0] = 0;
  table.spf_[1] = 0;
  table.collect_primes();
  return table;
}

inline FactorTable build_factor_table(std::uint64_t limit, const SieveOptions& options = {}) {
  return FactorTable::build(limit, options);
}

inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi, const FactorTable& table) {
  require(lo >= 2 && lo <= hi && hi <= table.limit(),
          "prime range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is outside the table");
  const auto primes = table.primes();
  auto first = std::lower_bound(primes.begin(), primes.end(), lo);
  auto last = std::upper_bound(first, primes.end(), hi);
  return {first, last};
}

inline PrimePowerFactorization factorize(std::uint64_t n, const FactorTable& table) {
  require(n >= 1, "factorize requires n >= 1");
  PrimePowerFactorization out;
  table.for_each_prime_power(n, [&](std::uint64_t p, unsigned k) { out.factors.push_back({p, k}); });
  return out;
}

inline std::uint64_t euler_phi(std::uint64_t n, const FactorTable& table) {
  require(n >= 1, "euler_phi requires n >= 1");
  std::uint64_t phi = n;
  table.for_each_prime_power(n, [&](std::uint64_t p, unsigned) { phi = phi / p * (p - 1); });
  return phi;
}

inline std::uint64_t prime_count(std::uint64_t x, const FactorTable& table) {
  require(x <= table.limit(), "prime_count argument exceeds the table limit");
  const auto primes = table.primes();
  return static_cast<std::uint64_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
}

// Used by the sieve-weight modules.
inline bool is_squarefree(std::uint64_t n, const FactorTable& table) {
  bool squarefree = true;
  table.for_each_prime_power(n, [&](std::uint64_t, unsigned k) { squarefree = squarefree && k == 1; });
  return squarefree;
}

}  // namespace shiftconc
