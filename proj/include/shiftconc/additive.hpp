#pragma once

// Additive functions described by a rule on prime powers, and their
// unimodular multiplicative twists g(n) = exp(i t f(n)).

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shiftconc/error.hpp"
#include "shiftconc/sieve.hpp"

namespace shiftconc {

enum class AdditiveKind { strongly_additive, completely_additive, prime_power_table };

enum class PrimeRuleKind { zero, constant_one, log_prime, residue_indicator, reciprocal, custom };

inline const char* to_string(AdditiveKind kind) {
  switch (kind) {
    case AdditiveKind::strongly_additive: return "strongly-additive";
    case AdditiveKind::completely_additive: return "completely-additive";
    case AdditiveKind::prime_power_table: return "prime-power-table";
  }
  return "unknown";
}

inline const char* to_string(PrimeRuleKind kind) {
  switch (kind) {
    case PrimeRuleKind::zero: return "zero";
    case PrimeRuleKind::constant_one: return "constant-one";
    case PrimeRuleKind::log_prime: return "log-prime";
    case PrimeRuleKind::residue_indicator: return "residue-indicator";
    case PrimeRuleKind::reciprocal: return "reciprocal";
    case PrimeRuleKind::custom: return "custom";
  }
  return "unknown";
}

struct PrimeRule {
  PrimeRuleKind kind = PrimeRuleKind::zero;
  // residue-indicator(q, r): f(p) = 1 when p = r (mod q).
  std::uint64_t modulus = 0;
  std::uint64_t residue = 0;

  double operator()(std::uint64_t p) const {
    switch (kind) {
      case PrimeRuleKind::zero:
      case PrimeRuleKind::custom: return 0.0;
      case PrimeRuleKind::constant_one: return 1.0;
      case PrimeRuleKind::log_prime: return std::log(static_cast<double>(p));
      case PrimeRuleKind::residue_indicator: return p % modulus == residue ? 1.0 : 0.0;
      case PrimeRuleKind::reciprocal: return 1.0 / static_cast<double>(p);
    }
    return 0.0;
  }

  // Rules whose values come out of floating-point arithmetic.
  bool is_computed() const { return kind == PrimeRuleKind::log_prime || kind == PrimeRuleKind::reciprocal; }
};

// The value rule of an additive function f on prime powers. Explicit
// (p, k) entries take precedence; otherwise f(p^k) follows from f(p) and
// the kind. The prime-power-table kind has no fallback.
class AdditiveFunctionSpec {
 public:
  using Key = std::pair<std::uint64_t, unsigned>;

  AdditiveFunctionSpec() = default;
  AdditiveFunctionSpec(AdditiveKind kind, PrimeRule rule, std::map<Key, double> entries = {})
      : kind_(kind), rule_(rule), entries_(std::move(entries)) {
    if (rule_.kind == PrimeRuleKind::residue_indicator) {
      require(rule_.modulus >= 1, "residue-indicator needs a modulus >= 1");
      require(rule_.residue < rule_.modulus, "residue-indicator residue must be reduced");
    }
    for (const auto& [key, value] : entries_) {
      require(key.first >= 2 && key.second >= 1, "table entries need p >= 2 and k >= 1");
      require(std::isfinite(value), "table entries must be finite");
    }
  }

  AdditiveKind kind() const { return kind_; }
  const PrimeRule& rule() const { return rule_; }
  const std::map<Key, double>& entries() const { return entries_; }

  double prime_value(std::uint64_t p) const {
    if (auto it = entries_.find({p, 1}); it != entries_.end()) return it->second;
    if (kind_ == AdditiveKind::prime_power_table) missing(p, 1);
    return rule_(p);
  }

  double prime_power_value(std::uint64_t p, unsigned k) const {
    if (auto it = entries_.find({p, k}); it != entries_.end()) return it->second;
    if (kind_ == AdditiveKind::prime_power_table) missing(p, k);
    const double fp = prime_value(p);
    return kind_ == AdditiveKind::completely_additive ? static_cast<double>(k) * fp : fp;
  }

  // f(p) != 0, exact for table-valued primes and with a 1e-15 floor for
  // values produced by floating-point rules.
  bool nonzero_at_prime(std::uint64_t p) const {
    const double v = prime_value(p);
    const bool from_table = entries_.count({p, 1}) != 0 || !rule_.is_computed();
    return from_table ? v != 0.0 : std::abs(v) > 1e-15;
  }

  std::string describe() const {
    std::string s = std::string(to_string(kind_)) + "/" + to_string(rule_.kind);
    if (rule_.kind == PrimeRuleKind::residue_indicator) {
      s += "(" + std::to_string(rule_.modulus) + "," + std::to_string(rule_.residue) + ")";
    }
    if (!entries_.empty()) s += "+" + std::to_string(entries_.size()) + "entries";
    return s;
  }

 private:
  [[noreturn]] static void missing(std::uint64_t p, unsigned k) {
    fail(ErrorKind::incomplete_spec,
         "prime-power table has no entry for (" + std::to_string(p) + ", " + std::to_string(k) + ")");
  }

  AdditiveKind kind_ = AdditiveKind::strongly_additive;
  PrimeRule rule_{};
  std::map<Key, double> entries_;
};

namespace specs {

inline AdditiveFunctionSpec zero() { return {AdditiveKind::strongly_additive, {PrimeRuleKind::zero}}; }
inline AdditiveFunctionSpec omega() { return {AdditiveKind::strongly_additive, {PrimeRuleKind::constant_one}}; }
inline AdditiveFunctionSpec big_omega() {
  return {AdditiveKind::completely_additive, {PrimeRuleKind::constant_one}};
}
inline AdditiveFunctionSpec log_prime(AdditiveKind kind = AdditiveKind::completely_additive) {
  return {kind, {PrimeRuleKind::log_prime}};
}
inline AdditiveFunctionSpec residue_indicator(std::uint64_t q, std::uint64_t r,
                                              AdditiveKind kind = AdditiveKind::strongly_additive) {
  return {kind, {PrimeRuleKind::residue_indicator, q, r}};
}
inline AdditiveFunctionSpec reciprocal() { return {AdditiveKind::strongly_additive, {PrimeRuleKind::reciprocal}}; }

}  // namespace specs

// f(n) summed from the largest prime power down, the same association order
// as eval_on_range, so pointwise and bulk values agree bit for bit.
inline double eval_additive(const AdditiveFunctionSpec& spec, std::uint64_t n, const FactorTable& table) {
  require(n >= 1, "additive functions are defined on n >= 1");
  PrimePower parts[16];
  int count = 0;
  table.for_each_prime_power(n, [&](std::uint64_t p, unsigned k) { parts[count++] = {p, k}; });
  double acc = 0.0;
  for (int i = count - 1; i >= 0; --i) acc = acc + spec.prime_power_value(parts[i].prime, parts[i].exponent);
  return acc;
}

// Values f(0..x) with f(0) unused (set to 0); one pass over the spf table.
inline std::vector<double> eval_on_range(const AdditiveFunctionSpec& spec, std::uint64_t x, const FactorTable& table) {
  require(x <= table.limit(), "eval_on_range beyond the table limit");
  std::vector<double> values(x + 1, 0.0);
  const auto spf = table.spf_cells();
  for (std::uint64_t n = 2; n <= x; ++n) {
    const std::uint64_t p = spf[n];
    std::uint64_t rest = n;
    unsigned k = 0;
    do {
      rest /= p;
      ++k;
    } while (rest % p == 0);
    values[n] = values[rest] + spec.prime_power_value(p, k);
  }
  return values;
}

// g(n) = exp(i t f(n)); |g(n)| = 1 and g is multiplicative.
class UnitDiscFunction {
 public:
  UnitDiscFunction() = default;
  UnitDiscFunction(AdditiveFunctionSpec base, double t) : base_(std::move(base)), t_(t) {}

  const AdditiveFunctionSpec& base() const { return base_; }
  double t() const { return t_; }

  std::complex<double> from_additive(double f) const { return std::polar(1.0, t_ * f); }

  std::complex<double> operator()(std::uint64_t n, const FactorTable& table) const {
    return from_additive(eval_additive(base_, n, table));
  }

  std::complex<double> at_prime_power(std::uint64_t p, unsigned k) const {
    return from_additive(base_.prime_power_value(p, k));
  }

 private:
  AdditiveFunctionSpec base_;
  double t_ = 0.0;
};

inline UnitDiscFunction exp_twist(const AdditiveFunctionSpec& spec, double t) { return {spec, t}; }

// g(0..x), entry 0 unused.
inline std::vector<std::complex<double>> eval_on_range(const UnitDiscFunction& g, std::uint64_t x,
                                                       const FactorTable& table) {
  const auto f = eval_on_range(g.base(), x, table);
  std::vector<std::complex<double>> out(f.size());
  for (std::size_t n = 1; n < f.size(); ++n) out[n] = g.from_additive(f[n]);
  return out;
}

}  // namespace shiftconc
