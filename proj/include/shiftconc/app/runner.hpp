#pragma once

// Command dispatch for the batch driver. Each command reads what it needs
// from the config, asks for a factor table large enough for the run, and
// returns a JSON report plus optional CSV tables. Nothing that varies
// between runs (thread count, cache state, actual table size) goes into a
// report.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shiftconc/app/config.hpp"
#include "shiftconc/shiftconc.hpp"

namespace shiftconc::app {

struct RunOptions {
  std::string cache_dir;         // empty: environment override, then none
  std::uint64_t min_limit = 0;   // --limit
  unsigned threads = 1;          // 0 = auto
  std::optional<std::uint64_t> seed;
  std::ostream* log = &std::cerr;
};

struct RunOutput {
  json report;
  std::map<std::string, std::string> tables;  // name -> CSV text
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "sieve", "concentration", "dispersion", "theorem-ratio", "fejer", "eq2", "eq4", "eq5", "goldbach-majorant",
      "decompose", "lemma1", "lemma2", "lemma3", "three-series", "limit-verdict"};
  return names;
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config_parse: return 2;
    case ErrorKind::resource_limit: return 3;
    case ErrorKind::numerical_inconsistency: return 4;
    default: return 1;
  }
}

namespace detail {

inline json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json population_json(const Population& pop) {
  json j = {{"type", to_string(pop.kind)}};
  if (pop.kind == PopulationKind::goldbach) {
    j["N"] = pop.size_parameter;
  } else {
    j["x"] = pop.size_parameter;
  }
  if (pop.kind == PopulationKind::shifted_primes) j["a"] = pop.shift;
  return j;
}

inline json dispersion_json(const DispersionResult& d) {
  json j = {{"functional", to_string(d.functional)},
            {"argument", d.argument},
            {"value", d.value},
            {"lambda_bound", d.lambda_bound},
            {"grid_points", d.grid_points},
            {"prime_terms", d.prime_terms}};
  j["lambda_star"] = d.lambda_star ? json(*d.lambda_star) : json(nullptr);
  return j;
}

inline json majorant_json(const MajorantReport& r) {
  json j = {{"h", r.h},
            {"argument", r.argument},
            {"quadrature_nodes_per_half", r.quadrature_nodes},
            {"normaliser", r.normaliser},
            {"integral_term", r.integral_term},
            {"integral_term_kernel", r.integral_term_swap},
            {"quadrature_imag", r.quadrature_imag},
            {"additive_term", r.additive_term},
            {"total", r.total},
            {"frequency", r.frequency}};
  j["exclude_q"] = r.exclude_q ? json(*r.exclude_q) : json(nullptr);
  return j;
}

inline std::string csv_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

class CsvTable {
 public:
  explicit CsvTable(std::string header) { out_ << header << '\n'; }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename T>
  static std::string cell(T v) requires std::is_integral_v<T> {
    return std::to_string(v);
  }

  std::ostringstream out_;
};

class Context {
 public:
  Context(ExperimentConfig& cfg, const RunOptions& options) : cfg_(cfg), options_(options) {}

  ExperimentConfig& cfg() { return cfg_; }
  unsigned threads() const { return resolve_threads(options_.threads); }

  const FactorTable& table(std::uint64_t required) {
    const std::uint64_t limit = std::max<std::uint64_t>({required, options_.min_limit, 2});
    if (limit > kMaxTableLimit) fail(ErrorKind::resource_limit, "requested table limit exceeds 2^32 - 1");
    if (!cached_ || cached_->table.limit() < limit) {
      SieveOptions sieve;
      sieve.threads = threads();
      cached_ = cache_management(resolve_cache_dir(options_.cache_dir), limit, sieve, options_.log);
    }
    return cached_->table;
  }

  Population population(const std::string& default_type) {
    const auto type = cfg_.get_string("population", "type", default_type);
    if (type == "integers") return Population::integers(cfg_.get_u64("population", "x"));
    if (type == "shifted-primes") {
      const auto x = cfg_.get_u64("population", "x");
      return Population::shifted(x, cfg_.get_i64("population", "a", 1));
    }
    if (type == "goldbach") return Population::goldbach(cfg_.get_u64("population", "N"));
    config_error("[population] type = '" + type + "': expected integers, shifted-primes or goldbach");
  }

  std::uint64_t seed() {
    if (options_.seed) cfg_.set("method", "seed", std::to_string(*options_.seed));
    return cfg_.get_u64("method", "seed", 1);
  }

 private:
  ExperimentConfig& cfg_;
  RunOptions options_;
  std::optional<CachedTable> cached_;
};

inline std::uint64_t shifted_limit(std::uint64_t x, std::int64_t a) {
  return x + static_cast<std::uint64_t>(std::llabs(a));
}

inline std::size_t nodes(ExperimentConfig& cfg) {
  return static_cast<std::size_t>(cfg.get_u64("method", "nodes", kDefaultNodesPerHalf));
}

inline MinimizerOptions minimizer_options(Context& ctx) {
  MinimizerOptions m;
  m.grid_half_points = static_cast<std::size_t>(ctx.cfg().get_u64("method", "grid_half_points", 10000));
  m.refine_candidates = static_cast<std::size_t>(ctx.cfg().get_u64("method", "refine_candidates", 32));
  m.keep_samples = ctx.cfg().get_bool("method", "keep_samples", false);
  m.threads = ctx.threads();
  if (m.grid_half_points == 0) config_error("[method] grid_half_points must be >= 1");
  if (m.refine_candidates == 0) config_error("[method] refine_candidates must be >= 1");
  return m;
}

// ---------------------------------------------------------------------------

inline json cmd_sieve(Context& ctx, RunOutput&) {
  const auto x = ctx.cfg().get_u64("population", "x");
  const auto& table = ctx.table(x);
  const auto pi = prime_count(x, table);
  std::uint64_t largest = 0;
  if (pi > 0) largest = table.primes()[pi - 1];
  return {{"x", x}, {"prime_count", pi}, {"largest_prime", largest}};
}

inline json cmd_concentration(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto pop = ctx.population("shifted-primes");
  const auto& table = ctx.table(pop.required_limit());
  auto sample = population_sample(spec, pop, table);
  const auto excluded = sample.excluded;
  const SortedSample sorted(std::move(sample.values), sample.sample_size);
  auto report = sup_concentration(sorted);
  report.population = pop;
  report.excluded = excluded;

  json result = {{"spec", spec.describe()},
                 {"population", population_json(pop)},
                 {"sample_size", report.sample_size},
                 {"excluded", report.excluded},
                 {"sup", report.sup_value},
                 {"sup_count", report.sup_count},
                 {"h_star", report.h_star}};
  if (const auto h = cfg.get_optional_double("method", "h")) {
    result["h"] = *h;
    result["frequency"] = sorted.frequency(*h);
  }

  const auto& v = sorted.sorted_values();
  const double lo = v.empty() ? 0.0 : v.front() - 1.0;
  const double hi = v.empty() ? 0.0 : v.back();
  const auto points = cfg.get_u64("method", "h_points", 0);
  if (points > 0) {
    const double h_min = cfg.get_double("method", "h_min", lo);
    const double h_max = cfg.get_double("method", "h_max", hi);
    sample_h_grid(report, sorted, h_min, h_max, points);
    CsvTable csv("h,frequency");
    for (const auto& [h, f] : report.samples) csv.row(h, f);
    out.tables["h_samples"] = csv.str();
  }

  const auto probes = cfg.get_u64("method", "probes", 0);
  if (probes > 0) {
    std::mt19937_64 rng(ctx.seed());
    json rows = json::array();
    for (std::uint64_t i = 0; i < probes; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const double h = lo + (hi - lo) * u;
      rows.push_back({{"h", h}, {"frequency", sorted.frequency(h)}});
    }
    result["probes"] = rows;
  }
  return result;
}

inline json cmd_dispersion(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto which = cfg.get_string("method", "functional", "W");
  DispersionResult d;
  if (which == "W" || which == "E") {
    const auto x = cfg.get_u64("population", "x");
    const auto& table = ctx.table(x);
    d = which == "W" ? dispersion_W(spec, x, table, minimizer_options(ctx)) : dispersion_E(spec, x, table);
  } else if (which == "Y") {
    const auto n = cfg.get_u64("population", "N");
    d = dispersion_Y(spec, n, ctx.table(n), minimizer_options(ctx));
  } else {
    config_error("[method] functional = '" + which + "': expected W, Y or E");
  }
  if (!d.objective_samples.empty()) {
    CsvTable csv("lambda,objective");
    for (const auto& [l, v] : d.objective_samples) csv.row(l, v);
    out.tables["objective"] = csv.str();
  }
  json result = dispersion_json(d);
  result["spec"] = spec.describe();
  return result;
}

inline json cmd_theorem_ratio(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto pop = ctx.population("shifted-primes");
  const auto options = minimizer_options(ctx);
  const auto& table = ctx.table(pop.required_limit());
  const auto r = theorem_ratio(spec, pop, table, options);
  return {{"spec", r.spec},
          {"population", population_json(pop)},
          {"a", pop.shift},
          {"sup_concentration", r.sup_concentration},
          {"h_star", r.concentration.h_star},
          {"sample_size", r.concentration.sample_size},
          {"excluded", r.concentration.excluded},
          {"dispersion", dispersion_json(r.dispersion)},
          {"dispersion_value", r.dispersion_value},
          {"ratio", r.ratio}};
}

inline json cmd_fejer(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto x = cfg.get_u64("population", "x");
  const auto a = cfg.get_i64("population", "a", 1);
  const auto n = nodes(cfg);
  const auto& table = ctx.table(shifted_limit(x, a));
  auto evaluate = [&](double h) { return fejer_majorant_Q(spec, x, a, h, table, n); };
  auto to_json = [](const FejerEvaluation& e) {
    return json{{"h", e.h},
                {"majorant", e.majorant},
                {"majorant_quadrature", e.majorant_quadrature},
                {"quadrature_imag", e.quadrature_imag},
                {"q_h", e.q_h},
                {"slack", e.slack}};
  };
  json result = {{"spec", spec.describe()}, {"x", x}, {"a", a}, {"quadrature_nodes_per_half", n}};
  result["evaluation"] = to_json(evaluate(cfg.get_double("method", "h", 0.0)));
  const auto points = cfg.get_u64("method", "h_points", 0);
  if (points > 0) {
    const double h_min = cfg.get_double("method", "h_min");
    const double h_max = cfg.get_double("method", "h_max");
    if (h_min > h_max) config_error("[method] needs h_min <= h_max");
    CsvTable csv("h,q_h,majorant,majorant_quadrature,slack");
    double min_slack = 0.0;
    std::uint64_t violations = 0;
    for (std::uint64_t i = 0; i < points; ++i) {
      const double h = points == 1 ? h_min
                                   : h_min + (h_max - h_min) * static_cast<double>(i) / static_cast<double>(points - 1);
      const auto e = evaluate(h);
      csv.row(h, e.q_h, e.majorant, e.majorant_quadrature, e.slack);
      min_slack = i == 0 ? e.slack : std::min(min_slack, e.slack);
      violations += e.slack < 0.0;
    }
    out.tables["h_samples"] = csv.str();
    result["grid"] = {{"points", points}, {"min_slack", min_slack}, {"violations", violations}};
  }
  return result;
}

inline json cmd_eq2(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto x = cfg.get_u64("population", "x");
  const auto a = cfg.get_i64("population", "a", 1);
  const auto defaults = default_sieve_parameters(x, a);
  const auto w = cfg.get_u64("method", "w", defaults.w);
  const auto z = cfg.get_u64("method", "z", defaults.z);
  const double h = cfg.get_double("method", "h", 0.0);
  Eq2Options options;
  options.nodes_per_half = nodes(cfg);
  options.pair_budget = cfg.get_u64("method", "pair_budget", options.pair_budget);
  const auto& table = ctx.table(std::max(shifted_limit(x, a), z));
  const auto r = expanded_bound_eq2(spec, x, a, w, z, h, table, options);
  return {{"spec", spec.describe()},
          {"x", r.x},
          {"a", r.a},
          {"w", r.w},
          {"z", r.z},
          {"h", r.h},
          {"quadrature_nodes_per_half", r.quadrature_nodes},
          {"weight_count", r.weight_count},
          {"pair_count", r.pair_count},
          {"expansion", r.expansion},
          {"expansion_kernel", r.expansion_swap},
          {"direct", r.direct},
          {"tail", r.tail},
          {"rhs", r.rhs},
          {"rhs_kernel", r.rhs_swap},
          {"prime_restricted", r.prime_restricted},
          {"q_h", r.q_h},
          {"sieved_violations", r.sieved_violations}};
}

inline json cmd_eq4(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto x = cfg.get_u64("population", "x");
  const auto a = cfg.get_i64("population", "a", 1);
  const auto w = cfg.get_u64("method", "w", default_sieve_parameters(x, a).w);
  const double h = cfg.get_double("method", "h", 0.0);
  const auto n = nodes(cfg);
  const auto& table = ctx.table(std::max(shifted_limit(x, a), w));
  json result = majorant_json(majorant_eq4(spec, x, a, h, w, table, n));
  result["spec"] = spec.describe();
  result["a"] = a;
  result["w"] = w;
  return result;
}

inline json cmd_eq5(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto x = cfg.get_u64("population", "x");
  const auto a = cfg.get_i64("population", "a", 1);
  const double h = cfg.get_double("method", "h", 0.0);
  const auto n = nodes(cfg);
  const auto q = cfg.get_optional_u64("method", "exclude_q");
  const auto& table = ctx.table(shifted_limit(x, a));
  json result = majorant_json(majorant_eq5(spec, x, a, h, table, n, q));
  result["spec"] = spec.describe();
  result["a"] = a;
  return result;
}

inline json cmd_goldbach_majorant(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto big_n = cfg.get_u64("population", "N");
  const double h = cfg.get_double("method", "h", 0.0);
  const auto n = nodes(cfg);
  const auto q = cfg.get_optional_u64("method", "exclude_q");
  const auto& table = ctx.table(big_n);
  json result = majorant_json(majorant_goldbach(spec, big_n, h, table, n, q));
  result["spec"] = spec.describe();
  return result;
}

inline UnitDiscFunction twist(ExperimentConfig& cfg) {
  auto spec = cfg.function_spec();
  return exp_twist(spec, cfg.get_double("function", "t", 1.0));
}

inline json cmd_decompose(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto g = twist(cfg);
  const auto x = cfg.get_u64("population", "x");
  const double A = cfg.get_double("method", "A", 1.0);
  const bool write = cfg.get_bool("method", "write_tables", false);
  const auto t = decompose(g, x, A, ctx.table(x));
  // Convolution check: sum_{d | n} h(d) g1(n/d) against g(n).
  std::vector<std::complex<double>> conv(x + 1);
  for (std::uint64_t d = 1; d <= x; ++d) {
    if (t.h_values[d] == std::complex<double>{}) continue;
    for (std::uint64_t m = 1; d * m <= x; ++m) conv[d * m] += t.h_values[d] * t.g1_values[m];
  }
  double conv_err = 0.0;
  for (std::uint64_t n = 1; n <= x; ++n) conv_err = std::max(conv_err, std::abs(conv[n] - t.g_values[n]));
  if (write) {
    CsvTable csv("n,g_re,g_im,g1_re,g1_im,h_re,h_im,beta1_re,beta1_im,beta2_re,beta2_im,beta_re,beta_im");
    for (std::uint64_t n = 1; n <= x; ++n) {
      csv.row(n, t.g_values[n].real(), t.g_values[n].imag(), t.g1_values[n].real(), t.g1_values[n].imag(),
              t.h_values[n].real(), t.h_values[n].imag(), t.beta1[n].real(), t.beta1[n].imag(), t.beta2[n].real(),
              t.beta2[n].imag(), t.beta[n].real(), t.beta[n].imag());
    }
    out.tables["tables"] = csv.str();
  }
  return {{"spec", g.base().describe()},
          {"t", g.t()},
          {"x", x},
          {"A", A},
          {"u_cap", t.u_cap},
          {"p_cap", t.p_cap},
          {"convolution_max_error", conv_err},
          {"h_prime_max", t.h_prime_max},
          {"h_prime_power_max", t.h_prime_power_max},
          {"h_prime_power_bound", std::exp(1.0)},
          {"beta1_max", t.beta1_max},
          {"beta2_max", t.beta2_max},
          {"beta_heuristic_level", t.beta_heuristic_level},
          {"beta1_fraction_above", t.beta1_fraction_above},
          {"beta2_fraction_above", t.beta2_fraction_above}};
}

inline std::uint64_t log_power(std::uint64_t x, std::uint64_t exponent) {
  return static_cast<std::uint64_t>(std::floor(std::pow(std::log(static_cast<double>(x)), static_cast<double>(exponent))));
}

inline json cmd_lemma1(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto g = twist(cfg);
  const auto x = cfg.get_u64("population", "x");
  const double A = cfg.get_double("method", "A", 1.0);
  const double delta = cfg.get_double("method", "delta", 0.25);
  const auto w_exp = cfg.get_u64("method", "w_exponent", 3);
  const auto w = cfg.get_u64("method", "w", std::max<std::uint64_t>(2, log_power(x, w_exp)));
  const auto budget = cfg.get_u64("method", "scan_budget", 2'000'000'000);
  const auto& table = ctx.table(std::max(x, w));
  const auto tables = decompose(g, x, A, table);
  const auto r = lemma1_discrepancy(tables, delta, w, table, budget);
  CsvTable csv("D,D1,D2,residue,y,discrepancy");
  for (const auto& row : r.rows) csv.row(row.d1 * row.d2, row.d1, row.d2, row.residue, row.y, row.discrepancy);
  out.tables["moduli"] = csv.str();
  return {{"spec", g.base().describe()},
          {"t", g.t()},
          {"x", r.x},
          {"delta", r.delta},
          {"w", r.w},
          {"A", r.A},
          {"modulus_bound", r.modulus_bound},
          {"moduli", r.rows.size()},
          {"total", r.total},
          {"rhs_budget", r.rhs_budget},
          {"normaliser", r.normaliser_note}};
}

inline json cmd_lemma2(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto g = twist(cfg);
  const auto x = cfg.get_u64("population", "x");
  const auto max_modulus = cfg.get_u64("method", "max_modulus", 50);
  const double factor = cfg.get_double("method", "flag_factor", 10.0);
  const auto& table = ctx.table(std::max(x, max_modulus));
  const auto scan = lemma2_scan(g, x, max_modulus, table, factor);
  CsvTable csv("D,worst_residue,discrepancy,normalized,flagged");
  json flagged = json::array();
  for (const auto& row : scan.rows) {
    csv.row(row.modulus, row.worst_residue, row.discrepancy, row.normalized, row.flagged ? 1 : 0);
  }
  for (const auto d : scan.flagged) flagged.push_back(d);
  out.tables["moduli"] = csv.str();
  json result = {{"spec", g.base().describe()},
                 {"t", g.t()},
                 {"x", x},
                 {"max_modulus", max_modulus},
                 {"flag_factor", factor},
                 {"median_normalized", scan.median_normalized},
                 {"flagged", flagged}};
  result["exceptional_modulus"] = scan.exceptional_modulus ? json(*scan.exceptional_modulus) : json(nullptr);
  if (cfg.has("method", "D")) {
    const auto d = cfg.get_u64("method", "D");
    const auto r = cfg.get_u64("method", "r", 1);
    if (d > table.limit()) fail(ErrorKind::invalid_argument, "D exceeds the factor table limit");
    result["single"] = {{"D", d}, {"r", r}, {"discrepancy", lemma2_discrepancy(g, x, d, r, table)}};
  }
  return result;
}

inline json cmd_lemma3(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto g = twist(cfg);
  const auto x = cfg.get_u64("population", "x");
  const auto a = cfg.get_i64("population", "a", 1);
  const auto y = cfg.get_u64("method", "y", std::max<std::uint64_t>(3, 3 * static_cast<std::uint64_t>(std::llabs(a))));
  const auto w_exp = cfg.get_u64("method", "w_exponent", 3);
  const auto w = cfg.get_u64("method", "w", std::max(y, log_power(x, w_exp)));
  const auto& table = ctx.table(std::max(x, w));
  const auto r = lemma3_compare(g, x, y, w, a, table);
  CsvTable csv("q,product,rhs_re,rhs_im,residual");
  csv.row("none", r.alternative1.product, r.alternative1.rhs.real(), r.alternative1.rhs.imag(),
          r.alternative1.residual);
  for (const auto& row : r.alternative2) csv.row(*row.q, row.product, row.rhs.real(), row.rhs.imag(), row.residual);
  out.tables["alternatives"] = csv.str();
  double best_residual = r.alternative1.residual;
  for (const auto& row : r.alternative2) best_residual = std::min(best_residual, row.residual);
  json result = {{"spec", g.base().describe()},
                 {"t", g.t()},
                 {"x", r.x},
                 {"y", r.y},
                 {"w", r.w},
                 {"a", r.a},
                 {"sieve_primes", r.sieve_primes.size()},
                 {"lhs", complex_json(r.lhs)},
                 {"alternative1_rhs", complex_json(r.alternative1.rhs)},
                 {"alternative1_residual", r.alternative1.residual},
                 {"best_residual", best_residual},
                 {"winner", r.alternative1_wins ? "alternative-1" : "alternative-2"},
                 {"rhs_budget", r.rhs_budget}};
  result["best_q"] = r.best_q ? json(*r.best_q) : json(nullptr);
  return result;
}

inline json series_json(const SeriesTriple& s) {
  return {{"large", s.large}, {"mean", s.mean}, {"square", s.square}};
}

inline json three_series_json(const ThreeSeriesDiagnostic& d) {
  return {{"cutoff", d.cutoff},
          {"sums", series_json(d.sums)},
          {"tail_window", {{"from_exclusive", d.cutoff / 10}, {"to", d.cutoff}}},
          {"tail_increments", series_json(d.tail_increments)},
          {"thresholds", {{"convergent_below", kConvergentIncrement}, {"divergent_above", kDivergentIncrement}}},
          {"verdicts", {to_string(d.verdicts[0]), to_string(d.verdicts[1]), to_string(d.verdicts[2])}},
          {"note", "verdicts are evidence from partial sums, not proofs"}};
}

inline json cmd_three_series(Context& ctx, RunOutput&) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto cutoff = cfg.get_u64("method", "cutoff");
  json result = three_series_json(three_series(spec, cutoff, ctx.table(cutoff)));
  result["spec"] = spec.describe();
  return result;
}

inline json cmd_limit_verdict(Context& ctx, RunOutput& out) {
  auto& cfg = ctx.cfg();
  const auto spec = cfg.function_spec();
  const auto ladder = cfg.get_u64_list("population", "ladder");
  const auto top = *std::max_element(ladder.begin(), ladder.end());
  const auto& table = ctx.table(top);
  const auto v = limit_verdict(spec, ladder, table);
  json steps = json::array();
  for (const auto& s : v.steps) {
    steps.push_back({{"N", s.n}, {"sup_concentration", s.sup_concentration}, {"ks_to_previous", s.ks_to_previous}});
  }
  for (const auto n : ladder) {
    std::ostringstream csv;
    empirical_goldbach_cdf(spec, n, table).write_csv(csv);
    out.tables["cdf_" + std::to_string(n)] = csv.str();
  }
  return {{"spec", spec.describe()},
          {"steps", steps},
          {"series", three_series_json(v.series)},
          {"ks_shrinking", v.ks_shrinking},
          {"concentration_nonincreasing", v.concentration_nonincreasing},
          {"all_convergent", v.all_convergent},
          {"any_divergent", v.any_divergent},
          {"consistent", v.consistent},
          {"note", "evidence only"}};
}

}  // namespace detail

// Runs one command. Errors propagate as shiftconc::Error.
inline RunOutput run(const std::string& command, ExperimentConfig cfg, const RunOptions& options = {}) {
  using Handler = std::function<json(detail::Context&, RunOutput&)>;
  static const std::map<std::string, Handler> handlers = {
      {"sieve", detail::cmd_sieve},
      {"concentration", detail::cmd_concentration},
      {"dispersion", detail::cmd_dispersion},
      {"theorem-ratio", detail::cmd_theorem_ratio},
      {"fejer", detail::cmd_fejer},
      {"eq2", detail::cmd_eq2},
      {"eq4", detail::cmd_eq4},
      {"eq5", detail::cmd_eq5},
      {"goldbach-majorant", detail::cmd_goldbach_majorant},
      {"decompose", detail::cmd_decompose},
      {"lemma1", detail::cmd_lemma1},
      {"lemma2", detail::cmd_lemma2},
      {"lemma3", detail::cmd_lemma3},
      {"three-series", detail::cmd_three_series},
      {"limit-verdict", detail::cmd_limit_verdict},
  };
  const auto it = handlers.find(command);
  if (it == handlers.end()) config_error("unknown command '" + command + "'");
  detail::Context ctx(cfg, options);
  RunOutput out;
  json result = it->second(ctx, out);
  out.report = {{"command", command}, {"version", kVersion}, {"parameters", cfg.resolved()}, {"result", result}};
  return out;
}

// Writes the report to `out` and each table to <stem>.<name>.csv beside it.
inline void write_outputs(const RunOutput& output, const std::filesystem::path& out) {
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  {
    std::ofstream f(out, std::ios::binary);
    if (!f) fail(ErrorKind::invalid_argument, "cannot write " + out.string());
    f << output.report.dump(2) << '\n';
  }
  for (const auto& [name, csv] : output.tables) {
    auto path = out;
    path.replace_extension();
    path += "." + name + ".csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::invalid_argument, "cannot write " + path.string());
    f << csv;
  }
}

}  // namespace shiftconc::app
