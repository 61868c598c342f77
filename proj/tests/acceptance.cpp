// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: shiftconc_acceptance [cache-dir]

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "shiftconc/app/runner.hpp"
#include "shiftconc/shiftconc.hpp"

using namespace shiftconc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 10) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

const FactorTable* g_table = nullptr;
const FactorTable& table() { return *g_table; }

std::vector<AdditiveFunctionSpec> suite() {
  return {specs::zero(), specs::omega(), specs::big_omega(), specs::log_prime(), specs::residue_indicator(4, 1)};
}

// ---------------------------------------------------------------- criterion 1

double naive_frequency(const std::vector<double>& values, std::uint64_t denominator, double h) {
  std::uint64_t c = 0;
  for (const double v : values) c += oracle::in_window(v, h);
  return static_cast<double>(c) / static_cast<double>(denominator);
}

Outcome criterion1() {
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    const auto f = factorize(n, table());
    if (f.product() != n || f.factors != oracle::trial_factor(n)) return {false, "factorize mismatch at " + std::to_string(n)};
  }
  const std::vector<AdditiveFunctionSpec> pool = {specs::omega(), specs::big_omega(), specs::log_prime(),
                                                  specs::residue_indicator(4, 1), specs::reciprocal(), specs::zero()};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> hs(-1.5, 8.0);
  const std::array<std::int64_t, 3> shifts = {1, -1, 2};
  for (int probe = 0; probe < 50; ++probe) {
    const auto& s = pool[probe % pool.size()];
    double h = hs(rng);
    if (probe % 3 == 0) h = std::floor(h);
    const std::uint64_t x = 10000;
    const std::int64_t a = shifts[probe % 3];
    const std::uint64_t big_n = 10000 + probe;

    std::vector<double> ints, shifted, goldbach;
    std::uint64_t pi_x = 0, pi_n = 0;
    for (std::uint64_t n = 1; n <= x; ++n) ints.push_back(oracle::f(s, n));
    for (std::uint64_t p = 2; p <= x; ++p) {
      if (!oracle::is_prime(p)) continue;
      ++pi_x;
      const auto m = static_cast<std::int64_t>(p) + a;
      if (m >= 1) shifted.push_back(oracle::f(s, static_cast<std::uint64_t>(m)));
    }
    for (std::uint64_t p = 2; p < big_n; ++p) {
      if (!oracle::is_prime(p)) continue;
      ++pi_n;
      goldbach.push_back(oracle::f(s, big_n - p));
    }
    const double c = concentration_integers(s, x, h, table());
    const double q = concentration_shifted(s, x, a, h, table());
    const double g = concentration_goldbach(s, big_n, h, table());
    if (c != naive_frequency(ints, x, h) || q != naive_frequency(shifted, pi_x, h) ||
        g != naive_frequency(goldbach, pi_n, h)) {
      return {false, "probe " + std::to_string(probe) + " (" + s.describe() + ", h=" + fmt(h) + ") mismatch"};
    }
  }
  return {true, "10^5 factorizations, 50 probes of C_h/Q_h/S_h equal naive loops"};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2() {
  std::uint64_t evaluations = 0, violations = 0;
  double min_slack = 1e300;
  std::mt19937_64 rng(2);
  for (const auto& s : suite()) {
    for (const std::uint64_t x : {1000u, 10000u}) {
      for (const std::int64_t a : {1, -1, 2}) {
        auto sample = population_sample(s, Population::shifted(x, a), table());
        std::sort(sample.values.begin(), sample.values.end());
        sample.values.erase(std::unique(sample.values.begin(), sample.values.end()), sample.values.end());
        const double lo = sample.values.front() - 1.5, hi = sample.values.back() + 0.5;
        std::uniform_real_distribution<double> u(lo, hi);
        for (int i = 0; i < 50; ++i) {
          // Alternate attained windows (v - 1 puts v at the right edge) with random h.
          const double h = i % 2 == 0 ? sample.values[(i / 2 * 7919) % sample.values.size()] - 1.0 : u(rng);
          const auto e = fejer_majorant_Q(s, x, a, h, table());
          ++evaluations;
          violations += e.majorant < e.q_h;
          min_slack = std::min(min_slack, e.majorant - e.q_h);
        }
      }
    }
  }
  double worst_kernel = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = -20.0 + 40.0 * i / 999.0;
    worst_kernel = std::max(worst_kernel, std::abs(fejer_kernel(u) - fejer_kernel_quadrature(u)));
  }
  const bool pass = violations == 0 && worst_kernel <= 1e-8;
  return {pass, std::to_string(evaluations) + " majorant evaluations, " + std::to_string(violations) +
                    " violations, min slack " + fmt(min_slack, 6) + "; kernel vs quadrature max diff " +
                    fmt(worst_kernel, 3)};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion3() {
  double best = 2.0, at = 0.0;
  const int points = 100000;
  for (int i = 0; i < points; ++i) {
    const double u = -1.0 + 2.0 * i / (points - 1);
    const double k = fejer_kernel(u);
    if (k < best) {
      best = k;
      at = u;
    }
  }
  const double at_one = fejer_kernel_quadrature(1.0).real();
  const double simpson = oracle::fejer_simpson(1.0);
  const bool pass = best >= 1.0 / 3.0 && std::abs(best - at_one) < 1e-8 && std::abs(best - simpson) < 1e-8 &&
                    std::abs(std::abs(at) - 1.0) < 1e-12;
  return {pass, "scan min " + fmt(best, 16) + " at u=" + fmt(at, 3) + "; quadrature K(1)=" + fmt(at_one, 16) +
                    ", Simpson K(1)=" + fmt(simpson, 16)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::size_t checked = 0;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t w = std::uniform_int_distribution<std::uint64_t>(3, 30)(rng);
    const std::uint64_t z = std::uniform_int_distribution<std::uint64_t>(w, 300)(rng);
    const auto weights = build_selberg_weights(w, z, table());
    if (weights.weights.front().d != 1 || weights.lambda(1) != 1.0) return {false, "lambda_1 != 1"};
    for (const auto& e : weights.weights) {
      if (std::abs(e.lambda) > 1.0) return {false, "|lambda_d| > 1 at d=" + std::to_string(e.d)};
    }
    for (std::uint64_t n = 1; n <= 100000; ++n) {
      bool coprime = true;
      for (const auto p : weights.r_primes) coprime = coprime && n % p != 0;
      if (!coprime) continue;
      ++checked;
      if (square_majorant(n, weights, table()) != 1.0) {
        return {false, "square != 1 at n=" + std::to_string(n) + " w=" + std::to_string(w) + " z=" + std::to_string(z)};
      }
    }
  }
  const auto r = expanded_bound_eq2(specs::omega(), 10000, 1, 3, 100, 0.7, table());
  const double diff = std::abs(r.expansion - r.direct);
  const bool pass = diff <= 1e-9 * std::max(1.0, std::abs(r.direct));
  return {pass, "20 random (w,z), " + std::to_string(checked) + " coprime n checked; interchange diff " + fmt(diff, 3) +
                    " at x=10^4 (" + std::to_string(r.weight_count) + " weights)"};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  std::mt19937_64 rng(5);
  const std::vector<AdditiveFunctionSpec> pool = {specs::omega(), specs::big_omega(), specs::log_prime(),
                                                  specs::residue_indicator(4, 1), specs::reciprocal()};
  double worst = 0.0, h_max = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double t = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
    const auto g = exp_twist(pool[i % pool.size()], t);
    const auto d = decompose(g, 100000, 0.5, table());
    if (d.h_prime_max != 0.0) return {false, "h(p) != 0"};
    for (std::uint64_t n = 1; n <= d.x; ++n) {
      std::complex<double> s = 0.0;
      for (std::uint64_t e = 1; e * e <= n; ++e) {
        if (n % e != 0) continue;
        s += d.h_values[e] * d.g1_values[n / e];
        if (e * e != n) s += d.h_values[n / e] * d.g1_values[e];
      }
      worst = std::max(worst, std::abs(s - d.g_values[n]));
    }
    for (const auto p : table().primes()) {
      if (static_cast<std::uint64_t>(p) * p > 1'000'000) break;
      unsigned k = 1;
      for (std::uint64_t pk = p; pk <= 1'000'000 / p; pk *= p) ++k;
      const auto series = h_prime_power_series(g, p, k);
      if (series[1] != std::complex<double>(0.0, 0.0)) return {false, "h(p) != 0 at p=" + std::to_string(p)};
      for (unsigned j = 2; j <= k; ++j) h_max = std::max(h_max, std::abs(series[j]));
    }
  }
  const bool pass = worst <= 1e-9 && h_max <= std::exp(1.0);
  return {pass, "10 twists: convolution max error " + fmt(worst, 3) + ", max |h(p^k)| " + fmt(h_max, 6)};
}

// ---------------------------------------------------------------- criterion 6

// Regression pins from the first measurement.
constexpr double kChiNormalizedD3 = 0.66667;
constexpr double kOmegaMedianNormalized = 0.000134907779912;

Outcome criterion6() {
  const std::uint64_t x = 100000;
  const double lx = std::log(static_cast<double>(x));
  const auto chi = exp_twist(specs::residue_indicator(3, 2, AdditiveKind::completely_additive), std::numbers::pi);
  const double d3 = lemma2_discrepancy(chi, x, 3, 1, table());
  const double threshold = 0.3 * static_cast<double>(x) / 2.0 / lx;
  const double chi_normalized = d3 * 2.0 / static_cast<double>(x);

  const auto scan = lemma2_scan(exp_twist(specs::omega(), 0.1), x, 50, table());
  std::vector<double> kept;
  for (const auto& row : scan.rows) {
    bool excluded = false;
    for (const auto d0 : scan.flagged) excluded = excluded || (d0 > 1 && row.modulus % d0 == 0);
    if (!excluded && row.modulus > 1) kept.push_back(row.normalized);
  }
  const double med = shiftconc::median(kept);
  const bool pinned = std::abs(chi_normalized - kChiNormalizedD3) < 1e-9 && std::abs(med - kOmegaMedianNormalized) < 1e-12;
  const bool pass = d3 > threshold && 10.0 * med <= chi_normalized && pinned;
  return {pass, "chi mod 3: D=3 discrepancy " + fmt(d3) + " > " + fmt(threshold) + " (normalized " +
                    fmt(chi_normalized, 12) + "); exp(0.1 i omega) median normalized over " +
                    std::to_string(kept.size()) + " moduli " + fmt(med, 12) + ", flagged " +
                    std::to_string(scan.flagged.size())};
}

// ---------------------------------------------------------------- criteria 7, 8

// sup * sqrt(functional) per suite member, pinned from the first measurement.
constexpr std::array<std::array<double, 2>, 5> kPinnedQ = {{
    {2.0, 2.0},
    {1.1530337578292418, 0.86712678540185617},
    {0.57289098659440318, 0.55247256946365275},
    {1.3031541240278255, 1.3408712414783319},
    {1.0367619761833324, 1.0161095711858936},
}};
constexpr std::array<std::array<double, 3>, 5> kPinnedS = {{
    {2.0, 2.0, 2.0},
    {1.1711112615725576, 1.0026447119436868, 0.86031117061613882},
    {0.55292404764648617, 0.57492500395925283, 0.55072497592883329},
    {1.4918731766147022, 1.4747535615481511, 1.4654201448344335},
    {1.0635109487736363, 1.0423925167553558, 1.0111000375973167},
}};

bool matches_pin(double measured, double pinned) {
  return std::abs(measured - pinned) <= 1e-9 * std::max(1.0, std::abs(pinned));
}

Outcome criterion7() {
  const auto s = suite();
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double small = theorem_ratio(s[i], Population::shifted(10000, 1), table()).ratio;
    const double large = theorem_ratio(s[i], Population::shifted(1000000, 1), table()).ratio;
    const bool ok = large <= 2.0 * small && matches_pin(small, kPinnedQ[i][0]) && matches_pin(large, kPinnedQ[i][1]);
    pass = pass && ok;
    detail += (i ? "; " : "") + s[i].describe() + " " + fmt(small, 17) + " -> " + fmt(large, 17);
  }
  return {pass, detail};
}

Outcome criterion8() {
  const auto s = suite();
  const std::array<std::uint64_t, 3> ladder = {10001, 100003, 1000003};
  bool pass = true;
  std::string detail;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::array<double, 3> r{};
    for (std::size_t j = 0; j < 3; ++j) r[j] = theorem_ratio(s[i], Population::goldbach(ladder[j]), table()).ratio;
    bool ok = true;
    for (std::size_t j = 0; j < 3; ++j) ok = ok && matches_pin(r[j], kPinnedS[i][j]);
    ok = ok && r[1] <= 2.0 * r[0] && r[2] <= 2.0 * r[0];
    pass = pass && ok;
    detail += (i ? "; " : "") + s[i].describe() + " " + fmt(r[0], 17) + " -> " + fmt(r[1], 17) + " -> " + fmt(r[2], 17);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- criterion 9

double grid_value(const AdditiveFunctionSpec& s, std::uint64_t bound_arg, std::uint64_t upto, std::uint64_t coprime_to) {
  std::vector<std::uint64_t> primes;
  std::vector<double> fp;
  for (const auto p : oracle::primes_upto(upto)) {
    if (coprime_to > 1 && (coprime_to % p == 0 || p >= coprime_to)) continue;
    primes.push_back(p);
    fp.push_back(s.prime_value(p));
  }
  const double b = std::log(static_cast<double>(bound_arg));
  return 4.0 + oracle::dense_grid_min(fp, primes, b * b, 1e-4);
}

Outcome criterion9() {
  const std::uint64_t x = 10000, n = 10001;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::map<AdditiveFunctionSpec::Key, double> entries;
    // Mix of a linear-in-log part (so lambda* is away from 0) and noise.
    const double slope = val(rng) / 3.0;
    for (const auto p : table().primes()) {
      if (p > n) break;
      entries[{p, 1}] = slope * std::log(static_cast<double>(p)) + (i % 2 ? val(rng) : 0.1 * val(rng));
    }
    const AdditiveFunctionSpec s(AdditiveKind::strongly_additive, {PrimeRuleKind::custom}, entries);
    worst = std::max(worst, std::abs(dispersion_W(s, x, table()).value - grid_value(s, x, x, 1)));
    worst = std::max(worst, std::abs(dispersion_Y(s, n, table()).value - grid_value(s, n, n, n)));
  }
  const double w0 = dispersion_W(specs::zero(), x, table()).value;
  const double y0 = dispersion_Y(specs::zero(), n, table()).value;
  const bool pass = worst <= 1e-6 && w0 == 4.0 && y0 == 4.0;
  return {pass, "20 random specs, W at x=10^4 and Y at N=10^4+1: max |minimizer - grid| " + fmt(worst, 3) +
                    "; zero spec gives W=" + fmt(w0) + ", Y=" + fmt(y0)};
}

// ---------------------------------------------------------------- criterion 10

Outcome criterion10() {
  const std::vector<std::uint64_t> ladder = {1000, 10000, 100000};
  const auto r = limit_verdict(specs::reciprocal(), ladder, table());
  const auto w = limit_verdict(specs::omega(), ladder, table());
  const bool ok_r = r.ks_shrinking && r.all_convergent;
  const bool ok_w = w.concentration_nonincreasing;
  const bool ok_s2 = w.series.verdicts[1] == SeriesVerdict::divergent_evidence;
  std::string detail = "1/p KS " + fmt(r.steps[1].ks_to_previous, 6) + " -> " + fmt(r.steps[2].ks_to_previous, 6) +
                       " (" + (r.ks_shrinking ? "shrinking" : "not shrinking") + "), verdicts " +
                       to_string(r.series.verdicts[0]) + "/" + to_string(r.series.verdicts[1]) + "/" +
                       to_string(r.series.verdicts[2]) + "; omega sup S_h";
  for (const auto& s : w.steps) detail += " " + fmt(s.sup_concentration, 6);
  detail += std::string(ok_w ? "" : " (rises at the first step)") + ", s2 " + to_string(w.series.verdicts[1]);
  return {ok_r && ok_w && ok_s2, detail};
}

// ---------------------------------------------------------------- criterion 11

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHIFTCONC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion11(const fs::path& work, const fs::path& cache) {
  const std::map<std::string, std::string> extra = {
      {"concentration", "h_points = 41\nh_min = -1\nh_max = 6\nprobes = 20\n"},
      {"dispersion", "keep_samples = true\n"},
      {"fejer", "h_points = 9\nh_min = -1\nh_max = 3\n"},
      {"decompose", "write_tables = true\n"},
      {"lemma2", "max_modulus = 30\n"},
      {"three-series", "cutoff = 100000\n"},
  };
  fs::remove_all(work);
  fs::create_directories(work);
  std::size_t files = 0;
  for (const auto& c : app::command_names()) {
    std::string text = "[function]\nrule = omega\nt = 0.7\n[population]\nx = 20000\nN = 20001\nladder = 2001,20001\n";
    if (auto it = extra.find(c); it != extra.end()) text += "[method]\n" + it->second;
    const auto cfg = work / (c + ".ini");
    std::ofstream(cfg) << text;
    for (const int threads : {1, 8}) {
      const auto out = work / ("t" + std::to_string(threads)) / (c + ".json");
      const int code = run_cli(c + " --config " + cfg.string() + " --threads " + std::to_string(threads) +
                               " --cache-dir " + cache.string() + " --out " + out.string());
      if (code != 0) return {false, c + " exited with " + std::to_string(code)};
    }
  }
  for (const auto& entry : fs::directory_iterator(work / "t1")) {
    const auto other = work / "t8" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      return {false, entry.path().filename().string() + " differs between --threads 1 and 8"};
    }
    ++files;
  }
  std::size_t files8 = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(work / "t8")) ++files8;
  return {files == files8, std::to_string(app::command_names().size()) + " commands, " + std::to_string(files) +
                               " report files byte-identical across --threads 1 and 8"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path cache = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "shiftconc_acceptance_cache";
  const fs::path work = cache.parent_path() / "acceptance_reports";
  std::ostringstream cache_log;
  const auto cached = cache_management(cache, 1'000'010, {}, &cache_log);
  g_table = &cached.table;
  std::cout << "factor table limit " << cached.table.limit() << " (" << to_string(cached.status) << ")\n";

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 oracle equivalence", criterion1},
      {"2 Fejer majorization", criterion2},
      {"3 kernel lower bound", criterion3},
      {"4 Selberg properties", criterion4},
      {"5 decomposition exactness", criterion5},
      {"6 progression counterexample", criterion6},
      {"7 shifted-prime ratio stability", criterion7},
      {"8 Goldbach ratio stability", criterion8},
      {"9 dispersion minimizer", criterion9},
      {"10 distribution lab", criterion10},
      {"11 determinism", [&] { return criterion11(work, cache); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  [" << std::fixed << std::setprecision(1)
              << secs << " s]  " << std::defaultfloat << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
