#pragma once

#include <cmath>
#include <cstddef>

namespace shiftconc {

struct ScalarMinimum {
  double argument = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};

// Golden-section search on [lo, hi] until the bracket is narrower than tol.
// Returns the best point evaluated, bracket ends included, so the result
// never loses to the endpoints even when f is not unimodal.
template <typename F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol, std::size_t max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMinimum best{lo, f(lo), 1};
  auto consider = [&](double x, double fx) {
    if (fx < best.value) {
      best.argument = x;
      best.value = fx;
    }
  };
  consider(hi, f(hi));
  ++best.evaluations;

  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  best.evaluations += 2;
  consider(c, fc);
  consider(d, fd);
  for (std::size_t i = 0; i < max_iterations && (hi - lo) > tol; ++i) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
      consider(c, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
      consider(d, fd);
    }
    ++best.evaluations;
  }
  return best;
}

}  // namespace shiftconc
