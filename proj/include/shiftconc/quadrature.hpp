#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "shiftconc/error.hpp"

namespace shiftconc {

// n-point Gauss-Legendre rule on [-1, 1]. Nodes come from Newton's method on
// the three-term Legendre recurrence, started at the Tricomi estimate.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendreRule(std::size_t n) : nodes(n), weights(n) {
    require(n >= 1, "Gauss-Legendre rule needs at least one node");
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
      double derivative = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
          const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                            static_cast<double>(k);
          p0 = p1;
          p1 = pk;
        }
        if (n == 1) p0 = 1.0;
        derivative = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / derivative;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      if (n == 1) {
        x = 0.0;
        derivative = 1.0;
      }
      const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
    if (n == 1) weights[0] = 2.0;
  }

  // Integral of f over [a, b].
  template <typename F>
  auto integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    decltype(f(mid)) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

// Composite Simpson rule with an even number of panels.
template <typename F>
auto composite_simpson(F&& f, double a, double b, std::size_t panels) {
  require(panels >= 2 && panels % 2 == 0, "Simpson's rule needs an even panel count >= 2");
  const double step = (b - a) / static_cast<double>(panels);
  auto sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + step * static_cast<double>(i));
  }
  return sum * (step / 3.0);
}

}  // namespace shiftconc
