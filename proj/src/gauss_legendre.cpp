#include "jensen/gauss_legendre.hpp"

#include <cmath>
#include <numbers>

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidInput("Gauss-Legendre rule needs at least one node");
  if (!(b > a)) throw InvalidInput("Gauss-Legendre interval must have b > a");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(z) and its derivative.
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) /
             static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2) /
             static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss(const std::vector<double>& breaks, std::size_t points) {
  if (breaks.size() < 2) throw InvalidInput("composite rule needs at least one cell");
  QuadratureRule out;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const QuadratureRule cell = gauss_legendre(points, breaks[c], breaks[c + 1]);
    out.nodes.insert(out.nodes.end(), cell.nodes.begin(), cell.nodes.end());
    out.weights.insert(out.weights.end(), cell.weights.begin(), cell.weights.end());
  }
  return out;
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& g) {
  CompensatedSum s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s.add(rule.weights[i] * g(rule.nodes[i]));
  return s.value();
}

}  // namespace jensen
