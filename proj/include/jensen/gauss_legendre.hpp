#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace jensen {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 2n - 1.
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Composite rule: `points` Gauss nodes on each cell between consecutive breaks.
QuadratureRule composite_gauss(const std::vector<double>& breaks, std::size_t points);

double integrate(const QuadratureRule& rule, const std::function<double(double)>& g);

}  // namespace jensen
