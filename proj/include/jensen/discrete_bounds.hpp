#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jensen/bound_report.hpp"
#include "jensen/discrete_functionals.hpp"

namespace jensen {

struct BoundOptions {
  double tolerance = kDefaultTolerance;
  EnumerationOptions enumeration{};
};

/// J_k >= sum prod p f(|sum q x - x-bar|).
BoundReport lower_bound_superquadratic(const FunctionSpec& f, const GroupedInstance& inst,
                                       const BoundOptions& opts = {});

/// sum p f((1-lambda) x-bar + lambda x_i) - f(x-bar) >= sum p f(lambda |x_i - x-bar|), lambda in [0,1].
BoundReport lambda_bound(const FunctionSpec& f, const WeightVector& p, std::span<const double> x, double lambda,
                         const BoundOptions& opts = {});

/// J_k >= 2 sum prod p f(|sum q x - x-bar| / 2). Needs f >= 0 on the evaluation set.
BoundReport halved_bound(const FunctionSpec& f, const GroupedInstance& inst, const BoundOptions& opts = {});

/// Extrema of prod_i p_{i j_i} / r_{i j_i} over all index tuples.
struct RatioExtrema {
  double m = 0.0;
  double M = 0.0;
  std::vector<std::size_t> argmin;
  std::vector<std::size_t> argmax;
};

/// Product of per-group extrema.
RatioExtrema ratio_extrema(std::span<const WeightVector> p_groups, std::span<const WeightVector> r_groups);

/// Brute-force over every tuple; refuses more than `cap` tuples.
RatioExtrema ratio_extrema_enumerated(std::span<const WeightVector> p_groups, std::span<const WeightVector> r_groups,
                                      std::uint64_t cap = 100'000);

struct SandwichReports {
  BoundReport lower;
  BoundReport upper;
  RatioExtrema extrema;
};

/// Superquadratic sandwich:
///   J(p) - m J(r) >= m f(|shift|) + sum (prod p - m prod r) f(|y - x-bar_p|)
///   M J(r) - J(p) >= f(|shift|) + sum (M prod r - prod p) f(|y - x-bar_r|)
/// with shift = sum_i q_i sum_j (r_ij - p_ij) x_ij. Identical groups or k = 1
/// give the classical special cases; there is no separate code path for them.
SandwichReports sandwich_bounds(const FunctionSpec& f, const GroupedInstance& inst_p,
                                std::span<const WeightVector> r_groups, const BoundOptions& opts = {});

/// m J(r) <= J(p) <= M J(r) for convex f (convexity checked on the node hull).
SandwichReports convex_sandwich(const FunctionSpec& f, const GroupedInstance& inst_p,
                                std::span<const WeightVector> r_groups, const BoundOptions& opts = {});

/// (M~ - m~)/2 sum prod p |y - x-bar| >= |T_k(f)| given m~ <= f(y) <= M~ at every tuple.
BoundReport chebychev_magnitude_bound(const FunctionSpec& f, const GroupedInstance& inst, double m_tilde,
                                      double M_tilde, const BoundOptions& opts = {});

struct SlopeBoundReports {
  /// sum prod p [(M~ - m~)/2 |y - x-bar| - f(|y - x-bar|)] >= J_k.
  BoundReport upper;
  /// T_k(C) - sum prod p f(|y - x-bar|) >= J_k.
  BoundReport via_chebychev;
};

/// Upper bound on J_k from a bracket m~ <= C(y) <= M~ of the companion slope.
SlopeBoundReports jensen_upper_via_C(const FunctionSpec& f, const GroupedInstance& inst, double m_tilde,
                                     double M_tilde, const BoundOptions& opts = {});

struct ValueRange {
  double lo;
  double hi;
};

/// Exact extrema of f(sum_i q_i x_{i j_i}) over all tuples.
ValueRange value_range(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts = {});
/// Same for C.
ValueRange slope_range(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts = {});

}  // namespace jensen
