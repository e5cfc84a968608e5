#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jensen/function_toolkit.hpp"
#include "jensen/product_space.hpp"
#include "jensen/weights.hpp"

namespace jensen {

struct FunctionalValue {
  double value = 0.0;
  std::uint64_t term_count = 0;
  double xbar = 0.0;
  /// Monte Carlo standard error; 0 for exact enumeration and tensor rules.
  double std_error = 0.0;
};

struct EnumerationOptions {
  std::uint64_t term_cap = 10'000'000;
  Execution execution = Execution::parallel;
};

/// sum_j p_ij x_ij for every group.
std::vector<double> group_means(const GroupedInstance& inst);

/// x-bar = sum_i q_i sum_j p_ij x_ij.
double weighted_mean(const GroupedInstance& inst);

/// Product space over the instance, centred on its group means. When `alt`
/// is non-empty it supplies a second weight system (same shape) with its own
/// centres. The space refers into `inst` and `alt`; keep them alive.
ProductSpace instance_space(const GroupedInstance& inst, std::span<const WeightVector> alt = {},
                            std::span<const double> alt_means = {});

FunctionalValue jensen(const FunctionSpec& f, const WeightVector& p, std::span<const double> x);
FunctionalValue chebychev(const FunctionSpec& f, const WeightVector& p, std::span<const double> x);

/// sum over index tuples of prod p_{i j_i} f(sum_i q_i x_{i j_i}) - f(x-bar).
FunctionalValue jensen_k(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts = {});

/// sum over index tuples of prod p_{i j_i} [sum_i q_i (x_{i j_i} - mean_i)] f(sum_i q_i x_{i j_i}).
FunctionalValue chebychev_k(const FunctionSpec& f, const GroupedInstance& inst,
                            const EnumerationOptions& opts = {});

}  // namespace jensen
