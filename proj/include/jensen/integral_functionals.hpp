#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "jensen/bound_report.hpp"
#include "jensen/density.hpp"
#include "jensen/discrete_bounds.hpp"
#include "jensen/discrete_functionals.hpp"
#include "jensen/function_toolkit.hpp"
#include "jensen/weights.hpp"

namespace jensen {

struct QuadratureSpec {
  enum class Mode { tensor_gauss, monte_carlo };

  Mode mode = Mode::tensor_gauss;
  std::size_t nodes_per_axis = 32;
  std::uint64_t sample_count = 100'000;
  std::uint64_t seed = 1;
  Execution execution = Execution::parallel;

  static constexpr std::size_t kMaxTensorRank = 4;
  static constexpr std::uint64_t kMinSamples = 1000;

  /// Throws InvalidInput when the settings are unusable for a rank-k integral.
  void validate(std::size_t k) const;
};

const char* to_string(QuadratureSpec::Mode mode) noexcept;
QuadratureSpec::Mode quadrature_mode_from_string(std::string_view s);

/// x-bar = sum_i q_i int x p_i(x) dx, by one-dimensional quadrature per axis.
double integral_mean(std::span<const DensitySpec> densities, const WeightVector& q, const QuadratureSpec& quad);

/// int f(sum q_i x_i) prod p_i(x_i) dx_i - f(x-bar).
FunctionalValue jensen_k_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                             const QuadratureSpec& quad);

/// int sum_i q_i (x_i - mean_i) f(sum q_i x_i) prod p_i(x_i) dx_i.
FunctionalValue chebychev_k_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                                const QuadratureSpec& quad);

BoundReport lower_bound_superquadratic_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                           const WeightVector& q, const QuadratureSpec& quad,
                                           double tolerance = kDefaultTolerance);

/// inf / sup over t < s of prod_i (P_i(s) - P_i(t)) / prod_i (R_i(s) - R_i(t))
/// on a uniform grid with `grid_resolution` cells, plus the pointwise limits
/// prod p_i(t) / prod r_i(t) at grid points.
struct IntegralRatioExtrema {
  double m = 0.0;
  double M = 0.0;
  bool M_unbounded = false;
  std::pair<double, double> arg_m{0.0, 0.0};
  std::pair<double, double> arg_M{0.0, 0.0};
  /// The extremum came from a pointwise limit (t, t).
  bool m_pointwise = false;
  bool M_pointwise = false;
  std::size_t grid_resolution = 0;
};

IntegralRatioExtrema ratio_extrema_int(std::span<const DensitySpec> p_densities,
                                       std::span<const DensitySpec> r_densities, std::size_t grid_resolution = 256);

struct IntegralSandwichReports {
  BoundReport lower;
  /// Skipped when the supremum M is unbounded.
  BoundReport upper;
  IntegralRatioExtrema extrema;
};

/// Integral ratio sandwich with the signed product measures
/// prod_i (p_i - m r_i) and prod_i (M r_i - p_i), each expanded into 2^k
/// signed product-measure terms integrated by the base quadrature.
IntegralSandwichReports sandwich_bounds_int(const FunctionSpec& f, std::span<const DensitySpec> p_densities,
                                            std::span<const DensitySpec> r_densities, const WeightVector& q,
                                            const QuadratureSpec& quad, std::size_t grid_resolution = 256,
                                            double tolerance = kDefaultTolerance);

BoundReport chebychev_magnitude_bound_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                          const WeightVector& q, const QuadratureSpec& quad, double m_tilde,
                                          double M_tilde, double tolerance = kDefaultTolerance);

BoundReport jensen_upper_via_C_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                   const WeightVector& q, const QuadratureSpec& quad, double m_tilde, double M_tilde,
                                   double tolerance = kDefaultTolerance);

/// Extrema of f (resp. C) at the points the quadrature visits.
ValueRange value_range_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                           const QuadratureSpec& quad);
ValueRange slope_range_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                           const QuadratureSpec& quad);

}  // namespace jensen
