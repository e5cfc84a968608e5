#include "jensen/integral_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

void QuadratureSpec::validate(std::size_t k) const {
  if (k == 0) throw InvalidInput("integral needs at least one axis");
  if (mode == Mode::tensor_gauss) {
    if (k > kMaxTensorRank) {
      throw InvalidInput("tensor quadrature is limited to k <= " + std::to_string(kMaxTensorRank) + ", got " +
                         std::to_string(k));
    }
    if (nodes_per_axis == 0) throw InvalidInput("tensor quadrature needs at least one node per axis");
  } else if (sample_count < kMinSamples) {
    throw InvalidInput("Monte Carlo needs at least " + std::to_string(kMinSamples) + " samples");
  }
}

const char* to_string(QuadratureSpec::Mode mode) noexcept {
  return mode == QuadratureSpec::Mode::tensor_gauss ? "tensor_gauss" : "monte_carlo";
}

QuadratureSpec::Mode quadrature_mode_from_string(std::string_view s) {
  if (s == "tensor_gauss" || s == "tensor") return QuadratureSpec::Mode::tensor_gauss;
  if (s == "monte_carlo" || s == "mc") return QuadratureSpec::Mode::monte_carlo;
  throw InvalidInput("unknown quadrature mode '" + std::string(s) + "'");
}

namespace {

constexpr std::uint64_t kSampleBlock = 4096;

struct Estimate {
  double value;
  double std_error;
};

using AxisSet = std::vector<const DensitySpec*>;

AxisSet axes_of(std::span<const DensitySpec> densities) {
  AxisSet out;
  for (const DensitySpec& d : densities) out.push_back(&d);
  return out;
}

void check_setup(std::span<const DensitySpec> densities, const WeightVector& q, const QuadratureSpec& quad) {
  if (densities.empty()) throw InvalidInput("no densities given");
  if (densities.size() != q.size()) {
    throw InvalidInput("q has length " + std::to_string(q.size()) + " but there are " +
                       std::to_string(densities.size()) + " densities");
  }
  for (const DensitySpec& d : densities) {
    if (d.lower() != densities.front().lower() || d.upper() != densities.front().upper()) {
      throw InvalidInput("all densities must share the same interval [a, b]");
    }
  }
  quad.validate(densities.size());
}

// Gauss rule on [a, b] weighted by the density, normalised to unit mass.
QuadratureRule axis_rule(const DensitySpec& d, std::size_t nodes) {
  QuadratureRule rule = gauss_legendre(nodes, d.lower(), d.upper());
  CompensatedSum mass;
  for (std::size_t j = 0; j < nodes; ++j) {
    rule.weights[j] *= d(rule.nodes[j]);
    mass.add(rule.weights[j]);
  }
  const double total = mass.value();
  for (double& w : rule.weights) w /= total;
  return rule;
}

double axis_mean(const DensitySpec& d, const QuadratureSpec& quad) {
  if (quad.mode == QuadratureSpec::Mode::monte_carlo) return d.mean();
  const QuadratureRule rule = axis_rule(d, quad.nodes_per_axis);
  CompensatedSum s;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) s.add(rule.weights[j] * rule.nodes[j]);
  return s.value();
}

std::vector<double> axis_means(std::span<const DensitySpec> densities, const QuadratureSpec& quad) {
  std::vector<double> means;
  for (const DensitySpec& d : densities) means.push_back(axis_mean(d, quad));
  return means;
}

double mix(const WeightVector& q, std::span<const double> values) {
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i) s.add(q[i] * values[i]);
  return s.value();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_interval(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Monte Carlo walk: fixed blocks of samples, each with its own generator
// seeded from (seed, block), merged in block order.
template <class Acc, class Visit>
Acc reduce_samples(const AxisSet& axes, std::span<const double> centers, const WeightVector& q,
                   const QuadratureSpec& quad, Visit&& visit) {
  const std::uint64_t total = quad.sample_count;
  const std::int64_t blocks = static_cast<std::int64_t>((total + kSampleBlock - 1) / kSampleBlock);
  std::vector<Acc> partial(static_cast<std::size_t>(blocks));
  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(blocks));
  const bool parallel = quad.execution == Execution::parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t b = 0; b < blocks; ++b) {
    try {
      std::mt19937_64 rng(splitmix64(quad.seed ^ splitmix64(static_cast<std::uint64_t>(b))));
      const std::uint64_t begin = static_cast<std::uint64_t>(b) * kSampleBlock;
      const std::uint64_t end = std::min(total, begin + kSampleBlock);
      Acc& acc = partial[static_cast<std::size_t>(b)];
      for (std::uint64_t s = begin; s < end; ++s) {
        Term t{0.0, 0.0, 0.0, 1.0, 0.0};
        for (std::size_t i = 0; i < axes.size(); ++i) {
          const double x = axes[i]->quantile(unit_interval(rng));
          t.point += q[i] * x;
          t.deviation += q[i] * (x - centers[i]);
        }
        visit(acc, t);
      }
    } catch (...) {
      failure[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (const auto& e : failure) {
    if (e) std::rethrow_exception(e);
  }
  Acc result = std::move(partial.front());
  for (std::size_t b = 1; b < partial.size(); ++b) result.merge(partial[b]);
  return result;
}

template <class Acc, class Visit>
Acc reduce_measure(const AxisSet& axes, std::span<const double> centers, const WeightVector& q,
                   const QuadratureSpec& quad, Visit&& visit) {
  if (quad.mode == QuadratureSpec::Mode::monte_carlo) return reduce_samples<Acc>(axes, centers, q, quad, visit);
  std::vector<QuadratureRule> rules;
  rules.reserve(axes.size());
  for (const DensitySpec* d : axes) rules.push_back(axis_rule(*d, quad.nodes_per_axis));
  std::vector<Axis> product;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Axis ax{rules[i].nodes, rules[i].weights};
    ax.center = centers[i];
    product.push_back(ax);
  }
  const ProductSpace space(q.entries(), std::move(product));
  return reduce_terms<Acc>(space, quad.execution, visit);
}

template <std::size_t N>
struct MomentAccumulator {
  SumAccumulator<N> sum;
  SumAccumulator<N> square;

  void merge(const MomentAccumulator& other) noexcept {
    sum.merge(other.sum);
    square.merge(other.square);
  }
};

/// Integrates each component of g(term) against the product measure.
template <std::size_t N, class G>
std::array<Estimate, N> integrate_measure(const AxisSet& axes, std::span<const double> centers, const WeightVector& q,
                                          const QuadratureSpec& quad, G&& g) {
  const auto acc = reduce_measure<MomentAccumulator<N>>(axes, centers, q, quad, [&](auto& a, const Term& t) {
    const std::array<double, N> v = g(t);
    for (std::size_t c = 0; c < N; ++c) {
      a.sum[c].add(t.weight * v[c]);
      a.square[c].add(t.weight * v[c] * v[c]);
    }
  });
  std::array<Estimate, N> out{};
  const auto sums = acc.sum.values();
  if (quad.mode == QuadratureSpec::Mode::tensor_gauss) {
    for (std::size_t c = 0; c < N; ++c) out[c] = {sums[c], 0.0};
    return out;
  }
  const auto squares = acc.square.values();
  const double n = static_cast<double>(quad.sample_count);
  for (std::size_t c = 0; c < N; ++c) {
    const double mean = sums[c] / n;
    const double var = std::max(0.0, squares[c] / n - mean * mean) * n / (n - 1.0);
    out[c] = {mean, std::sqrt(var / n)};
  }
  return out;
}

template <class H>
ValueRange range_over_points(const AxisSet& axes, std::span<const double> centers, const WeightVector& q,
                             const QuadratureSpec& quad, H&& h) {
  const auto r = reduce_measure<RangeAccumulator>(axes, centers, q, quad,
                                                  [&](auto& a, const Term& t) { a.add(h(t.point)); });
  return {r.lo, r.hi};
}

std::uint64_t point_count(std::size_t k, const QuadratureSpec& quad) {
  if (quad.mode == QuadratureSpec::Mode::monte_carlo) return quad.sample_count;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < k; ++i) n *= quad.nodes_per_axis;
  return n;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_bracket(double m_tilde, double M_tilde, const ValueRange& range, const char* what) {
  if (!(m_tilde <= M_tilde)) throw HypothesisError("need m~ <= M~");
  if (range.lo < m_tilde || range.hi > M_tilde) {
    throw HypothesisError(std::string(what) + " takes values in [" + describe(range.lo) + ", " + describe(range.hi) +
                          "] at quadrature points, outside [m~, M~]");
  }
}

// Cumulative masses at the grid points.
std::vector<double> cumulative(const DensitySpec& d, const std::vector<double>& grid) {
  std::vector<double> c(grid.size(), 0.0);
  if (d.has_cdf()) {
    for (std::size_t j = 0; j < grid.size(); ++j) c[j] = d.cdf(grid[j]);
    return c;
  }
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const QuadratureRule cell = gauss_legendre(8, grid[j - 1], grid[j]);
    c[j] = c[j - 1] + integrate(cell, [&d](double x) { return d(x); });
  }
  return c;
}

}  // namespace

double integral_mean(std::span<const DensitySpec> densities, const WeightVector& q, const QuadratureSpec& quad) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  return mix(q, means);
}

FunctionalValue jensen_k_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                             const QuadratureSpec& quad) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  const double xbar = mix(q, means);
  const auto [e] = integrate_measure<1>(axes_of(densities), means, q, quad,
                                        [&](const Term& t) { return std::array<double, 1>{f(t.point)}; });
  return FunctionalValue{e.value - f(xbar), point_count(densities.size(), quad), xbar, e.std_error};
}

FunctionalValue chebychev_k_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                                const QuadratureSpec& quad) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  const auto [e] = integrate_measure<1>(axes_of(densities), means, q, quad, [&](const Term& t) {
    return std::array<double, 1>{t.deviation * f(t.point)};
  });
  return FunctionalValue{e.value, point_count(densities.size(), quad), mix(q, means), e.std_error};
}

BoundReport lower_bound_superquadratic_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                           const WeightVector& q, const QuadratureSpec& quad, double tolerance) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  const double xbar = mix(q, means);
  const auto [mixed, spread] = integrate_measure<2>(axes_of(densities), means, q, quad, [&](const Term& t) {
    return std::array<double, 2>{f(t.point), f(std::abs(t.deviation))};
  });
  const double jensen_value = mixed.value - f(xbar);
  return make_report("superquadratic_lower_int", jensen_value, spread.value, tolerance,
                     {{"xbar", xbar},
                      {"jensen", jensen_value},
                      {"lhs_std_error", mixed.std_error},
                      {"rhs_std_error", spread.std_error}});
}

IntegralRatioExtrema ratio_extrema_int(std::span<const DensitySpec> p_densities,
                                       std::span<const DensitySpec> r_densities, std::size_t grid_resolution) {
  if (p_densities.empty() || p_densities.size() != r_densities.size()) {
    throw InvalidInput("p and r densities must have the same (non-zero) count");
  }
  if (grid_resolution == 0) throw InvalidInput("grid resolution must be positive");
  const double a = p_densities.front().lower(), b = p_densities.front().upper();
  for (std::size_t i = 0; i < p_densities.size(); ++i) {
    for (const DensitySpec* d : {&p_densities[i], &r_densities[i]}) {
      if (d->lower() != a || d->upper() != b) throw InvalidInput("all densities must share the same interval [a, b]");
    }
  }
  const std::size_t k = p_densities.size();
  const std::vector<double> grid = uniform_grid(a, b, grid_resolution + 1);
  std::vector<std::vector<double>> P(k), R(k);
  for (std::size_t i = 0; i < k; ++i) {
    P[i] = cumulative(p_densities[i], grid);
    R[i] = cumulative(r_densities[i], grid);
  }

  IntegralRatioExtrema out;
  out.grid_resolution = grid_resolution;
  out.m = std::numeric_limits<double>::infinity();
  out.M = -std::numeric_limits<double>::infinity();
  auto consider = [&](double ratio, double t, double s, bool pointwise) {
    if (ratio < out.m) {
      out.m = ratio;
      out.arg_m = {t, s};
      out.m_pointwise = pointwise;
    }
    if (ratio > out.M) {
      out.M = ratio;
      out.arg_M = {t, s};
      out.M_pointwise = pointwise;
    }
  };

  for (std::size_t lo = 0; lo < grid.size(); ++lo) {
    for (std::size_t hi = lo + 1; hi < grid.size(); ++hi) {
      double ratio = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double den = R[i][hi] - R[i][lo];
        if (!(den > 0.0)) throw InvalidInput("non-positive r mass on a grid interval");
        ratio *= (P[i][hi] - P[i][lo]) / den;
      }
      consider(ratio, grid[lo], grid[hi], false);
    }
  }
  for (double t : grid) {
    double ratio = 1.0;
    bool unbounded = false, degenerate = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double num = p_densities[i](t), den = r_densities[i](t);
      if (den > 0.0) {
        ratio *= num / den;
      } else if (num > 0.0) {
        unbounded = true;
      } else {
        degenerate = true;
      }
    }
    if (degenerate) continue;
    if (unbounded) {
      if (!out.M_unbounded) out.arg_M = {t, t};
      out.M_unbounded = true;
      out.M_pointwise = true;
      continue;
    }
    consider(ratio, t, t, true);
  }
  if (out.M_unbounded) out.M = std::numeric_limits<double>::infinity();
  return out;
}

IntegralSandwichReports sandwich_bounds_int(const FunctionSpec& f, std::span<const DensitySpec> p_densities,
                                            std::span<const DensitySpec> r_densities, const WeightVector& q,
                                            const QuadratureSpec& quad, std::size_t grid_resolution,
                                            double tolerance) {
  check_setup(p_densities, q, quad);
  check_setup(r_densities, q, quad);
  const IntegralRatioExtrema ext = ratio_extrema_int(p_densities, r_densities, grid_resolution);
  const std::size_t k = p_densities.size();
  const std::vector<double> p_means = axis_means(p_densities, quad);
  const std::vector<double> r_means = axis_means(r_densities, quad);
  const double xbar_p = mix(q, p_means), xbar_r = mix(q, r_means);
  std::vector<double> mean_gap(k);
  for (std::size_t i = 0; i < k; ++i) mean_gap[i] = p_means[i] - r_means[i];
  const double shift = std::abs(mix(q, mean_gap));
  const double f_shift = f(shift);

  auto value_of = [&](const AxisSet& axes, std::span<const double> centers) {
    const auto [e] = integrate_measure<1>(axes, centers, q, quad,
                                          [&](const Term& t) { return std::array<double, 1>{f(t.point)}; });
    return e.value;
  };
  const double jp = value_of(axes_of(p_densities), p_means) - f(xbar_p);
  const double jr = value_of(axes_of(r_densities), r_means) - f(xbar_r);

  // prod_i (alpha p_i + beta r_i) = sum over subsets S of beta^|S| alpha^(k-|S|) prod_{S} r prod_{not S} p.
  auto signed_tail = [&](double alpha, double beta, std::span<const double> centers) {
    CompensatedSum total;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      AxisSet axes(k);
      double coeff = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        const bool use_r = (mask >> i) & 1U;
        axes[i] = use_r ? &r_densities[i] : &p_densities[i];
        coeff *= use_r ? beta : alpha;
      }
      if (coeff == 0.0) continue;
      const auto [e] = integrate_measure<1>(axes, centers, q, quad, [&](const Term& t) {
        return std::array<double, 1>{f(std::abs(t.deviation))};
      });
      total.add(coeff * e.value);
    }
    return total.value();
  };

  std::map<std::string, double> ctx{{"m", ext.m},          {"jensen_p", jp},    {"jensen_r", jr},
                                    {"xbar_p", xbar_p},     {"xbar_r", xbar_r}, {"shift", shift},
                                    {"arg_m_t", ext.arg_m.first}, {"arg_m_s", ext.arg_m.second}};
  const double m = ext.m;
  IntegralSandwichReports out{
      make_report("ratio_sandwich_lower_int", jp - m * jr, m * f_shift + signed_tail(1.0, -m, p_means), tolerance, ctx),
      BoundReport{}, ext};
  if (ext.M_unbounded) {
    out.upper = skipped_report("ratio_sandwich_upper_int", "supremum M is unbounded on the search grid", ctx);
  } else {
    const double M = ext.M;
    ctx["M"] = M;
    ctx["arg_M_t"] = ext.arg_M.first;
    ctx["arg_M_s"] = ext.arg_M.second;
    out.upper = make_report("ratio_sandwich_upper_int", M * jr - jp, f_shift + signed_tail(-1.0, M, r_means),
                            tolerance, ctx);
  }
  return out;
}

BoundReport chebychev_magnitude_bound_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                          const WeightVector& q, const QuadratureSpec& quad, double m_tilde,
                                          double M_tilde, double tolerance) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  const AxisSet axes = axes_of(densities);
  check_bracket(m_tilde, M_tilde, range_over_points(axes, means, q, quad, [&](double y) { return f(y); }), "f");
  const auto [abs_dev, cheb] = integrate_measure<2>(axes, means, q, quad, [&](const Term& t) {
    return std::array<double, 2>{std::abs(t.deviation), t.deviation * f(t.point)};
  });
  return make_report("chebychev_magnitude_int", 0.5 * (M_tilde - m_tilde) * abs_dev.value, std::abs(cheb.value),
                     tolerance,
                     {{"chebychev", cheb.value},
                      {"mean_abs_deviation", abs_dev.value},
                      {"m_tilde", m_tilde},
                      {"M_tilde", M_tilde}});
}

BoundReport jensen_upper_via_C_int(const FunctionSpec& f, std::span<const DensitySpec> densities,
                                   const WeightVector& q, const QuadratureSpec& quad, double m_tilde, double M_tilde,
                                   double tolerance) {
  if (!f.has_slope()) throw MissingSlope(f.name() + " has no companion slope C(x)");
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  const double xbar = mix(q, means);
  const AxisSet axes = axes_of(densities);
  check_bracket(m_tilde, M_tilde, range_over_points(axes, means, q, quad, [&](double y) { return f.slope(y); }), "C");
  const auto [mixed, spread, abs_dev] = integrate_measure<3>(axes, means, q, quad, [&](const Term& t) {
    const double d = std::abs(t.deviation);
    return std::array<double, 3>{f(t.point), f(d), d};
  });
  const double jensen_value = mixed.value - f(xbar);
  return make_report("slope_upper_int", 0.5 * (M_tilde - m_tilde) * abs_dev.value - spread.value, jensen_value,
                     tolerance,
                     {{"xbar", xbar},
                      {"jensen", jensen_value},
                      {"mean_abs_deviation", abs_dev.value},
                      {"m_tilde", m_tilde},
                      {"M_tilde", M_tilde}});
}

ValueRange value_range_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                           const QuadratureSpec& quad) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  return range_over_points(axes_of(densities), means, q, quad, [&](double y) { return f(y); });
}

ValueRange slope_range_int(const FunctionSpec& f, std::span<const DensitySpec> densities, const WeightVector& q,
                           const QuadratureSpec& quad) {
  check_setup(densities, q, quad);
  const std::vector<double> means = axis_means(densities, quad);
  return range_over_points(axes_of(densities), means, q, quad, [&](double y) { return f.slope(y); });
}

}  // namespace jensen
