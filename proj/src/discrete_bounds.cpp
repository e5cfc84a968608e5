#include "jensen/discrete_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

namespace {

template <std::size_t N>
struct SumsAndRange {
  SumAccumulator<N> sums;
  RangeAccumulator range;

  void merge(const SumsAndRange& other) noexcept {
    sums.merge(other.sums);
    range.merge(other.range);
  }
};

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_shapes(const GroupedInstance& inst, std::span<const WeightVector> r_groups) {
  if (r_groups.size() != inst.rank()) throw InvalidInput("r weights have the wrong number of groups");
  for (std::size_t i = 0; i < inst.rank(); ++i) {
    if (r_groups[i].size() != inst.group(i).nodes.size()) {
      throw InvalidInput("r weight group " + std::to_string(i) + " does not match the node count");
    }
  }
}

void check_bracket(double m_tilde, double M_tilde, const RangeAccumulator& range, const char* what) {
  if (!(m_tilde <= M_tilde)) throw HypothesisError("need m~ <= M~");
  if (range.lo < m_tilde || range.hi > M_tilde) {
    throw HypothesisError(std::string(what) + " takes values in [" + describe(range.lo) + ", " + describe(range.hi) +
                          "], outside [m~, M~] = [" + describe(m_tilde) + ", " + describe(M_tilde) + "]");
  }
}

// Three-point test on a uniform grid over [lo, hi].
// Second differences on a 257-point grid over [lo, hi]; only rounding-level
// negativity is forgiven, so a small hull cannot hide curvature.
void require_convex(const FunctionSpec& f, double lo, double hi) {
  if (!(hi > lo)) return;
  const std::vector<double> grid = uniform_grid(lo, hi, 257);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  constexpr double kRounding = 64.0 * std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double noise = kRounding * (std::abs(v[i - 1]) + 2.0 * std::abs(v[i]) + std::abs(v[i + 1]));
    if (v[i - 1] - 2.0 * v[i] + v[i + 1] < -noise) {
      throw HypothesisError(f.name() + " is not convex near " + describe(grid[i]));
    }
  }
}

std::vector<WeightVector> weights_of(const GroupedInstance& inst) {
  std::vector<WeightVector> w;
  w.reserve(inst.rank());
  for (const WeightedGroup& g : inst.groups()) w.push_back(g.weights);
  return w;
}

}  // namespace

BoundReport lower_bound_superquadratic(const FunctionSpec& f, const GroupedInstance& inst, const BoundOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.enumeration.term_cap);
  const double xbar = weighted_mean(inst);
  const auto acc = reduce_terms<SumAccumulator<2>>(space, opts.enumeration.execution, [&](auto& a, const Term& t) {
    a[0].add(t.weight * f(t.point));
    a[1].add(t.weight * f(std::abs(t.deviation)));
  });
  const auto [mixed, spread] = acc.values();
  const double jensen_value = mixed - f(xbar);
  return make_report("superquadratic_lower", jensen_value, spread, opts.tolerance,
                     {{"xbar", xbar}, {"jensen", jensen_value}, {"term_count", double(space.term_count())}});
}

BoundReport lambda_bound(const FunctionSpec& f, const WeightVector& p, std::span<const double> x, double lambda,
                         const BoundOptions& opts) {
  if (p.size() != x.size()) throw InvalidInput("weights and nodes differ in length");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("lambda must lie in [0, 1]");
  CompensatedSum mean;
  for (std::size_t i = 0; i < x.size(); ++i) mean.add(p[i] * x[i]);
  const double xbar = mean.value();
  CompensatedSum pulled, spread;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pulled.add(p[i] * f((1.0 - lambda) * xbar + lambda * x[i]));
    spread.add(p[i] * f(lambda * std::abs(x[i] - xbar)));
  }
  return make_report("lambda_lower", pulled.value() - f(xbar), spread.value(), opts.tolerance,
                     {{"xbar", xbar}, {"lambda", lambda}});
}

BoundReport halved_bound(const FunctionSpec& f, const GroupedInstance& inst, const BoundOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.enumeration.term_cap);
  const double xbar = weighted_mean(inst);
  const double f_xbar = f(xbar);
  auto acc = reduce_terms<SumsAndRange<2>>(space, opts.enumeration.execution, [&](auto& a, const Term& t) {
    const double fy = f(t.point);
    const double fh = f(0.5 * std::abs(t.deviation));
    a.sums[0].add(t.weight * fy);
    a.sums[1].add(t.weight * fh);
    a.range.add(fy);
    a.range.add(fh);
  });
  acc.range.add(f_xbar);
  if (acc.range.lo < 0.0) {
    throw HypothesisError(f.name() + " is negative on the evaluation set (min " + describe(acc.range.lo) + ")");
  }
  const auto [mixed, halved] = acc.sums.values();
  const double jensen_value = mixed - f_xbar;
  return make_report("halved_lower", jensen_value, 2.0 * halved, opts.tolerance,
                     {{"xbar", xbar}, {"jensen", jensen_value}, {"min_f", acc.range.lo}});
}

RatioExtrema ratio_extrema(std::span<const WeightVector> p_groups, std::span<const WeightVector> r_groups) {
  if (p_groups.size() != r_groups.size() || p_groups.empty()) throw InvalidInput("p and r have different shapes");
  RatioExtrema out{1.0, 1.0, {}, {}};
  for (std::size_t i = 0; i < p_groups.size(); ++i) {
    const WeightVector& p = p_groups[i];
    const WeightVector& r = r_groups[i];
    if (p.size() != r.size()) throw InvalidInput("p and r have different shapes");
    std::size_t lo = 0, hi = 0;
    double rlo = p[0] / r[0], rhi = rlo;
    for (std::size_t j = 1; j < p.size(); ++j) {
      const double ratio = p[j] / r[j];
      if (ratio < rlo) {
        rlo = ratio;
        lo = j;
      }
      if (ratio > rhi) {
        rhi = ratio;
        hi = j;
      }
    }
    out.m *= rlo;
    out.M *= rhi;
    out.argmin.push_back(lo);
    out.argmax.push_back(hi);
  }
  return out;
}

RatioExtrema ratio_extrema_enumerated(std::span<const WeightVector> p_groups, std::span<const WeightVector> r_groups,
                                      std::uint64_t cap) {
  if (p_groups.size() != r_groups.size() || p_groups.empty()) throw InvalidInput("p and r have different shapes");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < p_groups.size(); ++i) {
    if (p_groups[i].size() != r_groups[i].size()) throw InvalidInput("p and r have different shapes");
    total *= p_groups[i].size();
    if (total > cap) throw CapExceeded("ratio enumeration exceeds " + std::to_string(cap) + " tuples");
  }
  const std::size_t k = p_groups.size();
  std::vector<std::size_t> index(k, 0);
  RatioExtrema out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}, {}};
  for (std::uint64_t t = 0; t < total; ++t) {
    double ratio = 1.0;
    for (std::size_t i = 0; i < k; ++i) ratio *= p_groups[i][index[i]] / r_groups[i][index[i]];
    if (ratio < out.m) {
      out.m = ratio;
      out.argmin = index;
    }
    if (ratio > out.M) {
      out.M = ratio;
      out.argmax = index;
    }
    for (std::size_t i = k; i-- > 0;) {
      if (++index[i] < p_groups[i].size()) break;
      index[i] = 0;
    }
  }
  return out;
}

SandwichReports sandwich_bounds(const FunctionSpec& f, const GroupedInstance& inst_p,
                                std::span<const WeightVector> r_groups, const BoundOptions& opts) {
  check_shapes(inst_p, r_groups);
  const std::vector<WeightVector> p_groups = weights_of(inst_p);
  const RatioExtrema ext = ratio_extrema(p_groups, r_groups);
  const GroupedInstance inst_r = inst_p.with_weights(r_groups);
  const std::vector<double> r_means = group_means(inst_r);
  const double xbar_p = weighted_mean(inst_p);
  const double xbar_r = weighted_mean(inst_r);

  CompensatedSum shift_sum;
  for (std::size_t i = 0; i < inst_p.rank(); ++i) {
    const WeightedGroup& g = inst_p.group(i);
    CompensatedSum inner;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) inner.add((r_groups[i][j] - g.weights[j]) * g.nodes[j]);
    shift_sum.add(inst_p.outer()[i] * inner.value());
  }
  const double shift = std::abs(shift_sum.value());

  const ProductSpace space = instance_space(inst_p, r_groups, r_means);
  space.require_within(opts.enumeration.term_cap);
  const double m = ext.m, M = ext.M;
  const auto acc = reduce_terms<SumAccumulator<4>>(space, opts.enumeration.execution, [&](auto& a, const Term& t) {
    const double fy = f(t.point);
    a[0].add(t.weight * fy);
    a[1].add(t.alt_weight * fy);
    a[2].add((t.weight - m * t.alt_weight) * f(std::abs(t.deviation)));
    a[3].add((M * t.alt_weight - t.weight) * f(std::abs(t.alt_deviation)));
  });
  const auto [sp, sr, lower_tail, upper_tail] = acc.values();
  const double jp = sp - f(xbar_p);
  const double jr = sr - f(xbar_r);
  const double f_shift = f(shift);

  std::map<std::string, double> ctx{{"m", m},          {"M", M},          {"jensen_p", jp}, {"jensen_r", jr},
                                    {"xbar_p", xbar_p}, {"xbar_r", xbar_r}, {"shift", shift}};
  SandwichReports out{make_report("ratio_sandwich_lower", jp - m * jr, m * f_shift + lower_tail, opts.tolerance, ctx),
                      make_report("ratio_sandwich_upper", M * jr - jp, f_shift + upper_tail, opts.tolerance, ctx),
                      ext};
  return out;
}

SandwichReports convex_sandwich(const FunctionSpec& f, const GroupedInstance& inst_p,
                                std::span<const WeightVector> r_groups, const BoundOptions& opts) {
  check_shapes(inst_p, r_groups);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const WeightedGroup& g : inst_p.groups()) {
    for (double x : g.nodes) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  require_convex(f, lo, hi);

  const RatioExtrema ext = ratio_extrema(weights_of(inst_p), r_groups);
  const GroupedInstance inst_r = inst_p.with_weights(r_groups);
  const double jp = jensen_k(f, inst_p, opts.enumeration).value;
  const double jr = jensen_k(f, inst_r, opts.enumeration).value;
  std::map<std::string, double> ctx{{"m", ext.m}, {"M", ext.M}, {"jensen_p", jp}, {"jensen_r", jr}};
  return SandwichReports{make_report("convex_sandwich_lower", jp, ext.m * jr, opts.tolerance, ctx),
                         make_report("convex_sandwich_upper", ext.M * jr, jp, opts.tolerance, ctx), ext};
}

BoundReport chebychev_magnitude_bound(const FunctionSpec& f, const GroupedInstance& inst, double m_tilde,
                                      double M_tilde, const BoundOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.enumeration.term_cap);
  const auto acc = reduce_terms<SumsAndRange<2>>(space, opts.enumeration.execution, [&](auto& a, const Term& t) {
    const double fy = f(t.point);
    a.sums[0].add(t.weight * std::abs(t.deviation));
    a.sums[1].add(t.weight * t.deviation * fy);
    a.range.add(fy);
  });
  check_bracket(m_tilde, M_tilde, acc.range, "f");
  const auto [mean_abs_dev, cheb] = acc.sums.values();
  return make_report("chebychev_magnitude", 0.5 * (M_tilde - m_tilde) * mean_abs_dev, std::abs(cheb), opts.tolerance,
                     {{"chebychev", cheb},
                      {"mean_abs_deviation", mean_abs_dev},
                      {"m_tilde", m_tilde},
                      {"M_tilde", M_tilde}});
}

SlopeBoundReports jensen_upper_via_C(const FunctionSpec& f, const GroupedInstance& inst, double m_tilde,
                                     double M_tilde, const BoundOptions& opts) {
  if (!f.has_slope()) throw MissingSlope(f.name() + " has no companion slope C(x)");
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.enumeration.term_cap);
  const double xbar = weighted_mean(inst);
  const auto acc = reduce_terms<SumsAndRange<4>>(space, opts.enumeration.execution, [&](auto& a, const Term& t) {
    const double c = f.slope(t.point);
    const double dev = std::abs(t.deviation);
    a.sums[0].add(t.weight * f(t.point));
    a.sums[1].add(t.weight * f(dev));
    a.sums[2].add(t.weight * dev);
    a.sums[3].add(t.weight * t.deviation * c);
    a.range.add(c);
  });
  check_bracket(m_tilde, M_tilde, acc.range, "C");
  const auto [mixed, spread, mean_abs_dev, cheb_c] = acc.sums.values();
  const double jensen_value = mixed - f(xbar);
  std::map<std::string, double> ctx{{"xbar", xbar},
                                    {"jensen", jensen_value},
                                    {"chebychev_C", cheb_c},
                                    {"mean_abs_deviation", mean_abs_dev},
                                    {"m_tilde", m_tilde},
                                    {"M_tilde", M_tilde}};
  return SlopeBoundReports{
      make_report("slope_upper", 0.5 * (M_tilde - m_tilde) * mean_abs_dev - spread, jensen_value, opts.tolerance, ctx),
      make_report("slope_chebychev_upper", cheb_c - spread, jensen_value, opts.tolerance, ctx)};
}

ValueRange value_range(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.term_cap);
  const auto r = reduce_terms<RangeAccumulator>(space, opts.execution,
                                                [&](auto& a, const Term& t) { a.add(f(t.point)); });
  return {r.lo, r.hi};
}

ValueRange slope_range(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.term_cap);
  const auto r = reduce_terms<RangeAccumulator>(space, opts.execution,
                                                [&](auto& a, const Term& t) { a.add(f.slope(t.point)); });
  return {r.lo, r.hi};
}

}  // namespace jensen
