#include "jensen/discrete_functionals.hpp"

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

std::vector<double> group_means(const GroupedInstance& inst) {
  std::vector<double> means;
  means.reserve(inst.rank());
  for (const WeightedGroup& g : inst.groups()) {
    CompensatedSum s;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) s.add(g.weights[j] * g.nodes[j]);
    means.push_back(s.value());
  }
  return means;
}

double weighted_mean(const GroupedInstance& inst) {
  const std::vector<double> means = group_means(inst);
  CompensatedSum s;
  for (std::size_t i = 0; i < means.size(); ++i) s.add(inst.outer()[i] * means[i]);
  return s.value();
}

ProductSpace instance_space(const GroupedInstance& inst, std::span<const WeightVector> alt,
                            std::span<const double> alt_means) {
  if (!alt.empty() && alt.size() != inst.rank()) throw InvalidInput("alternative weights do not match the rank");
  if (!alt.empty() && alt_means.size() != inst.rank()) throw InvalidInput("alternative centres do not match the rank");
  const std::vector<double> means = group_means(inst);
  std::vector<Axis> axes;
  axes.reserve(inst.rank());
  for (std::size_t i = 0; i < inst.rank(); ++i) {
    const WeightedGroup& g = inst.group(i);
    Axis ax{g.nodes, g.weights.entries()};
    ax.center = means[i];
    if (!alt.empty()) {
      if (alt[i].size() != g.nodes.size()) throw InvalidInput("alternative weight group has the wrong length");
      ax.alt_weights = alt[i].entries();
      ax.alt_center = alt_means[i];
    }
    axes.push_back(ax);
  }
  return ProductSpace(inst.outer().entries(), std::move(axes));
}

FunctionalValue jensen(const FunctionSpec& f, const WeightVector& p, std::span<const double> x) {
  if (p.size() != x.size()) throw InvalidInput("weights and nodes differ in length");
  CompensatedSum mean, mixed;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean.add(p[i] * x[i]);
    mixed.add(p[i] * f(x[i]));
  }
  const double xbar = mean.value();
  return FunctionalValue{mixed.value() - f(xbar), x.size(), xbar};
}

FunctionalValue chebychev(const FunctionSpec& f, const WeightVector& p, std::span<const double> x) {
  if (p.size() != x.size()) throw InvalidInput("weights and nodes differ in length");
  CompensatedSum mean;
  for (std::size_t i = 0; i < x.size(); ++i) mean.add(p[i] * x[i]);
  const double xbar = mean.value();
  CompensatedSum t;
  for (std::size_t i = 0; i < x.size(); ++i) t.add(p[i] * (x[i] - xbar) * f(x[i]));
  return FunctionalValue{t.value(), x.size(), xbar};
}

FunctionalValue jensen_k(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.term_cap);
  const double xbar = weighted_mean(inst);
  const auto acc = reduce_terms<SumAccumulator<1>>(space, opts.execution, [&](auto& a, const Term& t) {
    a[0].add(t.weight * f(t.point));
  });
  return FunctionalValue{acc.parts[0].value() - f(xbar), space.term_count(), xbar};
}

FunctionalValue chebychev_k(const FunctionSpec& f, const GroupedInstance& inst, const EnumerationOptions& opts) {
  const ProductSpace space = instance_space(inst);
  space.require_within(opts.term_cap);
  const auto acc = reduce_terms<SumAccumulator<1>>(space, opts.execution, [&](auto& a, const Term& t) {
    a[0].add(t.weight * t.deviation * f(t.point));
  });
  return FunctionalValue{acc.parts[0].value(), space.term_count(), weighted_mean(inst)};
}

}  // namespace jensen
