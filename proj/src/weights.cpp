#include "jensen/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

WeightVector::WeightVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInput("weight vector is empty");
  for (double w : entries_) {
    if (!std::isfinite(w) || !(w > 0.0)) throw InvalidInput("weights must be strictly positive and finite");
  }
  const double total = compensated_sum(entries_);
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw InvalidInput("weights sum to " + std::to_string(total) + ", not 1");
  }
  // Already-normalised input stays bit-exact so serialised instances round-trip.
  const double rounding = 4.0 * static_cast<double>(entries_.size()) * std::numeric_limits<double>::epsilon();
  if (std::abs(total - 1.0) > rounding) {
    for (double& w : entries_) w /= total;
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("weight vector is empty");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

GroupedInstance::GroupedInstance(std::vector<WeightedGroup> groups, WeightVector outer)
    : groups_(std::move(groups)), outer_(std::move(outer)) {
  if (groups_.empty()) throw InvalidInput("instance needs at least one group");
  if (outer_.size() != groups_.size()) {
    throw InvalidInput("outer weights have length " + std::to_string(outer_.size()) + " but there are " +
                       std::to_string(groups_.size()) + " groups");
  }
  for (const WeightedGroup& g : groups_) {
    if (g.nodes.size() != g.weights.size()) throw InvalidInput("group weights and nodes differ in length");
    for (double x : g.nodes) {
      if (!std::isfinite(x) || x < 0.0) throw InvalidInput("nodes must be finite and nonnegative");
    }
  }
}

GroupedInstance GroupedInstance::single(WeightVector weights, std::vector<double> nodes) {
  std::vector<WeightedGroup> groups;
  groups.push_back(WeightedGroup{std::move(weights), std::move(nodes)});
  return GroupedInstance(std::move(groups), WeightVector({1.0}));
}

std::uint64_t GroupedInstance::term_count() const noexcept {
  std::uint64_t total = 1;
  for (const WeightedGroup& g : groups_) {
    const std::uint64_t n = g.nodes.size();
    if (total > std::numeric_limits<std::uint64_t>::max() / n) return std::numeric_limits<std::uint64_t>::max();
    total *= n;
  }
  return total;
}

double GroupedInstance::max_node() const noexcept {
  double m = 0.0;
  for (const WeightedGroup& g : groups_) {
    for (double x : g.nodes) m = std::max(m, x);
  }
  return m;
}

GroupedInstance GroupedInstance::with_weights(std::span<const WeightVector> weights) const {
  if (weights.size() != groups_.size()) throw InvalidInput("weight groups do not match the instance rank");
  std::vector<WeightedGroup> out;
  out.reserve(groups_.size());
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (weights[i].size() != groups_[i].nodes.size()) {
      throw InvalidInput("weight group " + std::to_string(i) + " does not match the node count");
    }
    out.push_back(WeightedGroup{weights[i], groups_[i].nodes});
  }
  return GroupedInstance(std::move(out), outer_);
}

}  // namespace jensen
