#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace jensen {

/// Strictly positive weights summing to 1. Inputs within 1e-12 of the simplex
/// are renormalised; anything further off is rejected.
class WeightVector {
 public:
  static constexpr double kSimplexTolerance = 1e-12;

  explicit WeightVector(std::vector<double> entries);

  std::span<const double> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }

  /// (1/n, ..., 1/n).
  static WeightVector uniform(std::size_t n);

 private:
  std::vector<double> entries_;
};

struct WeightedGroup {
  WeightVector weights;
  std::vector<double> nodes;
};

/// k groups (p_i, x_i) mixed by outer weights q.
class GroupedInstance {
 public:
  GroupedInstance(std::vector<WeightedGroup> groups, WeightVector outer);

  /// k = 1, q = (1).
  static GroupedInstance single(WeightVector weights, std::vector<double> nodes);

  std::size_t rank() const noexcept { return groups_.size(); }
  const std::vector<WeightedGroup>& groups() const noexcept { return groups_; }
  const WeightedGroup& group(std::size_t i) const noexcept { return groups_[i]; }
  const WeightVector& outer() const noexcept { return outer_; }

  /// prod n_i, saturating.
  std::uint64_t term_count() const noexcept;
  /// Largest node value over all groups.
  double max_node() const noexcept;

  /// Same nodes and q, new inner weights (shape-checked).
  GroupedInstance with_weights(std::span<const WeightVector> weights) const;

 private:
  std::vector<WeightedGroup> groups_;
  WeightVector outer_;
};

}  // namespace jensen
