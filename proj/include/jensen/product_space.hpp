#pragma once

// Enumeration kernels over the product index space {1..n_1} x ... x {1..n_k}.
//
// reduce_serial is the reference: one odometer walk, one accumulator.
// reduce_parallel cuts the linear index range into fixed-size blocks, walks
// each block with its own accumulator under OpenMP, and merges the partials in
// block order. The block size does not depend on the thread count, so the
// parallel result is bit-identical for any number of workers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jensen/errors.hpp"

namespace jensen {

enum class Execution { serial, parallel };

/// One factor of the product space. `weights` and `alt_weights` are two
/// weight systems over the same nodes (p and r); `alt_weights` may be empty.
/// `center` / `alt_center` are subtracted from the node before mixing, which
/// yields the per-term deviation sum_i q_i (x_{i j_i} - center_i).
struct Axis {
  std::span<const double> nodes;
  std::span<const double> weights;
  std::span<const double> alt_weights{};
  double center = 0.0;
  double alt_center = 0.0;
};

struct Term {
  double point;          // sum_i q_i x_{i j_i}
  double deviation;      // sum_i q_i (x_{i j_i} - center_i)
  double alt_deviation;  // same with alt centers
  double weight;         // prod_i w_{i j_i}
  double alt_weight;     // prod_i r_{i j_i}, or 0 when absent
};

class ProductSpace {
 public:
  ProductSpace(std::span<const double> mix, std::vector<Axis> axes)
      : mix_(mix), axes_(std::move(axes)) {
    if (axes_.empty()) throw InvalidInput("product space needs at least one axis");
    if (mix_.size() != axes_.size()) throw InvalidInput("mixing weights do not match axis count");
    has_alt_ = !axes_.front().alt_weights.empty();
    for (const Axis& ax : axes_) {
      if (ax.nodes.empty()) throw InvalidInput("empty axis");
      if (ax.weights.size() != ax.nodes.size()) throw InvalidInput("axis weights do not match nodes");
      if (has_alt_ != !ax.alt_weights.empty() ||
          (has_alt_ && ax.alt_weights.size() != ax.nodes.size())) {
        throw InvalidInput("alternative weights must be given for every axis");
      }
    }
  }

  std::size_t rank() const noexcept { return axes_.size(); }
  const Axis& axis(std::size_t i) const noexcept { return axes_[i]; }

  /// Number of index tuples, saturating at UINT64_MAX.
  std::uint64_t term_count() const noexcept {
    std::uint64_t total = 1;
    for (const Axis& ax : axes_) {
      const std::uint64_t n = ax.nodes.size();
      if (total > std::numeric_limits<std::uint64_t>::max() / n) {
        return std::numeric_limits<std::uint64_t>::max();
      }
      total *= n;
    }
    return total;
  }

  void require_within(std::uint64_t cap) const {
    if (term_count() > cap) {
      throw CapExceeded("product space has " + std::to_string(term_count()) +
                        " terms, cap is " + std::to_string(cap));
    }
  }

  Term term(std::span<const std::size_t> index) const noexcept {
    Term t{0.0, 0.0, 0.0, 1.0, has_alt_ ? 1.0 : 0.0};
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      const Axis& ax = axes_[i];
      const double x = ax.nodes[index[i]];
      t.point += mix_[i] * x;
      t.deviation += mix_[i] * (x - ax.center);
      t.alt_deviation += mix_[i] * (x - ax.alt_center);
      t.weight *= ax.weights[index[i]];
      if (has_alt_) t.alt_weight *= ax.alt_weights[index[i]];
    }
    return t;
  }

  /// Last axis runs fastest.
  void advance(std::vector<std::size_t>& index) const noexcept {
    for (std::size_t i = axes_.size(); i-- > 0;) {
      if (++index[i] < axes_[i].nodes.size()) return;
      index[i] = 0;
    }
  }

  void decode(std::uint64_t linear, std::vector<std::size_t>& index) const noexcept {
    for (std::size_t i = axes_.size(); i-- > 0;) {
      const std::uint64_t n = axes_[i].nodes.size();
      index[i] = static_cast<std::size_t>(linear % n);
      linear /= n;
    }
  }

 private:
  std::span<const double> mix_;
  std::vector<Axis> axes_;
  bool has_alt_ = false;
};

inline constexpr std::uint64_t kEnumerationBlock = 4096;

template <class Acc, class Visit>
Acc reduce_serial(const ProductSpace& space, Visit&& visit) {
  Acc acc{};
  std::vector<std::size_t> index(space.rank(), 0);
  const std::uint64_t total = space.term_count();
  for (std::uint64_t t = 0; t < total; ++t) {
    visit(acc, space.term(index));
    space.advance(index);
  }
  return acc;
}

template <class Acc, class Visit>
Acc reduce_parallel(const ProductSpace& space, Visit&& visit) {
  const std::uint64_t total = space.term_count();
  const std::int64_t blocks =
      static_cast<std::int64_t>((total + kEnumerationBlock - 1) / kEnumerationBlock);
  if (blocks <= 1) return reduce_serial<Acc>(space, visit);

  std::vector<Acc> partial(static_cast<std::size_t>(blocks));
  // Exceptions cannot leave an OpenMP region; keep one per block and rethrow
  // the first in block order so the reported error is deterministic.
  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(blocks));
#pragma omp parallel
  {
    std::vector<std::size_t> index(space.rank(), 0);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      try {
        const std::uint64_t begin = static_cast<std::uint64_t>(b) * kEnumerationBlock;
        const std::uint64_t end = std::min(total, begin + kEnumerationBlock);
        space.decode(begin, index);
        Acc& acc = partial[static_cast<std::size_t>(b)];
        for (std::uint64_t t = begin; t < end; ++t) {
          visit(acc, space.term(index));
          space.advance(index);
        }
      } catch (...) {
        failure[static_cast<std::size_t>(b)] = std::current_exception();
      }
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
Acc reduce_terms(const ProductSpace& space, Execution exec, Visit&& visit) {
  return exec == Execution::parallel ? reduce_parallel<Acc>(space, visit)
                                     : reduce_serial<Acc>(space, visit);
}

}  // namespace jensen
