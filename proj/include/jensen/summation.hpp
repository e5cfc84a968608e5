#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace jensen {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <std::size_t N>
struct SumAccumulator {
  std::array<CompensatedSum, N> parts{};

  CompensatedSum& operator[](std::size_t i) noexcept { return parts[i]; }

  void merge(const SumAccumulator& other) noexcept {
    for (std::size_t i = 0; i < N; ++i) parts[i].merge(other.parts[i]);
  }

  std::array<double, N> values() const noexcept {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = parts[i].value();
    return out;
  }
};

struct RangeAccumulator {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) noexcept {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  void merge(const RangeAccumulator& other) noexcept {
    if (other.empty()) return;
    add(other.lo);
    add(other.hi);
  }
  bool empty() const noexcept { return lo > hi; }
};

template <class T>
double compensated_sum(const T& values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

}  // namespace jensen
