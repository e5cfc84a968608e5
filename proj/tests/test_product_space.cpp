#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jensen/product_space.hpp"
#include "jensen/summation.hpp"
#include "oracles.hpp"

using namespace jensen;

namespace {

struct Fixture {
  std::vector<std::vector<double>> nodes, weights;
  std::vector<double> mix;

  Fixture(std::uint64_t seed, std::size_t k, std::size_t n) {
    oracle::Gen gen(seed);
    for (std::size_t i = 0; i < k; ++i) {
      nodes.push_back(gen.nodes(n, 0.0, 10.0));
      weights.push_back(gen.simplex(n));
    }
    mix = gen.simplex(k);
  }

  ProductSpace space() const {
    std::vector<Axis> axes;
    for (std::size_t i = 0; i < nodes.size(); ++i) axes.push_back(Axis{nodes[i], weights[i]});
    return ProductSpace(mix, std::move(axes));
  }
};

double weighted_cube_sum(const ProductSpace& s, Execution e) {
  const auto acc = reduce_terms<SumAccumulator<1>>(s, e, [](auto& a, const Term& t) {
    a[0].add(t.weight * t.point * t.point * t.point);
  });
  return acc.values()[0];
}

}  // namespace

TEST_CASE("term count saturates") {
  std::vector<double> big(1 << 16, 1.0), w(1 << 16, 1.0 / (1 << 16));
  std::vector<double> mix(5, 0.2);
  std::vector<Axis> axes(5, Axis{big, w});
  const ProductSpace s(mix, axes);
  CHECK(s.term_count() == std::numeric_limits<std::uint64_t>::max());
  CHECK_THROWS_AS(s.require_within(10'000'000), CapExceeded);
}

TEST_CASE("decode matches odometer order") {
  const Fixture fx(3, 3, 4);
  const ProductSpace s = fx.space();
  std::vector<std::size_t> walk(3, 0), decoded(3, 0);
  for (std::uint64_t t = 0; t < s.term_count(); ++t) {
    s.decode(t, decoded);
    CHECK(decoded == walk);
    s.advance(walk);
  }
}

TEST_CASE("parallel reduction is stable across thread counts") {
  // 9^5 = 59049 terms, i.e. several enumeration blocks.
  const Fixture fx(11, 5, 9);
  const ProductSpace s = fx.space();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = weighted_cube_sum(s, Execution::parallel);
  for (int threads : {2, 3, 4, 8}) {
    omp_set_num_threads(threads);
    CHECK(weighted_cube_sum(s, Execution::parallel) == one);
  }
  omp_set_num_threads(saved);
  const double serial = weighted_cube_sum(s, Execution::serial);
  CHECK(std::abs(serial - one) <= 1e-14 * std::abs(serial));
}

TEST_CASE("weights of the full space sum to one") {
  const Fixture fx(5, 4, 7);
  const ProductSpace s = fx.space();
  for (Execution e : {Execution::serial, Execution::parallel}) {
    const auto acc = reduce_terms<SumAccumulator<1>>(s, e, [](auto& a, const Term& t) { a[0].add(t.weight); });
    CHECK(acc.values()[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exceptions inside blocks propagate") {
  const Fixture fx(9, 5, 9);
  const ProductSpace s = fx.space();
  const auto range = reduce_terms<RangeAccumulator>(s, Execution::serial, [](auto& a, const Term& t) { a.add(t.point); });
  auto boom = [&](auto&, const Term& t) {
    if (t.point == range.hi) throw std::runtime_error("late failure");
  };
  CHECK_THROWS_AS((reduce_terms<SumAccumulator<1>>(s, Execution::parallel, boom)), std::runtime_error);
  CHECK_THROWS_AS((reduce_terms<SumAccumulator<1>>(s, Execution::serial, boom)), std::runtime_error);
}

TEST_CASE("range accumulator merge ignores empty partials") {
  RangeAccumulator a, empty;
  a.add(2.0);
  a.add(-1.0);
  a.merge(empty);
  CHECK(a.lo == -1.0);
  CHECK(a.hi == 2.0);
  empty.merge(a);
  CHECK(empty.lo == -1.0);
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}
