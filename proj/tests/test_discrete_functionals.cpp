#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jensen/discrete_functionals.hpp"
#include "jensen/errors.hpp"
#include "oracles.hpp"

using namespace jensen;

namespace {

GroupedInstance identical_groups(const std::vector<double>& p, const std::vector<double>& x,
                                 const std::vector<double>& q) {
  std::vector<WeightedGroup> gs;
  for (std::size_t i = 0; i < q.size(); ++i) gs.push_back(WeightedGroup{WeightVector(p), x});
  return GroupedInstance(std::move(gs), WeightVector(q));
}

std::vector<oracle::Group> to_oracle(const GroupedInstance& inst) {
  std::vector<oracle::Group> out;
  for (const auto& g : inst.groups()) out.push_back({{g.weights.entries().begin(), g.weights.entries().end()}, g.nodes});
  return out;
}

std::vector<double> outer(const GroupedInstance& inst) {
  return {inst.outer().entries().begin(), inst.outer().entries().end()};
}

GroupedInstance random_grouped(oracle::Gen& gen, std::size_t kmax, std::size_t nmax, double hi) {
  const std::size_t k = gen.integer(1, kmax);
  std::vector<WeightedGroup> gs;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t n = gen.integer(1, nmax);
    gs.push_back(WeightedGroup{WeightVector(gen.simplex(n)), gen.nodes(n, 0.0, hi)});
  }
  return GroupedInstance(std::move(gs), WeightVector(gen.simplex(k)));
}

}  // namespace

TEST_CASE("weight vector validation") {
  CHECK_THROWS_AS(WeightVector({0.5, 0.6}), InvalidInput);
  CHECK_THROWS_AS(WeightVector({1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(WeightVector({1.5, -0.5}), InvalidInput);
  CHECK_THROWS_AS(WeightVector({}), InvalidInput);
  const WeightVector w({0.5 + 4e-13, 0.5});
  CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(GroupedInstance::single(WeightVector({0.5, 0.5}), {1.0}), InvalidInput);
  CHECK_THROWS_AS(GroupedInstance::single(WeightVector({0.5, 0.5}), {1.0, -2.0}), InvalidInput);
  CHECK_THROWS_AS(GroupedInstance({WeightedGroup{WeightVector({1.0}), {1.0}}}, WeightVector({0.5, 0.5})), InvalidInput);
}

TEST_CASE("weighted mean") {
  CHECK(weighted_mean(GroupedInstance::single(WeightVector({0.5, 0.5}), {0, 2})) == 1.0);
  CHECK(weighted_mean(identical_groups({0.5, 0.5}, {0, 2}, {0.5, 0.5})) == 1.0);
  CHECK(weighted_mean(GroupedInstance::single(WeightVector({0.25, 0.75}), {0, 4})) == 3.0);
}

TEST_CASE("jensen functional") {
  const WeightVector half({0.5, 0.5});
  const std::vector<double> x{0, 2};
  CHECK(jensen::jensen(power_function(2), half, x).value == 1.0);
  CHECK(jensen::jensen(power_function(4), half, x).value == 7.0);
  const std::vector<double> flat{3, 3, 3};
  CHECK(jensen::jensen(exp_function(), WeightVector({0.2, 0.3, 0.5}), flat).value == 0.0);
}

TEST_CASE("chebychev functional") {
  const WeightVector half({0.5, 0.5});
  const std::vector<double> x{0, 2};
  CHECK(chebychev(power_function(2), half, x).value == 2.0);
  const std::vector<double> flat{3, 3};
  CHECK(chebychev(power_function(3), half, flat).value == 0.0);
  const FunctionSpec one("one", [](double) { return 1.0; }, std::nullopt, Domain{}, false);
  oracle::Gen gen(1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = gen.integer(1, 8);
    const auto xs = gen.nodes(n, 0.0, 10.0);
    CHECK(std::abs(chebychev(one, WeightVector(gen.simplex(n)), xs).value) <= 1e-14 * 10);
  }
}

TEST_CASE("k-fold functionals") {
  SUBCASE("k = 1 reduces to the classical functional") {
    CHECK(jensen_k(power_function(2), GroupedInstance::single(WeightVector({0.5, 0.5}), {0, 2})).value == 1.0);
    CHECK(chebychev_k(power_function(2), GroupedInstance::single(WeightVector({0.5, 0.5}), {0, 2})).value == 2.0);
  }
  SUBCASE("two identical groups") {
    const auto inst = identical_groups({0.5, 0.5}, {0, 2}, {0.5, 0.5});
    CHECK(jensen_k(power_function(2), inst).value == 0.5);
    CHECK(jensen_k(power_function(2), inst).term_count == 4);
    CHECK(chebychev_k(power_function(2), inst).value == 1.0);
  }
  SUBCASE("point masses") {
    const auto inst = GroupedInstance({WeightedGroup{WeightVector({1.0}), {2.0}}, WeightedGroup{WeightVector({1.0}), {5.0}}},
                                      WeightVector({0.3, 0.7}));
    CHECK(jensen_k(exp_function(), inst).value == 0.0);
    CHECK(chebychev_k(exp_function(), inst).value == 0.0);
  }
  SUBCASE("cap") {
    std::vector<WeightedGroup> gs;
    for (int i = 0; i < 3; ++i) gs.push_back(WeightedGroup{WeightVector::uniform(300), std::vector<double>(300, 1.0)});
    const GroupedInstance big(std::move(gs), WeightVector::uniform(3));
    CHECK_THROWS_AS(jensen_k(power_function(2), big), CapExceeded);
  }
}

TEST_CASE("k-fold jensen matches the single-vector k-fold definition") {
  oracle::Gen gen(2024);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = gen.integer(1, 3), n = gen.integer(1, 4);
    const auto p = gen.simplex(n);
    const auto x = gen.nodes(n, 0.0, 10.0);
    const auto q = gen.simplex(k);
    for (const char* id : {"power:2", "power:3", "xsqlog", "exp"}) {
      const FunctionSpec f = function_from_id(id);
      const double got = jensen_k(f, identical_groups(p, x, q)).value;
      const double want = oracle::jensen_k_single([&](double v) { return f(v); }, p, x, q);
      CAPTURE(id);
      CHECK(oracle::close(got, want, 1e-13, 1e-13 * std::abs(f(10.0))));
    }
  }
}

TEST_CASE("property: grouped functionals agree with the oracle") {
  oracle::Gen gen(99);
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_grouped(gen, 3, 5, 10.0);
    const FunctionSpec f = power_function(3);
    auto fn = [&](double v) { return f(v); };
    const double scale = f(10.0);
    CHECK(oracle::close(jensen_k(f, inst).value, oracle::jensen_k(fn, to_oracle(inst), outer(inst)), 0, 1e-13 * scale));
    CHECK(oracle::close(chebychev_k(f, inst).value, oracle::chebychev_k(fn, to_oracle(inst), outer(inst)), 0,
                        1e-13 * scale * 10));
  }
}

TEST_CASE("property: permuting pairs leaves the functionals unchanged") {
  oracle::Gen gen(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = gen.integer(2, 8);
    auto p = gen.simplex(n);
    auto x = gen.nodes(n, 0.0, 10.0);
    const FunctionSpec f = function_from_id("power:2.5");
    const double j0 = jensen::jensen(f, WeightVector(p), x).value;
    const double c0 = chebychev(f, WeightVector(p), x).value;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen.rng);
    std::vector<double> pp(n), xp(n);
    for (std::size_t i = 0; i < n; ++i) {
      pp[i] = p[perm[i]];
      xp[i] = x[perm[i]];
    }
    CHECK(oracle::close(jensen::jensen(f, WeightVector(pp), xp).value, j0, 1e-14, 1e-14 * f(10.0)));
    CHECK(oracle::close(chebychev(f, WeightVector(pp), xp).value, c0, 1e-14, 1e-14 * 10 * f(10.0)));
  }
}

TEST_CASE("property: jensen is nonnegative for nonnegative superquadratic f") {
  oracle::Gen gen(17);
  for (int t = 0; t < 500; ++t) {
    const auto inst = random_grouped(gen, 3, 5, 10.0);
    for (const char* id : {"power:2", "power:3", "power:2.5"}) {
      const double j = jensen_k(function_from_id(id), inst).value;
      CHECK(j >= -1e-9 * std::max(1.0, function_from_id(id)(10.0)));
    }
  }
}

TEST_CASE("serial and parallel enumeration agree") {
  oracle::Gen gen(8);
  std::vector<WeightedGroup> gs;
  for (int i = 0; i < 3; ++i) gs.push_back(WeightedGroup{WeightVector(gen.simplex(30)), gen.nodes(30, 0.0, 5.0)});
  const GroupedInstance inst(std::move(gs), WeightVector(gen.simplex(3)));
  const double s = jensen_k(power_function(3), inst, {10'000'000, Execution::serial}).value;
  const double p = jensen_k(power_function(3), inst, {10'000'000, Execution::parallel}).value;
  CHECK(std::abs(s - p) <= 1e-13 * std::abs(s));
  CHECK(jensen_k(power_function(3), inst).value == p);
}
