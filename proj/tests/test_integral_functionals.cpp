#include <doctest.h>

#include <cmath>
#include <fstream>

#include "jensen/errors.hpp"
#include "jensen/gauss_legendre.hpp"
#include "jensen/integral_functionals.hpp"
#include "oracles.hpp"

using namespace jensen;

namespace {

QuadratureSpec tensor(std::size_t nodes) {
  QuadratureSpec q;
  q.nodes_per_axis = nodes;
  return q;
}

QuadratureSpec monte_carlo(std::uint64_t samples, std::uint64_t seed = 1) {
  QuadratureSpec q;
  q.mode = QuadratureSpec::Mode::monte_carlo;
  q.sample_count = samples;
  q.seed = seed;
  return q;
}

std::vector<DensitySpec> uniforms(std::size_t k, double a = 0.0, double b = 1.0) {
  return std::vector<DensitySpec>(k, uniform_density(a, b));
}

}  // namespace

TEST_CASE("gauss-legendre rules") {
  const auto r = gauss_legendre(16);
  double s = 0;
  for (double w : r.weights) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::is_sorted(r.nodes.begin(), r.nodes.end()));
  // Exact through degree 31.
  CHECK(integrate(gauss_legendre(16, 0.0, 1.0), [](double x) { return std::pow(x, 31); }) ==
        doctest::Approx(1.0 / 32).epsilon(1e-14));
  CHECK(integrate(gauss_legendre(8, 1.0, 3.0), [](double x) { return x * x; }) ==
        doctest::Approx(26.0 / 3).epsilon(1e-14));
}

TEST_CASE("density construction") {
  CHECK(uniform_density(0, 1).mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(linear_density(0, 1).mean() == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(linear_density(1, 2).mean() == doctest::Approx(14.0 / 9).epsilon(1e-14));
  CHECK(linear_density(1, 2)(1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(powerlaw_density(1, 2, -1.0).mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(uniform_density(1, 1), InvalidInput);
  CHECK_THROWS_AS(DensitySpec("bad", [](double) { return 0.5; }, 0, 1), InvalidInput);
  CHECK_THROWS_AS(DensitySpec("neg", [](double x) { return 2 - 4 * x + 0.0 * x; }, 0, 1), InvalidInput);
  CHECK_THROWS_AS(uniform_density(0, 1)(1.5), DomainError);
  CHECK_THROWS_AS(density_from_id("gamma", 0, 1), InvalidInput);
}

TEST_CASE("density quantiles invert the cdf") {
  oracle::Gen gen(6);
  for (const DensitySpec& d : {uniform_density(0, 2), linear_density(0, 1), linear_density(1, 3, 0.5),
                               powerlaw_density(1, 2, 2.5), powerlaw_density(1, 4, -1.0),
                               tabulated_density({0, 1, 2}, {1, 3, 1})}) {
    for (int t = 0; t < 50; ++t) {
      const double u = gen.uniform(0.0, 1.0);
      CHECK(d.cdf(d.quantile(u)) == doctest::Approx(u).epsilon(1e-10));
    }
  }
}

TEST_CASE("density from csv") {
  {
    std::ofstream out("tab_density.csv");
    out << "x,density\n0,1\n1,1\n2,2\n";
  }
  const DensitySpec d = density_from_id("csv:tab_density.csv", 0, 0);
  CHECK(d.lower() == 0.0);
  CHECK(d.upper() == 2.0);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integral means") {
  CHECK(integral_mean(uniforms(3), WeightVector({0.2, 0.3, 0.5}), tensor(16)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integral_mean(uniforms(2, 1, 4), WeightVector({0.5, 0.5}), tensor(16)) == doctest::Approx(2.5).epsilon(1e-15));
  const std::vector<DensitySpec> lin{linear_density(0, 1)};
  CHECK(integral_mean(lin, WeightVector({1.0}), tensor(16)) == doctest::Approx(2.0 / 3).epsilon(1e-14));
}

TEST_CASE("integral jensen functional") {
  const auto sq = power_function(2);
  CHECK(jensen_k_int(sq, uniforms(1), WeightVector({1.0}), tensor(16)).value ==
        doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(jensen_k_int(sq, uniforms(2), WeightVector({0.5, 0.5}), tensor(16)).value ==
        doctest::Approx(1.0 / 24).epsilon(1e-12));
  const FunctionSpec c("const", [](double) { return 2.0; }, std::nullopt, Domain{}, false);
  CHECK(std::abs(jensen_k_int(c, std::vector<DensitySpec>{linear_density(0, 1)}, WeightVector({1.0}), tensor(16))
                     .value) <= 1e-15);

  const auto mc = jensen_k_int(sq, uniforms(2), WeightVector({0.5, 0.5}), monte_carlo(200'000));
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.value - 1.0 / 24) <= 4 * mc.std_error + 1e-4);
}

TEST_CASE("integral chebychev functional") {
  CHECK(chebychev_k_int(power_function(2), uniforms(1), WeightVector({1.0}), tensor(16)).value ==
        doctest::Approx(1.0 / 12).epsilon(1e-12));
  const FunctionSpec even("even", [](double x) { return (x - 0.5) * (x - 0.5); }, std::nullopt, Domain{}, false);
  CHECK(std::abs(chebychev_k_int(even, uniforms(1), WeightVector({1.0}), tensor(16)).value) <= 1e-15);
}

TEST_CASE("integral lower bound") {
  const auto a = lower_bound_superquadratic_int(power_function(2), uniforms(1), WeightVector({1.0}), tensor(16));
  CHECK(a.lhs == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(a.rhs == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(std::abs(a.slack) <= 1e-15);
  const auto b = lower_bound_superquadratic_int(power_function(2), uniforms(2), WeightVector({0.5, 0.5}), tensor(16));
  CHECK(b.lhs == doctest::Approx(1.0 / 24).epsilon(1e-12));
  CHECK(b.rhs == doctest::Approx(1.0 / 24).epsilon(1e-12));
  const auto c = lower_bound_superquadratic_int(power_function(4), uniforms(1), WeightVector({1.0}), tensor(16));
  CHECK(c.lhs == doctest::Approx(0.1375).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(1.0 / 80).epsilon(1e-12));
}

TEST_CASE("integral ratio extrema") {
  const std::vector<DensitySpec> p{uniform_density(1, 2)}, r{linear_density(1, 2)};
  const auto e = ratio_extrema_int(p, r, 256);
  CHECK(e.m == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(e.M == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_FALSE(e.M_unbounded);

  const auto same = ratio_extrema_int(p, p, 64);
  CHECK(same.m == 1.0);
  CHECK(same.M == 1.0);

  const std::vector<DensitySpec> p2{uniform_density(1, 2), uniform_density(1, 2)};
  const std::vector<DensitySpec> r2{linear_density(1, 2), linear_density(1, 2)};
  const auto e2 = ratio_extrema_int(p2, r2, 128);
  CHECK(e2.m == doctest::Approx(0.5625).epsilon(1e-12));
  CHECK(e2.M == doctest::Approx(2.25).epsilon(1e-12));

  // r vanishes at 0 where p does not.
  const std::vector<DensitySpec> p0{uniform_density(0, 1)}, r0{linear_density(0, 1)};
  CHECK(ratio_extrema_int(p0, r0, 64).M_unbounded);
}

TEST_CASE("property: refining the ratio grid is monotone") {
  const std::vector<DensitySpec> p{powerlaw_density(1, 3, 2.0)}, r{linear_density(1, 3, 0.3)};
  double m_prev = 1e300, M_prev = -1e300;
  for (std::size_t res : {8, 16, 32, 64}) {
    const auto e = ratio_extrema_int(p, r, res);
    CHECK(e.m <= m_prev);
    CHECK(e.M >= M_prev);
    m_prev = e.m;
    M_prev = e.M;
  }
}

TEST_CASE("integral sandwich, one axis") {
  const std::vector<DensitySpec> p{uniform_density(1, 2)}, r{linear_density(1, 2)};
  const auto s = sandwich_bounds_int(power_function(2), p, r, WeightVector({1.0}), tensor(32), 256);
  CHECK(s.lower.context.at("xbar_p") == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(s.lower.context.at("xbar_r") == doctest::Approx(14.0 / 9).epsilon(1e-14));
  CHECK(s.lower.context.at("jensen_p") == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(s.lower.context.at("jensen_r") == doctest::Approx(13.0 / 162).epsilon(1e-12));
  CHECK(s.lower.lhs == doctest::Approx(5.0 / 216).epsilon(1e-10));
  CHECK(s.lower.rhs == doctest::Approx(5.0 / 216).epsilon(1e-10));
  CHECK(s.upper.lhs == doctest::Approx(1.0 / 27).epsilon(1e-10));
  CHECK(s.upper.rhs == doctest::Approx(1.0 / 27).epsilon(1e-10));
  CHECK(s.lower.holds);
  CHECK(s.upper.holds);

  const auto same = sandwich_bounds_int(neg_power_comp_function(2), p, p, WeightVector({1.0}), tensor(32), 64);
  CHECK(std::abs(same.lower.lhs) <= 1e-15);
  CHECK(same.lower.rhs == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(same.lower.holds);

  const std::vector<DensitySpec> p0{uniform_density(0, 1)}, r0{linear_density(0, 1)};
  const auto unb = sandwich_bounds_int(power_function(2), p0, r0, WeightVector({1.0}), tensor(16), 64);
  CHECK(unb.upper.skipped);
  CHECK(unb.lower.holds);
}

TEST_CASE("property: integral sandwich holds for random one-axis pairs") {
  oracle::Gen gen(101);
  for (int t = 0; t < 40; ++t) {
    const double a = gen.uniform(0.0, 3.0), b = a + gen.uniform(0.5, 4.0);
    auto pick = [&]() {
      switch (gen.integer(0, 3)) {
        case 0: return uniform_density(a, b);
        case 1: return linear_density(a, b, gen.uniform(0.1, 2.0));
        case 2: return powerlaw_density(a, b, gen.uniform(0.5, 3.0));
        default: return tabulated_density({a, (a + b) / 2, b}, {gen.uniform(0.2, 2), gen.uniform(0.2, 2), gen.uniform(0.2, 2)});
      }
    };
    const std::vector<DensitySpec> p{pick()}, r{pick()};
    for (const char* id : {"power:2", "power:3", "xsqlog"}) {
      const auto s = sandwich_bounds_int(function_from_id(id), p, r, WeightVector({1.0}), tensor(32), 64);
      CAPTURE(id);
      CHECK(s.lower.holds);
      CHECK((s.upper.skipped || s.upper.holds));
    }
  }
}

TEST_CASE("falsification: literal product measure fails at k = 2") {
  // The two-axis expansion of prod (M r_i - p_i) is not a valid weight for the
  // upper side; x^2 with uniform against linear on [1, 2] breaks it.
  const std::vector<DensitySpec> p{uniform_density(1, 2), uniform_density(1, 2)};
  const std::vector<DensitySpec> r{linear_density(1, 2), linear_density(1, 2)};
  const auto s = sandwich_bounds_int(power_function(2), p, r, WeightVector({0.5, 0.5}), tensor(32), 256);
  CHECK_FALSE(s.upper.holds);
  CHECK(s.upper.slack == doctest::Approx(-0.0149).epsilon(0.01));
}

TEST_CASE("integral chebychev magnitude and slope bounds") {
  const auto one = uniforms(1);
  const WeightVector q1({1.0});
  const auto c2 = chebychev_magnitude_bound_int(power_function(2), one, q1, tensor(32), 0.0, 1.0);
  CHECK(c2.lhs == doctest::Approx(0.125).epsilon(1e-3));
  CHECK(c2.rhs == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(c2.holds);
  const auto c4 = chebychev_magnitude_bound_int(power_function(4), one, q1, tensor(32), 0.0, 1.0);
  CHECK(c4.rhs == doctest::Approx(1.0 / 15).epsilon(1e-12));
  CHECK(c4.holds);
  CHECK_THROWS_AS(chebychev_magnitude_bound_int(power_function(4), one, q1, tensor(32), 0.0, 0.5), HypothesisError);

  const auto u = jensen_upper_via_C_int(power_function(2), one, q1, tensor(32), 0.0, 2.0);
  CHECK(u.lhs == doctest::Approx(1.0 / 6).epsilon(1e-3));
  CHECK(u.rhs == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(u.holds);
  const auto u2 = jensen_upper_via_C_int(power_function(2), uniforms(2), WeightVector({0.5, 0.5}), tensor(32), 0.0, 2.0);
  CHECK(u2.rhs == doctest::Approx(1.0 / 24).epsilon(1e-12));
  CHECK(u2.holds);
  const std::vector<DensitySpec> tiny{uniform_density(1.0, 1.0 + 1e-6)};
  const auto t = jensen_upper_via_C_int(neg_power_comp_function(2), tiny, q1, tensor(16), 0.0, 0.0);
  CHECK(t.slack == doctest::Approx(1.0).epsilon(2e-3));
  CHECK_THROWS_AS(jensen_upper_via_C_int(exp_function(), one, q1, tensor(16), 0, 3), MissingSlope);
}

TEST_CASE("quadrature settings are validated") {
  CHECK_THROWS_AS(jensen_k_int(power_function(2), uniforms(5), WeightVector::uniform(5), tensor(8)), InvalidInput);
  CHECK_THROWS_AS(jensen_k_int(power_function(2), uniforms(1), WeightVector({1.0}), monte_carlo(10)), InvalidInput);
  CHECK_THROWS_AS(jensen_k_int(power_function(2), uniforms(2), WeightVector({1.0}), tensor(8)), InvalidInput);
  std::vector<DensitySpec> mixed{uniform_density(0, 1), uniform_density(0, 2)};
  CHECK_THROWS_AS(jensen_k_int(power_function(2), mixed, WeightVector({0.5, 0.5}), tensor(8)), InvalidInput);
  CHECK(jensen_k_int(power_function(2), uniforms(5), WeightVector::uniform(5), monte_carlo(2000)).std_error > 0);
}

TEST_CASE("monte carlo is reproducible and execution-independent") {
  auto q = monte_carlo(20'000, 42);
  const auto a = jensen_k_int(power_function(3), uniforms(2), WeightVector({0.3, 0.7}), q);
  q.execution = Execution::serial;
  const auto b = jensen_k_int(power_function(3), uniforms(2), WeightVector({0.3, 0.7}), q);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  q.seed = 43;
  CHECK(jensen_k_int(power_function(3), uniforms(2), WeightVector({0.3, 0.7}), q).value != a.value);
}

TEST_CASE("tensor serial and parallel agree") {
  auto q = tensor(24);
  const auto a = jensen_k_int(power_function(3), uniforms(3), WeightVector({0.2, 0.3, 0.5}), q);
  q.execution = Execution::serial;
  const auto b = jensen_k_int(power_function(3), uniforms(3), WeightVector({0.2, 0.3, 0.5}), q);
  CHECK(std::abs(a.value - b.value) <= 1e-14);
}
