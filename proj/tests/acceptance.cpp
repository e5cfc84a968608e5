// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "jensen/discrete_bounds.hpp"
#include "jensen/integral_functionals.hpp"
#include "jensen/verifier.hpp"
#include "oracles.hpp"

using namespace jensen;

namespace {

// Pinned tolerances.
constexpr double kEqualityRel = 1e-11;
constexpr double kIntegralEquality = 1e-10;
constexpr double kInequalityRel = 1e-9;
constexpr double kReductionRel = 1e-13;
constexpr double kMcSigmas = 4.0;
constexpr double kExtremaAbs = 1e-3;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CampaignConfig base(std::uint64_t seed, std::uint64_t trials) {
  CampaignConfig c;
  c.seed = seed;
  c.trials = trials;
  c.tolerance = kInequalityRel;
  return c;
}

QuadratureSpec tensor16() {
  QuadratureSpec q;
  q.nodes_per_axis = 16;
  return q;
}

void equality_identities() {
  CampaignConfig c = base(101, 10'000);
  c.k_range = {1, 3};
  c.n_range = {1, 8};
  const FunctionSpec sq = power_function(2);
  double worst = 0.0, worst_var = 0.0;
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    const GroupedInstance inst = random_instance(c, t);
    const BoundReport r = lower_bound_superquadratic(sq, inst);
    worst = std::max(worst, std::abs(r.slack) / r.scale());
    // Single-group view: J against the weighted variance directly.
    const auto& g = inst.group(0);
    const double j = jensen::jensen(sq, g.weights, g.nodes).value;
    long double m = 0, v = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) m += g.weights[i] * static_cast<long double>(g.nodes[i]);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) v += g.weights[i] * (g.nodes[i] - m) * (g.nodes[i] - m);
    worst_var = std::max(worst_var, std::abs(j - static_cast<double>(v)) / std::max(1.0, static_cast<double>(m * m)));
  }
  const std::vector<DensitySpec> u{uniform_density(0, 1)};
  const BoundReport ir = lower_bound_superquadratic_int(sq, u, WeightVector({1.0}), tensor16());
  const double jerr = std::abs(ir.lhs - 1.0 / 12), berr = std::abs(ir.rhs - 1.0 / 12);
  const bool ok = worst <= kEqualityRel && worst_var <= kEqualityRel && jerr <= kIntegralEquality &&
                  berr <= kIntegralEquality;
  report(1, ok, "x^2 equality identities, discrete and integral",
         fmt("max rel slack %.3g, max rel |J-var| %.3g", worst, worst_var) +
             fmt("; integral |J-1/12| %.3g, |bound-1/12| %.3g", jerr, berr));
}

void inequality_suite() {
  CampaignConfig c = base(202, 10'000);
  c.k_range = {1, 3};
  c.n_range = {1, 5};
  c.node_range = {0.0, 10.0};
  c.function_ids = {"power:2", "power:2.5", "power:3", "power:4", "xsqlog", "neg_power_comp:2"};
  c.inequality_ids = {"superquadratic_lower", "lambda_lower",          "halved_lower",
                      "ratio_sandwich_lower", "ratio_sandwich_upper",  "convex_sandwich_lower",
                      "convex_sandwich_upper", "chebychev_magnitude",  "slope_upper",
                      "slope_chebychev_upper"};
  const CampaignReport r = run_campaign(c);
  std::uint64_t evaluated = 0;
  bool every_id_exercised = true;
  for (const auto& id : c.inequality_ids) {
    std::uint64_t n = 0;
    for (const auto& f : c.function_ids) n += r.find(id, f)->count;
    every_id_exercised = every_id_exercised && n > 0;
    evaluated += n;
  }
  report(2, r.total_violations() == 0 && every_id_exercised, "inequality suite over the superquadratic catalog",
         fmt("%.0f evaluations, %.0f violations", static_cast<double>(evaluated),
             static_cast<double>(r.total_violations())));
}

void falsification() {
  bool ok = true;
  std::string detail;
  for (const char* id : {"identity", "exp"}) {
    const auto grid = uniform_grid(0.0, 4.0, 17);
    const CertificationReport cert = certify_superquadratic(function_from_id(id), grid, grid, kInequalityRel);
    CampaignConfig c = base(303, 1000);
    c.function_ids = {id};
    c.inequality_ids = {"superquadratic_lower"};
    const auto r = run_campaign(c);
    const std::uint64_t v = r.find("superquadratic_lower", id)->violation_count;
    ok = ok && cert.verdict == Verdict::violated && v >= 1;
    detail += std::string(detail.empty() ? "" : "; ") + id + ": certify " + to_string(cert.verdict) + ", " +
              std::to_string(v) + "/1000 lower-bound violations";
  }
  report(3, ok, "non-superquadratic controls are caught", detail);
}

void reduction_consistency() {
  oracle::Gen gen(404);
  double worst = 0.0;
  bool collapse_exact = true;
  std::size_t instances = 0;
  for (int t = 0; t < 10'000; ++t) {
    const std::size_t k = gen.integer(1, 3), n = gen.integer(1, 4);
    const auto p = gen.simplex(n);
    const auto x = gen.nodes(n, 0.0, 10.0);
    const auto q = gen.simplex(k);
    std::vector<WeightedGroup> gs;
    for (std::size_t i = 0; i < k; ++i) gs.push_back(WeightedGroup{WeightVector(p), x});
    const GroupedInstance inst(std::move(gs), WeightVector(q));
    for (const char* id : {"power:2", "power:3", "xsqlog", "neg_power_comp:2"}) {
      const FunctionSpec f = function_from_id(id);
      const double got = jensen_k(f, inst).value;
      const double want = oracle::jensen_k_single([&](double v) { return f(v); }, p, x, q);
      // Relative to the magnitude of the cancelling terms.
      const double scale = std::max({1.0, std::abs(want), std::abs(f(weighted_mean(inst)))});
      worst = std::max(worst, std::abs(got - want) / scale);
      if (k == 1) collapse_exact = collapse_exact && got == jensen::jensen(f, WeightVector(p), x).value;
    }
    ++instances;
  }
  report(4, worst <= kReductionRel && collapse_exact, "k-fold functional against the direct definition",
         fmt("%.0f instances, max rel error %.3g", static_cast<double>(instances), worst) +
             (collapse_exact ? ", k=1 bit-identical" : ", k=1 differs"));
}

void integral_oracles() {
  const FunctionSpec sq = power_function(2);
  const std::vector<DensitySpec> u2(2, uniform_density(0, 1));
  const WeightVector q({0.5, 0.5});
  const double tensor = jensen_k_int(sq, u2, q, tensor16()).value;
  QuadratureSpec mc;
  mc.mode = QuadratureSpec::Mode::monte_carlo;
  mc.sample_count = 1'000'000;
  mc.seed = 505;
  const FunctionalValue m = jensen_k_int(sq, u2, q, mc);
  const std::vector<DensitySpec> p{uniform_density(1, 2)}, r{linear_density(1, 2)};
  const IntegralRatioExtrema e = ratio_extrema_int(p, r, 256);
  const double terr = std::abs(tensor - 1.0 / 24), mdev = std::abs(m.value - 1.0 / 24);
  const bool ok = terr <= kIntegralEquality && mdev <= kMcSigmas * m.std_error && std::abs(e.m - 0.75) <= kExtremaAbs &&
                  std::abs(e.M - 1.5) <= kExtremaAbs;
  report(5, ok, "integral oracle values",
         fmt("tensor |J-1/24| %.3g; MC |J-1/24| = %.3g sigma", terr, mdev / m.std_error) +
             fmt("; m = %.6f, M = %.6f", e.m, e.M));
}

void refinement() {
  CampaignConfig c = base(606, 10'000);
  c.function_ids = {"power:2", "power:2.5", "power:3", "power:4"};
  c.inequality_ids = {"ratio_refinement", "ratio_sandwich_lower", "convex_sandwich_lower"};
  const CampaignReport r = run_campaign(c);
  bool all_trials = true;
  double min_rhs = 1e300;
  for (const auto& f : c.function_ids) {
    const auto* s = r.find("ratio_refinement", f);
    all_trials = all_trials && s->count == c.trials;
    min_rhs = std::min(min_rhs, s->slack_min);
  }
  report(6, all_trials && r.total_violations() == 0, "refinement term is nonnegative for nonnegative f",
         fmt("%.0f trials per function, min refinement term %.3g, violations %.0f", static_cast<double>(c.trials),
             min_rhs, static_cast<double>(r.total_violations())));
}

void determinism() {
  CampaignConfig c = base(707, 400);
  c.workers = 2;
  c.function_ids = {"power:3", "xsqlog", "exp"};
  c.inequality_ids = {"all"};
  c.k_range = {1, 2};
  c.quad.nodes_per_axis = 8;
  c.ratio_grid = 16;
  const std::string a = to_json(run_campaign(c)).dump(2);
  const std::string b = to_json(run_campaign(c)).dump(2);
  c.quad.mode = QuadratureSpec::Mode::monte_carlo;
  c.quad.sample_count = 2000;
  c.inequality_ids = {"integral"};
  c.trials = 50;
  const std::string mc_a = to_json(run_campaign(c)).dump(2);
  const std::string mc_b = to_json(run_campaign(c)).dump(2);
  report(7, a == b && mc_a == mc_b, "campaign reports are byte-identical across runs",
         fmt("%.0f + %.0f bytes compared", static_cast<double>(a.size()), static_cast<double>(mc_a.size())));
}

}  // namespace

int main() {
  equality_identities();
  inequality_suite();
  falsification();
  reduction_consistency();
  integral_oracles();
  refinement();
  determinism();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
