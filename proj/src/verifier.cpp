#include "jensen/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <omp.h>

#include "jensen/discrete_bounds.hpp"
#include "jensen/errors.hpp"
#include "jensen/instance_io.hpp"

namespace jensen {

namespace {

const std::vector<std::string> kDiscreteIds{
    "superquadratic_lower",  "lambda_lower",         "halved_lower",          "ratio_sandwich_lower",
    "ratio_sandwich_upper",  "ratio_refinement",     "convex_sandwich_lower", "convex_sandwich_upper",
    "chebychev_magnitude",   "slope_upper",          "slope_chebychev_upper",
};

const std::vector<std::string> kIntegralIds{
    "superquadratic_lower_int", "ratio_sandwich_lower_int", "ratio_sandwich_upper_int",
    "chebychev_magnitude_int",  "slope_upper_int",
};

const std::map<std::string, std::string> kAliases{
    {"lower_bound_superquadratic", "superquadratic_lower"},
    {"lambda_bound", "lambda_lower"},
    {"halved_bound", "halved_lower"},
    {"chebychev_magnitude_bound", "chebychev_magnitude"},
    {"jensen_upper_via_C", "slope_upper"},
    {"lower_bound_superquadratic_int", "superquadratic_lower_int"},
    {"chebychev_magnitude_bound_int", "chebychev_magnitude_int"},
    {"jensen_upper_via_C_int", "slope_upper_int"},
};

constexpr double kEqualityFactor = 1e-12;
constexpr std::size_t kMaxSkipReasons = 5;

double unit(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double uniform_in(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

std::int64_t integer_in(std::mt19937_64& rng, IntRange r) {
  const auto span = static_cast<std::uint64_t>(r.hi - r.lo) + 1;
  return r.lo + static_cast<std::int64_t>(rng() % span);
}

// Flat simplex: normalised standard exponentials.
WeightVector simplex(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) {
    v = -std::log(unit(rng));
    total += v;
  }
  for (double& v : w) v /= total;
  return WeightVector(std::move(w));
}

std::string random_density_id(std::mt19937_64& rng) {
  std::ostringstream os;
  os.precision(17);
  switch (rng() % 4) {
    case 0:
      return "uniform";
    case 1:
      return "linear";
    case 2:
      os << "linear:" << uniform_in(rng, 0.0, 2.0);
      return os.str();
    default:
      os << "powerlaw:" << uniform_in(rng, 0.5, 3.0);
      return os.str();
  }
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Per-trial, per-(function, inequality) result. Full reports are kept only
// for violations.
struct Outcome {
  bool skipped = false;
  bool holds = true;
  double slack = 0.0;
  double scale = 1.0;
  std::string skip_reason;
  std::optional<BoundReport> report;
};

Outcome from_report(const BoundReport& r) {
  Outcome o;
  if (r.skipped) {
    o.skipped = true;
    o.skip_reason = r.note;
    return o;
  }
  o.holds = r.holds;
  o.slack = r.slack;
  o.scale = r.scale();
  if (!r.holds) o.report = r;
  return o;
}

Outcome skipped(const std::string& why) {
  Outcome o;
  o.skipped = true;
  o.skip_reason = why;
  return o;
}

// f >= 0 on [0, xmax], checked on a grid.
bool nonnegative_on(const FunctionSpec& f, double xmax) {
  for (double x : uniform_grid(0.0, xmax, 257)) {
    if (f(x) < 0.0) return false;
  }
  return true;
}

class TrialEvaluator {
 public:
  TrialEvaluator(const CampaignConfig& cfg, const TrialDraw& draw, const FunctionSpec& f)
      : cfg_(cfg), draw_(draw), f_(f) {
    opts_.tolerance = cfg.tolerance;
    opts_.enumeration.execution = Execution::serial;
  }

  Outcome evaluate(const std::string& id) {
    try {
      return from_report(report(id));
    } catch (const HypothesisError& e) {
      return skipped(e.what());
    } catch (const DomainError& e) {
      return skipped(e.what());
    }
  }

 private:
  BoundReport report(const std::string& id) {
    const GroupedInstance& inst = draw_.instance;
    if (id == "superquadratic_lower") return lower_bound_superquadratic(f_, inst, opts_);
    if (id == "lambda_lower") {
      return lambda_bound(f_, inst.group(0).weights, inst.group(0).nodes, draw_.lambda, opts_);
    }
    if (id == "halved_lower") return halved_bound(f_, inst, opts_);
    if (id == "ratio_sandwich_lower") return sandwich().lower;
    if (id == "ratio_sandwich_upper") return sandwich().upper;
    if (id == "ratio_refinement") {
      if (!nonnegative_on(f_, inst.max_node())) throw HypothesisError("refinement needs f >= 0");
      const BoundReport& lower = sandwich().lower;
      return make_report("ratio_refinement", lower.rhs, 0.0, cfg_.tolerance, {{"jensen_gap", lower.lhs}});
    }
    if (id == "convex_sandwich_lower") return convex().lower;
    if (id == "convex_sandwich_upper") return convex().upper;
    if (id == "chebychev_magnitude") {
      const ValueRange range = value_range(f_, inst, opts_.enumeration);
      return chebychev_magnitude_bound(f_, inst, range.lo, range.hi, opts_);
    }
    if (id == "slope_upper") return slope().upper;
    if (id == "slope_chebychev_upper") return slope().via_chebychev;
    return integral(id);
  }

  const SandwichReports& sandwich() {
    if (!sandwich_) sandwich_ = sandwich_bounds(f_, draw_.instance, draw_.r, opts_);
    return *sandwich_;
  }

  const SandwichReports& convex() {
    if (!convex_) convex_ = convex_sandwich(f_, draw_.instance, draw_.r, opts_);
    return *convex_;
  }

  const SlopeBoundReports& slope() {
    if (!slope_) {
      if (!f_.has_slope()) throw MissingSlope(f_.name() + " has no companion slope C(x)");
      const ValueRange range = slope_range(f_, draw_.instance, opts_.enumeration);
      slope_ = jensen_upper_via_C(f_, draw_.instance, range.lo, range.hi, opts_);
    }
    return *slope_;
  }

  void build_densities() {
    if (!p_.empty()) return;
    const IntegralDraw& d = draw_.integral;
    for (const auto& id : d.p_ids) p_.push_back(density_from_id(id, d.a, d.b));
    for (const auto& id : d.r_ids) r_.push_back(density_from_id(id, d.a, d.b));
  }

  BoundReport integral(const std::string& id) {
    build_densities();
    const QuadratureSpec& quad = cfg_.quad;
    const WeightVector q(draw_.integral.q);
    const double tol = cfg_.tolerance;
    if (id == "superquadratic_lower_int") return lower_bound_superquadratic_int(f_, p_, q, quad, tol);
    if (id == "ratio_sandwich_lower_int" || id == "ratio_sandwich_upper_int") {
      // One axis only: the product-measure form is not a valid bound for k >= 2.
      if (!int_sandwich_) {
        const WeightVector one({1.0});
        int_sandwich_ = sandwich_bounds_int(f_, std::span(p_).first(1), std::span(r_).first(1), one, quad,
                                            cfg_.ratio_grid, tol);
      }
      return id == "ratio_sandwich_lower_int" ? int_sandwich_->lower : int_sandwich_->upper;
    }
    if (id == "chebychev_magnitude_int") {
      const ValueRange range = value_range_int(f_, p_, q, quad);
      return chebychev_magnitude_bound_int(f_, p_, q, quad, range.lo, range.hi, tol);
    }
    if (id == "slope_upper_int") {
      if (!f_.has_slope()) throw MissingSlope(f_.name() + " has no companion slope C(x)");
      const ValueRange range = slope_range_int(f_, p_, q, quad);
      return jensen_upper_via_C_int(f_, p_, q, quad, range.lo, range.hi, tol);
    }
    throw InvalidInput("unknown inequality id '" + id + "'");
  }

  const CampaignConfig& cfg_;
  const TrialDraw& draw_;
  const FunctionSpec& f_;
  BoundOptions opts_;
  std::optional<SandwichReports> sandwich_;
  std::optional<SandwichReports> convex_;
  std::optional<SlopeBoundReports> slope_;
  std::vector<DensitySpec> p_;
  std::vector<DensitySpec> r_;
  std::optional<IntegralSandwichReports> int_sandwich_;
};

nlohmann::json trial_instance_json(const TrialDraw& d, const std::string& id) {
  if (is_integral_inequality(id)) return to_json(d.integral);
  nlohmann::json j = to_json(d.instance, d.r);
  j["lambda"] = d.lambda;
  return j;
}

double nearest_rank(const std::vector<double>& sorted, double fraction) {
  const auto idx = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(sorted.size() - 1)));
  return sorted[idx];
}

}  // namespace

const std::vector<std::string>& campaign_inequality_ids() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kDiscreteIds;
    v.insert(v.end(), kIntegralIds.begin(), kIntegralIds.end());
    return v;
  }();
  return all;
}

bool is_integral_inequality(const std::string& id) { return contains(kIntegralIds, id); }

std::vector<std::string> expand_inequality_id(const std::string& id) {
  if (id == "all") return campaign_inequality_ids();
  if (id == "discrete") return kDiscreteIds;
  if (id == "integral") return kIntegralIds;
  if (const auto it = kAliases.find(id); it != kAliases.end()) return {it->second};
  if (contains(campaign_inequality_ids(), id)) return {id};
  throw InvalidInput("unknown inequality id '" + id + "'");
}

void CampaignConfig::validate() const {
  if (trials == 0) throw InvalidInput("trials must be >= 1");
  if (k_range.lo < 1 || k_range.lo > k_range.hi) throw InvalidInput("k_range must be a nonempty range of k >= 1");
  if (n_range.lo < 1 || n_range.lo > n_range.hi) throw InvalidInput("n_range must be a nonempty range of n >= 1");
  if (!(node_range.lo >= 0.0) || !(node_range.lo < node_range.hi) || !std::isfinite(node_range.hi)) {
    throw InvalidInput("node_range must satisfy 0 <= lo < hi < inf");
  }
  if (!(tolerance > 0.0)) throw InvalidInput("tolerance must be > 0");
  if (function_ids.empty()) throw InvalidInput("no function ids");
  if (inequality_ids.empty()) throw InvalidInput("no inequality ids");
  for (const auto& f : function_ids) function_from_id(f);
  bool any_integral = false;
  for (const auto& id : inequality_ids) {
    for (const auto& canon : expand_inequality_id(id)) any_integral |= is_integral_inequality(canon);
  }
  if (any_integral) {
    quad.validate(static_cast<std::size_t>(std::min<std::int64_t>(k_range.hi, QuadratureSpec::kMaxTensorRank)));
    if (ratio_grid == 0) throw InvalidInput("ratio_grid must be positive");
  }
  if (workers < 0) throw InvalidInput("workers must be >= 0");
}

TrialDraw draw_trial(const CampaignConfig& config, std::uint64_t trial_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32)};
  std::mt19937_64 rng(seq);

  const auto k = static_cast<std::size_t>(integer_in(rng, config.k_range));
  std::vector<WeightedGroup> groups;
  std::vector<WeightVector> r;
  for (std::size_t i = 0; i < k; ++i) {
    const auto n = static_cast<std::size_t>(integer_in(rng, config.n_range));
    WeightVector p = simplex(rng, n);
    std::vector<double> x(n);
    for (double& v : x) v = uniform_in(rng, config.node_range.lo, config.node_range.hi);
    groups.push_back(WeightedGroup{std::move(p), std::move(x)});
    r.push_back(simplex(rng, n));
  }
  WeightVector q = simplex(rng, k);
  const double lambda = unit(rng);

  IntegralDraw in;
  const std::size_t k_int = std::min<std::size_t>(k, QuadratureSpec::kMaxTensorRank);
  const double lo = config.node_range.lo, hi = config.node_range.hi;
  in.a = uniform_in(rng, lo, lo + 0.5 * (hi - lo));
  in.b = in.a + (hi - in.a) * uniform_in(rng, 0.1, 1.0);
  for (std::size_t i = 0; i < k_int; ++i) {
    in.p_ids.push_back(random_density_id(rng));
    in.r_ids.push_back(random_density_id(rng));
  }
  const WeightVector qi = simplex(rng, k_int);
  in.q.assign(qi.entries().begin(), qi.entries().end());

  return TrialDraw{trial_index, GroupedInstance(std::move(groups), std::move(q)), std::move(r), lambda,
                   std::move(in)};
}

GroupedInstance random_instance(const CampaignConfig& config, std::uint64_t trial_index) {
  return draw_trial(config, trial_index).instance;
}

nlohmann::json to_json(const IntegralDraw& d) {
  return {{"interval", {d.a, d.b}}, {"p", d.p_ids}, {"r", d.r_ids}, {"q", d.q}};
}

std::uint64_t CampaignReport::total_violations() const noexcept {
  std::uint64_t n = 0;
  for (const auto& e : entries) n += e.violation_count;
  return n;
}

const InequalityStats* CampaignReport::find(const std::string& inequality_id,
                                            const std::string& function_id) const noexcept {
  for (const auto& e : entries) {
    if (e.inequality_id == inequality_id && e.function_id == function_id) return &e;
  }
  return nullptr;
}

CampaignReport run_campaign(const CampaignConfig& config) {
  config.validate();
  std::vector<std::string> ids;
  for (const auto& id : config.inequality_ids) {
    for (auto& canon : expand_inequality_id(id)) {
      if (!contains(ids, canon)) ids.push_back(std::move(canon));
    }
  }
  std::vector<FunctionSpec> functions;
  for (const auto& fid : config.function_ids) functions.push_back(function_from_id(fid));

  const std::size_t per_trial = functions.size() * ids.size();
  const auto trials = static_cast<std::int64_t>(config.trials);
  std::vector<std::vector<Outcome>> slots(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> failure(static_cast<std::size_t>(trials));
  const int workers = config.workers > 0 ? config.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      const TrialDraw draw = draw_trial(config, static_cast<std::uint64_t>(t));
      auto& out = slots[static_cast<std::size_t>(t)];
      out.reserve(per_trial);
      for (const FunctionSpec& f : functions) {
        TrialEvaluator eval(config, draw, f);
        for (const auto& id : ids) out.push_back(eval.evaluate(id));
      }
    } catch (...) {
      failure[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : failure) {
    if (e) std::rethrow_exception(e);
  }

  // Serial aggregation in trial order.
  CampaignReport report{config, {}};
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    for (std::size_t ii = 0; ii < ids.size(); ++ii) {
      InequalityStats s;
      s.inequality_id = ids[ii];
      s.function_id = config.function_ids[fi];
      std::vector<double> slacks;
      double rel_min = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < slots.size(); ++t) {
        const Outcome& o = slots[t][fi * ids.size() + ii];
        if (o.skipped) {
          ++s.skipped;
          if (s.skip_reasons.size() < kMaxSkipReasons && !contains(s.skip_reasons, o.skip_reason)) {
            s.skip_reasons.push_back(o.skip_reason);
          }
          continue;
        }
        ++s.count;
        slacks.push_back(o.slack);
        rel_min = std::min(rel_min, o.slack / o.scale);
        if (std::abs(o.slack) <= kEqualityFactor * o.scale) ++s.equality_hits;
        if (!o.holds) {
          ++s.violation_count;
          if (s.violations.size() < config.max_witnesses) {
            const TrialDraw draw = draw_trial(config, t);
            s.violations.push_back(Violation{config.seed, t, trial_instance_json(draw, ids[ii]), *o.report});
          }
        }
      }
      if (!slacks.empty()) {
        std::sort(slacks.begin(), slacks.end());
        s.slack_min = slacks.front();
        s.slack_p1 = nearest_rank(slacks, 0.01);
        s.slack_median = nearest_rank(slacks, 0.5);
        s.relative_slack_min = rel_min;
      }
      report.entries.push_back(std::move(s));
    }
  }
  return report;
}

CampaignConfig campaign_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("campaign config must be a JSON object");
  CampaignConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("k_range")) c.k_range = {j.at("k_range").at(0).get<std::int64_t>(), j.at("k_range").at(1).get<std::int64_t>()};
    if (j.contains("n_range")) c.n_range = {j.at("n_range").at(0).get<std::int64_t>(), j.at("n_range").at(1).get<std::int64_t>()};
    if (j.contains("node_range")) c.node_range = {j.at("node_range").at(0).get<double>(), j.at("node_range").at(1).get<double>()};
    if (j.contains("function_ids")) c.function_ids = j.at("function_ids").get<std::vector<std::string>>();
    if (j.contains("inequality_ids")) c.inequality_ids = j.at("inequality_ids").get<std::vector<std::string>>();
    if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("max_witnesses")) c.max_witnesses = j.at("max_witnesses").get<std::size_t>();
    if (j.contains("ratio_grid")) c.ratio_grid = j.at("ratio_grid").get<std::size_t>();
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("mode")) c.quad.mode = quadrature_mode_from_string(q.at("mode").get<std::string>());
      if (q.contains("nodes")) c.quad.nodes_per_axis = q.at("nodes").get<std::size_t>();
      if (q.contains("samples")) c.quad.sample_count = q.at("samples").get<std::uint64_t>();
      if (q.contains("seed")) c.quad.seed = q.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed campaign config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const CampaignConfig& c) {
  return {{"seed", c.seed},
          {"trials", c.trials},
          {"k_range", {c.k_range.lo, c.k_range.hi}},
          {"n_range", {c.n_range.lo, c.n_range.hi}},
          {"node_range", {c.node_range.lo, c.node_range.hi}},
          {"function_ids", c.function_ids},
          {"inequality_ids", c.inequality_ids},
          {"tolerance", c.tolerance},
          {"workers", c.workers},
          {"max_witnesses", c.max_witnesses},
          {"ratio_grid", c.ratio_grid},
          {"quadrature",
           {{"mode", to_string(c.quad.mode)},
            {"nodes", c.quad.nodes_per_axis},
            {"samples", c.quad.sample_count},
            {"seed", c.quad.seed}}}};
}

nlohmann::json to_json(const CampaignReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& s : r.entries) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& w : s.violations) {
      v.push_back({{"seed", w.seed}, {"trial", w.trial}, {"instance", w.instance}, {"report", to_json(w.report)}});
    }
    entries.push_back({{"inequality", s.inequality_id},
                       {"function", s.function_id},
                       {"count", s.count},
                       {"skipped", s.skipped},
                       {"skip_reasons", s.skip_reasons},
                       {"violation_count", s.violation_count},
                       {"violations", std::move(v)},
                       {"slack_min", s.slack_min},
                       {"slack_p1", s.slack_p1},
                       {"slack_median", s.slack_median},
                       {"relative_slack_min", s.relative_slack_min},
                       {"equality_hits", s.equality_hits}});
  }
  return {{"config", to_json(r.config)}, {"total_violations", r.total_violations()}, {"entries", std::move(entries)}};
}

std::string campaign_csv(const CampaignReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "inequality,function,count,skipped,violations,slack_min,slack_p1,slack_median,relative_slack_min,"
        "equality_hits\n";
  for (const auto& s : r.entries) {
    os << s.inequality_id << ',' << s.function_id << ',' << s.count << ',' << s.skipped << ',' << s.violation_count
       << ',' << s.slack_min << ',' << s.slack_p1 << ',' << s.slack_median << ',' << s.relative_slack_min << ','
       << s.equality_hits << '\n';
  }
  return os.str();
}

}  // namespace jensen
