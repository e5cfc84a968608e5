#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "jensen/integral_functionals.hpp"
#include "jensen/weights.hpp"

namespace jensen {

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;
};

struct RealRange {
  double lo;
  double hi;
};

struct CampaignConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  IntRange k_range{1, 3};
  IntRange n_range{2, 5};
  RealRange node_range{0.0, 10.0};
  std::vector<std::string> function_ids{"power:2"};
  std::vector<std::string> inequality_ids{"superquadratic_lower"};
  double tolerance = kDefaultTolerance;
  /// Used by the integral inequalities only.
  QuadratureSpec quad{QuadratureSpec::Mode::tensor_gauss, 16, 100'000, 1, Execution::serial};
  std::size_t ratio_grid = 64;
  /// Trial-level worker count; 0 leaves it to OpenMP.
  int workers = 0;
  /// Violations kept with their witnesses per (inequality, function); all are counted.
  std::size_t max_witnesses = 10;

  /// Throws InvalidInput on empty ranges, unknown ids, zero trials or tolerance <= 0.
  void validate() const;
};

CampaignConfig campaign_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignConfig& c);

/// Every inequality id the campaign knows, discrete ones first.
const std::vector<std::string>& campaign_inequality_ids();
bool is_integral_inequality(const std::string& id);
/// Maps an alias ("lower_bound_superquadratic", "discrete", "integral", "all")
/// to canonical ids; canonical ids map to themselves.
std::vector<std::string> expand_inequality_id(const std::string& id);

/// Description of a random integral instance: densities by id on [a, b].
struct IntegralDraw {
  double a = 0.0;
  double b = 1.0;
  std::vector<std::string> p_ids;
  std::vector<std::string> r_ids;
  std::vector<double> q;
};

struct TrialDraw {
  std::uint64_t index = 0;
  GroupedInstance instance;
  std::vector<WeightVector> r;
  double lambda = 0.5;
  IntegralDraw integral;
};

/// Deterministic in (config.seed, trial_index).
TrialDraw draw_trial(const CampaignConfig& config, std::uint64_t trial_index);
GroupedInstance random_instance(const CampaignConfig& config, std::uint64_t trial_index);

nlohmann::json to_json(const IntegralDraw& d);

struct Violation {
  std::uint64_t seed;
  std::uint64_t trial;
  nlohmann::json instance;
  BoundReport report;
};

struct InequalityStats {
  std::string inequality_id;
  std::string function_id;
  std::uint64_t count = 0;
  std::uint64_t skipped = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;
  double slack_min = 0.0;
  double slack_p1 = 0.0;
  double slack_median = 0.0;
  /// min slack / scale.
  double relative_slack_min = 0.0;
  /// |slack| <= 1e-12 * scale.
  std::uint64_t equality_hits = 0;
  std::vector<std::string> skip_reasons;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<InequalityStats> entries;

  std::uint64_t total_violations() const noexcept;
  const InequalityStats* find(const std::string& inequality_id, const std::string& function_id) const noexcept;
};

CampaignReport run_campaign(const CampaignConfig& config);

nlohmann::json to_json(const CampaignReport& r);
std::string campaign_csv(const CampaignReport& r);

}  // namespace jensen
