#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace jensen {

/// One inequality instance, always oriented as lhs >= rhs.
struct BoundReport {
  std::string inequality_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;
  /// The side was not evaluated (e.g. an unbounded ratio supremum).
  bool skipped = false;
  double tolerance = 0.0;
  std::map<std::string, double> context;
  std::string note;

  /// max(1, |lhs|, |rhs|).
  double scale() const noexcept;
};

inline constexpr double kDefaultTolerance = 1e-9;

/// holds <=> slack >= -tolerance * max(1, |lhs|, |rhs|). Non-finite context
/// entries are rejected.
BoundReport make_report(std::string id, double lhs, double rhs, double tolerance,
                        std::map<std::string, double> context = {});

BoundReport skipped_report(std::string id, std::string note, std::map<std::string, double> context = {});

nlohmann::json to_json(const BoundReport& r);
BoundReport bound_report_from_json(const nlohmann::json& j);

std::string csv_header();
std::string csv_row(const BoundReport& r);

}  // namespace jensen
