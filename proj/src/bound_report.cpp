#include "jensen/bound_report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jensen/errors.hpp"

namespace jensen {

double BoundReport::scale() const noexcept { return std::max({1.0, std::abs(lhs), std::abs(rhs)}); }

BoundReport make_report(std::string id, double lhs, double rhs, double tolerance,
                        std::map<std::string, double> context) {
  for (const auto& [name, value] : context) {
    if (!std::isfinite(value)) throw InvalidInput("context quantity '" + name + "' is not finite");
  }
  BoundReport r;
  r.inequality_id = std::move(id);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.tolerance = tolerance;
  r.holds = std::isfinite(r.slack) && r.slack >= -tolerance * r.scale();
  r.context = std::move(context);
  return r;
}

BoundReport skipped_report(std::string id, std::string note, std::map<std::string, double> context) {
  BoundReport r;
  r.inequality_id = std::move(id);
  r.skipped = true;
  r.holds = true;
  r.note = std::move(note);
  for (auto& [k, v] : context) {
    if (std::isfinite(v)) r.context.emplace(k, v);
  }
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["inequality"] = r.inequality_id;
  j["skipped"] = r.skipped;
  j["holds"] = r.holds;
  if (!r.skipped) {
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["tolerance"] = r.tolerance;
  }
  j["context"] = r.context;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

BoundReport bound_report_from_json(const nlohmann::json& j) {
  BoundReport r;
  r.inequality_id = j.at("inequality").get<std::string>();
  r.skipped = j.value("skipped", false);
  r.holds = j.at("holds").get<bool>();
  if (!r.skipped) {
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.slack = j.at("slack").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
  }
  r.context = j.value("context", std::map<std::string, double>{});
  r.note = j.value("note", std::string{});
  return r;
}

std::string csv_header() { return "inequality,lhs,rhs,slack,holds,skipped"; }

std::string csv_row(const BoundReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.inequality_id << ',';
  if (r.skipped) {
    os << ",,,";
  } else {
    os << r.lhs << ',' << r.rhs << ',' << r.slack << ',';
  }
  os << (r.holds ? "true" : "false") << ',' << (r.skipped ? "true" : "false");
  return os.str();
}

}  // namespace jensen
