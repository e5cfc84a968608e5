#include "jensen/instance_io.hpp"

#include <fstream>

#include "jensen/errors.hpp"

namespace jensen {

namespace {

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("instance group is missing \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_array()) throw InvalidInput(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidInput(std::string("\"") + key + "\" must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> copy(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

InstanceFile instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  if (j.contains("instance") && !j.contains("groups")) return instance_from_json(j.at("instance"));
  if (!j.contains("groups") || !j.at("groups").is_array() || j.at("groups").empty()) {
    throw InvalidInput("instance needs a non-empty \"groups\" array");
  }
  const auto& gs = j.at("groups");
  std::vector<WeightedGroup> groups;
  std::vector<WeightVector> r;
  std::size_t with_r = 0;
  for (const auto& g : gs) {
    if (!g.is_object()) throw InvalidInput("each group must be an object");
    groups.push_back(WeightedGroup{WeightVector(numbers(g, "p")), numbers(g, "x")});
    if (g.contains("r")) {
      r.emplace_back(numbers(g, "r"));
      ++with_r;
    }
  }
  if (with_r != 0 && with_r != groups.size()) throw InvalidInput("\"r\" must be given for every group or none");
  std::vector<double> q;
  if (j.contains("q")) {
    q = numbers(j, "q");
  } else if (groups.size() == 1) {
    q = {1.0};
  } else {
    throw InvalidInput("instance with several groups needs \"q\"");
  }
  GroupedInstance inst(std::move(groups), WeightVector(std::move(q)));
  if (!r.empty()) inst.with_weights(r);  // shape check
  return InstanceFile{std::move(inst), std::move(r)};
}

nlohmann::json to_json(const GroupedInstance& inst, const std::vector<WeightVector>& r) {
  nlohmann::json j;
  j["q"] = copy(inst.outer().entries());
  j["groups"] = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.rank(); ++i) {
    nlohmann::json g;
    g["p"] = copy(inst.group(i).weights.entries());
    g["x"] = inst.group(i).nodes;
    if (!r.empty()) g["r"] = copy(r.at(i).entries());
    j["groups"].push_back(std::move(g));
  }
  return j;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("malformed instance file '" + path + "': " + e.what());
  }
  return instance_from_json(j);
}

}  // namespace jensen
