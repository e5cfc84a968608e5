#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jensen/weights.hpp"

namespace jensen {

/// A discrete instance as read from disk. `r` holds the optional second
/// weight system used by the ratio bounds; it is either empty or one vector
/// per group.
struct InstanceFile {
  GroupedInstance instance;
  std::vector<WeightVector> r;
};

/// {"q": [...], "groups": [{"p": [...], "x": [...], "r": [...]?}, ...]}.
/// "q" may be omitted for a single group. An object wrapping the instance
/// under "instance" is accepted too, so emitted reports parse back.
InstanceFile instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroupedInstance& inst, const std::vector<WeightVector>& r = {});

InstanceFile load_instance(const std::string& path);

}  // namespace jensen
