#pragma once

#include <json.hpp>

#include "mmtree/forest.hpp"
#include "mmtree/tree.hpp"

namespace mmtree::detail {

nlohmann::json grow_config_json(const GrowConfig& cfg);
GrowConfig grow_config_from(const nlohmann::json& j);
nlohmann::json tree_json(const TreeModel& model);
TreeModel tree_from(const nlohmann::json& j);

}  // namespace mmtree::detail
