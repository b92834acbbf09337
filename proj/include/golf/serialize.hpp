#pragma once

#include <json.hpp>

#include "golf/experiment.hpp"
#include "golf/forest.hpp"
#include "golf/graph.hpp"
#include "golf/select.hpp"

namespace golf {

nlohmann::json to_json(const DatasetStats& stats);
// parent/rho/delta/gamma/layer/tree_id arrays; parent is -1 for roots.
nlohmann::json to_json(const LeadingForest& forest);
nlohmann::json to_json(const SelectionConfig& config);
nlohmann::json to_json(const LabelSet& labels);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const ExperimentReport& report);

}  // namespace golf
