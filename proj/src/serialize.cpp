#include "golf/serialize.hpp"

namespace golf {

using nlohmann::json;

json to_json(const DatasetStats& s) {
  return {{"nodes", s.nodes}, {"edges", s.edges}, {"raw_edges", s.raw_edges}, {"classes", s.classes},
          {"features", s.features}};
}

json to_json(const LeadingForest& f) {
  json parent = json::array();
  for (NodeId p : f.parent) parent.push_back(p == kNoNode ? json(-1) : json(p));
  return {{"sigma", f.sigma},
          {"requested_trees", f.requested_trees},
          {"natural_roots", f.natural_roots},
          {"num_trees", f.num_trees()},
          {"roots", f.roots},
          {"parent", parent},
          {"rho", f.rho},
          {"delta", f.delta},
          {"gamma", f.gamma},
          {"layer", f.layer},
          {"tree_id", f.tree_id}};
}

json to_json(const SelectionConfig& c) {
  return {{"budget", c.budget},
          {"k", c.min_per_group},
          {"alpha", c.alpha},
          {"sigma", c.sigma},
          {"trees", c.trees ? json(*c.trees) : json(nullptr)},
          {"groups", std::string(to_string(c.group_mode))}};
}

json to_json(const LabelSet& l) {
  return {{"typical", l.typical},
          {"divergent", l.divergent},
          {"objective", l.objective},
          {"num_groups", l.num_groups},
          {"config", to_json(l.config)}};
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"dropout", c.dropout},             {"weight_decay", c.weight_decay},
          {"hidden_units", c.hidden_units},   {"num_layers", c.num_layers},
          {"row_normalize", c.row_normalize}};
}

json to_json(const ExperimentReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"run", run.run},
                    {"seed", run.seed},
                    {"accuracy", run.accuracy},
                    {"final_loss", run.final_loss},
                    {"seconds", run.seconds},
                    {"test_count", run.test_count},
                    {"labeled", run.labeled}});
  }
  json out = {{"dataset", r.dataset},
              {"rate", r.rate},
              {"mode", std::string(to_string(r.mode))},
              {"budget", r.budget},
              {"num_layers", r.num_layers},
              {"runs", runs},
              {"mean", r.mean},
              {"std", r.stddev},
              {"selection_seconds", r.selection_seconds},
              {"warnings", r.warnings},
              {"train", to_json(r.config.train)},
              {"base_seed", r.config.base_seed},
              {"test_size", r.config.test_size},
              {"stratified", r.config.stratified}};
  out["selection"] = r.selection ? to_json(*r.selection) : json(nullptr);
  return out;
}

}  // namespace golf
