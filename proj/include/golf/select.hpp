#pragma once

// Deterministic label-set selection over a leading forest.
//
//   J = alpha * sum_{typical} q(gamma_i) + (1 - alpha) * sum_{divergent} rho_j / layer_j
//   q(gamma) = 1 / log(gamma)
//
// minimized subject to |typical| + |divergent| = budget and at least
// `min_per_group` typical nodes in every constrained group.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "golf/forest.hpp"
#include "golf/graph.hpp"

namespace golf {

enum class GroupMode {
  tree_proxy,     // the forest's trees stand in for classes
  oracle_labels,  // ground-truth classes
};

std::string_view to_string(GroupMode mode);
GroupMode parse_group_mode(std::string_view text);

struct SelectionConfig {
  std::size_t budget = 1;         // total labels
  std::size_t min_per_group = 1;  // typical nodes required per group
  double alpha = 0.5;
  double sigma = 1.0;
  std::optional<std::size_t> trees;  // defaults to the class count, else 8
  GroupMode group_mode = GroupMode::tree_proxy;
};

struct LabelSet {
  std::vector<NodeId> typical;    // in selection order
  std::vector<NodeId> divergent;  // in selection order
  double objective = 0.0;
  std::size_t num_groups = 0;
  SelectionConfig config;  // with trees resolved

  // typical followed by divergent
  std::vector<NodeId> nodes() const;
  std::size_t size() const { return typical.size() + divergent.size(); }
};

inline constexpr double kGammaFloor = 1e-12;
inline constexpr double kGammaCeil = 1.0 - 1e-12;

// 1 / log(gamma) with gamma clamped into [kGammaFloor, kGammaCeil].
double typical_cost(double gamma);

// Throws ContractViolation if the sets overlap or name unknown nodes.
double evaluate_objective(const LeadingForest& forest, std::span<const NodeId> typical,
                          std::span<const NodeId> divergent, double alpha);

std::size_t budget_from_rate(double rate, std::size_t num_nodes);
std::size_t default_tree_count(const Graph& graph);

// Node -> constrained group index, or -1 for nodes outside every group.
//
// oracle_labels: one group per class.
// tree_proxy:    one group per tree, restricted to the `requested_trees`
//                trees whose roots have the highest gamma (a graph can have
//                more local roots than requested, and those extra trees carry
//                no quota).
struct GroupAssignment {
  std::vector<std::int32_t> group_of;
  std::size_t num_groups = 0;
};
GroupAssignment assign_groups(const LeadingForest& forest, GroupMode mode, std::span<const std::int32_t> labels,
                              std::size_t num_classes);

// O(n log n) greedy:
//   1. each group contributes its `min_per_group` highest-gamma nodes as typical;
//   2. the remaining budget is filled from two sorted streams (typical cost
//      alpha*q(gamma), divergent cost (1-alpha)*rho/layer), always taking the
//      cheaper head; ties go to the typical stream.
// Throws InfeasibleError when the quotas exceed the budget or a group is too
// small, ParameterError for a budget outside [1, n] or alpha outside [0, 1].
LabelSet select_labels(const LeadingForest& forest, const SelectionConfig& config,
                       std::span<const std::int32_t> labels = {}, std::size_t num_classes = 0);

// Exhaustive minimizer used as a test oracle. Ties resolve to the
// lexicographically first subset, then the first typical/divergent split.
// Throws SizeGuardError above kBruteForceLimit evaluated assignments.
inline constexpr double kBruteForceLimit = 1e7;
LabelSet brute_force_select(const LeadingForest& forest, const SelectionConfig& config,
                            std::span<const std::int32_t> labels = {}, std::size_t num_classes = 0);

// End to end: aggregate, density, leading forest, selection. No randomness.
LabelSet dns(const Graph& graph, const SelectionConfig& config, unsigned jobs = 1);

}  // namespace golf
