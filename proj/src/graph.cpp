#include "golf/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "golf/error.hpp"

namespace golf {

DatasetStats stats(const Graph& graph) {
  return {graph.num_nodes, graph.num_edges(), graph.num_classes, graph.feature_dim, graph.raw_edge_count};
}

Graph build_graph(std::size_t num_nodes, std::span<const Edge> edges, std::vector<float> features,
                  std::size_t feature_dim, std::vector<std::int32_t> labels, std::size_t num_classes,
                  std::string name) {
  if (num_nodes >= kNoNode) throw ValidationError("node count exceeds the 32-bit id range");

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") references a node outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) continue;
    arcs.emplace_back(e.u, e.v);
    arcs.emplace_back(e.v, e.u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.name = std::move(name);
  g.num_nodes = num_nodes;
  g.offsets.assign(num_nodes + 1, 0);
  for (const auto& [u, v] : arcs) ++g.offsets[u + 1];
  for (std::size_t i = 0; i < num_nodes; ++i) g.offsets[i + 1] += g.offsets[i];
  g.adjacency.reserve(arcs.size());
  for (const auto& arc : arcs) g.adjacency.push_back(arc.second);
  g.feature_dim = feature_dim;
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.num_classes = num_classes;
  g.raw_edge_count = edges.size();

  if (auto violations = validate(g); !violations.empty()) {
    std::string msg = "invalid graph: " + violations.front().message;
    if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    throw ValidationError(msg);
  }
  return g;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::structure: return "structure";
    case ViolationKind::self_loop: return "self-loop";
    case ViolationKind::duplicate_edge: return "duplicate-edge";
    case ViolationKind::symmetry: return "symmetry";
    case ViolationKind::feature_shape: return "feature-shape";
    case ViolationKind::non_finite_feature: return "non-finite-feature";
    case ViolationKind::label_shape: return "label-shape";
    case ViolationKind::label_range: return "label-range";
  }
  return "unknown";
}

std::vector<Violation> validate(const Graph& g) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind kind, std::string msg) { out.push_back({kind, std::move(msg)}); };

  if (g.offsets.size() != g.num_nodes + 1 || g.offsets.front() != 0 ||
      g.offsets.back() != g.adjacency.size() || !std::is_sorted(g.offsets.begin(), g.offsets.end())) {
    add(ViolationKind::structure, "row offsets do not describe the adjacency array");
    return out;  // nothing below can be checked safely
  }

  for (NodeId i = 0; i < g.num_nodes; ++i) {
    auto row = g.neighbors(i);
    for (std::size_t p = 0; p < row.size(); ++p) {
      NodeId j = row[p];
      if (j >= g.num_nodes) {
        add(ViolationKind::structure, "node " + std::to_string(i) + " lists out-of-range neighbor " + std::to_string(j));
        continue;
      }
      if (j == i) add(ViolationKind::self_loop, "self-loop stored at node " + std::to_string(i));
      if (p > 0 && row[p - 1] >= j) {
        add(ViolationKind::duplicate_edge,
            "row " + std::to_string(i) + " is unsorted or repeats neighbor " + std::to_string(j));
      }
      auto back = g.neighbors(j);
      if (!std::binary_search(back.begin(), back.end(), i)) {
        add(ViolationKind::symmetry,
            "edge (" + std::to_string(i) + "," + std::to_string(j) + ") has no reverse");
      }
    }
  }

  if (g.features.size() != g.num_nodes * g.feature_dim) {
    add(ViolationKind::feature_shape, "feature matrix has " + std::to_string(g.features.size()) +
                                          " values, expected " + std::to_string(g.num_nodes) + " x " +
                                          std::to_string(g.feature_dim));
  } else {
    auto bad = std::find_if(g.features.begin(), g.features.end(), [](float v) { return !std::isfinite(v); });
    if (bad != g.features.end()) {
      auto idx = static_cast<std::size_t>(bad - g.features.begin());
      add(ViolationKind::non_finite_feature,
          "non-finite feature at node " + std::to_string(g.feature_dim ? idx / g.feature_dim : 0));
    }
  }

  if (!g.labels.empty()) {
    if (g.labels.size() != g.num_nodes) {
      add(ViolationKind::label_shape, "label vector length differs from node count");
    }
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
      if (g.labels[i] < 0 || static_cast<std::size_t>(g.labels[i]) >= g.num_classes) {
        add(ViolationKind::label_range, "label " + std::to_string(g.labels[i]) + " at node " +
                                            std::to_string(i) + " outside [0, " +
                                            std::to_string(g.num_classes) + ")");
      }
    }
  }
  return out;
}

Graph karate_club() {
  static constexpr std::array<std::array<NodeId, 2>, 78> kTies{{
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},   {0, 10},
      {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},  {1, 2},   {1, 3},
      {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},  {2, 3},   {2, 7},   {2, 8},
      {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},  {3, 7},   {3, 12},  {3, 13},  {4, 6},
      {4, 10},  {5, 6},   {5, 10},  {5, 16},  {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},
      {13, 33}, {14, 32}, {14, 33}, {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32},
      {20, 33}, {22, 32}, {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25},
      {24, 27}, {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
      {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33},
  }};
  // 0 = Mr. Hi's faction, 1 = the officer's faction.
  static constexpr std::array<std::int32_t, 34> kFaction{0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0,
                                                         0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1,
                                                         1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  constexpr std::size_t n = 34;
  std::vector<Edge> edges;
  edges.reserve(kTies.size());
  for (const auto& t : kTies) edges.push_back({t[0], t[1]});
  std::vector<float> features(n * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) features[i * n + i] = 1.0f;
  return build_graph(n, edges, std::move(features), n, {kFaction.begin(), kFaction.end()}, 2, "karate");
}

Graph permute_nodes(const Graph& g, std::span<const NodeId> new_id) {
  if (new_id.size() != g.num_nodes) throw ContractViolation("permutation length differs from node count");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    for (NodeId j : g.neighbors(i)) {
      if (i < j) edges.push_back({new_id[i], new_id[j]});
    }
  }
  std::vector<float> features(g.features.size());
  std::vector<std::int32_t> labels(g.labels.size());
  std::vector<bool> seen(g.num_nodes, false);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    NodeId t = new_id[i];
    if (t >= g.num_nodes || seen[t]) throw ContractViolation("node map is not a permutation");
    seen[t] = true;
    auto src = g.feature_row(i);
    std::copy(src.begin(), src.end(), features.begin() + static_cast<std::ptrdiff_t>(t * g.feature_dim));
    if (!labels.empty()) labels[t] = g.labels[i];
  }
  Graph out = build_graph(g.num_nodes, edges, std::move(features), g.feature_dim, std::move(labels),
                          g.num_classes, g.name);
  out.raw_edge_count = g.raw_edge_count;
  return out;
}

}  // namespace golf
