#pragma once

// Graph-based optimal leading forest: aggregated features, node densities,
// leading (parent) relations, delta/gamma scores, forest cut and layer depths.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "golf/graph.hpp"

namespace golf {

// F = D^-1/2 (A + I) D^-1/2 X, one row per node, accumulated in double.
struct AggregatedFeatures {
  std::size_t num_nodes = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(NodeId i) const {
    return {values.data() + static_cast<std::size_t>(i) * dim, dim};
  }
};

struct DensityProfile {
  std::vector<double> rho;  // each in (0, 1]
  double sigma = 1.0;
};

struct LeadingForest {
  std::vector<NodeId> parent;  // kNoNode for roots
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<double> gamma;
  std::vector<std::uint32_t> layer;    // roots sit on layer 1
  std::vector<std::uint32_t> tree_id;  // index into roots
  std::vector<NodeId> roots;           // ascending
  std::size_t natural_roots = 0;       // local roots before the gamma cut
  std::size_t requested_trees = 0;
  double sigma = 1.0;

  std::size_t size() const { return parent.size(); }
  std::size_t num_trees() const { return roots.size(); }
  bool is_root(NodeId i) const { return parent[i] == kNoNode; }
};

// Strict leading order: higher density wins, equal densities go to the lower index.
inline bool leads(std::span<const double> rho, NodeId a, NodeId b) {
  return rho[a] > rho[b] || (rho[a] == rho[b] && a < b);
}

// jobs > 1 splits rows across threads; the result does not depend on it.
AggregatedFeatures compute_aggregated_features(const Graph& graph, unsigned jobs = 1);

// rho_i = exp(-|F_i|^2 / sigma^2), floored at the smallest normal double so
// that rho stays strictly positive. Throws ParameterError unless sigma > 0.
DensityProfile compute_density(const AggregatedFeatures& features, double sigma, unsigned jobs = 1);

// Same densities computed row by row, without holding the aggregated matrix.
DensityProfile compute_density(const Graph& graph, double sigma, unsigned jobs = 1);

// Each node's parent is its leading-most neighbor among those that lead it.
// Nodes no neighbor leads become local roots.
std::vector<NodeId> assign_leading_nodes(const Graph& graph, const DensityProfile& density);

// Non-roots take their parent's density. Roots take the smallest neighbor
// density, or their own density when isolated.
std::vector<double> compute_delta(const Graph& graph, const DensityProfile& density,
                                  std::span<const NodeId> parent);

std::vector<double> compute_gamma(std::span<const double> rho, std::span<const double> delta);

// Tops the local roots up to `trees` by detaching the highest-gamma non-roots
// (ties to the lower index), then assigns layers and tree ids. When the graph
// already has at least `trees` local roots nothing is detached.
// Throws ParameterError unless 1 <= trees <= num_nodes.
LeadingForest cut_forest(const Graph& graph, const DensityProfile& density, std::vector<NodeId> parent,
                         std::vector<double> delta, std::vector<double> gamma, std::size_t trees);

// The full chain above.
LeadingForest build_forest(const Graph& graph, double sigma, std::size_t trees, unsigned jobs = 1);

}  // namespace golf
