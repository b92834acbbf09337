#include "golf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "golf/error.hpp"
#include "golf/kernels.hpp"
#include "parallel.hpp"

namespace golf {

namespace {

std::vector<double> inverse_sqrt_degrees(const Graph& graph) {
  std::vector<double> out(graph.num_nodes);
  for (NodeId i = 0; i < graph.num_nodes; ++i) out[i] = 1.0 / std::sqrt(static_cast<double>(graph.degree(i) + 1));
  return out;
}

// closed neighborhood in ascending order, self-loop in its sorted slot,
// so nodes with equal neighborhoods get bit-equal rows
void aggregate_row(const Graph& graph, std::span<const double> inv_sqrt_deg, NodeId node, std::span<double> row) {
  std::fill(row.begin(), row.end(), 0.0);
  const double self = inv_sqrt_deg[node] * inv_sqrt_deg[node];
  bool self_done = false;
  for (NodeId j : graph.neighbors(node)) {
    if (!self_done && j > node) {
      kernels::axpy(self, graph.feature_row(node), row);
      self_done = true;
    }
    kernels::axpy(inv_sqrt_deg[node] * inv_sqrt_deg[j], graph.feature_row(j), row);
  }
  if (!self_done) kernels::axpy(self, graph.feature_row(node), row);
}

double density_of(double squared_norm, double inv_sigma2) {
  return std::max(std::exp(-squared_norm * inv_sigma2), std::numeric_limits<double>::min());
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("bandwidth sigma must be a positive finite number, got " + std::to_string(sigma));
  }
}

}  // namespace

AggregatedFeatures compute_aggregated_features(const Graph& graph, unsigned jobs) {
  const std::size_t n = graph.num_nodes;
  const std::size_t d = graph.feature_dim;
  AggregatedFeatures out{n, d, std::vector<double>(n * d, 0.0)};
  const auto inv_sqrt_deg = inverse_sqrt_degrees(graph);
  detail::parallel_for(n, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      aggregate_row(graph, inv_sqrt_deg, static_cast<NodeId>(i), {out.values.data() + i * d, d});
    }
  });
  return out;
}

DensityProfile compute_density(const AggregatedFeatures& features, double sigma, unsigned jobs) {
  check_sigma(sigma);
  DensityProfile out{std::vector<double>(features.num_nodes), sigma};
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  detail::parallel_for(features.num_nodes, jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.rho[i] = density_of(kernels::squared_norm(features.row(static_cast<NodeId>(i))), inv_sigma2);
    }
  });
  return out;
}

DensityProfile compute_density(const Graph& graph, double sigma, unsigned jobs) {
  check_sigma(sigma);
  DensityProfile out{std::vector<double>(graph.num_nodes), sigma};
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  const auto inv_sqrt_deg = inverse_sqrt_degrees(graph);
  detail::parallel_for(graph.num_nodes, jobs, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(graph.feature_dim);
    for (std::size_t i = begin; i < end; ++i) {
      aggregate_row(graph, inv_sqrt_deg, static_cast<NodeId>(i), row);
      out.rho[i] = density_of(kernels::squared_norm(row), inv_sigma2);
    }
  });
  return out;
}

std::vector<NodeId> assign_leading_nodes(const Graph& graph, const DensityProfile& density) {
  std::span<const double> rho = density.rho;
  std::vector<NodeId> parent(graph.num_nodes, kNoNode);
  for (NodeId i = 0; i < graph.num_nodes; ++i) {
    NodeId best = kNoNode;
    for (NodeId j : graph.neighbors(i)) {
      if (!leads(rho, j, i)) continue;
      if (best == kNoNode || leads(rho, j, best)) best = j;
    }
    parent[i] = best;
  }
  return parent;
}

std::vector<double> compute_delta(const Graph& graph, const DensityProfile& density,
                                  std::span<const NodeId> parent) {
  const auto& rho = density.rho;
  std::vector<double> delta(graph.num_nodes);
  for (NodeId i = 0; i < graph.num_nodes; ++i) {
    if (parent[i] != kNoNode) {
      delta[i] = rho[parent[i]];
      continue;
    }
    auto nbrs = graph.neighbors(i);
    if (nbrs.empty()) {
      delta[i] = rho[i];
      continue;
    }
    double lowest = rho[nbrs.front()];
    for (NodeId j : nbrs) lowest = std::min(lowest, rho[j]);
    delta[i] = lowest;
  }
  return delta;
}

std::vector<double> compute_gamma(std::span<const double> rho, std::span<const double> delta) {
  if (rho.size() != delta.size()) throw ContractViolation("rho and delta lengths differ");
  std::vector<double> gamma(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) gamma[i] = rho[i] * delta[i];
  return gamma;
}

LeadingForest cut_forest(const Graph& graph, const DensityProfile& density, std::vector<NodeId> parent,
                         std::vector<double> delta, std::vector<double> gamma, std::size_t trees) {
  const std::size_t n = graph.num_nodes;
  if (trees < 1 || trees > n) {
    throw ParameterError("tree count must lie in [1, " + std::to_string(n) + "], got " + std::to_string(trees));
  }
  if (parent.size() != n || delta.size() != n || gamma.size() != n || density.rho.size() != n) {
    throw ContractViolation("forest arrays must have one entry per node");
  }

  LeadingForest f;
  f.requested_trees = trees;
  f.sigma = density.sigma;
  f.natural_roots = static_cast<std::size_t>(std::count(parent.begin(), parent.end(), kNoNode));

  if (f.natural_roots < trees) {
    std::vector<NodeId> candidates;
    candidates.reserve(n - f.natural_roots);
    for (NodeId i = 0; i < n; ++i) {
      if (parent[i] != kNoNode) candidates.push_back(i);
    }
    const std::size_t cuts = trees - f.natural_roots;
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(cuts), candidates.end(),
                      [&](NodeId a, NodeId b) { return gamma[a] > gamma[b] || (gamma[a] == gamma[b] && a < b); });
    for (std::size_t c = 0; c < cuts; ++c) parent[candidates[c]] = kNoNode;
  }

  // children in CSR form, ascending within each parent
  std::vector<std::size_t> child_offsets(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    if (parent[i] != kNoNode) ++child_offsets[parent[i] + 1];
  }
  std::partial_sum(child_offsets.begin(), child_offsets.end(), child_offsets.begin());
  std::vector<NodeId> children(child_offsets.back());
  {
    std::vector<std::size_t> cursor(child_offsets.begin(), child_offsets.end() - 1);
    for (NodeId i = 0; i < n; ++i) {
      if (parent[i] != kNoNode) children[cursor[parent[i]]++] = i;
    }
  }

  f.layer.assign(n, 0);
  f.tree_id.assign(n, 0);
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (NodeId r = 0; r < n; ++r) {
    if (parent[r] != kNoNode) continue;
    const auto tree = static_cast<std::uint32_t>(f.roots.size());
    f.roots.push_back(r);
    f.layer[r] = 1;
    f.tree_id[r] = tree;
    queue.push_back(r);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (std::size_t c = child_offsets[u]; c < child_offsets[u + 1]; ++c) {
      const NodeId v = children[c];
      f.layer[v] = f.layer[u] + 1;
      f.tree_id[v] = f.tree_id[u];
      queue.push_back(v);
    }
  }
  if (queue.size() != n) throw ContractViolation("parent links contain a cycle");

  f.parent = std::move(parent);
  f.rho = density.rho;
  f.delta = std::move(delta);
  f.gamma = std::move(gamma);
  return f;
}

LeadingForest build_forest(const Graph& graph, double sigma, std::size_t trees, unsigned jobs) {
  const auto density = compute_density(graph, sigma, jobs);
  auto parent = assign_leading_nodes(graph, density);
  auto delta = compute_delta(graph, density, parent);
  auto gamma = compute_gamma(density.rho, delta);
  return cut_forest(graph, density, std::move(parent), std::move(delta), std::move(gamma), trees);
}

}  // namespace golf
