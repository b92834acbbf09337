#pragma once

// Straight dense re-evaluation of the leading-forest equations. Shares no
// code with the library beyond the Graph container: builds the full
// (A + I) matrix, multiplies with plain loops, and walks parent chains to
// get layers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "golf/graph.hpp"

namespace golf::oracle {

struct DenseForest {
  std::vector<long> parent;  // -1 for roots
  std::vector<double> rho, delta, gamma;
  std::vector<long> layer;
  std::vector<long> root_of;
};

inline std::vector<std::vector<double>> dense_aggregate(const Graph& g) {
  const std::size_t n = g.num_nodes, d = g.feature_dim;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) a[i][j] = 1.0;
  }
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  std::vector<std::vector<double>> f(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j] == 0.0) continue;
      const double w = a[i][j] / std::sqrt(deg[i] * deg[j]);
      for (std::size_t c = 0; c < d; ++c) f[i][c] += w * g.features[j * d + c];
    }
  return f;
}

inline DenseForest dense_forest(const Graph& g, double sigma, std::size_t trees) {
  const std::size_t n = g.num_nodes;
  const auto f = dense_aggregate(g);
  DenseForest out;
  out.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : f[i]) sq += v * v;
    out.rho[i] = std::max(std::exp(-sq / (sigma * sigma)), std::numeric_limits<double>::min());
  }
  auto above = [&](std::size_t a, std::size_t b) {
    return out.rho[a] > out.rho[b] || (out.rho[a] == out.rho[b] && a < b);
  };
  out.parent.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
      if (!above(j, i)) continue;
      if (out.parent[i] < 0 || above(j, static_cast<std::size_t>(out.parent[i]))) out.parent[i] = j;
    }
  }
  out.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.parent[i] >= 0) {
      out.delta[i] = out.rho[static_cast<std::size_t>(out.parent[i])];
    } else if (g.degree(static_cast<NodeId>(i)) == 0) {
      out.delta[i] = out.rho[i];
    } else {
      double lo = std::numeric_limits<double>::infinity();
      for (NodeId j : g.neighbors(static_cast<NodeId>(i))) lo = std::min(lo, out.rho[j]);
      out.delta[i] = lo;
    }
  }
  out.gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.gamma[i] = out.rho[i] * out.delta[i];

  std::size_t roots = static_cast<std::size_t>(std::count(out.parent.begin(), out.parent.end(), -1L));
  while (roots < trees) {
    long best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.parent[i] < 0) continue;
      if (best < 0 || out.gamma[i] > out.gamma[static_cast<std::size_t>(best)]) best = static_cast<long>(i);
    }
    out.parent[static_cast<std::size_t>(best)] = -1;
    ++roots;
  }

  out.layer.assign(n, 0);
  out.root_of.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    long v = static_cast<long>(i), depth = 1;
    while (out.parent[static_cast<std::size_t>(v)] >= 0) {
      v = out.parent[static_cast<std::size_t>(v)];
      ++depth;
    }
    out.layer[i] = depth;
    out.root_of[i] = v;
  }
  return out;
}

}  // namespace golf::oracle
