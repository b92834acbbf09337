#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "golf/error.hpp"
#include "golf/forest.hpp"
#include "golf/graph.hpp"
#include "oracles/dense_golf.hpp"

namespace golf {
namespace {

DensityProfile profile(std::vector<double> rho) {
  DensityProfile d;
  d.rho = std::move(rho);
  return d;
}

Graph path3() { return build_graph(3, std::vector<Edge>{{0, 1}, {1, 2}}, std::vector<float>(3, 0.0f), 1); }

Graph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::size_t dim) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> x(n * dim);
  for (auto& v : x) v = u(rng);
  return build_graph(n, edges, std::move(x), dim);
}

void expect_forest_invariants(const LeadingForest& f) {
  const std::size_t n = f.size();
  for (NodeId i = 0; i < n; ++i) {
    NodeId v = i;
    std::size_t steps = 0;
    while (!f.is_root(v) && steps <= n) {
      v = f.parent[v];
      ++steps;
    }
    ASSERT_LE(steps, n) << "cycle through node " << i;
    if (f.is_root(i)) {
      EXPECT_EQ(f.layer[i], 1u);
      EXPECT_EQ(f.roots[f.tree_id[i]], i);
    } else {
      const NodeId p = f.parent[i];
      EXPECT_EQ(f.layer[i], f.layer[p] + 1);
      EXPECT_EQ(f.tree_id[i], f.tree_id[p]);
    }
  }
}

TEST(Aggregate, SingleIsolatedNode) {
  const Graph g = build_graph(1, {}, {3.0f}, 1);
  const auto f = compute_aggregated_features(g);
  ASSERT_EQ(f.values.size(), 1u);
  EXPECT_DOUBLE_EQ(f.values[0], 3.0);
}

TEST(Aggregate, TwoNodeEdge) {
  const Graph g = build_graph(2, std::vector<Edge>{{0, 1}}, {1, 0, 0, 1}, 2);
  const auto f = compute_aggregated_features(g);
  for (double v : f.values) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Aggregate, MatchesDenseProduct) {
  const Graph g = karate_club();
  const auto f = compute_aggregated_features(g);
  const auto dense = oracle::dense_aggregate(g);
  for (NodeId i = 0; i < g.num_nodes; ++i)
    for (std::size_t c = 0; c < g.feature_dim; ++c) EXPECT_NEAR(f.row(i)[c], dense[i][c], 1e-15);
}

TEST(Aggregate, DependsOnlyOnClosedNeighborhood) {
  std::mt19937_64 rng(3);
  Graph g = random_graph(rng, 30, 0.08, 4);
  const auto before = compute_aggregated_features(g);
  const NodeId target = 0;
  auto nb = g.neighbors(target);
  for (NodeId other = 1; other < g.num_nodes; ++other) {
    if (std::find(nb.begin(), nb.end(), other) != nb.end()) continue;
    Graph h = g;
    h.features[other * h.feature_dim] += 10.0f;
    const auto after = compute_aggregated_features(h);
    for (std::size_t c = 0; c < g.feature_dim; ++c) EXPECT_EQ(after.row(target)[c], before.row(target)[c]);
  }
}

TEST(Density, ClosedForms) {
  AggregatedFeatures f;
  f.num_nodes = 3;
  f.dim = 2;
  f.values = {0, 0, 1, 0, 0.6, 0.8};
  const auto d = compute_density(f, 1.0);
  EXPECT_EQ(d.rho[0], 1.0);
  EXPECT_NEAR(d.rho[1], 0.367879441171442, 1e-12);
  EXPECT_NEAR(d.rho[2], std::exp(-1.0), 1e-12);
  const auto wide = compute_density(f, 1e9);
  for (double r : wide.rho) EXPECT_NEAR(r, 1.0, 1e-9);
}

TEST(Density, RejectsBadSigma) {
  AggregatedFeatures f;
  f.num_nodes = 1;
  f.dim = 1;
  f.values = {1.0};
  EXPECT_THROW(compute_density(f, 0.0), ParameterError);
  EXPECT_THROW(compute_density(f, -1.0), ParameterError);
  EXPECT_THROW(compute_density(f, std::nan("")), ParameterError);
}

TEST(Density, StaysPositiveUnderUnderflow) {
  AggregatedFeatures f;
  f.num_nodes = 1;
  f.dim = 1;
  f.values = {100.0};
  const auto d = compute_density(f, 0.1);
  EXPECT_GT(d.rho[0], 0.0);
}

TEST(Density, RowByRowMatchesStagedBitwise) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(rng, 60, 0.06, 7);
    for (double sigma : {0.5, 2.0}) {
      const auto staged = compute_density(compute_aggregated_features(g), sigma);
      for (unsigned jobs : {1u, 3u}) {
        const auto fused = compute_density(g, sigma, jobs);
        ASSERT_EQ(fused.rho.size(), staged.rho.size());
        for (std::size_t i = 0; i < g.num_nodes; ++i) EXPECT_EQ(fused.rho[i], staged.rho[i]) << "node " << i;
      }
    }
  }
  const Graph g = path3();
  EXPECT_THROW(compute_density(g, 0.0), ParameterError);
}

TEST(Leading, PathExample) {
  const Graph g = path3();
  const auto d = profile({0.1, 0.9, 0.5});
  const auto parent = assign_leading_nodes(g, d);
  EXPECT_EQ(parent, (std::vector<NodeId>{1, kNoNode, 1}));
  const auto delta = compute_delta(g, d, parent);
  EXPECT_EQ(delta, (std::vector<double>{0.9, 0.1, 0.9}));
  const auto gamma = compute_gamma(d.rho, delta);
  EXPECT_DOUBLE_EQ(gamma[1], 0.1 * 0.9);
}

TEST(Leading, StarLeavesFollowCenter) {
  std::vector<Edge> edges;
  for (NodeId i = 1; i < 6; ++i) edges.push_back({0, i});
  const Graph g = build_graph(6, edges, std::vector<float>(6, 0.0f), 1);
  const auto parent = assign_leading_nodes(g, profile({0.9, 0.1, 0.2, 0.3, 0.4, 0.5}));
  EXPECT_EQ(parent[0], kNoNode);
  for (NodeId i = 1; i < 6; ++i) EXPECT_EQ(parent[i], 0u);
}

TEST(Leading, TiesGoToLowerIndex) {
  const Graph g = build_graph(2, std::vector<Edge>{{0, 1}}, {0, 0}, 1);
  const auto parent = assign_leading_nodes(g, profile({0.5, 0.5}));
  EXPECT_EQ(parent, (std::vector<NodeId>{kNoNode, 0}));
}

// Every graph on 4 labelled nodes, every density pattern over {0.2, 0.5}:
// parent-following must terminate, checked by a three-colour DFS.
TEST(Leading, ExhaustiveTiedFourNodeGraphsAreAcyclic) {
  const std::vector<std::pair<NodeId, NodeId>> pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::size_t checked = 0;
  for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t b = 0; b < pairs.size(); ++b)
      if (mask & (1u << b)) edges.push_back({pairs[b].first, pairs[b].second});
    const Graph g = build_graph(4, edges, std::vector<float>(4, 0.0f), 1);
    for (unsigned dm = 0; dm < 16; ++dm) {
      std::vector<double> rho(4);
      for (int i = 0; i < 4; ++i) rho[i] = (dm >> i) & 1 ? 0.5 : 0.2;
      const auto parent = assign_leading_nodes(g, profile(rho));
      std::vector<int> colour(4, 0);
      for (int s = 0; s < 4; ++s) {
        std::vector<int> path;
        int v = s;
        while (v >= 0 && colour[v] == 0) {
          colour[v] = 1;
          path.push_back(v);
          v = parent[v] == kNoNode ? -1 : static_cast<int>(parent[v]);
        }
        ASSERT_FALSE(v >= 0 && colour[v] == 1) << "cycle, mask=" << mask << " densities=" << dm;
        for (int p : path) colour[p] = 2;
      }
      for (int i = 0; i < 4; ++i) {
        if (parent[i] == kNoNode) continue;
        EXPECT_TRUE(leads(rho, parent[i], static_cast<NodeId>(i)));
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, 64u * 16u);
}

TEST(Delta, IsolatedRootUsesOwnDensity) {
  const Graph g = build_graph(3, std::vector<Edge>{{0, 1}}, std::vector<float>(3, 0.0f), 1);
  const auto d = profile({0.3, 0.6, 0.2});
  const auto parent = assign_leading_nodes(g, d);
  const auto delta = compute_delta(g, d, parent);
  EXPECT_EQ(delta[2], 0.2);
  EXPECT_EQ(delta[0], 0.6);
  EXPECT_EQ(delta[1], 0.3);
}

TEST(Cut, SingleTreeRootIsDensityMax) {
  const Graph g = path3();
  const auto d = profile({0.1, 0.9, 0.5});
  auto parent = assign_leading_nodes(g, d);
  auto delta = compute_delta(g, d, parent);
  auto gamma = compute_gamma(d.rho, delta);
  const auto f = cut_forest(g, d, parent, delta, gamma, 1);
  EXPECT_EQ(f.roots, (std::vector<NodeId>{1}));
  EXPECT_EQ(f.layer, (std::vector<std::uint32_t>{2, 1, 2}));
  expect_forest_invariants(f);
}

TEST(Cut, AllRootsWhenTreesEqualsNodes) {
  const Graph g = karate_club();
  const auto f = build_forest(g, 1.0, g.num_nodes);
  EXPECT_EQ(f.num_trees(), g.num_nodes);
  for (auto l : f.layer) EXPECT_EQ(l, 1u);
}

TEST(Cut, DetachesHighestGammaFirst) {
  const Graph g = path3();
  const auto d = profile({0.1, 0.9, 0.5});
  auto parent = assign_leading_nodes(g, d);
  auto delta = compute_delta(g, d, parent);
  auto gamma = compute_gamma(d.rho, delta);
  const auto f = cut_forest(g, d, parent, delta, gamma, 2);
  // gamma: node 0 = 0.09, node 2 = 0.45
  EXPECT_EQ(f.roots, (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(f.natural_roots, 1u);
  expect_forest_invariants(f);
}

TEST(Cut, RejectsBadTreeCounts) {
  const Graph g = path3();
  EXPECT_THROW(build_forest(g, 1.0, 0), ParameterError);
  EXPECT_THROW(build_forest(g, 1.0, 4), ParameterError);
}

TEST(Cut, KeepsNaturalRootsWhenThereAreMore) {
  const Graph g = build_graph(4, {}, {1, 2, 3, 4}, 1);
  const auto f = build_forest(g, 1.0, 2);
  EXPECT_EQ(f.num_trees(), 4u);
  EXPECT_EQ(f.requested_trees, 2u);
}

TEST(Forest, KarateMatchesDenseOracle) {
  const Graph g = karate_club();
  const auto f = build_forest(g, 1.0, 2);
  const auto o = oracle::dense_forest(g, 1.0, 2);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    EXPECT_EQ(f.is_root(i) ? -1L : static_cast<long>(f.parent[i]), o.parent[i]) << "node " << i;
    EXPECT_EQ(static_cast<long>(f.layer[i]), o.layer[i]);
    EXPECT_NEAR(f.rho[i], o.rho[i], 1e-15);
    EXPECT_NEAR(f.gamma[i], o.gamma[i], 1e-15);
  }
  expect_forest_invariants(f);
}

TEST(Forest, RandomGraphsMatchDenseOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const Graph g = random_graph(rng, n, 0.15, 3);
    const std::size_t trees = 1 + rng() % n;
    const auto f = build_forest(g, 1.5, trees);
    const auto o = oracle::dense_forest(g, 1.5, trees);
    for (NodeId i = 0; i < n; ++i) {
      ASSERT_EQ(f.is_root(i) ? -1L : static_cast<long>(f.parent[i]), o.parent[i]) << "trial " << trial;
      ASSERT_EQ(static_cast<long>(f.layer[i]), o.layer[i]);
    }
    expect_forest_invariants(f);
  }
}

TEST(Forest, ScalingFeaturesAndSigmaKeepsTopology) {
  std::mt19937_64 rng(5);
  const Graph g = random_graph(rng, 40, 0.1, 5);
  Graph scaled = g;
  for (auto& v : scaled.features) v *= 4.0f;
  const auto a = build_forest(g, 1.0, 3);
  const auto b = build_forest(scaled, 4.0, 3);
  EXPECT_EQ(a.parent, b.parent);
  EXPECT_EQ(a.layer, b.layer);
  std::vector<NodeId> ra(g.num_nodes), rb(g.num_nodes);
  for (NodeId i = 0; i < g.num_nodes; ++i) ra[i] = rb[i] = i;
  std::stable_sort(ra.begin(), ra.end(), [&](NodeId x, NodeId y) { return leads(a.rho, x, y); });
  std::stable_sort(rb.begin(), rb.end(), [&](NodeId x, NodeId y) { return leads(b.rho, x, y); });
  EXPECT_EQ(ra, rb);
}

TEST(Forest, IdenticalAcrossJobCounts) {
  const Graph g = karate_club();
  const auto a = build_forest(g, 0.7, 5, 1);
  const auto b = build_forest(g, 0.7, 5, 4);
  EXPECT_EQ(a.parent, b.parent);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.layer, b.layer);
  EXPECT_EQ(a.tree_id, b.tree_id);
}

}  // namespace
}  // namespace golf
