#include "golf/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "golf/error.hpp"

namespace golf {

std::string_view to_string(GroupMode mode) {
  return mode == GroupMode::tree_proxy ? "tree" : "oracle";
}

GroupMode parse_group_mode(std::string_view text) {
  if (text == "tree" || text == "tree-proxy") return GroupMode::tree_proxy;
  if (text == "oracle" || text == "oracle-labels") return GroupMode::oracle_labels;
  throw ParameterError("unknown group mode '" + std::string(text) + "' (expected tree|oracle)");
}

std::vector<NodeId> LabelSet::nodes() const {
  std::vector<NodeId> all(typical);
  all.insert(all.end(), divergent.begin(), divergent.end());
  return all;
}

double typical_cost(double gamma) { return 1.0 / std::log(std::clamp(gamma, kGammaFloor, kGammaCeil)); }

namespace {

double divergent_score(const LeadingForest& f, NodeId j) { return f.rho[j] / static_cast<double>(f.layer[j]); }

}  // namespace

double evaluate_objective(const LeadingForest& forest, std::span<const NodeId> typical,
                          std::span<const NodeId> divergent, double alpha) {
  std::vector<bool> used(forest.size(), false);
  auto claim = [&](NodeId i) {
    if (i >= forest.size()) throw ContractViolation("node " + std::to_string(i) + " is not in the forest");
    if (used[i]) throw ContractViolation("node " + std::to_string(i) + " appears twice in the label set");
    used[i] = true;
  };
  double typ = 0.0;
  for (NodeId i : typical) {
    claim(i);
    typ += typical_cost(forest.gamma[i]);
  }
  double div = 0.0;
  for (NodeId j : divergent) {
    claim(j);
    div += divergent_score(forest, j);
  }
  return alpha * typ + (1.0 - alpha) * div;
}

std::size_t budget_from_rate(double rate, std::size_t num_nodes) {
  if (!(rate > 0.0) || rate > 1.0) throw ParameterError("label rate must lie in (0, 1], got " + std::to_string(rate));
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(num_nodes)));
}

std::size_t default_tree_count(const Graph& graph) { return graph.num_classes > 0 ? graph.num_classes : 8; }

GroupAssignment assign_groups(const LeadingForest& forest, GroupMode mode, std::span<const std::int32_t> labels,
                              std::size_t num_classes) {
  GroupAssignment out;
  out.group_of.assign(forest.size(), -1);
  if (mode == GroupMode::oracle_labels) {
    if (labels.size() != forest.size() || num_classes == 0) {
      throw ParameterError("oracle group mode needs ground-truth labels for every node");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) out.group_of[i] = labels[i];
    out.num_groups = num_classes;
    return out;
  }

  std::vector<std::uint32_t> trees(forest.num_trees());
  std::iota(trees.begin(), trees.end(), 0u);
  const std::size_t keep = std::min(trees.size(), std::max<std::size_t>(forest.requested_trees, 1));
  auto root_gamma = [&](std::uint32_t t) { return forest.gamma[forest.roots[t]]; };
  std::partial_sort(trees.begin(), trees.begin() + static_cast<std::ptrdiff_t>(keep), trees.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return root_gamma(a) > root_gamma(b) || (root_gamma(a) == root_gamma(b) && a < b);
                    });
  trees.resize(keep);
  std::sort(trees.begin(), trees.end());
  std::vector<std::int32_t> group_of_tree(forest.num_trees(), -1);
  for (std::size_t g = 0; g < trees.size(); ++g) group_of_tree[trees[g]] = static_cast<std::int32_t>(g);
  for (std::size_t i = 0; i < forest.size(); ++i) out.group_of[i] = group_of_tree[forest.tree_id[i]];
  out.num_groups = keep;
  return out;
}

namespace {

void check_config(const LeadingForest& forest, const SelectionConfig& config, const GroupAssignment& groups) {
  const std::size_t n = forest.size();
  if (config.budget < 1 || config.budget > n) {
    throw ParameterError("label budget must lie in [1, " + std::to_string(n) + "], got " +
                         std::to_string(config.budget));
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + std::to_string(config.alpha));
  }
  if (config.min_per_group * groups.num_groups > config.budget) {
    throw InfeasibleError("k * groups = " + std::to_string(config.min_per_group) + " * " +
                          std::to_string(groups.num_groups) + " exceeds the budget of " +
                          std::to_string(config.budget));
  }
  std::vector<std::size_t> sizes(groups.num_groups, 0);
  for (auto g : groups.group_of) {
    if (g >= 0) ++sizes[static_cast<std::size_t>(g)];
  }
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    if (sizes[g] < config.min_per_group) {
      throw InfeasibleError("group " + std::to_string(g) + " has " + std::to_string(sizes[g]) +
                            " nodes, fewer than k = " + std::to_string(config.min_per_group));
    }
  }
}

SelectionConfig resolved(const LeadingForest& forest, SelectionConfig config) {
  config.trees = forest.requested_trees;
  config.sigma = forest.sigma;
  return config;
}

}  // namespace

LabelSet select_labels(const LeadingForest& forest, const SelectionConfig& config,
                       std::span<const std::int32_t> labels, std::size_t num_classes) {
  const auto groups = assign_groups(forest, config.group_mode, labels, num_classes);
  check_config(forest, config, groups);
  const std::size_t n = forest.size();
  const double alpha = config.alpha;

  LabelSet out;
  out.config = resolved(forest, config);
  out.num_groups = groups.num_groups;
  std::vector<bool> taken(n, false);

  auto by_gamma = [&](NodeId a, NodeId b) {
    return forest.gamma[a] > forest.gamma[b] || (forest.gamma[a] == forest.gamma[b] && a < b);
  };

  // 1. quotas
  if (config.min_per_group > 0) {
    std::vector<std::vector<NodeId>> members(groups.num_groups);
    for (NodeId i = 0; i < n; ++i) {
      if (groups.group_of[i] >= 0) members[static_cast<std::size_t>(groups.group_of[i])].push_back(i);
    }
    for (auto& m : members) {
      const auto k = static_cast<std::ptrdiff_t>(config.min_per_group);
      std::partial_sort(m.begin(), m.begin() + k, m.end(), by_gamma);
      for (std::ptrdiff_t r = 0; r < k; ++r) {
        out.typical.push_back(m[static_cast<std::size_t>(r)]);
        taken[m[static_cast<std::size_t>(r)]] = true;
      }
    }
  }

  // 2. streams. Within a stream, equal weighted costs fall back to the
  // unweighted score, so a zero weight still yields a meaningful order, and
  // then to the unclamped value so that q's clamp does not erase the ranking.
  struct Entry {
    double cost;
    double score;
    double raw;
    NodeId node;
    bool operator<(const Entry& o) const {
      if (cost != o.cost) return cost < o.cost;
      if (score != o.score) return score < o.score;
      if (raw != o.raw) return raw < o.raw;
      return node < o.node;
    }
  };
  std::vector<Entry> typical_stream;
  std::vector<Entry> divergent_stream;
  typical_stream.reserve(n);
  divergent_stream.reserve(n);
  for (NodeId i = 0; i < n; ++i) {
    if (taken[i]) continue;
    const double q = typical_cost(forest.gamma[i]);
    const double d = divergent_score(forest, i);
    typical_stream.push_back({alpha * q, q, -forest.gamma[i], i});
    divergent_stream.push_back({(1.0 - alpha) * d, d, d, i});
  }
  std::sort(typical_stream.begin(), typical_stream.end());
  std::sort(divergent_stream.begin(), divergent_stream.end());

  // 3. merge
  std::size_t ti = 0;
  std::size_t di = 0;
  auto skip_taken = [&](const std::vector<Entry>& s, std::size_t& idx) {
    while (idx < s.size() && taken[s[idx].node]) ++idx;
  };
  while (out.size() < config.budget) {
    skip_taken(typical_stream, ti);
    skip_taken(divergent_stream, di);
    const bool have_t = ti < typical_stream.size();
    const bool have_d = di < divergent_stream.size();
    if (!have_t && !have_d) break;
    bool pick_typical = have_t;
    if (have_t && have_d) {
      pick_typical = typical_stream[ti].cost <= divergent_stream[di].cost;
    }
    if (pick_typical) {
      const NodeId v = typical_stream[ti++].node;
      taken[v] = true;
      out.typical.push_back(v);
    } else {
      const NodeId v = divergent_stream[di++].node;
      taken[v] = true;
      out.divergent.push_back(v);
    }
  }

  out.objective = evaluate_objective(forest, out.typical, out.divergent, alpha);
  return out;
}

LabelSet brute_force_select(const LeadingForest& forest, const SelectionConfig& config,
                            std::span<const std::int32_t> labels, std::size_t num_classes) {
  const auto groups = assign_groups(forest, config.group_mode, labels, num_classes);
  check_config(forest, config, groups);
  const std::size_t n = forest.size();
  const std::size_t l = config.budget;

  double subsets = 1.0;
  for (std::size_t i = 0; i < l; ++i) subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
  const double work = subsets * std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(l, 1000)));
  if (work > kBruteForceLimit) {
    throw SizeGuardError("brute force would evaluate " + std::to_string(work) + " assignments (limit " +
                         std::to_string(kBruteForceLimit) + ")");
  }

  LabelSet best;
  best.config = resolved(forest, config);
  best.num_groups = groups.num_groups;
  bool found = false;

  std::vector<NodeId> subset(l);
  std::iota(subset.begin(), subset.end(), NodeId{0});
  std::vector<std::size_t> typical_per_group(groups.num_groups);
  std::vector<NodeId> typ;
  std::vector<NodeId> div;
  typ.reserve(l);
  div.reserve(l);
  const std::uint64_t masks = std::uint64_t{1} << l;
  while (true) {
    for (std::uint64_t mask = masks; mask-- > 0;) {
      // mask bit p set = subset[p] is typical; scanning from all-typical down
      typ.clear();
      div.clear();
      std::fill(typical_per_group.begin(), typical_per_group.end(), 0);
      for (std::size_t p = 0; p < l; ++p) {
        if (mask >> p & 1u) {
          typ.push_back(subset[p]);
          if (groups.group_of[subset[p]] >= 0) ++typical_per_group[static_cast<std::size_t>(groups.group_of[subset[p]])];
        } else {
          div.push_back(subset[p]);
        }
      }
      if (std::any_of(typical_per_group.begin(), typical_per_group.end(),
                      [&](std::size_t c) { return c < config.min_per_group; })) {
        continue;
      }
      const double j = evaluate_objective(forest, typ, div, config.alpha);
      if (!found || j < best.objective) {
        found = true;
        best.objective = j;
        best.typical = typ;
        best.divergent = div;
      }
    }
    // next subset in lexicographic order
    std::size_t p = l;
    while (p > 0 && subset[p - 1] == n - l + (p - 1)) --p;
    if (p == 0) break;
    ++subset[p - 1];
    for (std::size_t q = p; q < l; ++q) subset[q] = subset[q - 1] + 1;
  }
  if (!found) throw InfeasibleError("no assignment satisfies the per-group quota");
  return best;
}

LabelSet dns(const Graph& graph, const SelectionConfig& config, unsigned jobs) {
  const std::size_t trees = config.trees.value_or(default_tree_count(graph));
  const LeadingForest forest = build_forest(graph, config.sigma, trees, jobs);
  if (config.group_mode == GroupMode::oracle_labels) {
    return select_labels(forest, config, graph.labels, graph.num_classes);
  }
  return select_labels(forest, config);
}

}  // namespace golf
