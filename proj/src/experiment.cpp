#include "golf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "golf/error.hpp"
#include "parallel.hpp"

namespace golf {

std::string_view to_string(SplitMode mode) { return mode == SplitMode::random ? "random" : "dns"; }

SplitMode parse_split_mode(std::string_view text) {
  if (text == "random") return SplitMode::random;
  if (text == "dns") return SplitMode::dns;
  throw ParameterError("unknown split mode '" + std::string(text) + "' (expected random|dns)");
}

std::size_t scheduled_layers(std::string_view dataset, double rate) {
  static constexpr double kRates[] = {0.005, 0.01, 0.02, 0.03, 0.04};
  static constexpr std::size_t kCora[] = {4, 3, 3, 2, 2};
  static constexpr std::size_t kCiteseer[] = {3, 3, 3, 2, 2};
  if (dataset == "pubmed") return 4;
  const std::size_t* table = dataset == "cora" ? kCora : dataset == "citeseer" ? kCiteseer : nullptr;
  if (table == nullptr) return 2;
  for (std::size_t i = 0; i < std::size(kRates); ++i) {
    if (std::abs(rate - kRates[i]) < 1e-9) return table[i];
  }
  return 2;
}

std::vector<double> ExperimentReport::accuracies() const {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.accuracy);
  return out;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

std::vector<NodeId> shuffled_nodes(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// decorrelates training randomness from the split drawn with the same seed
std::uint64_t training_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull; }

}  // namespace

Split random_split(const Graph& graph, std::size_t budget, std::size_t test_size, std::uint64_t seed,
                   bool stratified) {
  if (budget > graph.num_nodes) throw ParameterError("label budget exceeds node count");
  const auto order = shuffled_nodes(graph.num_nodes, seed);
  Split split;
  std::vector<bool> used(graph.num_nodes, false);
  if (stratified && graph.has_labels() && graph.num_classes > 0) {
    std::vector<std::vector<NodeId>> by_class(graph.num_classes);
    for (NodeId v : order) by_class[static_cast<std::size_t>(graph.labels[v])].push_back(v);
    std::vector<std::size_t> cursor(graph.num_classes, 0);
    while (split.labeled.size() < budget) {
      bool progressed = false;
      for (std::size_t c = 0; c < graph.num_classes && split.labeled.size() < budget; ++c) {
        if (cursor[c] < by_class[c].size()) {
          split.labeled.push_back(by_class[c][cursor[c]++]);
          progressed = true;
        }
      }
      if (!progressed) break;
    }
  } else {
    split.labeled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
  }
  for (NodeId v : split.labeled) used[v] = true;
  for (NodeId v : order) {
    if (split.test.size() == test_size) break;
    if (!used[v]) split.test.push_back(v);
  }
  return split;
}

std::vector<NodeId> test_split(const Graph& graph, std::span<const NodeId> labeled, std::size_t test_size,
                               std::uint64_t seed) {
  const auto order = shuffled_nodes(graph.num_nodes, seed);
  std::vector<bool> used(graph.num_nodes, false);
  for (NodeId v : labeled) used[v] = true;
  std::vector<NodeId> test;
  test.reserve(test_size);
  for (NodeId v : order) {
    if (test.size() == test_size) break;
    if (!used[v]) test.push_back(v);
  }
  return test;
}

ExperimentReport run_experiment(const Graph& graph, const ExperimentConfig& config) {
  if (!graph.has_labels()) throw ParameterError("experiments need a labeled graph");
  if (config.runs < 1) throw ParameterError("need at least one run");

  ExperimentReport report;
  report.dataset = graph.name;
  report.rate = config.rate;
  report.mode = config.mode;
  report.config = config;
  report.budget = budget_from_rate(config.rate, graph.num_nodes);
  if (report.budget < 1) throw ParameterError("label rate yields an empty label set");
  report.num_layers = config.num_layers.value_or(scheduled_layers(graph.name, config.rate));
  report.config.num_layers = report.num_layers;

  if (graph.num_nodes - report.budget < config.test_size) {
    report.warnings.push_back("test pool holds only " + std::to_string(graph.num_nodes - report.budget) +
                              " unlabeled nodes; using all of them");
  }

  std::vector<NodeId> fixed_labels;
  if (config.mode == SplitMode::dns) {
    SelectionConfig sel = config.selection;
    sel.budget = report.budget;
    const auto t0 = std::chrono::steady_clock::now();
    report.selection = dns(graph, sel, config.jobs);
    report.selection_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.config.selection = report.selection->config;
    fixed_labels = report.selection->nodes();
  }

  TrainConfig train_config = config.train;
  train_config.num_layers = report.num_layers;
  check(train_config);
  const SparseMatrix features = input_features(graph, train_config.row_normalize);

  report.runs.resize(config.runs);
  detail::parallel_for(config.runs, config.jobs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RunResult& run = report.runs[r];
      run.run = r;
      run.seed = config.base_seed + r;
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<NodeId> test;
      if (config.mode == SplitMode::random) {
        Split split = random_split(graph, report.budget, config.test_size, run.seed, config.stratified);
        run.labeled = std::move(split.labeled);
        test = std::move(split.test);
      } else {
        run.labeled = fixed_labels;
        test = test_split(graph, run.labeled, config.test_size, run.seed);
      }
      TrainConfig tc = train_config;
      tc.seed = training_seed(run.seed);
      TrainResult trained = train(graph, features, Supervision{run.labeled, graph.labels}, tc);
      run.final_loss = trained.curve.empty() ? 0.0 : trained.curve.back().loss;
      run.accuracy = evaluate(trained.model, features, test, graph.labels, run.labeled);
      run.test_count = test.size();
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });

  const auto acc = report.accuracies();
  report.mean = mean_of(acc);
  report.stddev = sample_stddev(acc);
  return report;
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::sigma: return "sigma";
    case SweepParam::trees: return "trees";
    case SweepParam::k: return "k";
    case SweepParam::alpha: return "alpha";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "sigma") return SweepParam::sigma;
  if (text == "trees") return SweepParam::trees;
  if (text == "k") return SweepParam::k;
  if (text == "alpha") return SweepParam::alpha;
  throw ParameterError("unknown sweep parameter '" + std::string(text) + "' (expected sigma|trees|k|alpha)");
}

std::vector<SweepEntry> sensitivity_sweep(const Graph& graph, const ExperimentConfig& base, SweepParam param,
                                          std::span<const double> values) {
  if (values.empty()) throw ParameterError("sweep needs at least one value");
  std::vector<SweepEntry> out;
  out.reserve(values.size());
  for (double value : values) {
    ExperimentConfig cfg = base;
    cfg.mode = SplitMode::dns;
    SweepEntry entry;
    entry.value = value;
    try {
      switch (param) {
        case SweepParam::sigma: cfg.selection.sigma = value; break;
        case SweepParam::alpha: cfg.selection.alpha = value; break;
        case SweepParam::trees:
        case SweepParam::k:
          if (value < 0 || value != std::floor(value)) {
            throw ParameterError(std::string(to_string(param)) + " must be a non-negative integer");
          }
          if (param == SweepParam::trees) {
            cfg.selection.trees = static_cast<std::size_t>(value);
          } else {
            cfg.selection.min_per_group = static_cast<std::size_t>(value);
          }
          break;
      }
      entry.report = run_experiment(graph, cfg);
    } catch (const InfeasibleError& e) {
      entry.warning = e.what();
    } catch (const ParameterError& e) {
      entry.warning = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string report_csv(std::span<const ExperimentReport> reports) {
  std::ostringstream os;
  os.precision(17);
  os << "rate,mode,run,seed,accuracy\n";
  for (const auto& rep : reports) {
    for (const auto& run : rep.runs) {
      os << rep.rate << ',' << to_string(rep.mode) << ',' << run.run << ',' << run.seed << ',' << run.accuracy
         << '\n';
    }
  }
  return os.str();
}

std::string sweep_csv(SweepParam param, std::span<const SweepEntry> entries) {
  std::ostringstream os;
  os.precision(17);
  os << "param,value,status,run,seed,accuracy\n";
  for (const auto& e : entries) {
    if (!e.report) {
      os << to_string(param) << ',' << e.value << ",skipped,,,\n";
      continue;
    }
    for (const auto& run : e.report->runs) {
      os << to_string(param) << ',' << e.value << ",ok," << run.run << ',' << run.seed << ',' << run.accuracy
         << '\n';
    }
  }
  return os.str();
}

}  // namespace golf
