#pragma once

// Repeated-run protocol comparing random label splits against the DNS label
// set, plus one-parameter sensitivity sweeps.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "golf/gcn.hpp"
#include "golf/graph.hpp"
#include "golf/select.hpp"

namespace golf {

enum class SplitMode { random, dns };
std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

inline constexpr std::size_t kDefaultTestSize = 1000;

// Layer counts by dataset and label rate: Cora 4,3,3,2,2 and Citeseer
// 3,3,3,2,2 for 0.5/1/2/3/4%, Pubmed 4 throughout. Anything else gets 2.
std::size_t scheduled_layers(std::string_view dataset, double rate);

struct ExperimentConfig {
  double rate = 0.04;
  SplitMode mode = SplitMode::random;
  std::size_t runs = 10;
  std::uint64_t base_seed = 0;
  std::size_t test_size = kDefaultTestSize;
  TrainConfig train;
  std::optional<std::size_t> num_layers;  // overrides the schedule
  SelectionConfig selection;              // budget is derived from rate
  bool stratified = false;                // random mode only
  unsigned jobs = 1;                      // concurrent runs
};

struct RunResult {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double final_loss = 0.0;
  double seconds = 0.0;
  std::size_t test_count = 0;
  std::vector<NodeId> labeled;
};

struct ExperimentReport {
  std::string dataset;
  double rate = 0.0;
  SplitMode mode = SplitMode::random;
  std::size_t budget = 0;
  std::size_t num_layers = 0;
  std::vector<RunResult> runs;  // ordered by run index
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::optional<LabelSet> selection;  // dns mode
  double selection_seconds = 0.0;
  std::vector<std::string> warnings;
  ExperimentConfig config;

  std::vector<double> accuracies() const;
};

double mean_of(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);

// Seed for run r is base_seed + r in both modes, so random and DNS reports
// built from the same base seed share test-set draws and initializations.
ExperimentReport run_experiment(const Graph& graph, const ExperimentConfig& config);

// Uniform split of size `budget` plus up to `test_size` disjoint test nodes.
struct Split {
  std::vector<NodeId> labeled;
  std::vector<NodeId> test;
};
Split random_split(const Graph& graph, std::size_t budget, std::size_t test_size, std::uint64_t seed,
                   bool stratified = false);
// Test nodes for a fixed label set, drawn with the same generator sequence.
std::vector<NodeId> test_split(const Graph& graph, std::span<const NodeId> labeled, std::size_t test_size,
                               std::uint64_t seed);

enum class SweepParam { sigma, trees, k, alpha };
std::string_view to_string(SweepParam param);
SweepParam parse_sweep_param(std::string_view text);

struct SweepEntry {
  double value = 0.0;
  std::optional<ExperimentReport> report;  // empty when skipped
  std::string warning;
};

// One DNS-mode experiment per value with every other parameter held at the
// base configuration. Infeasible values are skipped, never fatal.
std::vector<SweepEntry> sensitivity_sweep(const Graph& graph, const ExperimentConfig& base, SweepParam param,
                                          std::span<const double> values);

// Flat CSV, one line per run: rate,mode,run,seed,accuracy
std::string report_csv(std::span<const ExperimentReport> reports);
// param,value,status,run,seed,accuracy; skipped values get one "skipped" line.
std::string sweep_csv(SweepParam param, std::span<const SweepEntry> entries);

}  // namespace golf
