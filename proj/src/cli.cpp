#include "golf/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "golf/error.hpp"
#include "golf/experiment.hpp"
#include "golf/forest.hpp"
#include "golf/gcn.hpp"
#include "golf/graph.hpp"
#include "golf/kernels.hpp"
#include "golf/select.hpp"
#include "golf/serialize.hpp"

namespace golf::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fnv1a_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

json dataset_checksums(const std::string& spec) {
  json out = json::object();
  fs::path p{spec};
  if (!fs::exists(p)) {
    if (const char* dir = std::getenv("GOLF_DATA_DIR"); dir && *dir && fs::exists(fs::path(dir) / p)) {
      p = fs::path(dir) / p;
    }
  }
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out[f.string()] = "fnv1a64:" + fnv1a_file(f);
  } else if (fs::is_regular_file(p)) {
    out[p.string()] = "fnv1a64:" + fnv1a_file(p);
  } else {
    out[spec] = "builtin";
  }
  return out;
}

// Options shared by several subcommands. Defaults live here.
struct Options {
  std::string dataset;
  unsigned jobs = 1;
  std::string out;
  std::string csv;
  std::string manifest;
  std::string isa;

  // selection
  double rate = 0.0;
  std::size_t budget = 0;
  std::size_t k = 1;
  double alpha = 0.5;
  double sigma = 1.0;
  std::size_t trees = 0;  // 0 = default
  std::string groups = "tree";

  // training / experiments
  std::string mode = "random";
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t epochs = 200;
  double lr = 0.01;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  std::size_t hidden = 16;
  std::size_t layers = 0;  // 0 = schedule
  std::size_t test_size = kDefaultTestSize;
  bool stratified = false;
  bool raw_features = false;
  std::vector<double> rates;

  // sweep
  std::string param = "alpha";
  std::vector<double> values;
};

struct Manifest {
  std::string subcommand;
  json config = json::object();
  json inputs = json::object();
  json artifacts = json::array();
  json timings = json::object();

  json to_json() const {
    return {{"subcommand", subcommand},
            {"config", config},
            {"inputs", inputs},
            {"artifacts", artifacts},
            {"timings_seconds", timings},
            {"kernels", kernels::active().name}};
  }
};

void write_text(const std::string& path, const std::string& text, Manifest& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  m.artifacts.push_back(path);
}

SelectionConfig selection_config(const Options& o, const Graph& g) {
  SelectionConfig c;
  if (o.budget > 0) {
    c.budget = o.budget;
  } else if (o.rate > 0.0) {
    c.budget = budget_from_rate(o.rate, g.num_nodes);
  } else {
    throw ParameterError("pass --rate or --budget");
  }
  c.min_per_group = o.k;
  c.alpha = o.alpha;
  c.sigma = o.sigma;
  c.trees = o.trees > 0 ? o.trees : default_tree_count(g);
  c.group_mode = parse_group_mode(o.groups);
  return c;
}

TrainConfig train_config(const Options& o) {
  TrainConfig t;
  t.learning_rate = o.lr;
  t.epochs = o.epochs;
  t.dropout = o.dropout;
  t.weight_decay = o.weight_decay;
  t.hidden_units = o.hidden;
  t.row_normalize = !o.raw_features;
  if (o.layers > 0) t.num_layers = o.layers;
  return t;
}

ExperimentConfig experiment_config(const Options& o, const Graph& g, double rate, SplitMode mode) {
  ExperimentConfig e;
  e.rate = rate;
  e.mode = mode;
  e.runs = o.runs;
  e.base_seed = o.seed;
  e.test_size = o.test_size;
  e.train = train_config(o);
  if (o.layers > 0) e.num_layers = o.layers;
  Options sel = o;
  sel.rate = rate;
  sel.budget = 0;
  e.selection = selection_config(sel, g);
  e.stratified = o.stratified;
  e.jobs = o.jobs;
  return e;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::string signed_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "(%+.1f)", 100.0 * v);
  return buf;
}

std::string rate_label(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g%%", 100.0 * rate);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

// ---------------------------------------------------------------------------

void cmd_info(const Options& o, std::ostream& out, Manifest& m) {
  const auto t0 = Clock::now();
  const Graph g = open_dataset(o.dataset);
  m.timings["load"] = seconds_since(t0);
  const auto s = stats(g);
  out << "Dataset    Nodes    Edges  Classes  Features\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %7zu %8zu %8zu %9zu\n", g.name.c_str(), s.nodes, s.edges, s.classes,
                s.features);
  out << line;
  out << "raw edge records: " << s.raw_edges << " (deduplicated undirected: " << s.edges << ")\n";
  const auto violations = validate(g);
  out << "validation: " << (violations.empty() ? "ok" : std::to_string(violations.size()) + " violation(s)") << '\n';
  for (const auto& v : violations) out << "  [" << to_string(v.kind) << "] " << v.message << '\n';
  if (!o.out.empty()) write_text(o.out, to_json(s).dump(2) + "\n", m);
}

void cmd_pack(const Options& o, std::ostream& out, Manifest& m) {
  if (o.out.empty()) throw ParameterError("pack needs --out");
  const Graph g = open_dataset(o.dataset);
  save_container(g, o.out);
  m.artifacts.push_back(o.out);
  out << "wrote " << o.out << " (" << g.num_nodes << " nodes, " << g.num_edges() << " edges)\n";
}

struct Pipeline {
  LeadingForest forest;
  double aggregate_s = 0, golf_s = 0;
};

Pipeline build(const Graph& g, double sigma, std::size_t trees, unsigned jobs) {
  Pipeline p;
  auto t0 = Clock::now();
  const auto features = compute_aggregated_features(g, jobs);
  p.aggregate_s = seconds_since(t0);
  t0 = Clock::now();
  const auto density = compute_density(features, sigma, jobs);
  auto parent = assign_leading_nodes(g, density);
  auto delta = compute_delta(g, density, parent);
  auto gamma = compute_gamma(density.rho, delta);
  p.forest = cut_forest(g, density, std::move(parent), std::move(delta), std::move(gamma), trees);
  p.golf_s = seconds_since(t0);
  return p;
}

void cmd_golf(const Options& o, std::ostream& out, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  const std::size_t trees = o.trees > 0 ? o.trees : default_tree_count(g);
  m.config["trees"] = trees;
  const Pipeline p = build(g, o.sigma, trees, o.jobs);
  m.timings["aggregate"] = p.aggregate_s;
  m.timings["golf"] = p.golf_s;
  std::uint32_t depth = 0;
  for (auto l : p.forest.layer) depth = std::max(depth, l);
  out << "trees: " << p.forest.num_trees() << " (requested " << trees << ", local roots " << p.forest.natural_roots
      << ")\nmax layer: " << depth << '\n';
  if (!o.out.empty()) write_text(o.out, to_json(p.forest).dump() + "\n", m);
}

void cmd_select(const Options& o, std::ostream& out, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  const SelectionConfig cfg = selection_config(o, g);
  m.config["selection"] = to_json(cfg);
  const Pipeline p = build(g, cfg.sigma, *cfg.trees, o.jobs);
  m.timings["aggregate"] = p.aggregate_s;
  m.timings["golf"] = p.golf_s;
  const auto t0 = Clock::now();
  const LabelSet labels = cfg.group_mode == GroupMode::oracle_labels
                              ? select_labels(p.forest, cfg, g.labels, g.num_classes)
                              : select_labels(p.forest, cfg);
  m.timings["selection"] = seconds_since(t0);
  out << "typical:";
  for (NodeId v : labels.typical) out << ' ' << v;
  out << "\ndivergent:";
  for (NodeId v : labels.divergent) out << ' ' << v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", labels.objective);
  out << "\nobjective: " << buf << '\n';
  if (!o.out.empty()) write_text(o.out, to_json(labels).dump(2) + "\n", m);
}

void cmd_train(const Options& o, std::ostream& out, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  const double rate = o.rate > 0 ? o.rate : static_cast<double>(o.budget) / static_cast<double>(g.num_nodes);
  ExperimentConfig cfg = experiment_config(o, g, rate, parse_split_mode(o.mode));
  cfg.runs = 1;
  const auto t0 = Clock::now();
  const ExperimentReport rep = run_experiment(g, cfg);
  m.timings["selection"] = rep.selection_seconds;
  m.timings["training"] = rep.runs.front().seconds;
  m.timings["total"] = seconds_since(t0);
  m.config["train"] = to_json(rep.config.train);
  out << "accuracy: " << pct(rep.runs.front().accuracy) << "% on " << rep.runs.front().test_count
      << " test nodes (" << rep.num_layers << " layers, " << rep.budget << " labels)\n";
  if (!o.out.empty()) write_text(o.out, to_json(rep).dump(2) + "\n", m);
}

void print_report_line(std::ostream& out, const ExperimentReport& r) {
  out << to_string(r.mode) << " rate=" << rate_label(r.rate) << " labels=" << r.budget << " layers=" << r.num_layers
      << " accuracy=" << pct(r.mean) << " +/- " << pct(r.stddev) << " over " << r.runs.size() << " runs\n";
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

void cmd_experiment(const Options& o, std::ostream& out, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  if (o.rate <= 0) throw ParameterError("experiment needs --rate");
  const ExperimentConfig cfg = experiment_config(o, g, o.rate, parse_split_mode(o.mode));
  const auto t0 = Clock::now();
  const ExperimentReport rep = run_experiment(g, cfg);
  m.timings["selection"] = rep.selection_seconds;
  double training = 0;
  for (const auto& r : rep.runs) training += r.seconds;
  m.timings["training"] = training;
  m.timings["total"] = seconds_since(t0);
  m.config["train"] = to_json(rep.config.train);
  m.config["selection"] = to_json(rep.config.selection);
  print_report_line(out, rep);
  if (!o.out.empty()) write_text(o.out, to_json(rep).dump(2) + "\n", m);
  if (!o.csv.empty()) write_text(o.csv, report_csv(std::span(&rep, 1)), m);
}

void cmd_sweep(const Options& o, std::ostream& out, std::ostream& err, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  if (o.rate <= 0) throw ParameterError("sweep needs --rate");
  if (o.values.empty()) throw ParameterError("sweep needs --values");
  const SweepParam param = parse_sweep_param(o.param);
  const ExperimentConfig base = experiment_config(o, g, o.rate, SplitMode::dns);
  const auto t0 = Clock::now();
  const auto entries = sensitivity_sweep(g, base, param, o.values);
  m.timings["total"] = seconds_since(t0);
  json reports = json::array();
  for (const auto& e : entries) {
    if (!e.report) {
      err << "warning: " << to_string(param) << "=" << e.value << " skipped: " << e.warning << '\n';
      reports.push_back({{"value", e.value}, {"skipped", true}, {"warning", e.warning}});
      continue;
    }
    out << to_string(param) << "=" << e.value << ": " << pct(e.report->mean) << " +/- " << pct(e.report->stddev)
        << '\n';
    reports.push_back({{"value", e.value}, {"skipped", false}, {"report", to_json(*e.report)}});
  }
  if (!o.out.empty()) {
    write_text(o.out, json{{"param", std::string(to_string(param))}, {"entries", reports}}.dump(2) + "\n", m);
  }
  if (!o.csv.empty()) write_text(o.csv, sweep_csv(param, entries), m);
}

void cmd_compare(const Options& o, std::ostream& out, Manifest& m) {
  const Graph g = open_dataset(o.dataset);
  std::vector<double> rates = o.rates;
  if (rates.empty() && o.rate > 0) rates.push_back(o.rate);
  if (rates.empty()) throw ParameterError("compare needs --rate or --rates");

  std::vector<ExperimentReport> reports;
  double selection = 0, training = 0;
  for (double rate : rates) {
    for (SplitMode mode : {SplitMode::random, SplitMode::dns}) {
      reports.push_back(run_experiment(g, experiment_config(o, g, rate, mode)));
      selection += reports.back().selection_seconds;
      for (const auto& r : reports.back().runs) training += r.seconds;
    }
  }
  m.timings["selection"] = selection;
  m.timings["training"] = training;

  const std::size_t w = 22;
  out << pad("Label Rate", 12);
  for (double r : rates) out << pad(rate_label(r), w);
  out << "\n" << pad("GCN", 12);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out << pad(pct(reports[2 * i].mean) + " +/- " + pct(reports[2 * i].stddev), w);
  }
  out << "\n" << pad("GCN+DNS", 12);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out << pad(pct(reports[2 * i + 1].mean) + " +/- " + pct(reports[2 * i + 1].stddev), w);
  }
  out << "\n" << pad("delta", 12);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const auto& base = reports[2 * i];
    const auto& dns_rep = reports[2 * i + 1];
    out << pad(signed_pct(dns_rep.mean - base.mean) + " +/- " + signed_pct(dns_rep.stddev - base.stddev), w);
  }
  out << '\n';
  for (const auto& r : reports) {
    for (const auto& wmsg : r.warnings) out << "warning: " << wmsg << '\n';
  }
  if (!o.out.empty()) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    write_text(o.out, json{{"reports", arr}}.dump(2) + "\n", m);
  }
  if (!o.csv.empty()) write_text(o.csv, report_csv(reports), m);
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::format: return kFormat;
    case ErrorKind::validation: return kValidation;
    case ErrorKind::parameter: return kParameter;
    case ErrorKind::infeasible: return kInfeasible;
    case ErrorKind::size_guard:
    case ErrorKind::divergence: return kRuntime;
  }
  return kRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Deterministic label selection on graph leading forests, with a GCN benchmark harness"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto add_common = [&](CLI::App* sub, bool needs_dataset = true) {
    auto* d = sub->add_option("--dataset", o.dataset, "container file, edge-list+tsv directory, name under $GOLF_DATA_DIR, or 'karate'");
    if (needs_dataset) d->required();
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--manifest", o.manifest, "run manifest path");
    sub->add_option("--isa", o.isa, "kernel variant: scalar|avx2");
    sub->add_option("--out", o.out, "JSON output path");
  };
  auto add_selection = [&](CLI::App* sub) {
    auto* rate = sub->add_option("--rate", o.rate, "label rate in (0, 1]");
    sub->add_option("--budget", o.budget, "label count")->excludes(rate);
    sub->add_option("--k", o.k, "typical nodes per group");
    sub->add_option("--alpha", o.alpha, "typical/divergent weight")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--sigma", o.sigma, "density bandwidth");
    sub->add_option("--trees", o.trees, "tree count (default: class count, else 8)");
    sub->add_option("--groups", o.groups, "tree|oracle");
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--epochs", o.epochs);
    sub->add_option("--lr", o.lr);
    sub->add_option("--dropout", o.dropout);
    sub->add_option("--weight-decay", o.weight_decay);
    sub->add_option("--hidden", o.hidden);
    sub->add_option("--layers", o.layers, "layer count (default: per-dataset schedule)");
    sub->add_option("--test-size", o.test_size);
    sub->add_flag("--stratified", o.stratified, "class-stratified random splits");
    sub->add_flag("--raw-features", o.raw_features, "skip row normalization of GCN inputs");
    sub->add_option("--csv", o.csv, "flat CSV output path");
  };

  auto* info = app.add_subcommand("info", "dataset statistics and validation");
  add_common(info);
  auto* pack = app.add_subcommand("pack", "write a dataset as a container file");
  add_common(pack);
  auto* golf = app.add_subcommand("golf", "build the leading forest and export it");
  add_common(golf);
  golf->add_option("--sigma", o.sigma, "density bandwidth");
  golf->add_option("--trees", o.trees, "tree count");
  auto* select = app.add_subcommand("select", "choose the label set");
  add_common(select);
  add_selection(select);
  auto* train = app.add_subcommand("train", "train and evaluate one GCN");
  add_common(train);
  add_selection(train);
  add_training(train);
  train->add_option("--split", o.mode, "random|dns");
  auto* experiment = app.add_subcommand("experiment", "repeated runs on random or DNS splits");
  add_common(experiment);
  add_selection(experiment);
  add_training(experiment);
  experiment->add_option("--mode", o.mode, "random|dns");
  experiment->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  auto* sweep = app.add_subcommand("sweep", "DNS sensitivity to one parameter");
  add_common(sweep);
  add_selection(sweep);
  add_training(sweep);
  sweep->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  sweep->add_option("--param", o.param, "sigma|trees|k|alpha");
  sweep->add_option("--values", o.values, "comma-separated values")->delimiter(',');
  auto* compare = app.add_subcommand("compare", "random vs DNS table with deltas");
  add_common(compare);
  add_selection(compare);
  add_training(compare);
  compare->add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  compare->add_option("--rates", o.rates, "comma-separated label rates")->delimiter(',');

  std::vector<std::string> argv_storage{"golf"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Manifest m;
  m.subcommand = sub->get_name();
  try {
    if (!o.isa.empty()) {
      kernels::table(kernels::parse_isa(o.isa));  // validates
      ::setenv("GOLF_ISA", o.isa.c_str(), 1);
    }
    std::istringstream resolved(sub->config_to_str(true, false));
    std::string line;
    while (std::getline(resolved, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || line[0] == '#') continue;
      const std::string key = CLI::detail::trim_copy(line.substr(0, eq));
      const std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
      json parsed = json::parse(value, nullptr, false);
      m.config[key] = parsed.is_discarded() ? json(value) : parsed;
    }
    m.inputs = dataset_checksums(o.dataset);

    const auto t0 = Clock::now();
    const std::string name = sub->get_name();
    if (name == "info") cmd_info(o, out, m);
    else if (name == "pack") cmd_pack(o, out, m);
    else if (name == "golf") cmd_golf(o, out, m);
    else if (name == "select") cmd_select(o, out, m);
    else if (name == "train") cmd_train(o, out, m);
    else if (name == "experiment") cmd_experiment(o, out, m);
    else if (name == "sweep") cmd_sweep(o, out, err, m);
    else if (name == "compare") cmd_compare(o, out, m);
    m.timings["wall"] = seconds_since(t0);

    std::string manifest_path = o.manifest;
    if (manifest_path.empty()) {
      manifest_path = o.out.empty() ? "golf-" + name + ".manifest.json" : o.out + ".manifest.json";
    }
    std::ofstream mf(manifest_path, std::ios::trunc);
    if (!mf) throw std::runtime_error("cannot write manifest " + manifest_path);
    mf << m.to_json().dump(2) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const ContractViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace golf::cli
