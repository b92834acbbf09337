#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "golf/error.hpp"
#include "golf/graph.hpp"

namespace golf {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kMagic = "golf-graph 1";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_number(std::string_view tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

template <typename T>
void write_raw(std::ostream& out, const std::vector<T>& values) {
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_raw(std::istream& in, std::size_t count, const std::string& source, const char* what) {
  std::vector<T> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(T)) {
    throw FormatError(source, 0, std::string("truncated payload while reading ") + what);
  }
  return values;
}

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// container

void write_container(const Graph& g, std::ostream& out) {
  json header = {
      {"num_nodes", g.num_nodes},
      {"num_edges", g.num_edges()},
      {"raw_edges", g.raw_edge_count},
      {"feature_dim", g.feature_dim},
      {"num_classes", g.num_classes},
      {"has_labels", g.has_labels()},
      {"name", g.name},
      {"payload", {"features:f32le", "edges:u32le-pairs", "labels:i32le"}},
  };
  out << kMagic << '\n' << header.dump() << '\n';
  write_raw(out, g.features);
  std::vector<NodeId> pairs;
  pairs.reserve(g.num_edges() * 2);
  for (NodeId i = 0; i < g.num_nodes; ++i) {
    for (NodeId j : g.neighbors(i)) {
      if (i < j) {
        pairs.push_back(i);
        pairs.push_back(j);
      }
    }
  }
  write_raw(out, pairs);
  if (g.has_labels()) write_raw(out, g.labels);
}

Graph read_container(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw FormatError(source, 1, "missing container magic line");
  if (!std::getline(in, line)) throw FormatError(source, 2, "missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(source, 2, std::string("bad JSON header: ") + e.what());
  }

  std::size_t n = 0, m = 0, d = 0, classes = 0, raw = 0;
  bool has_labels = false;
  std::string name;
  try {
    n = header.at("num_nodes").get<std::size_t>();
    m = header.at("num_edges").get<std::size_t>();
    d = header.at("feature_dim").get<std::size_t>();
    classes = header.at("num_classes").get<std::size_t>();
    raw = header.value("raw_edges", m);
    has_labels = header.at("has_labels").get<bool>();
    name = header.value("name", std::string());
  } catch (const json::exception& e) {
    throw FormatError(source, 2, std::string("incomplete header: ") + e.what());
  }

  auto features = read_raw<float>(in, n * d, source, "features");
  auto pairs = read_raw<NodeId>(in, m * 2, source, "edges");
  std::vector<std::int32_t> labels;
  if (has_labels) labels = read_raw<std::int32_t>(in, n, source, "labels");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError(source, 0, "trailing bytes after payload");

  std::vector<Edge> edges(m);
  for (std::size_t e = 0; e < m; ++e) edges[e] = {pairs[2 * e], pairs[2 * e + 1]};
  Graph g = build_graph(n, edges, std::move(features), d, std::move(labels), classes, std::move(name));
  if (g.num_edges() != m) throw FormatError(source, 0, "edge list holds duplicates or self-loops");
  g.raw_edge_count = raw;
  return g;
}

void save_container(const Graph& g, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string(), 0, "cannot open file for writing");
  write_container(g, out);
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

// ---------------------------------------------------------------------------
// edge list + feature table

Graph load_edge_list_tsv(const fs::path& edges_path, const fs::path& features_path, std::string name) {
  const std::string fsrc = features_path.string();
  auto fin = open_or_throw(features_path);

  std::unordered_map<std::string, NodeId> ids;
  std::vector<float> features;
  std::vector<std::string> label_names;
  std::optional<bool> has_labels;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(fin, line)) {
    ++lineno;
    auto tok = split_ws(line);
    if (tok.empty() || tok.front().front() == '#') continue;
    if (!has_labels) {
      has_labels = tok.size() >= 2 && !parse_number(tok.back()).has_value();
      dim = tok.size() - 1 - (*has_labels ? 1 : 0);
    }
    const std::size_t expected = 1 + dim + (*has_labels ? 1 : 0);
    if (tok.size() != expected) {
      throw FormatError(fsrc, lineno, "expected " + std::to_string(expected) + " columns, found " +
                                          std::to_string(tok.size()));
    }
    auto [it, inserted] = ids.emplace(std::string(tok[0]), static_cast<NodeId>(ids.size()));
    if (!inserted) throw FormatError(fsrc, lineno, "duplicate node id '" + std::string(tok[0]) + "'");
    for (std::size_t c = 1; c <= dim; ++c) {
      auto v = parse_number(tok[c]);
      if (!v) throw FormatError(fsrc, lineno, "non-numeric feature '" + std::string(tok[c]) + "'");
      features.push_back(static_cast<float>(*v));
    }
    if (*has_labels) label_names.emplace_back(tok.back());
  }
  const std::size_t n = ids.size();

  std::vector<std::int32_t> labels;
  std::size_t num_classes = 0;
  if (has_labels.value_or(false)) {
    std::vector<std::string> classes = label_names;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::map<std::string, std::int32_t> class_id;
    for (std::size_t c = 0; c < classes.size(); ++c) class_id[classes[c]] = static_cast<std::int32_t>(c);
    labels.reserve(n);
    for (const auto& s : label_names) labels.push_back(class_id.at(s));
    num_classes = classes.size();
  }

  const std::string esrc = edges_path.string();
  auto ein = open_or_throw(edges_path);
  std::vector<Edge> edges;
  lineno = 0;
  while (std::getline(ein, line)) {
    ++lineno;
    auto tok = split_ws(line);
    if (tok.empty() || tok.front().front() == '#') continue;
    if (tok.size() != 2) throw FormatError(esrc, lineno, "expected two node ids");
    auto a = ids.find(std::string(tok[0]));
    auto b = ids.find(std::string(tok[1]));
    if (a == ids.end() || b == ids.end()) {
      throw FormatError(esrc, lineno, "unknown node id '" + std::string(a == ids.end() ? tok[0] : tok[1]) + "'");
    }
    edges.push_back({a->second, b->second});
  }

  return build_graph(n, edges, std::move(features), dim, std::move(labels), num_classes, std::move(name));
}

namespace {

std::optional<fs::path> find_member(const fs::path& dir, std::initializer_list<std::string_view> names,
                                    std::string_view extension) {
  for (auto name : names) {
    if (fs::is_regular_file(dir / name)) return dir / name;
  }
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) hits.push_back(entry.path());
  }
  std::sort(hits.begin(), hits.end());
  if (hits.empty()) return std::nullopt;
  return hits.front();
}

}  // namespace

Graph load_dataset(const fs::path& path, DatasetFormat format) {
  if (format == DatasetFormat::container) {
    auto in = open_or_throw(path);
    return read_container(in, path.string());
  }
  if (!fs::is_directory(path)) throw FormatError(path.string(), 0, "edge-list+tsv datasets are directories");
  auto edges = find_member(path, {"edges.txt", "edges.tsv"}, ".cites");
  auto features = find_member(path, {"features.tsv", "features.txt"}, ".content");
  if (!edges) throw FormatError(path.string(), 0, "no edge list (edges.txt or *.cites) in directory");
  if (!features) throw FormatError(path.string(), 0, "no feature table (features.tsv or *.content) in directory");
  fs::path dir = fs::absolute(path).lexically_normal();
  if (!dir.has_filename()) dir = dir.parent_path();
  return load_edge_list_tsv(*edges, *features, dir.filename().string());
}

Graph open_dataset(std::string_view spec) {
  if (spec == "karate") return karate_club();
  auto open_path = [](const fs::path& p) {
    return fs::is_directory(p) ? load_dataset(p, DatasetFormat::edge_list_tsv)
                               : load_dataset(p, DatasetFormat::container);
  };
  fs::path p{std::string(spec)};
  if (fs::exists(p)) return open_path(p);
  if (const char* dir = std::getenv("GOLF_DATA_DIR"); dir != nullptr && *dir != '\0') {
    for (const fs::path& candidate : {fs::path(dir) / p, fs::path(dir) / (std::string(spec) + ".golf")}) {
      if (fs::exists(candidate)) return open_path(candidate);
    }
  }
  throw ParameterError("dataset '" + std::string(spec) + "' not found (set GOLF_DATA_DIR or pass a path)");
}

}  // namespace golf
