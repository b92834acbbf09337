#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace golf {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId u;
  NodeId v;
};

// Undirected attributed graph in CSR form. Treated as immutable once built;
// every operation in the library takes it by const reference.
//
// Stored adjacency excludes self-loops: propagation adds them analytically
// (A + I). Rows are sorted ascending and free of duplicates.
struct Graph {
  std::string name;
  std::size_t num_nodes = 0;
  std::vector<std::size_t> offsets{0};  // num_nodes + 1 entries
  std::vector<NodeId> adjacency;        // both directions of every edge
  std::size_t feature_dim = 0;
  std::vector<float> features;       // row-major, num_nodes x feature_dim
  std::vector<std::int32_t> labels;  // empty when the graph is unlabeled
  std::size_t num_classes = 0;
  std::size_t raw_edge_count = 0;  // edge records in the source file, before dedup

  std::span<const NodeId> neighbors(NodeId i) const {
    return {adjacency.data() + offsets[i], adjacency.data() + offsets[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets[i + 1] - offsets[i]; }
  std::size_t num_edges() const { return adjacency.size() / 2; }
  std::span<const float> feature_row(NodeId i) const {
    return {features.data() + static_cast<std::size_t>(i) * feature_dim, feature_dim};
  }
  bool has_labels() const { return !labels.empty(); }
};

struct DatasetStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;  // undirected, deduplicated
  std::size_t classes = 0;
  std::size_t features = 0;
  std::size_t raw_edges = 0;
};

DatasetStats stats(const Graph& graph);

// Symmetrizes, drops self-loops and duplicates, then validates.
// Throws ValidationError if the result breaks a Graph invariant.
Graph build_graph(std::size_t num_nodes, std::span<const Edge> edges, std::vector<float> features,
                  std::size_t feature_dim, std::vector<std::int32_t> labels = {},
                  std::size_t num_classes = 0, std::string name = {});

enum class ViolationKind {
  structure,
  self_loop,
  duplicate_edge,
  symmetry,
  feature_shape,
  non_finite_feature,
  label_shape,
  label_range,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

std::string_view to_string(ViolationKind kind);

// Empty iff every Graph invariant holds.
std::vector<Violation> validate(const Graph& graph);

// Zachary's karate club: 34 members, 78 ties, two factions. Features are the
// 34x34 identity.
Graph karate_club();

// Same graph topology and labels with node i renamed to new_id[i].
Graph permute_nodes(const Graph& graph, std::span<const NodeId> new_id);

// ---------------------------------------------------------------------------
// File formats
//
// container:      "golf-graph 1\n", one line of JSON header, then the binary
//                 payload: float32 features (row-major), uint32 edge pairs
//                 (u < v, sorted), int32 labels when present. Little-endian.
// edge-list+tsv:  a directory holding an edge list (*.cites or edges.txt: two
//                 whitespace-separated node ids per line) and a feature table
//                 (*.content or features.tsv: "<id> <x_1> ... <x_d> [<label>]").
//                 A trailing non-numeric token on the first row marks a label
//                 column. Ids are arbitrary tokens; nodes are numbered in
//                 feature-table order.
// ---------------------------------------------------------------------------

enum class DatasetFormat { container, edge_list_tsv };

Graph load_dataset(const std::filesystem::path& path, DatasetFormat format);

Graph read_container(std::istream& in, const std::string& source = "<stream>");
void write_container(const Graph& graph, std::ostream& out);
void save_container(const Graph& graph, const std::filesystem::path& path);

Graph load_edge_list_tsv(const std::filesystem::path& edges, const std::filesystem::path& features,
                         std::string name = {});

// Resolves "karate", a container file, an edge-list+tsv directory, or a name
// under $GOLF_DATA_DIR.
Graph open_dataset(std::string_view spec);

}  // namespace golf
