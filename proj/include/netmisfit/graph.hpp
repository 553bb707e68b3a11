#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netmisfit {

// Vertices and blocks are 1-based throughout the public API.
using Vertex = std::int64_t;
using BlockId = int;

/// Largest vertex count accepted by the dense bit-packed adjacency
/// (n^2/8 bytes, 50 MB at the limit).
inline constexpr Vertex kMaxVertices = 20000;

/// Number of unordered pairs C(n,2).
constexpr std::int64_t pair_count(Vertex n) { return n * (n - 1) / 2; }

/// Position of the pair (i, j), i > j, in the column-major enumeration of the
/// strict lower triangle: (2,1), (3,1), ..., (n,1), (3,2), ..., (n,n-1).
std::int64_t edge_index(Vertex i, Vertex j, Vertex n);

struct EdgePair {
  Vertex i;  // row, the higher index
  Vertex j;  // column, the lower index
  friend bool operator==(const EdgePair&, const EdgePair&) = default;
};

/// Inverse of edge_index.
EdgePair edge_pair(std::int64_t t, Vertex n);

/// Undirected simple graph with symmetric bit-packed adjacency and optional
/// block labels. Immutable once built; use GraphBuilder to construct one.
class Graph {
 public:
  Vertex n() const { return n_; }
  std::int64_t edge_count() const { return edges_; }

  bool has_edge(Vertex i, Vertex j) const;
  std::int64_t degree(Vertex i) const;

  bool has_labels() const { return labels_.has_value(); }
  /// Labels indexed by vertex-1. Throws MissingLabels when absent.
  const std::vector<BlockId>& labels() const;
  BlockId label(Vertex i) const { return labels()[static_cast<std::size_t>(i - 1)]; }
  /// Largest label present (0 when unlabeled).
  BlockId block_count() const { return blocks_; }

  /// Copy of this graph carrying the given labels (each in 1..max).
  Graph with_labels(std::vector<BlockId> labels) const;
  Graph without_labels() const;

  /// Edges in canonical order (ascending edge_index).
  std::vector<EdgePair> edges() const;

  /// Edge density over all C(n,2) pairs.
  double density() const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  friend class GraphBuilder;
  Graph() = default;

  const std::uint64_t* row(Vertex i) const {
    return bits_.data() + static_cast<std::size_t>(i - 1) * words_;
  }

  Vertex n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::int64_t> degrees_;
  std::int64_t edges_ = 0;
  std::optional<std::vector<BlockId>> labels_;
  BlockId blocks_ = 0;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(Vertex n);

  /// Adds the undirected edge {i, j}; duplicates collapse. Throws SelfLoop or
  /// InvalidVertex.
  GraphBuilder& add_edge(Vertex i, Vertex j);
  GraphBuilder& set_labels(std::vector<BlockId> labels);

  Graph build() &&;

 private:
  Graph g_;
};

namespace detail {
void validate_labels(const std::vector<BlockId>& labels, Vertex n);
}

/// Edge-list text: "n m" then m lines "i j". Labels file: n lines.
Graph parse_graph(const std::string& edge_text,
                  const std::optional<std::string>& labels_text = std::nullopt);
Graph read_graph(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& labels_path = std::nullopt);

/// Canonical serialization: edges in canonical order as "i j" with i > j.
std::string format_graph(const Graph& g);
std::string format_labels(const Graph& g);
void write_graph(const Graph& g, const std::filesystem::path& path);
void write_labels(const Graph& g, const std::filesystem::path& path);

}  // namespace netmisfit
