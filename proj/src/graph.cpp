#include "netmisfit/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "netmisfit/error.hpp"

namespace netmisfit {
namespace {

std::int64_t column_offset(Vertex j, Vertex n) {
  // Number of pairs in columns 1..j-1.
  return (j - 1) * n - j * (j - 1) / 2;
}

void check_vertex(Vertex v, Vertex n) {
  if (v < 1 || v > n) {
    throw Error(ErrorCode::InvalidVertex,
                "vertex " + std::to_string(v) + " outside 1.." + std::to_string(n));
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // A trailing newline produces one empty tail line; drop trailing blanks.
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos) {
    lines.pop_back();
  }
  return lines;
}

std::vector<std::int64_t> parse_ints(std::string_view line, std::size_t line_no) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::int64_t value = 0;
    const char* first = line.data() + pos;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t')) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": not an integer list: '" +
                      std::string(line) + "'");
    }
    out.push_back(value);
    pos = static_cast<std::size_t>(ptr - line.data());
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::int64_t edge_index(Vertex i, Vertex j, Vertex n) {
  if (n < 2) throw Error(ErrorCode::InvalidVertex, "need n >= 2");
  check_vertex(i, n);
  check_vertex(j, n);
  if (!(j < i)) {
    throw Error(ErrorCode::InvalidVertex, "edge_index requires j < i");
  }
  return column_offset(j, n) + (i - j);
}

EdgePair edge_pair(std::int64_t t, Vertex n) {
  if (n < 2 || t < 1 || t > pair_count(n)) {
    throw Error(ErrorCode::InvalidIndex,
                "pair index " + std::to_string(t) + " outside 1..C(n,2)");
  }
  // Largest column j with column_offset(j) < t.
  Vertex lo = 1, hi = n - 1;
  while (lo < hi) {
    Vertex mid = lo + (hi - lo + 1) / 2;
    if (column_offset(mid, n) < t) lo = mid; else hi = mid - 1;
  }
  const Vertex j = lo;
  return {j + (t - column_offset(j, n)), j};
}

bool Graph::has_edge(Vertex i, Vertex j) const {
  check_vertex(i, n_);
  check_vertex(j, n_);
  const auto col = static_cast<std::size_t>(j - 1);
  return (row(i)[col / 64] >> (col % 64)) & 1u;
}

std::int64_t Graph::degree(Vertex i) const {
  check_vertex(i, n_);
  return degrees_[static_cast<std::size_t>(i - 1)];
}

const std::vector<BlockId>& Graph::labels() const {
  if (!labels_) throw Error(ErrorCode::MissingLabels, "graph carries no block labels");
  return *labels_;
}

Graph Graph::with_labels(std::vector<BlockId> labels) const {
  detail::validate_labels(labels, n_);
  Graph g = *this;
  g.blocks_ = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  g.labels_ = std::move(labels);
  return g;
}

Graph Graph::without_labels() const {
  Graph g = *this;
  g.labels_.reset();
  g.blocks_ = 0;
  return g;
}

std::vector<EdgePair> Graph::edges() const {
  std::vector<EdgePair> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (Vertex j = 1; j < n_; ++j) {
    for (Vertex i = j + 1; i <= n_; ++i) {
      if (has_edge(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

double Graph::density() const {
  return static_cast<double>(edges_) / static_cast<double>(pair_count(n_));
}

bool operator==(const Graph& a, const Graph& b) {
  return a.n_ == b.n_ && a.bits_ == b.bits_ && a.labels_ == b.labels_;
}

namespace detail {
void validate_labels(const std::vector<BlockId>& labels, Vertex n) {
  if (static_cast<Vertex>(labels.size()) != n) {
    throw Error(ErrorCode::InvalidLabel, "expected " + std::to_string(n) +
                                             " labels, got " + std::to_string(labels.size()));
  }
  for (BlockId b : labels) {
    if (b < 1) throw Error(ErrorCode::InvalidLabel, "block ids must be >= 1");
  }
}
}  // namespace detail

GraphBuilder::GraphBuilder(Vertex n) {
  if (n < 1) throw Error(ErrorCode::InvalidVertex, "vertex count must be positive");
  if (n > kMaxVertices) {
    throw Error(ErrorCode::CapacityExceeded,
                "n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxVertices));
  }
  g_.n_ = n;
  g_.words_ = static_cast<std::size_t>((n + 63) / 64);
  g_.bits_.assign(g_.words_ * static_cast<std::size_t>(n), 0);
  g_.degrees_.assign(static_cast<std::size_t>(n), 0);
}

GraphBuilder& GraphBuilder::add_edge(Vertex i, Vertex j) {
  check_vertex(i, g_.n_);
  check_vertex(j, g_.n_);
  if (i == j) throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(i));
  const auto ci = static_cast<std::size_t>(i - 1);
  const auto cj = static_cast<std::size_t>(j - 1);
  std::uint64_t& wij = g_.bits_[ci * g_.words_ + cj / 64];
  const std::uint64_t mij = std::uint64_t{1} << (cj % 64);
  if (wij & mij) return *this;
  wij |= mij;
  g_.bits_[cj * g_.words_ + ci / 64] |= std::uint64_t{1} << (ci % 64);
  ++g_.degrees_[ci];
  ++g_.degrees_[cj];
  ++g_.edges_;
  return *this;
}

GraphBuilder& GraphBuilder::set_labels(std::vector<BlockId> labels) {
  detail::validate_labels(labels, g_.n_);
  g_.blocks_ = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  g_.labels_ = std::move(labels);
  return *this;
}

Graph GraphBuilder::build() && { return std::move(g_); }

Graph parse_graph(const std::string& edge_text, const std::optional<std::string>& labels_text) {
  const auto lines = split_lines(edge_text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty graph file");
  const auto header = parse_ints(lines[0], 1);
  if (header.size() != 2 || header[0] < 1 || header[1] < 0) {
    throw Error(ErrorCode::ParseError, "line 1: expected 'n m'");
  }
  const Vertex n = header[0];
  const std::int64_t m = header[1];
  if (static_cast<std::int64_t>(lines.size()) - 1 != m) {
    throw Error(ErrorCode::ParseError, "header declares " + std::to_string(m) +
                                           " edges, file has " +
                                           std::to_string(lines.size() - 1) + " lines");
  }
  GraphBuilder builder(n);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto ij = parse_ints(lines[k], k + 1);
    if (ij.size() != 2) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(k + 1) + ": expected 'i j'");
    }
    builder.add_edge(ij[0], ij[1]);
  }
  if (labels_text) {
    const auto label_lines = split_lines(*labels_text);
    std::vector<BlockId> labels;
    labels.reserve(label_lines.size());
    for (std::size_t k = 0; k < label_lines.size(); ++k) {
      const auto v = parse_ints(label_lines[k], k + 1);
      if (v.size() != 1) {
        throw Error(ErrorCode::ParseError,
                    "labels line " + std::to_string(k + 1) + ": expected one block id");
      }
      labels.push_back(static_cast<BlockId>(v[0]));
    }
    builder.set_labels(std::move(labels));
  }
  return std::move(builder).build();
}

Graph read_graph(const std::filesystem::path& path,
                 const std::optional<std::filesystem::path>& labels_path) {
  std::optional<std::string> labels_text;
  if (labels_path) labels_text = slurp(*labels_path);
  return parse_graph(slurp(path), labels_text);
}

std::string format_graph(const Graph& g) {
  std::string out = std::to_string(g.n()) + " " + std::to_string(g.edge_count()) + "\n";
  for (const auto& e : g.edges()) {
    out += std::to_string(e.i);
    out += ' ';
    out += std::to_string(e.j);
    out += '\n';
  }
  return out;
}

std::string format_labels(const Graph& g) {
  std::string out;
  for (BlockId b : g.labels()) {
    out += std::to_string(b);
    out += '\n';
  }
  return out;
}

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}
}  // namespace

void write_graph(const Graph& g, const std::filesystem::path& path) {
  write_text(path, format_graph(g));
}

void write_labels(const Graph& g, const std::filesystem::path& path) {
  write_text(path, format_labels(g));
}

}  // namespace netmisfit
