#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twist/clustering.hpp"
#include "twist/tensor.hpp"

namespace twist {

struct Edge {
  Eigen::Index src = 0;  // index into LayeredGraph::node_ids
  Eigen::Index dst = 0;
  double weight = 1.0;
};

/// Multi-layer edge data before tensorization. Edges are undirected and
/// stored once per unordered pair with src <= dst.
struct LayeredGraph {
  std::vector<std::string> layer_names;
  std::vector<std::string> node_ids;
  std::vector<std::vector<Edge>> edges;  // [layer]

  [[nodiscard]] Eigen::Index num_nodes() const { return static_cast<Eigen::Index>(node_ids.size()); }
  [[nodiscard]] Eigen::Index num_layers() const { return static_cast<Eigen::Index>(layer_names.size()); }
};

/// Layered edge-list TSV:
///
///   #layers
///   <layer_id> TAB <layer_name>      (name optional, defaults to the id)
///   #nodes                           (optional block fixing node order)
///   <node_id>
///   #edges
///   <layer_id> TAB <src> TAB <dst> [TAB <weight>]
///
/// Blank lines and other lines starting with '#' are ignored. Node ids are
/// interned in order of first appearance. Repeated pairs, in either
/// direction, collapse to one undirected edge carrying the largest weight.
LayeredGraph parse_layered_edgelist(std::istream& in);
LayeredGraph load_layered_edgelist(const std::filesystem::path& path);
void write_layered_edgelist(std::ostream& out, const LayeredGraph& g);

/// One edge of weight 1 per nonzero upper-triangular entry (diagonal included).
LayeredGraph graph_from_tensor(const Tensor3d& a, std::vector<std::string> node_ids = {},
                               std::vector<std::string> layer_names = {});

struct Preprocessed {
  Tensor3d tensor;
  std::vector<std::string> node_ids;     // surviving nodes, in original order
  std::vector<std::string> layer_names;  // surviving layers, in original order
  std::vector<Eigen::Index> node_map;    // tensor index -> original node index
  std::vector<Eigen::Index> layer_map;   // tensor slice -> original layer index
};

/// Drops edges lighter than weight_min, drops layers whose largest connected
/// component has fewer than min_component nodes, optionally restricts the
/// node set to the intersection of the surviving layers' largest components,
/// then binarizes into a symmetric 0/1 tensor. The largest component of a
/// layer is taken over all nodes; among equal sizes the one holding the
/// lowest node index wins.
Preprocessed preprocess(const LayeredGraph& g, double weight_min, Eigen::Index min_component, bool intersect);

/// Nodes of the largest connected component of one layer, ascending.
std::vector<Eigen::Index> largest_component(const LayeredGraph& g, std::size_t layer, double weight_min);

/// Flat `key = value` text with '#' comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
  [[nodiscard]] double get_real(const std::string& key, double fallback) const;
  [[nodiscard]] bool get_flag(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_reals(const std::string& key) const;
  [[nodiscard]] std::vector<std::string> keys() const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
};

/// Label file: `<item_id> TAB <label>` per line, labels 1-based.
void write_labels(std::ostream& out, const std::vector<std::string>& ids, const Partition& p);
struct LabelFile {
  std::vector<std::string> ids;
  std::vector<int> labels;  // as written
};
LabelFile read_labels(std::istream& in);
LabelFile load_labels(const std::filesystem::path& path);

/// Embedding file: `<item_id> TAB v1 TAB v2 ...` per row.
void write_embedding(std::ostream& out, const std::vector<std::string>& ids, const MatrixXd& rows);

/// Shortest round-trip decimal form; integral values keep a trailing ".0".
std::string format_real(double value);

}  // namespace twist
