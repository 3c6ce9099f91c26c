#include <algorithm>
#include <numeric>

#include "twist/io.hpp"

namespace twist {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Eigen::Index n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index(0));
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
  }
  Eigen::Index size_of(Eigen::Index x) { return size_[static_cast<std::size_t>(find(x))]; }

 private:
  std::vector<Eigen::Index> parent_;
  std::vector<Eigen::Index> size_;
};

}  // namespace

std::vector<Eigen::Index> largest_component(const LayeredGraph& g, std::size_t layer, double weight_min) {
  const Eigen::Index n = g.num_nodes();
  if (n == 0) return {};
  DisjointSets sets(n);
  for (const Edge& e : g.edges.at(layer))
    if (e.weight >= weight_min) sets.unite(e.src, e.dst);

  Eigen::Index best_root = sets.find(0);
  Eigen::Index best_size = sets.size_of(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (sets.size_of(i) > best_size) {
      best_size = sets.size_of(i);
      best_root = sets.find(i);
    }
  }
  std::vector<Eigen::Index> members;
  members.reserve(static_cast<std::size_t>(best_size));
  for (Eigen::Index i = 0; i < n; ++i)
    if (sets.find(i) == best_root) members.push_back(i);
  return members;
}

Preprocessed preprocess(const LayeredGraph& g, double weight_min, Eigen::Index min_component, bool intersect) {
  const Eigen::Index n = g.num_nodes();
  Preprocessed out;

  std::vector<char> keep_node(static_cast<std::size_t>(n), 1);
  for (std::size_t l = 0; l < g.edges.size(); ++l) {
    const auto component = largest_component(g, l, weight_min);
    if (static_cast<Eigen::Index>(component.size()) < min_component) continue;
    out.layer_map.push_back(static_cast<Eigen::Index>(l));
    if (!intersect) continue;
    std::vector<char> in_component(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i : component) in_component[static_cast<std::size_t>(i)] = 1;
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      keep_node[static_cast<std::size_t>(i)] &= in_component[static_cast<std::size_t>(i)];
      any = any || keep_node[static_cast<std::size_t>(i)];
    }
    if (!any) throw DataError("preprocess: node intersection became empty at layer '" + g.layer_names[l] + "'");
  }
  if (out.layer_map.empty()) throw DataError("preprocess: no layer survives the component-size filter");

  std::vector<Eigen::Index> new_index(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!keep_node[static_cast<std::size_t>(i)]) continue;
    new_index[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(out.node_map.size());
    out.node_map.push_back(i);
    out.node_ids.push_back(g.node_ids[static_cast<std::size_t>(i)]);
  }

  const auto kept = static_cast<Eigen::Index>(out.node_map.size());
  out.tensor = Tensor3d(kept, kept, static_cast<Eigen::Index>(out.layer_map.size()));
  for (std::size_t s = 0; s < out.layer_map.size(); ++s) {
    const auto l = static_cast<std::size_t>(out.layer_map[s]);
    out.layer_names.push_back(g.layer_names[l]);
    auto slice = out.tensor.slice(static_cast<Eigen::Index>(s));
    for (const Edge& e : g.edges[l]) {
      if (e.weight < weight_min) continue;
      const Eigen::Index u = new_index[static_cast<std::size_t>(e.src)];
      const Eigen::Index v = new_index[static_cast<std::size_t>(e.dst)];
      if (u < 0 || v < 0) continue;
      slice(u, v) = 1.0;
      slice(v, u) = 1.0;
    }
  }
  return out;
}

}  // namespace twist
