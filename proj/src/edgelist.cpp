#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "twist/io.hpp"

namespace twist {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

enum class Section { kNone, kLayers, kNodes, kEdges };

}  // namespace

LayeredGraph parse_layered_edgelist(std::istream& in) {
  LayeredGraph g;
  std::unordered_map<std::string, std::size_t> layer_index;
  std::unordered_map<std::string, Eigen::Index> node_index;
  // (min, max) -> weight, per layer
  std::vector<std::map<std::pair<Eigen::Index, Eigen::Index>, double>> pairs;

  auto intern = [&](const std::string& id) {
    auto [it, inserted] = node_index.try_emplace(id, g.num_nodes());
    if (inserted) g.node_ids.push_back(id);
    return it->second;
  };

  Section section = Section::kNone;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "#layers") section = Section::kLayers;
      else if (line == "#nodes") section = Section::kNodes;
      else if (line == "#edges") section = Section::kEdges;
      continue;
    }
    const auto fields = split_tabs(line);
    switch (section) {
      case Section::kNone:
        throw ParseError("data before any #layers, #nodes or #edges section", line_no);
      case Section::kLayers: {
        if (fields.size() > 2 || fields[0].empty()) throw ParseError("layer lines are <id> TAB <name>", line_no);
        if (!layer_index.try_emplace(fields[0], g.layer_names.size()).second)
          throw ParseError("duplicate layer id '" + fields[0] + "'", line_no);
        g.layer_names.push_back(fields.size() == 2 ? fields[1] : fields[0]);
        pairs.emplace_back();
        break;
      }
      case Section::kNodes:
        if (fields.size() != 1 || fields[0].empty()) throw ParseError("node lines hold a single id", line_no);
        intern(fields[0]);
        break;
      case Section::kEdges: {
        if (fields.size() < 3 || fields.size() > 4)
          throw ParseError("edge lines are <layer> TAB <src> TAB <dst> [TAB <weight>]", line_no);
        const auto layer = layer_index.find(fields[0]);
        if (layer == layer_index.end()) throw ParseError("unknown layer '" + fields[0] + "'", line_no);
        if (fields[1].empty() || fields[2].empty()) throw ParseError("empty node id", line_no);
        double weight = 1.0;
        if (fields.size() == 4) {
          const char* first = fields[3].data();
          const char* last = first + fields[3].size();
          auto [ptr, ec] = std::from_chars(first, last, weight);
          if (ec != std::errc() || ptr != last || !std::isfinite(weight))
            throw ParseError("bad weight '" + fields[3] + "'", line_no);
          if (weight < 0.0) throw ParseError("negative weight", line_no);
        }
        const Eigen::Index u = intern(fields[1]);
        const Eigen::Index v = intern(fields[2]);
        auto [slot, inserted] = pairs[layer->second].try_emplace({std::min(u, v), std::max(u, v)}, weight);
        if (!inserted) slot->second = std::max(slot->second, weight);
        break;
      }
    }
  }
  if (in.bad()) throw DataError("read error in edge list");

  g.edges.resize(g.layer_names.size());
  for (std::size_t l = 0; l < pairs.size(); ++l)
    for (const auto& [uv, w] : pairs[l]) g.edges[l].push_back({uv.first, uv.second, w});
  return g;
}

LayeredGraph load_layered_edgelist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  return parse_layered_edgelist(in);
}

void write_layered_edgelist(std::ostream& out, const LayeredGraph& g) {
  out << "#layers\n";
  for (std::size_t l = 0; l < g.layer_names.size(); ++l) out << (l + 1) << '\t' << g.layer_names[l] << '\n';
  out << "#nodes\n";
  for (const auto& id : g.node_ids) out << id << '\n';
  out << "#edges\n";
  for (std::size_t l = 0; l < g.edges.size(); ++l)
    for (const Edge& e : g.edges[l])
      out << (l + 1) << '\t' << g.node_ids[static_cast<std::size_t>(e.src)] << '\t'
          << g.node_ids[static_cast<std::size_t>(e.dst)] << '\t' << format_real(e.weight) << '\n';
}

LayeredGraph graph_from_tensor(const Tensor3d& a, std::vector<std::string> node_ids,
                               std::vector<std::string> layer_names) {
  const auto [n, n2, L] = a.dims();
  if (n != n2) throw ContractViolation("graph_from_tensor: slices must be square");
  if (node_ids.empty())
    for (Eigen::Index i = 0; i < n; ++i) node_ids.push_back(std::to_string(i + 1));
  if (layer_names.empty())
    for (Eigen::Index l = 0; l < L; ++l) layer_names.push_back("layer" + std::to_string(l + 1));
  if (static_cast<Eigen::Index>(node_ids.size()) != n || static_cast<Eigen::Index>(layer_names.size()) != L)
    throw ContractViolation("graph_from_tensor: id lists do not match the tensor");

  LayeredGraph g;
  g.node_ids = std::move(node_ids);
  g.layer_names = std::move(layer_names);
  g.edges.resize(static_cast<std::size_t>(L));
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto slice = a.slice(l);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i <= j; ++i)
        if (slice(i, j) != 0.0) g.edges[static_cast<std::size_t>(l)].push_back({i, j, slice(i, j)});
  }
  return g;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void write_labels(std::ostream& out, const std::vector<std::string>& ids, const Partition& p) {
  if (ids.size() != p.size()) throw ContractViolation("write_labels: id count differs from partition size");
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << '\t' << (p[i] + 1) << '\n';
}

LabelFile read_labels(std::istream& in) {
  LabelFile out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty()) throw ParseError("label lines are <id> TAB <label>", line_no);
    int label = 0;
    const char* last = fields[1].data() + fields[1].size();
    auto [ptr, ec] = std::from_chars(fields[1].data(), last, label);
    if (ec != std::errc() || ptr != last || label < 1) throw ParseError("labels must be positive integers", line_no);
    out.ids.push_back(fields[0]);
    out.labels.push_back(label);
  }
  return out;
}

LabelFile load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file " + path.string());
  return read_labels(in);
}

void write_embedding(std::ostream& out, const std::vector<std::string>& ids, const MatrixXd& rows) {
  if (static_cast<Eigen::Index>(ids.size()) != rows.rows())
    throw ContractViolation("write_embedding: id count differs from row count");
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << '\t' << format_real(rows(i, j));
    out << '\n';
  }
}

}  // namespace twist
