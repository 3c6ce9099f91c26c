#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twist/io.hpp"

using namespace twist;
using namespace twist::testing;

namespace {

LayeredGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_layered_edgelist(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(EdgeList, EmptyEdgeSection) {
  const LayeredGraph g = parse("#layers\n1\tfirst\n2\tsecond\n#edges\n");
  EXPECT_EQ(g.num_layers(), 2);
  EXPECT_EQ(g.layer_names, (std::vector<std::string>{"first", "second"}));
  EXPECT_EQ(g.num_nodes(), 0);
  for (const auto& e : g.edges) EXPECT_TRUE(e.empty());
}

TEST(EdgeList, MinimalFileGivesSymmetricEntry) {
  const LayeredGraph g = parse("#layers\nL1\n#edges\nL1\ta\tb\n");
  ASSERT_EQ(g.num_nodes(), 2);
  EXPECT_EQ(g.layer_names, (std::vector<std::string>{"L1"}));
  const Preprocessed p = preprocess(g, 0.0, 0, false);
  EXPECT_EQ(p.tensor(0, 1, 0), 1.0);
  EXPECT_EQ(p.tensor(1, 0, 0), 1.0);
  EXPECT_EQ(p.tensor(0, 0, 0), 0.0);
  EXPECT_EQ(p.tensor(1, 1, 0), 0.0);
}

TEST(EdgeList, NodesInternedInFirstSeenOrder) {
  const LayeredGraph g = parse("#layers\n1\n#edges\n1\tz\ty\n1\tx\tz\n");
  EXPECT_EQ(g.node_ids, (std::vector<std::string>{"z", "y", "x"}));
}

TEST(EdgeList, DirectedDuplicatesMergeByMaxWeight) {
  const LayeredGraph g = parse("#layers\n1\n#edges\n1\ta\tb\t3\n1\tb\ta\t9\n1\ta\tb\t2\n# comment\n\n1\tb\tc\n");
  ASSERT_EQ(g.edges[0].size(), 2u);
  EXPECT_EQ(g.edges[0][0].src, 0);
  EXPECT_EQ(g.edges[0][0].dst, 1);
  EXPECT_EQ(g.edges[0][0].weight, 9.0);
  EXPECT_EQ(g.edges[0][1].weight, 1.0);
}

TEST(EdgeList, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("1\ta\tb\n"), 1u);
  EXPECT_EQ(error_line("#layers\n1\n#edges\n2\ta\tb\n"), 4u);           // unknown layer
  EXPECT_EQ(error_line("#layers\n1\n#edges\n1\ta\n"), 4u);              // too few fields
  EXPECT_EQ(error_line("#layers\n1\n#edges\n1\ta\tb\tx\n"), 4u);        // bad weight
  EXPECT_EQ(error_line("#layers\n1\n#edges\n\n1\ta\tb\t-1\n"), 5u);     // negative weight
  EXPECT_EQ(error_line("#layers\n1\n1\n#edges\n"), 3u);                 // duplicate layer
  try {
    parse("#layers\n1\n#edges\n7\ta\tb\n");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(EdgeList, RoundTripOfSampledInstanceIsBitExact) {
  const MmsbmParams p = planted_params(80, 2, 3, 8.0, 0.3, 3);
  const LayerLabels labels = sample_labels(p, 5, 4);
  const Tensor3d a = sample_tensor(p, labels, 5);
  std::ostringstream out;
  write_layered_edgelist(out, graph_from_tensor(a));
  std::istringstream in(out.str());
  const Preprocessed back = preprocess(parse_layered_edgelist(in), 0.0, 0, false);
  EXPECT_TRUE(back.tensor == a);
  EXPECT_EQ(back.node_ids.size(), 80u);
}

TEST(EdgeList, RoundTripKeepsIsolatedNodesAndOrder) {
  Tensor3d a(4, 4, 2);
  a(2, 3, 1) = a(3, 2, 1) = 1.0;  // nodes 0 and 1 isolated everywhere
  std::ostringstream out;
  write_layered_edgelist(out, graph_from_tensor(a, {"d", "c", "b", "a"}, {"x", "y"}));
  std::istringstream in(out.str());
  const LayeredGraph g = parse_layered_edgelist(in);
  EXPECT_EQ(g.node_ids, (std::vector<std::string>{"d", "c", "b", "a"}));
  EXPECT_EQ(g.layer_names, (std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(preprocess(g, 0.0, 0, false).tensor == a);
}

TEST(Preprocess, WeightThresholdAndBinarization) {
  const LayeredGraph g = parse("#layers\n1\n#edges\n1\ta\tb\t10\n1\tb\tc\t7\n1\tc\td\t8\n");
  const Preprocessed p = preprocess(g, 8.0, 0, false);
  EXPECT_EQ(p.tensor(0, 1, 0), 1.0);
  EXPECT_EQ(p.tensor(1, 2, 0), 0.0);
  EXPECT_EQ(p.tensor(2, 3, 0), 1.0);
}

TEST(Preprocess, SmallLayersAreDropped) {
  const LayeredGraph g = parse(
      "#layers\nbig\nsmall\n#edges\n"
      "big\t1\t2\nbig\t2\t3\nbig\t3\t4\n"
      "small\t1\t2\n");
  const Preprocessed p = preprocess(g, 0.0, 3, false);
  EXPECT_EQ(p.layer_names, (std::vector<std::string>{"big"}));
  EXPECT_EQ(p.layer_map, (std::vector<Eigen::Index>{0}));
  EXPECT_EQ(p.tensor.dim(3), 1);
  EXPECT_THROW(preprocess(g, 0.0, 10, false), DataError);
}

TEST(Preprocess, IntersectionOfLargestComponents) {
  const LayeredGraph g = parse(
      "#layers\n1\n2\n#edges\n"
      "1\ta\tb\n1\tb\tc\n1\tc\td\n1\te\tf\n"
      "2\tb\tc\n2\tc\td\n2\td\te\n");
  // layer 1 LCC {a,b,c,d}, layer 2 LCC {b,c,d,e}: intersection {b,c,d}
  const Preprocessed p = preprocess(g, 0.0, 0, true);
  EXPECT_EQ(p.node_ids, (std::vector<std::string>{"b", "c", "d"}));
  EXPECT_EQ(p.node_map, (std::vector<Eigen::Index>{1, 2, 3}));
  EXPECT_EQ(p.tensor(0, 1, 0), 1.0);
  EXPECT_EQ(p.tensor(1, 2, 1), 1.0);
  EXPECT_EQ(p.tensor(0, 2, 0), 0.0);
}

TEST(Preprocess, EmptyIntersectionNamesTheLayer) {
  const LayeredGraph g = parse(
      "#layers\nfirst\nsecond\n#edges\n"
      "first\ta\tb\nfirst\tb\tc\n"
      "second\td\te\nsecond\te\tf\n");
  try {
    preprocess(g, 0.0, 0, true);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("second"), std::string::npos) << e.what();
  }
}

TEST(Preprocess, NoOpThresholdsArePureBinarization) {
  const LayeredGraph g = parse("#layers\n1\n2\n#edges\n1\ta\tb\t0.5\n2\tc\td\t3\n2\tc\tc\n");
  const Preprocessed p = preprocess(g, 0.0, 0, false);
  EXPECT_EQ(p.tensor.dim(1), 4);
  EXPECT_EQ(p.tensor(0, 1, 0), 1.0);
  EXPECT_EQ(p.tensor(2, 3, 1), 1.0);
  EXPECT_EQ(p.tensor(2, 2, 1), 1.0);  // a self-loop row stays on the diagonal
  double total = 0.0;
  for (double v : p.tensor.values()) total += v;
  EXPECT_EQ(total, 5.0);
}

TEST(LargestComponent, TiesGoToLowestIndex) {
  const LayeredGraph g = parse("#layers\n1\n#edges\n1\tc\td\n1\ta\tb\n");
  EXPECT_EQ(largest_component(g, 0, 0.0), (std::vector<Eigen::Index>{0, 1}));  // c, d were seen first
}

TEST(KeyValueConfig, ParsesAndValidates) {
  std::istringstream in("# experiment\nn = 600\nalpha=0.4 # trailing comment\nflag = yes\nlist = 1, 2.5 ,3\n\n");
  const KeyValueConfig kv = KeyValueConfig::parse(in);
  EXPECT_EQ(kv.get_int("n", 0), 600);
  EXPECT_DOUBLE_EQ(kv.get_real("alpha", 0.0), 0.4);
  EXPECT_TRUE(kv.get_flag("flag", false));
  EXPECT_EQ(kv.get_reals("list"), (std::vector<double>{1.0, 2.5, 3.0}));
  EXPECT_EQ(kv.get_int("missing", 7), 7);
  EXPECT_THROW(kv.get_int("alpha", 0), ParameterError);

  std::istringstream dup("a = 1\na = 2\n");
  try {
    KeyValueConfig::parse(dup);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream noeq("a 1\n");
  EXPECT_THROW(KeyValueConfig::parse(noeq), ParseError);
}

TEST(Labels, WriteReadRoundTrip) {
  std::ostringstream out;
  write_labels(out, {"x", "y", "z"}, Partition({1, 0, 1}, 2));
  EXPECT_EQ(out.str(), "x\t2\ny\t1\nz\t2\n");
  std::istringstream in(out.str());
  const LabelFile f = read_labels(in);
  EXPECT_EQ(f.ids, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(f.labels, (std::vector<int>{2, 1, 2}));
  std::istringstream bad("x\t0\n");
  EXPECT_THROW(read_labels(bad), ParseError);
}

TEST(Embedding, RowsPerItem) {
  std::ostringstream out;
  MatrixXd m(2, 2);
  m << 1.0, -0.5, 0.25, 2.0;
  write_embedding(out, {"a", "b"}, m);
  EXPECT_EQ(out.str(), "a\t1.0\t-0.5\nb\t0.25\t2.0\n");
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.0), "0.0");
  EXPECT_EQ(format_real(20.0), "20.0");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}
