#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "twist/cli.hpp"
#include "twist/io.hpp"

using namespace twist;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "twist");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("twist_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(dir_ / name);
    out << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EvalIdenticalFilesIsZero) {
  write("a.tsv", "n1\t1\nn2\t1\nn3\t2\n");
  const CliRun r = cli({"eval", "--estimate", path("a.tsv"), "--truth", path("a.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "misclustered,rate,items\n0,0.0,3\n");
}

TEST_F(CliTest, EvalJoinsByIdAndReportsJson) {
  write("est.tsv", "n3\t1\nn1\t2\nn2\t2\nn4\t1\n");
  write("truth.tsv", "n1\t1\nn2\t1\nn3\t2\nn4\t1\n");
  const CliRun r = cli({"--format", "json", "eval", "--estimate", path("est.tsv"), "--truth", path("truth.tsv")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"misclustered\":1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"rate\":0.25"), std::string::npos) << r.out;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"eval", "--estimate", path("a.tsv")}).code, kExitUsage);
  EXPECT_EQ(cli({"--format", "xml", "eval", "--estimate", "a", "--truth", "b"}).code, kExitUsage);
  EXPECT_EQ(cli({"eval", "--estimate", path("missing.tsv"), "--truth", path("missing.tsv")}).code, kExitData);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);

  write("bad.tsv", "#layers\n1\n#edges\n9\ta\tb\n");
  const CliRun parse = cli({"fit", "--input", path("bad.tsv"), "--rank-r", "2", "--rank-m", "1", "--kbar", "2",
                         "--out-dir", path("out")});
  EXPECT_EQ(parse.code, kExitData);
  EXPECT_NE(parse.err.find("line 4"), std::string::npos) << parse.err;

  write("bad.cfg", "n = 10\nd = 500\n");
  EXPECT_EQ(cli({"sample", "--config", path("bad.cfg"), "--out", path("e.tsv")}).code, kExitUsage);
}

TEST_F(CliTest, NumericalFailureExitCode) {
  // a vanishing regularization threshold cannot be honoured
  std::string edges = "#layers\n1\n2\n3\n#edges\n";
  for (int l = 1; l <= 3; ++l)
    for (int i = 1; i <= 6; ++i) edges += std::to_string(l) + "\tv" + std::to_string(i) + "\tv" + std::to_string(i % 6 + 1) + "\n";
  write("same.tsv", edges);
  const CliRun r = cli({"fit", "--input", path("same.tsv"), "--rank-r", "2", "--rank-m", "2", "--kbar", "2",
                     "--delta1", "1e-14", "--out-dir", path("out")});
  EXPECT_EQ(r.code, kExitNumerical) << r.err;
}

TEST_F(CliTest, SampleFitEvalPipeline) {
  write("model.cfg", "n = 212\nL = 9\nm = 3\nK = 5\nd = 14\nalpha = 0.2\nseed = 4\n");
  const CliRun s = cli({"sample", "--config", path("model.cfg"), "--out", path("edges.tsv"), "--truth-dir", path("truth")});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_TRUE(fs::exists(path("truth/global_labels.tsv")));
  EXPECT_TRUE(fs::exists(path("truth/local_labels_3.tsv")));

  const CliRun f = cli({"--seed", "3", "fit", "--input", path("edges.tsv"), "--rank-r", "15", "--rank-m", "3", "--kbar",
                     "15", "--local-k", "5", "--out-dir", path("fit")});
  ASSERT_EQ(f.code, kExitOk) << f.err;
  EXPECT_EQ(f.out.rfind("nodes,layers,iterations,delta1,delta2\n212,9,", 0), 0u) << f.out;

  const LabelFile layers = load_labels(path("fit/layer_labels.tsv"));
  EXPECT_EQ(layers.ids.size(), 9u);
  EXPECT_EQ(load_labels(path("fit/global_labels.tsv")).ids.size(), 212u);
  for (int j = 1; j <= 3; ++j) EXPECT_TRUE(fs::exists(path("fit/local_labels_" + std::to_string(j) + ".tsv")));

  std::ifstream emb(path("fit/embedding_U.tsv"));
  std::string first;
  std::getline(emb, first);
  EXPECT_EQ(std::count(first.begin(), first.end(), '\t'), 15);

  const CliRun e = cli({"eval", "--estimate", path("fit/layer_labels.tsv"), "--truth", path("truth/layer_labels.tsv")});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_EQ(e.out.rfind("misclustered,rate,items\n", 0), 0u);
}

TEST_F(CliTest, FitAcceptsEveryWarmStart) {
  write("model.cfg", "n = 90\nL = 6\nm = 2\nK = 2\nd = 20\nalpha = 0.1\nseed = 2\n");
  ASSERT_EQ(cli({"sample", "--config", path("model.cfg"), "--out", path("edges.tsv")}).code, kExitOk);
  for (const std::string start : {"layer-sum", "hosvd", "best"}) {
    const CliRun f = cli({"fit", "--input", path("edges.tsv"), "--rank-r", "4", "--rank-m", "2", "--kbar", "4",
                       "--warm-start", start, "--out-dir", path("fit_" + start)});
    EXPECT_EQ(f.code, kExitOk) << start << ": " << f.err;
  }
  EXPECT_EQ(cli({"fit", "--input", path("edges.tsv"), "--rank-r", "4", "--rank-m", "2", "--kbar", "4",
                 "--warm-start", "random", "--out-dir", path("x")}).code,
            kExitUsage);
}

TEST_F(CliTest, FitPreprocessingFlags) {
  write("graph.tsv",
        "#layers\n1\tbeef\n2\tmilk\n3\ttiny\n#edges\n"
        "1\ta\tb\t10\n1\tb\tc\t9\n1\tc\td\t12\n1\td\ta\t3\n1\ta\tc\t8\n"
        "2\ta\tb\t20\n2\tb\tc\t8\n2\tc\td\t8\n2\tb\td\t1\n"
        "3\ta\tb\t50\n");
  const CliRun f = cli({"fit", "--input", path("graph.tsv"), "--rank-r", "2", "--rank-m", "1", "--kbar", "2",
                     "--weight-min", "8", "--min-component", "3", "--intersect", "--out-dir", path("fit")});
  ASSERT_EQ(f.code, kExitOk) << f.err;
  const LabelFile layers = load_labels(path("fit/layer_labels.tsv"));
  EXPECT_EQ(layers.ids, (std::vector<std::string>{"beef", "milk"}));
  EXPECT_EQ(load_labels(path("fit/global_labels.tsv")).ids, (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST_F(CliTest, SimulateWritesCsvAndJson) {
  write("sim.cfg", "simulation = 1\nn = 60\nvalues = 6, 12\nreplicates = 2\n");
  const CliRun csv = cli({"simulate", "--config", path("sim.cfg")});
  ASSERT_EQ(csv.code, kExitOk) << csv.err;
  std::istringstream lines(csv.out);
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 2 * 3);

  const CliRun json = cli({"--format", "json", "simulate", "--config", path("sim.cfg"), "--out", path("r.json")});
  ASSERT_EQ(json.code, kExitOk) << json.err;
  std::ifstream in(path("r.json"));
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_NE(text.str().find("\"rows\""), std::string::npos);

  // --seed overrides the config seed; the same seed reproduces the table
  const CliRun a = cli({"--seed", "5", "simulate", "--config", path("sim.cfg")});
  const CliRun b = cli({"--seed", "5", "--threads", "2", "simulate", "--config", path("sim.cfg")});
  EXPECT_EQ(a.out, b.out);
}

TEST(CliBinary, RunsAsProcess) {
  const std::string cmd = std::string(TWIST_CLI_PATH) + " --help > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = std::string(TWIST_CLI_PATH) + " eval > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), kExitUsage);
}
