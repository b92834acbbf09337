#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "golf/cli.hpp"
#include "golf/graph.hpp"

namespace golf::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("golf-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    args.push_back("--manifest");
    args.push_back((dir_ / "m.json").string());
    return run(args, out_, err_);
  }
  int call_raw(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  json read_json(const std::string& name) const {
    std::ifstream f(dir_ / name);
    return json::parse(f);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(call_raw({}), kUsage);
  EXPECT_EQ(call_raw({"select", "--dataset", "karate", "--budget", "4", "--bogus"}), kUsage);
  EXPECT_EQ(call_raw({"frobnicate"}), kUsage);
  EXPECT_EQ(call_raw({"select", "--budget", "4"}), kUsage);
  EXPECT_EQ(call_raw({"select", "--dataset", "karate", "--budget", "4", "--rate", "0.1"}), kUsage);
  EXPECT_NE(err_.str().find("Usage"), std::string::npos);
  EXPECT_EQ(call_raw({"--help"}), kOk);
}

TEST_F(Cli, SelectIsDeterministic) {
  ASSERT_EQ(call({"select", "--dataset", "karate", "--budget", "4"}), kOk);
  const std::string first = out_.str();
  ASSERT_EQ(call({"select", "--dataset", "karate", "--budget", "4"}), kOk);
  EXPECT_EQ(out_.str(), first);
  std::istringstream lines(first);
  std::string typical, divergent;
  std::getline(lines, typical);
  std::getline(lines, divergent);
  std::istringstream ids(typical.substr(typical.find(':') + 1) + " " + divergent.substr(divergent.find(':') + 1));
  int count = 0;
  for (int id; ids >> id;) ++count;
  EXPECT_EQ(count, 4);
}

TEST_F(Cli, ErrorKindsMapToExitCodes) {
  EXPECT_EQ(call({"select", "--dataset", "karate", "--budget", "40"}), kParameter);
  EXPECT_EQ(call({"select", "--dataset", "karate", "--budget", "4", "--k", "9"}), kInfeasible);
  EXPECT_EQ(call({"select", "--dataset", "no-such-thing", "--budget", "4"}), kParameter);
  EXPECT_EQ(call({"golf", "--dataset", "karate", "--sigma", "-1"}), kParameter);
  EXPECT_EQ(call({"info", "--dataset", "karate", "--out", path("missing-dir/stats.json")}), kRuntime);

  fs::create_directories(dir_ / "broken");
  std::ofstream(dir_ / "broken" / "edges.txt") << "a b\n";
  std::ofstream(dir_ / "broken" / "features.tsv") << "a 1\n";
  EXPECT_EQ(call({"info", "--dataset", path("broken")}), kFormat);

  Graph g = karate_club();
  g.labels[0] = 5;
  std::ofstream bad(path("bad.golf"), std::ios::binary);
  write_container(g, bad);
  bad.close();
  EXPECT_EQ(call({"info", "--dataset", path("bad.golf")}), kValidation);
}

TEST_F(Cli, InfoAndManifest) {
  ASSERT_EQ(call_raw({"info", "--dataset", "karate", "--out", path("stats.json")}), kOk);
  EXPECT_NE(out_.str().find("karate"), std::string::npos);
  EXPECT_NE(out_.str().find("78"), std::string::npos);
  const json stats = read_json("stats.json");
  EXPECT_EQ(stats["nodes"], 34);
  EXPECT_EQ(stats["edges"], 78);
  const json m = read_json("stats.json.manifest.json");
  EXPECT_EQ(m["subcommand"], "info");
  EXPECT_EQ(m["config"]["dataset"], "karate");
  EXPECT_EQ(m["artifacts"][0], path("stats.json"));
  EXPECT_TRUE(m.contains("kernels"));
  EXPECT_TRUE(m["timings_seconds"].contains("load"));
}

TEST_F(Cli, PackAndReload) {
  ASSERT_EQ(call({"pack", "--dataset", "karate", "--out", path("k.golf")}), kOk);
  ASSERT_EQ(call({"info", "--dataset", path("k.golf")}), kOk);
  EXPECT_NE(out_.str().find("validation: ok"), std::string::npos);
}

TEST_F(Cli, GolfExport) {
  ASSERT_EQ(call({"golf", "--dataset", "karate", "--sigma", "1", "--trees", "2", "--out", path("f.json")}), kOk);
  const json f = read_json("f.json");
  for (const char* key : {"parent", "rho", "delta", "gamma", "layer", "tree_id"}) {
    ASSERT_TRUE(f.contains(key)) << key;
    EXPECT_EQ(f[key].size(), 34u);
  }
}

TEST_F(Cli, ConfigFileSuppliesDefaults) {
  std::ofstream(dir_ / "c.toml") << "[select]\nbudget = 6\nk = 0\n";
  ASSERT_EQ(call({"--config", path("c.toml"), "select", "--dataset", "karate", "--out", path("l.json")}), kOk);
  json l = read_json("l.json");
  EXPECT_EQ(l["typical"].size() + l["divergent"].size(), 6u);
  ASSERT_EQ(call({"--config", path("c.toml"), "select", "--dataset", "karate", "--budget", "3", "--out",
                  path("l.json")}),
            kOk);
  l = read_json("l.json");
  EXPECT_EQ(l["typical"].size() + l["divergent"].size(), 3u);
}

TEST_F(Cli, TrainExperimentSweepCompare) {
  const std::vector<std::string> quick{"--epochs", "5", "--test-size", "10", "--layers", "2"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), quick.begin(), quick.end());
    return a;
  };
  EXPECT_EQ(call(with({"train", "--dataset", "karate", "--budget", "4", "--split", "dns"})), kOk);
  EXPECT_NE(out_.str().find("accuracy"), std::string::npos);

  ASSERT_EQ(call(with({"experiment", "--dataset", "karate", "--rate", "0.2", "--mode", "random", "--runs", "3",
                       "--csv", path("e.csv"), "--out", path("e.json")})),
            kOk);
  EXPECT_EQ(read_json("e.json")["runs"].size(), 3u);

  ASSERT_EQ(call(with({"sweep", "--dataset", "karate", "--rate", "0.2", "--runs", "2", "--param", "k", "--values",
                       "1,50", "--csv", path("s.csv")})),
            kOk);
  EXPECT_NE(err_.str().find("skipped"), std::string::npos);
  std::ifstream csv(path("s.csv"));
  std::string all((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
  EXPECT_NE(all.find("k,50,skipped"), std::string::npos);

  ASSERT_EQ(call(with({"compare", "--dataset", "karate", "--rates", "0.1,0.2", "--runs", "2"})), kOk);
  EXPECT_NE(out_.str().find("GCN+DNS"), std::string::npos);
  EXPECT_NE(out_.str().find("delta"), std::string::npos);
}

}  // namespace
}  // namespace golf::cli
