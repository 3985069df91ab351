#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const auto log = fs::temp_directory_path() / "sagenet_cli_test.out";
  const std::string cmd = std::string(SAGENET_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / "sagenet_cli_flow";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"optimizer":"adam","lr":0.01,"batch_size":32,"max_epochs":6,
                                          "hidden_dim":16,"proj_dim":8,"fanouts":[4,2]})";
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string p(const char* name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, EndToEndFlow) {
  auto r = run("synth --out-dir " + dir.string() + " --nodes 120 --dim 8 --visual-dim 4 --seed 3");
  ASSERT_EQ(r.code, 0) << r.out;
  ASSERT_EQ(run("build-graph --manifest " + p("manifest.jsonl") + " --out " + p("g.sgg")).code, 0);
  ASSERT_EQ(run("split --manifest " + p("manifest.jsonl") + " --fractions 0.6,0.2,0.2 --timeframes --out " +
                p("m2.jsonl"))
                .code,
            0);
  r = run("train --manifest " + p("m2.jsonl") + " --graph " + p("g.sgg") + " --features " + p("features.sgf") +
          " --visual " + p("visual.sgf") + " --tasks style,date:0.1,tags,timeframe --config " + p("cfg.json") +
          " --out " + p("model") + " --quiet --seed 5");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(p("model.sgm")));
  EXPECT_TRUE(fs::exists(p("model.json")));
  EXPECT_EQ(slurp(p("model.log.csv")).rfind("epoch,train_loss,val_loss,lr,", 0), 0u);

  r = run("eval --model " + p("model") + " --split test --report " + p("report.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(slurp(p("report.json")).find("style"), std::string::npos);

  ASSERT_EQ(run("embed --model " + p("model") + " --out " + p("store.sge")).code, 0);
  r = run("retrieve --model " + p("model") + " --store " + p("store.sge") + " --query n0 --k 3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("rank"), std::string::npos);

  r = run("cs-curve --model " + p("model") + " --split test --thetas 0:10:5");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("theta"), std::string::npos);
}

TEST_F(Cli, ErrorsExitNonZero) {
  auto r = run("build-graph --manifest " + p("missing.jsonl") + " --out " + p("g.sgg"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("error: ", 0), 0u) << r.out;
  EXPECT_NE(run("train --graph x").code, 0);
  EXPECT_NE(run("no-such-command").code, 0);
}
