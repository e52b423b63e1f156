#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "tactile/io.hpp"

using namespace tactile;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(TACTILE_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void spit(const std::filesystem::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// One synthesized full-grid corpus shared by the command tests.
class CliSession : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testutil::TempDir("cli");
    const auto r = run("synth --participants 1 --corpus " + corpus());
    ASSERT_EQ(r.code, 0) << r.output;
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string corpus() { return dir_->str("corpus"); }
  static std::string file(const std::string& leaf) { return dir_->str(leaf); }

  static testutil::TempDir* dir_;
};

testutil::TempDir* CliSession::dir_ = nullptr;

}  // namespace

TEST_F(CliSession, SynthWritesTrialsAndManifest) {
  std::size_t csvs = 0, jsons = 0;
  for (const auto& e : std::filesystem::directory_iterator(corpus())) {
    csvs += e.path().extension() == ".csv";
    jsons += e.path().extension() == ".json";
  }
  EXPECT_EQ(csvs, 42u);
  EXPECT_EQ(jsons, 43u);
  const auto manifest = read_file(corpus() + "/manifest.json");
  const auto again = run("synth --participants 1 --corpus " + file("corpus2"));
  ASSERT_EQ(again.code, 0) << again.output;
  EXPECT_NE(again.output.find("wrote 42 trials"), std::string::npos);
  EXPECT_EQ(read_file(file("corpus2") + "/manifest.json"), manifest);
  EXPECT_EQ(read_file(file("corpus2") + "/P01-wool-60rpm-1.96N.csv"), read_file(corpus() + "/P01-wool-60rpm-1.96N.csv"));
}

TEST_F(CliSession, TrainEvalReport) {
  const std::string common = " --corpus " + corpus() + " --model " + file("model.json");
  auto r = run("train" + common);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("P01: 840 training vectors"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("nonzero="), std::string::npos);
  const auto model = read_file(file("model.json"));

  r = run("train" + common);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_file(file("model.json")), model);

  r = run("eval" + common + " --report " + file("report.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("chance level: 14.3%"), std::string::npos);
  std::size_t rows = 0;
  for (const char* w : {"[1,2)s", "[1,3)s", "[1,4)s", "[1,5)s", "[1,6)s", "[1,7)s"}) rows += r.output.find(w) != std::string::npos;
  EXPECT_EQ(rows, 6u);
  const auto text = read_file(file("report.txt"));
  EXPECT_EQ(text, r.output);
  const auto report = parse_json(read_file(file("report.json")), "report");
  EXPECT_EQ(report["format"], kReportFormat);
  EXPECT_EQ(report["run_config"]["pipeline"]["fft_pad"], 256);

  r = run("report " + file("report.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.output, text);

  const auto report_bytes = read_file(file("report.json"));
  r = run("eval" + common + " --report " + file("report.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_file(file("report.json")), report_bytes);

  r = run("eval" + common + " --fft-pad 512 --report " + file("report3.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("fft_pad"), std::string::npos) << r.output;
  EXPECT_FALSE(std::filesystem::exists(file("report3.json")));
}

TEST_F(CliSession, ConfigFileWithFlagOverride) {
  spit(file("cfg.json"), R"({"paths": {"corpus": ")" + corpus() + R"("}, "decoder": {"lambda_grid": [0.01, 0.1], "cv_folds": 3}})");
  const auto r = run("train --config " + file("cfg.json") + " --model " + file("cfg-model.json") + " --folds 4");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto m = parse_json(read_file(file("cfg-model.json")), "model");
  EXPECT_EQ(m["run_config"]["decoder"]["cv_folds"], 4);
  EXPECT_EQ(m["run_config"]["decoder"]["lambda_grid"].size(), 2u);
}

TEST_F(CliSession, FeaturizeDumpsRows) {
  const auto r = run("featurize --corpus " + corpus() + " --window 1 2 --out " + file("features.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("wrote 252 feature rows"), std::string::npos) << r.output;
  const auto csv = read_file(file("features.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 253);
}

TEST_F(CliSession, ExitCodes) {
  auto r = run("train --corpus " + file("does-not-exist") + " --model " + file("m.json"));
  EXPECT_EQ(r.code, 3) << r.output;

  r = run("eval --corpus " + corpus() + " --model " + file("no-model.json") + " --report " + file("r.json"));
  EXPECT_EQ(r.code, 3) << r.output;

  r = run("train --corpus " + corpus() + " --model " + file("m.json") + " --max-iter 1 --lambda-grid 0.0001");
  EXPECT_EQ(r.code, 2) << r.output;

  // Strict mode with a material missing.
  const auto partial = file("partial");
  std::filesystem::create_directories(partial);
  for (const auto& e : std::filesystem::directory_iterator(corpus())) {
    const auto name = e.path().filename().string();
    if (name == "manifest.json" || name.find("cotton") != std::string::npos) continue;
    std::filesystem::copy_file(e.path(), std::filesystem::path(partial) / name);
  }
  r = run("train --corpus " + partial + " --model " + file("m.json"));
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("cotton"), std::string::npos) << r.output;
  r = run("train --relaxed --corpus " + partial + " --model " + file("m-relaxed.json") + " --lambda-grid 0.01");
  EXPECT_EQ(r.code, 0) << r.output;

  r = run("synth --corpus " + file("c.json") + " --fft-pad 300");
  EXPECT_EQ(r.code, 1) << r.output;
}

TEST(CliAnova, TablesAndErrors) {
  testutil::TempDir dir("anova");
  spit(dir.path() / "fixture.csv", "material,speed,load\nA,s1,10\nA,s1,12\nA,s2,20\nA,s2,22\nB,s1,30\nB,s1,32\nB,s2,40\nB,s2,42\n");
  auto r = run("anova " + dir.str("fixture.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("2 x 2 levels, 2 replicates"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("800"), std::string::npos);
  EXPECT_NE(r.output.find("400.0000"), std::string::npos);
  EXPECT_NE(r.output.find("F(df_effect, 4)"), std::string::npos);

  std::string constant;
  for (const char* a : {"A", "B", "C"})
    for (const char* b : {"x", "y"})
      for (int k = 0; k < 3; ++k) constant += std::string(a) + "," + b + ",0.98\n";
  spit(dir.path() / "constant.csv", constant);
  r = run("anova " + dir.str("constant.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("0.0000    1.0000"), std::string::npos) << r.output;

  spit(dir.path() / "bad.csv", "a,b,v\nA,x,1\nA,x,2\nA,y\n");
  r = run("anova " + dir.str("bad.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 4"), std::string::npos) << r.output;

  spit(dir.path() / "nan.csv", "A,x,1\nA,x,oops\n");
  r = run("anova " + dir.str("nan.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;

  spit(dir.path() / "unbalanced.csv", "A,x,1\nA,x,2\nA,y,3\nA,y,4\nB,x,5\nB,x,6\nB,y,7\n");
  r = run("anova " + dir.str("unbalanced.csv"));
  EXPECT_EQ(r.code, 1);

  r = run("anova " + dir.str("absent.csv"));
  EXPECT_NE(r.code, 0);
}
