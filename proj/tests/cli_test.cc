#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "forge/cli.h"
#include "forge/dataset_io.h"
#include "forge/eval.h"
#include "synth.h"

namespace fs = std::filesystem;

namespace forge {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("forge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir / "corpus");
    std::ofstream(dir / "corpus" / "p1.json") << testing::fixture_p1_json().dump(2);
    for (const auto& d : testing::random_corpus(31, 12)) {
      std::ofstream(dir / "corpus" / (d.doc_id + ".json")) << serialize_document(d).dump();
    }
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const char* name) const { return (dir / name).string(); }
  std::string corpus() const { return (dir / "corpus").string(); }

  fs::path dir;
};

TEST_F(Cli, FullPipeline) {
  auto r = cli({"generate", "--in", corpus(), "--seed", "3", "--out", path("raw.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  ASSERT_TRUE(fs::exists(path("raw.jsonl.manifest.json")));
  const auto manifest = nlohmann::json::parse(read_text_file(path("raw.jsonl.manifest.json")));
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_TRUE(manifest["counts"].contains("A"));

  r = cli({"balance", "--in", path("raw.jsonl"), "--seed", "3", "--out", path("bal.jsonl"), "--report",
           path("report.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_LE(read_records(path("bal.jsonl")).size(), read_records(path("raw.jsonl")).size());
  EXPECT_TRUE(fs::exists(path("report.json")));

  r = cli({"split", "--in", path("bal.jsonl"), "--seed", "3", "--ratios", "0.8,0.1,0.1", "--out", path("split")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto splits = read_dataset(path("split"));
  EXPECT_EQ(splits[0].doc_ids.size() + splits[1].doc_ids.size() + splits[2].doc_ids.size(), 13u);

  r = cli({"stats", "--in", path("split"), "--out", path("stats.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto stats = nlohmann::json::parse(read_text_file(path("stats.json")));
  EXPECT_TRUE(stats["C"].contains("documents"));

  std::ofstream(path("pred.jsonl")) << predictions_to_jsonl(gold_predictions(splits[2].records));
  r = cli({"eval", "--gold", (dir / "split" / "test.jsonl").string(), "--pred", path("pred.jsonl"), "--strict"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("100.0"), std::string::npos) << r.out;
}

TEST_F(Cli, GenerateUsesThreadsEnvironment) {
  ASSERT_EQ(cli({"generate", "--in", corpus(), "--seed", "1", "--threads", "1", "--out", path("a.jsonl")}).code, 0);
  ::setenv("FORGE_THREADS", "4", 1);
  ASSERT_EQ(cli({"generate", "--in", corpus(), "--seed", "1", "--out", path("b.jsonl")}).code, 0);
  ::unsetenv("FORGE_THREADS");
  EXPECT_EQ(read_text_file(path("a.jsonl")), read_text_file(path("b.jsonl")));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"generate", "--in", corpus(), "--out", path("x.jsonl")}).code, kExitUsage);  // no seed
  ASSERT_EQ(cli({"generate", "--in", corpus(), "--seed", "1", "--out", path("raw.jsonl")}).code, 0);
  EXPECT_EQ(cli({"split", "--in", path("raw.jsonl"), "--seed", "1", "--ratios", "0.9,0.1", "--out", path("s")}).code,
            kExitUsage);
  EXPECT_EQ(cli({"generate", "--in", corpus(), "--seed", "1", "--tasks", "A,Q", "--out", path("y.jsonl")}).code,
            kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(Cli, DataErrorsExitOne) {
  ASSERT_EQ(cli({"generate", "--in", corpus(), "--seed", "1", "--out", path("raw.jsonl")}).code, 0);
  auto r = cli({"eval", "--gold", path("raw.jsonl"), "--pred", path("missing.jsonl")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("IoFailure"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"split", "--in", path("raw.jsonl"), "--seed", "1", "--ratios", "0.5,0.3,0.3", "--out", path("s")}).code,
            kExitFailure);
  EXPECT_EQ(cli({"generate", "--in", path("nowhere"), "--seed", "1", "--out", path("z.jsonl")}).code, kExitFailure);
}

TEST_F(Cli, Inspect) {
  auto r = cli({"inspect", "--in", corpus(), "--doc", "p1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("page 0 (5 elements)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("[3] cap table_caption"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("tab > cap > title"), std::string::npos) << r.out;

  r = cli({"inspect", "--in", corpus(), "--doc", "p1", "--page", "0", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["parent_of"].size(), 5u);

  r = cli({"inspect", "--in", corpus(), "--doc", "nope"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("UnknownDocument"), std::string::npos);
  r = cli({"inspect", "--in", corpus(), "--doc", "p1", "--page", "4"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("UnknownPage"), std::string::npos);
}

TEST_F(Cli, IngestAndTemplates) {
  auto r = cli({"ingest", "--in", corpus(), "--out", path("summary.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(path("summary.json")));
  r = cli({"templates", "dump"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 66u);
  EXPECT_EQ(j[0]["template_id"], "A-EX-01");
}

}  // namespace
}  // namespace forge
