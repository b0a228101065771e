#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "forge/dataset_io.h"
#include "forge/error.h"
#include "forge/generator.h"
#include "forge/hash.h"
#include "synth.h"

namespace fs = std::filesystem;

namespace forge {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kMalformedInput;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("forge_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

std::vector<QARecord> sample_records() {
  static const auto records = [] {
    GenConfig cfg;
    cfg.seed = 2;
    cfg.na_rate = 1.0;
    return generate_corpus(testing::random_corpus(55, 12), builtin_templates(), cfg).records;
  }();
  return records;
}

QARecord simple(const std::string& doc, int n, const std::string& question = "q") {
  QARecord r;
  r.task = TaskId::kA;
  r.qtype = QuestionType::kCounting;
  r.doc_id = doc;
  r.page = 0;
  r.template_id = "A-CT-11";
  r.binding = {{"E", "table"}};
  r.question = question;
  r.answer = AnswerValue::make_token("1");
  r.qid = make_qid(doc, 0, "A-CT-11", {{"n", std::to_string(n)}});
  return r;
}

TEST(Records, JsonlRoundTrip) {
  const auto records = sample_records();
  ASSERT_FALSE(records.empty());
  const auto text = records_to_jsonl(records);
  EXPECT_EQ(records_from_jsonl(text), records);
  EXPECT_EQ(records_to_jsonl(records_from_jsonl(text)), text);
}

TEST(Records, FieldOrderAndPageNull) {
  QARecord c = simple("d", 0);
  c.task = TaskId::kC;
  c.qtype = QuestionType::kParentRelation;
  c.page = std::nullopt;
  c.answer = AnswerValue::make_index_set({4, 1});
  const auto j = record_to_json(c);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"qid", "task", "qtype", "doc_id", "page", "question", "template_id",
                                            "bindings", "answer"}));
  EXPECT_TRUE(j["page"].is_null());
  EXPECT_EQ(record_from_json(j), c);
}

TEST(Records, SchemaViolations) {
  const auto text = records_to_jsonl(sample_records());
  // Truncated mid-record.
  EXPECT_EQ(code_of([&] { records_from_jsonl(text.substr(0, text.size() / 2 + 7)); }), ErrorCode::kSchemaViolation);
  auto j = nlohmann::json(record_to_json(simple("d", 0)));
  j.erase("qid");
  EXPECT_EQ(code_of([&] { record_from_json(j); }), ErrorCode::kSchemaViolation);
  j = nlohmann::json(record_to_json(simple("d", 0)));
  j["page"] = nullptr;
  EXPECT_EQ(code_of([&] { record_from_json(j); }), ErrorCode::kSchemaViolation);
  j = nlohmann::json(record_to_json(simple("d", 0)));
  j["qtype"] = "ParentRelation";
  EXPECT_EQ(code_of([&] { record_from_json(j); }), ErrorCode::kSchemaViolation);
  try {
    records_from_jsonl(records_to_jsonl({simple("d", 0)}) + "{\"qid\": 3}\n", "x.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("x.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST_F(TempDir, FilesAndMissingPaths) {
  const auto records = sample_records();
  write_records(dir / "r.jsonl", records);
  EXPECT_EQ(read_records(dir / "r.jsonl"), records);
  EXPECT_FALSE(fs::exists(dir / "r.jsonl.tmp"));
  EXPECT_EQ(code_of([&] { read_records(dir / "missing.jsonl"); }), ErrorCode::kIoFailure);
  EXPECT_EQ(code_of([&] { load_corpus(dir / "nowhere"); }), ErrorCode::kIoFailure);
}

TEST_F(TempDir, LoadCorpusFromDirectory) {
  const auto docs = testing::random_corpus(6, 3);
  for (const auto& d : docs) std::ofstream(dir / (d.doc_id + ".json")) << serialize_document(d).dump(2);
  std::ofstream(dir / "notes.txt") << "ignored";
  EXPECT_EQ(load_corpus(dir), docs);
  EXPECT_EQ(load_corpus(dir / (docs[1].doc_id + ".json")), std::vector<Document>{docs[1]});
}

TEST(Split, TenDocumentsEightOneOne) {
  std::vector<QARecord> records;
  for (int d = 0; d < 10; ++d) {
    for (int k = 0; k < 3; ++k) records.push_back(simple("doc" + std::to_string(d), k));
  }
  const auto splits = split_corpus(records, {0.8, 0.1, 0.1}, 42);
  EXPECT_EQ(splits[0].doc_ids.size(), 8u);
  EXPECT_EQ(splits[1].doc_ids.size(), 1u);
  EXPECT_EQ(splits[2].doc_ids.size(), 1u);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& s : splits) {
    for (const auto& id : s.doc_ids) EXPECT_TRUE(seen.insert(id).second) << id << " in two splits";
    for (const auto& r : s.records) {
      EXPECT_TRUE(std::binary_search(s.doc_ids.begin(), s.doc_ids.end(), r.doc_id));
    }
    total += s.records.size();
  }
  EXPECT_EQ(total, records.size());
  EXPECT_EQ(splits, split_corpus(records, {0.8, 0.1, 0.1}, 42));
  EXPECT_EQ(splits[0].name, "train");
  EXPECT_EQ(splits[2].name, "test");
}

TEST(Split, BadRatios) {
  const std::vector<QARecord> records = {simple("a", 0)};
  for (const auto& ratios : std::vector<std::vector<double>>{{0.5, 0.5}, {0.5, 0.3, 0.3}, {1.0, 0.0, 0.0}, {0.9, 0.2, -0.1}}) {
    EXPECT_EQ(code_of([&] { split_corpus(records, ratios, 1); }), ErrorCode::kBadRatios);
  }
}

TEST(Split, Apportion) {
  EXPECT_EQ(apportion(10, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{8, 1, 1}));
  EXPECT_EQ(apportion(7, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{5, 1, 1}));
  EXPECT_EQ(apportion(0, {0.8, 0.1, 0.1}), (std::array<std::size_t, 3>{0, 0, 0}));
  for (std::size_t n = 0; n < 50; ++n) {
    const auto a = apportion(n, {0.7, 0.2, 0.1});
    EXPECT_EQ(a[0] + a[1] + a[2], n);
  }
}

TEST_F(TempDir, DatasetDirectoryRoundTrip) {
  const auto splits = split_corpus(sample_records(), {0.6, 0.2, 0.2}, 3);
  write_dataset(splits, dir);
  for (const char* name : kSplitNames) EXPECT_TRUE(fs::exists(dir / (std::string(name) + ".jsonl")));
  EXPECT_EQ(read_dataset(dir), splits);
}

TEST(Stats, Arithmetic) {
  EXPECT_DOUBLE_EQ(round2(6.5725), 6.57);
  EXPECT_DOUBLE_EQ(average(81085, 12337), 6.57);
  EXPECT_DOUBLE_EQ(average(5653, 1147), 4.93);
  EXPECT_DOUBLE_EQ(percentage(14387, 81085), 17.74);
  EXPECT_DOUBLE_EQ(average(3, 0), 0.0);
}

TEST(Stats, LengthsUniquenessAndWords) {
  std::vector<QARecord> rs = {simple("a", 0, "How many tables in this page?"), simple("a", 1, "How many tables in this page?"),
                              simple("b", 2, "Is there any figure?")};
  const auto stats = compute_stats(rs);
  const auto& a = stats.tasks.at("A");
  EXPECT_EQ(a.units, 2u);
  EXPECT_EQ(a.questions, 3u);
  EXPECT_DOUBLE_EQ(a.avg_per_unit, 1.5);
  EXPECT_DOUBLE_EQ(a.avg_length, round2((6 + 6 + 4) / 3.0));
  EXPECT_DOUBLE_EQ(a.unique_ratio, round2(200.0 / 3));
  ASSERT_FALSE(a.first_words.empty());
  EXPECT_EQ(a.first_words[0], (std::pair<std::string, std::size_t>{"How", 2}));
  EXPECT_EQ(compute_stats(std::vector<QARecord>{simple("a", 0, "How many tables in this page?")}).tasks.at("A").avg_length,
            6.0);
}

TEST(Stats, PatternsHideTextValues) {
  QARecord r = simple("a", 0, "How many tables are below the 'Results'?");
  r.template_id = "A-CT-01";
  r.binding = {{"E1", "table"}, {"E2", "Results"}, {"R", "bottom"}};
  EXPECT_EQ(question_pattern(r), "How many tables are below the X?");
  const auto j = stats_to_json(compute_stats(std::vector<QARecord>{r}));
  EXPECT_TRUE(j["A"].contains("pages"));
}

}  // namespace
}  // namespace forge
