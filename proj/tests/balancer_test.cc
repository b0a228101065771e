#include <gtest/gtest.h>

#include "forge/balancer.h"
#include "forge/error.h"
#include "forge/generator.h"

namespace forge {
namespace {

QARecord rec(TaskId task, const std::string& tpl, int i, AnswerValue answer, ParamBinding b = {}) {
  QARecord r;
  r.task = task;
  r.qtype = task == TaskId::kA ? QuestionType::kExistence
                               : (task == TaskId::kB ? QuestionType::kObjectRecognition : QuestionType::kParentRelation);
  r.doc_id = "d" + std::to_string(i);
  if (task != TaskId::kC) r.page = 0;
  r.template_id = tpl;
  if (b.empty()) b = {{"E", "table"}};
  r.binding = std::move(b);
  r.answer = std::move(answer);
  r.qid = make_qid(r.doc_id, r.page, tpl, {{"n", std::to_string(i)}});
  return r;
}

std::map<std::string, int> answer_counts(const std::vector<QARecord>& rs) {
  std::map<std::string, int> out;
  for (const auto& r : rs) ++out[r.answer.canonical()];
  return out;
}

TEST(BalanceAnswers, CapsMajorityClass) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(rec(TaskId::kA, "A-EX-01", i, AnswerValue::make_token(i < 90 ? "yes" : "no")));
  const auto out = balance_answers(rs, {7, 1.5, 2.0});
  const auto counts = answer_counts(out);
  EXPECT_EQ(counts.at("yes"), 15);
  EXPECT_EQ(counts.at("no"), 10);
}

TEST(BalanceAnswers, GroupsAreIndependent) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 40; ++i) rs.push_back(rec(TaskId::kA, "A-EX-01", i, AnswerValue::make_token(i < 30 ? "yes" : "no")));
  for (int i = 0; i < 40; ++i) rs.push_back(rec(TaskId::kA, "A-EX-02", i, AnswerValue::make_token(i < 20 ? "yes" : "no")));
  const auto out = balance_answers(rs, {7, 1.5, 2.0});
  int g1 = 0, g2 = 0;
  for (const auto& r : out) (r.template_id == "A-EX-01" ? g1 : g2)++;
  EXPECT_EQ(g1, 15 + 10);
  EXPECT_EQ(g2, 40);
}

TEST(BalanceAnswers, KeepsInputOrderAndIsDeterministic) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 60; ++i) rs.push_back(rec(TaskId::kB, "B-OR-01", i, AnswerValue::make_index(i % 6 == 0 ? 1 : 2)));
  const auto a = balance_answers(rs, {7, 1.5, 2.0});
  EXPECT_EQ(a, balance_answers(rs, {7, 1.5, 2.0}));
  std::size_t pos = 0;
  for (const auto& r : a) {
    while (pos < rs.size() && rs[pos].qid != r.qid) ++pos;
    ASSERT_LT(pos, rs.size()) << "order changed at " << r.qid;
  }
  // A different seed keeps the same number but may keep other records.
  EXPECT_EQ(balance_answers(rs, {8, 1.5, 2.0}).size(), a.size());
}

TEST(BalanceAnswers, SingleClassGroupIsUntouched) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 20; ++i) rs.push_back(rec(TaskId::kA, "A-EX-01", i, AnswerValue::make_token("yes")));
  EXPECT_EQ(balance_answers(rs, {7, 1.5, 2.0}).size(), 20u);
}

TEST(BalanceParameters, CapsDominantCombination) {
  std::vector<QARecord> rs;
  int i = 0;
  auto add = [&](const std::string& label, int n) {
    for (int k = 0; k < n; ++k) rs.push_back(rec(TaskId::kA, "A-CT-11", i++, AnswerValue::make_token("1"), {{"E", label}}));
  };
  add("table", 40);
  add("figure", 10);
  add("list", 10);
  add("title", 5);
  const auto out = balance_parameters(rs, {7, 1.5, 2.0});
  std::map<std::string, int> per;
  for (const auto& r : out) ++per[r.binding.at("E")];
  EXPECT_EQ(per["table"], 20);
  EXPECT_EQ(per["figure"], 10);
  EXPECT_EQ(per["list"], 10);
  EXPECT_EQ(per["title"], 5);
}

TEST(BalanceParameters, TaskCIsNotTouched) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 50; ++i) {
    rs.push_back(rec(TaskId::kC, "C-PA-01", i, AnswerValue::make_index_set({1}), {{"E", i < 45 ? "Table 1" : "Table 2"}}));
  }
  EXPECT_EQ(balance_parameters(rs, {7, 1.5, 2.0}), rs);
}

TEST(Balance, ReportRatiosAndReduction) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 100; ++i) rs.push_back(rec(TaskId::kA, "A-EX-01", i, AnswerValue::make_token(i < 90 ? "yes" : "no")));
  const auto out = balance(rs, {7, 1.5, 2.0});
  const auto report = balance_report(rs, out);
  ASSERT_EQ(report.groups.size(), 1u);
  EXPECT_DOUBLE_EQ(report.groups[0].answer_ratio_before, 9.0);
  EXPECT_DOUBLE_EQ(report.groups[0].answer_ratio_after, 1.5);
  EXPECT_EQ(report.tasks.at("A").before, 100u);
  EXPECT_EQ(report.tasks.at("A").after, 25u);
  EXPECT_DOUBLE_EQ(report.tasks.at("A").reduction_factor, 4.0);
  const auto j = report_to_json(report);
  EXPECT_TRUE(j.contains("tasks"));
  EXPECT_TRUE(j.contains("groups"));
}

TEST(Balance, RatioHelpers) {
  std::vector<QARecord> rs;
  for (int i = 0; i < 6; ++i) rs.push_back(rec(TaskId::kA, "t", i, AnswerValue::make_token(i < 4 ? "yes" : "no"), {{"E", i < 3 ? "a" : (i < 5 ? "b" : "c")}}));
  std::vector<const QARecord*> ptrs;
  for (const auto& r : rs) ptrs.push_back(&r);
  EXPECT_DOUBLE_EQ(answer_class_ratio(ptrs), 2.0);
  // counts 3,2,1: median 2
  EXPECT_DOUBLE_EQ(combination_ratio(ptrs), 1.5);
}

TEST(Balance, RejectsBoundsBelowOne) {
  EXPECT_THROW(validate_config(BalanceConfig{0, 0.5, 2.0}), Error);
  EXPECT_THROW(validate_config(BalanceConfig{0, 1.5, 0.9}), Error);
  EXPECT_NO_THROW(validate_config(BalanceConfig{0, 1.0, 1.0}));
}

}  // namespace
}  // namespace forge
