#include <gtest/gtest.h>

#include "forge/error.h"
#include "forge/program.h"
#include "oracle.h"
#include "synth.h"

namespace forge {
namespace {

class P1 : public ::testing::Test {
 protected:
  Document doc = testing::fixture_p1();
  DocumentGraphs graphs = build_graphs(doc);

  AnswerValue run(const char* id, const ParamBinding& b) {
    const auto& t = *builtin_templates().find(id);
    const Page* page = t.task == TaskId::kC ? nullptr : &doc.pages[0];
    return execute(compile(t, b), {&doc, page, &graphs}, t.task);
  }
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kMalformedInput;
}

TEST_F(P1, RegionExistence) {
  EXPECT_EQ(run("A-EX-01", {{"E", "figure"}, {"pos", "top"}}), AnswerValue::make_token("no"));
  EXPECT_EQ(run("A-EX-01", {{"E", "figure"}, {"pos", "bottom-right"}}), AnswerValue::make_token("yes"));
  EXPECT_EQ(run("A-EX-04", {{"E", "figure"}, {"pos", "top"}}), AnswerValue::make_token("yes"));
}

TEST_F(P1, RelationCount) {
  EXPECT_EQ(run("A-CT-01", {{"E1", "table"}, {"E2", "Results"}, {"R", "bottom"}}), AnswerValue::make_token("1"));
  // Cardinal relations also take the diagonal neighbours.
  EXPECT_EQ(run("A-CT-01", {{"E1", "figure"}, {"E2", "Results"}, {"R", "bottom"}}), AnswerValue::make_token("1"));
  EXPECT_EQ(run("A-CT-01", {{"E1", "figure"}, {"E2", "Results"}, {"R", "bottom-left"}}),
            AnswerValue::make_token("0"));
  EXPECT_EQ(run("A-CT-01", {{"E1", "table"}, {"E2", "Results"}, {"R", "top"}}), AnswerValue::make_token("0"));
}

TEST_F(P1, PageLevelCounting) {
  EXPECT_EQ(run("A-CT-11", {{"E", "table"}}), AnswerValue::make_token("1"));
  EXPECT_EQ(run("A-CT-11", {{"E", "list"}}), AnswerValue::make_token("0"));
  EXPECT_EQ(run("A-CT-09", {{"E", "title"}, {"num", "1"}}), AnswerValue::make_token("yes"));
  EXPECT_EQ(run("A-CT-09", {{"E", "title"}, {"num", "2"}}), AnswerValue::make_token("no"));
  EXPECT_EQ(run("A-EX-17", {{"E", "Results"}}), AnswerValue::make_token("yes"));
  EXPECT_EQ(run("A-EX-17", {{"E", "Methods"}}), AnswerValue::make_token("no"));
}

TEST_F(P1, ObjectRecognitionPointsAtCaption) {
  EXPECT_EQ(run("B-OR-02", {{"E", "table"}, {"pos", "bottom"}}), AnswerValue::make_index(3));
  // The figure has no caption.
  EXPECT_EQ(run("B-OR-02", {{"E", "figure"}, {"pos", "bottom"}}), AnswerValue::na());
  EXPECT_EQ(run("B-OR-02", {{"E", "table"}, {"pos", "top-left"}}), AnswerValue::na());
}

TEST_F(P1, StructuralUnderstanding) {
  EXPECT_EQ(run("B-SU-01", {{"turn", "first"}}), AnswerValue::make_index(0));
  EXPECT_EQ(run("B-SU-01", {{"turn", "last"}}), AnswerValue::make_index(0));
  EXPECT_EQ(run("B-SU-06", {{"pos", "top"}}), AnswerValue::make_index(0));
  EXPECT_EQ(run("B-SU-06", {{"pos", "bottom"}}), AnswerValue::na());
}

TEST_F(P1, ParentSections) {
  EXPECT_EQ(run("C-PA-01", {{"E", "Table 1"}}), AnswerValue::make_index_set({0}));
  EXPECT_EQ(run("C-PA-01", {{"E", "Figure 9"}}), AnswerValue::na());
}

TEST_F(P1, AnchorMustBeUnique) {
  EXPECT_EQ(code_of([&] { run("A-CT-01", {{"E1", "table"}, {"E2", "Nope"}, {"R", "top"}}); }),
            ErrorCode::kAnchorNotFound);
}

TEST_F(P1, TraceFollowsSteps) {
  const auto& t = *builtin_templates().find("A-CT-01");
  const auto prog = compile(t, {{"E1", "table"}, {"E2", "Results"}, {"R", "bottom"}});
  std::vector<TraceStep> trace;
  execute(prog, {&doc, &doc.pages[0], &graphs}, TaskId::kA, &trace);
  ASSERT_EQ(trace.size(), prog.steps.size());
  EXPECT_EQ(trace[0].function, function_name(FunctionKind::kLocateByText));
  EXPECT_EQ(trace.back().output_kind, "int");
  EXPECT_EQ(trace_to_json(trace).size(), trace.size());
}

TEST(Program, CountAboveFiveOverflows) {
  nlohmann::json elems = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) {
    elems.push_back({{"id", "t" + std::to_string(i)}, {"category", "table"}, {"bbox", {10, i * 15, 90, i * 15 + 10}}});
  }
  const Document doc = preprocess(document_from_json(
      {{"doc_id", "six"}, {"pages", {{{"index", 0}, {"width", 100}, {"height", 100}, {"elements", elems}}}}}));
  const auto graphs = build_graphs(doc);
  const auto& t = *builtin_templates().find("A-CT-11");
  EXPECT_EQ(code_of([&] { execute(compile(t, {{"E", "table"}}), {&doc, &doc.pages[0], &graphs}, TaskId::kA); }),
            ErrorCode::kOverflowAnswer);
  const auto& absent = *builtin_templates().find("A-CT-09");
  EXPECT_EQ(execute(compile(absent, {{"E", "table"}, {"num", "5"}}), {&doc, &doc.pages[0], &graphs}, TaskId::kA),
            AnswerValue::make_token("no"));
}

TEST(Program, CompileValidatesBindings) {
  const auto& t = *builtin_templates().find("A-CT-01");
  EXPECT_EQ(code_of([&] { compile(t, {{"E1", "table"}, {"R", "top"}}); }), ErrorCode::kIncompleteBinding);
  EXPECT_EQ(code_of([&] { compile(t, {{"E1", "chair"}, {"E2", "X"}, {"R", "top"}}); }), ErrorCode::kTypeMismatch);
  EXPECT_EQ(code_of([&] { compile(t, {{"E1", "table"}, {"E2", "X"}, {"R", "inside"}}); }), ErrorCode::kTypeMismatch);
  const auto& n = *builtin_templates().find("A-CT-09");
  EXPECT_EQ(code_of([&] { compile(n, {{"E", "table"}, {"num", "7"}}); }), ErrorCode::kTypeMismatch);
}

TEST(Program, TypeCheck) {
  using FK = FunctionKind;
  FunctionalProgram ok{{{FK::kFilterCategory, "table"}, {FK::kCount}}, ScopeKind::kPage};
  EXPECT_NO_THROW(type_check(ok, TaskId::kA));
  // Int result is not a Task B answer.
  EXPECT_EQ(code_of([&] { type_check(ok, TaskId::kB); }), ErrorCode::kTypeMismatch);
  FunctionalProgram chain{{{FK::kCount}, {FK::kCount}}, ScopeKind::kPage};
  EXPECT_EQ(code_of([&] { type_check(chain, TaskId::kA); }), ErrorCode::kTypeMismatch);
  FunctionalProgram doc_rel{{{FK::kLocateByText, "x"}, {FK::kRelatedByPosition, "top"}, {FK::kParentSections, "y"}},
                            ScopeKind::kDocument};
  EXPECT_EQ(code_of([&] { type_check(doc_rel, TaskId::kC); }), ErrorCode::kTypeMismatch);
  EXPECT_EQ(code_of([&] { type_check(FunctionalProgram{}, TaskId::kA); }), ErrorCode::kTypeMismatch);
}

TEST(Program, EveryTemplateCompiles) {
  for (const auto& doc : testing::random_corpus(17, 20)) {
    const auto graphs = build_graphs(doc);
    for (const auto& t : builtin_templates().all()) {
      const Page* page = t.task == TaskId::kC ? nullptr : &doc.pages[0];
      for (const auto& b : enumerate_bindings(t, doc, page, graphs)) {
        const auto prog = compile(t, b);
        EXPECT_EQ(prog.steps.size(), program_skeleton(t).size()) << t.template_id;
        EXPECT_EQ(prog.scope == ScopeKind::kDocument, t.task == TaskId::kC);
      }
    }
  }
}

TEST(Program, MatchesOracleOnRandomPages) {
  std::size_t n = 0;
  for (const auto& doc : testing::random_corpus(99, 30)) {
    const auto graphs = build_graphs(doc);
    for (const auto& t : builtin_templates().all()) {
      const std::vector<const Page*> scopes =
          t.task == TaskId::kC ? std::vector<const Page*>{nullptr} : [&] {
            std::vector<const Page*> ps;
            for (const auto& p : doc.pages) ps.push_back(&p);
            return ps;
          }();
      for (const Page* page : scopes) {
        for (const auto& b : enumerate_bindings(t, doc, page, graphs)) {
          const auto want = testing::oracle_execute(t, b, doc, page);
          if (want.status != testing::OracleAnswer::Status::kValue) continue;
          ASSERT_EQ(execute(compile(t, b), {&doc, page, &graphs}, t.task), want.value)
              << doc.doc_id << " " << t.template_id << " " << canonical_binding(b);
          ++n;
        }
      }
    }
  }
  EXPECT_GT(n, 10000u);
}

TEST(Answers, CanonicalFormsAndJson) {
  EXPECT_EQ(AnswerValue::make_index_set({5, 2, 5}).indices, (std::vector<int>{2, 5}));
  for (const auto& a : {AnswerValue::make_token("yes"), AnswerValue::make_index(4), AnswerValue::make_index_set({1, 3}),
                        AnswerValue::na()}) {
    EXPECT_EQ(answer_from_json(answer_to_json(a)), a);
  }
  EXPECT_EQ(code_of([] { answer_from_json({{"kind", "token"}, {"value", 3}}); }), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([] { answer_from_json({{"kind", "blob"}}); }), ErrorCode::kSchemaViolation);
}

TEST(Answers, TaskSpaces) {
  EXPECT_TRUE(answer_in_space(AnswerValue::make_token("5"), TaskId::kA));
  EXPECT_FALSE(answer_in_space(AnswerValue::make_token("6"), TaskId::kA));
  EXPECT_FALSE(answer_in_space(AnswerValue::na(), TaskId::kA));
  EXPECT_TRUE(answer_in_space(AnswerValue::na(), TaskId::kB));
  EXPECT_TRUE(answer_in_space(AnswerValue::make_index(0), TaskId::kB));
  EXPECT_FALSE(answer_in_space(AnswerValue::make_index(-1), TaskId::kB));
  EXPECT_TRUE(answer_in_space(AnswerValue::make_index_set({0, 2}), TaskId::kC));
  EXPECT_FALSE(answer_in_space(AnswerValue::make_token("yes"), TaskId::kC));
}

TEST(Regions, CenterOnTheSplitBelongsToNeitherHalf) {
  const BoundingBox mid{0.4, 0.4, 0.6, 0.6};
  for (const char* r : {"top", "bottom", "left", "right", "top-left", "bottom-right"}) {
    EXPECT_FALSE(region_contains(r, mid)) << r;
  }
  EXPECT_TRUE(region_contains("top-left", {0.1, 0.1, 0.2, 0.2}));
  EXPECT_TRUE(region_contains("bottom", {0.1, 0.7, 0.9, 0.8}));
  EXPECT_EQ(code_of([] { region_contains("middle", {0, 0, 1, 1}); }), ErrorCode::kTypeMismatch);
}

}  // namespace
}  // namespace forge
