#include <gtest/gtest.h>

#include <set>

#include "forge/error.h"
#include "forge/hash.h"
#include "forge/templates.h"
#include "synth.h"

namespace forge {
namespace {

const QuestionTemplate& tpl(const char* id) {
  const auto* t = builtin_templates().find(id);
  EXPECT_NE(t, nullptr) << id;
  return *t;
}

TEST(Registry, CountsAndIds) {
  const auto& reg = builtin_templates();
  EXPECT_EQ(reg.size(), 66u);
  EXPECT_EQ(reg.for_task(TaskId::kA).size(), 36u);
  EXPECT_EQ(reg.for_task(TaskId::kB).size(), 15u);
  EXPECT_EQ(reg.for_task(TaskId::kC).size(), 15u);
  std::set<std::string> ids;
  for (const auto& t : reg.all()) {
    EXPECT_TRUE(ids.insert(t.template_id).second) << t.template_id;
    EXPECT_EQ(task_of(t.qtype), t.task) << t.template_id;
    EXPECT_EQ(reg.find(t.template_id), &t);
  }
  EXPECT_EQ(reg.find("Z-00"), nullptr);
}

TEST(Registry, SlotsMatchPatterns) {
  for (const auto& t : builtin_templates().all()) {
    for (const auto& s : t.slots) {
      EXPECT_NE(t.pattern.find("[" + s.name + "]"), std::string::npos) << t.template_id << " " << s.name;
    }
  }
}

TEST(Values, Domains) {
  EXPECT_EQ(label_values(), (std::vector<std::string>{"title", "list", "table", "figure"}));
  EXPECT_EQ(region_values().size(), 8u);
}

TEST(Instantiate, RelationCountWithSynonym) {
  const ParamBinding b = {{"E1", "table"}, {"E2", "Results"}, {"R", "bottom"}};
  const std::set<std::string> allowed = {"How many tables are below the 'Results'?", "How many tables are under the 'Results'?",
                                         "How many tables are on the bottom of the 'Results'?"};
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto q = instantiate(tpl("A-CT-01"), b, seed);
    EXPECT_TRUE(allowed.count(q.text)) << q.text;
    EXPECT_EQ(q.text, instantiate(tpl("A-CT-01"), b, seed).text);
    seen.insert(q.text);
  }
  EXPECT_GT(seen.size(), 1u);
}

TEST(Instantiate, NounRelationContext) {
  const auto q = instantiate(tpl("A-CT-03"), {{"E1", "figure"}, {"E2", "Discussion"}, {"R", "top"}}, 1);
  EXPECT_EQ(q.text, "How many figures can you find on the top of 'Discussion'?");
}

TEST(Instantiate, SimpleSlots) {
  EXPECT_EQ(instantiate(tpl("A-CT-11"), {{"E", "table"}}, 0).text, "How many tables on this page?");
  EXPECT_EQ(instantiate(tpl("A-CT-09"), {{"E", "table"}, {"num", "2"}}, 0).text, "Are there 2 table(s) on this page?");
  EXPECT_EQ(instantiate(tpl("B-SU-01"), {{"turn", "last"}}, 0).text, "What is the last section in this page?");
  EXPECT_EQ(instantiate(tpl("A-EX-22"), {{"E", "Abstract"}}, 0).text, "Confirm if there is 'Abstract' on this page.");
  EXPECT_EQ(instantiate(tpl("C-PA-04"), {{"E", "Table 2"}}, 0).text, "Where can you find the Table 2?");
  EXPECT_EQ(instantiate(tpl("C-PA-08"), {{"E", "smith2019"}}, 0).text,
            "Where is the 'smith2019' cited in the document?");
}

TEST(Instantiate, MissingSlotIsAnError) {
  try {
    instantiate(tpl("A-CT-01"), {{"E1", "table"}, {"R", "top"}}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteBinding);
  }
}

TEST(Bindings, FixtureTitleAnchors) {
  const Document doc = testing::fixture_p1();
  const auto graphs = build_graphs(doc);
  const auto& page = doc.pages[0];
  EXPECT_EQ(enumerate_bindings(tpl("A-EX-17"), doc, &page, graphs), (std::vector<ParamBinding>{{{"E", "Results"}}}));
  // 4 labels x 1 anchor x 8 relations
  EXPECT_EQ(enumerate_bindings(tpl("A-CT-01"), doc, &page, graphs).size(), 32u);
  EXPECT_EQ(enumerate_bindings(tpl("A-EX-01"), doc, &page, graphs).size(), 32u);
  EXPECT_EQ(enumerate_bindings(tpl("B-OR-01"), doc, &page, graphs).size(), 16u);
  EXPECT_EQ(enumerate_bindings(tpl("C-PA-01"), doc, nullptr, graphs), (std::vector<ParamBinding>{{{"E", "Table 1"}}}));
  // "Results" has no subsections.
  EXPECT_TRUE(enumerate_bindings(tpl("C-CH-01"), doc, nullptr, graphs).empty());
  // Page templates need a page.
  EXPECT_TRUE(enumerate_bindings(tpl("A-CT-01"), doc, nullptr, graphs).empty());
}

TEST(Bindings, CanonicallyOrdered) {
  for (const auto& doc : testing::random_corpus(8, 10)) {
    const auto graphs = build_graphs(doc);
    for (const auto& t : builtin_templates().all()) {
      const Page* page = t.task == TaskId::kC ? nullptr : &doc.pages[0];
      const auto bs = enumerate_bindings(t, doc, page, graphs);
      EXPECT_TRUE(std::is_sorted(bs.begin(), bs.end()));
      EXPECT_TRUE(std::adjacent_find(bs.begin(), bs.end()) == bs.end());
    }
  }
}

TEST(MatchQuestion, RoundTripsEveryRendering) {
  std::size_t checked = 0;
  for (const auto& doc : testing::random_corpus(21, 25)) {
    const auto graphs = build_graphs(doc);
    for (const auto& t : builtin_templates().all()) {
      const Page* page = t.task == TaskId::kC ? nullptr : &doc.pages[0];
      for (const auto& b : enumerate_bindings(t, doc, page, graphs)) {
        const auto q = instantiate(t, b, fnv1a(canonical_binding(b)));
        const auto back = match_question(t, q.text);
        ASSERT_TRUE(back.has_value()) << t.template_id << ": " << q.text;
        EXPECT_EQ(*back, b) << t.template_id << ": " << q.text;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(MatchQuestion, RejectsOtherText) {
  EXPECT_EQ(match_question(tpl("A-CT-11"), "How many tables in this page?"), std::nullopt);
  EXPECT_EQ(match_question(tpl("A-CT-11"), "How many chairs on this page?"), std::nullopt);
}

TEST(CanonicalBinding, SortedKeyValuePairs) {
  EXPECT_EQ(canonical_binding({{"R", "top"}, {"E1", "table"}}), canonical_binding({{"E1", "table"}, {"R", "top"}}));
  EXPECT_NE(canonical_binding({{"E", "a"}}), canonical_binding({{"E", "b"}}));
}

}  // namespace
}  // namespace forge
