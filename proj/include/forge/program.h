#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "forge/doc_model.h"
#include "forge/relgraph.h"
#include "forge/templates.h"

namespace forge {

enum class FunctionKind {
  kFilterCategory,     // ElemSet -> ElemSet
  kFilterRegion,       // ElemSet -> ElemSet
  kFilterText,         // ElemSet -> ElemSet
  kLocateByText,       // ElemSet -> Elem
  kRelatedByPosition,  // Elem -> ElemSet
  kCount,              // ElemSet -> Int
  kExists,             // ElemSet -> Bool
  kCompareCount,       // Int -> Bool
  kNthByReadingOrder,  // ElemSet -> Elem
  kDescribedBy,        // Elem -> Elem (or NA)
  kParentSections,     // ElemSet -> ElemSet
  kChildSubsections,   // Elem -> ElemSet
};

enum class ValueKind { kElemSet, kElem, kInt, kBool };

std::string_view function_name(FunctionKind k);
std::string_view value_kind_name(ValueKind k);
ValueKind input_kind(FunctionKind k);
ValueKind output_kind(FunctionKind k);

struct Function {
  FunctionKind kind;
  std::string arg;     // category, region, relation, text, ordinal or label
  bool coarse = false;  // RelatedByPosition only
  int number = 0;       // CompareCount only

  bool operator==(const Function&) const = default;
};

enum class ScopeKind { kPage, kDocument };

struct FunctionalProgram {
  std::vector<Function> steps;
  ScopeKind scope = ScopeKind::kPage;

  bool operator==(const FunctionalProgram&) const = default;
};

// Function kinds a template family compiles to, without constants.
std::vector<FunctionKind> program_skeleton(const QuestionTemplate& tpl);

FunctionalProgram compile(const QuestionTemplate& tpl, const ParamBinding& binding);

// Throws TypeMismatch unless the chain composes and ends in a kind legal for
// the task.
void type_check(const FunctionalProgram& prog, TaskId task);

struct NaValue {
  bool operator==(const NaValue&) const = default;
};
struct ElemSet {
  std::vector<std::string> ids;
  bool operator==(const ElemSet&) const = default;
};
struct Elem {
  std::string id;
  bool operator==(const Elem&) const = default;
};

using Value = std::variant<ElemSet, Elem, std::int64_t, bool, NaValue>;

inline constexpr std::array<std::string_view, 8> kTokenAnswers = {"yes", "no", "0", "1", "2", "3", "4", "5"};

struct AnswerValue {
  enum class Kind { kToken, kIndex, kIndexSet, kNa };
  Kind kind = Kind::kNa;
  std::string token;
  int index = 0;
  std::vector<int> indices;  // sorted ascending

  static AnswerValue make_token(std::string t) { return {Kind::kToken, std::move(t), 0, {}}; }
  static AnswerValue make_index(int i) { return {Kind::kIndex, {}, i, {}}; }
  static AnswerValue make_index_set(std::vector<int> s);
  static AnswerValue na() { return {}; }

  // "yes", "3", "1,4,9", "na" -- the class label used for balancing and F1.
  std::string canonical() const;

  bool operator==(const AnswerValue&) const = default;
};

std::string_view answer_kind_name(AnswerValue::Kind k);
nlohmann::json answer_to_json(const AnswerValue& a);
AnswerValue answer_from_json(const nlohmann::json& j);

// Whether the answer belongs to the answer space of the task.
bool answer_in_space(const AnswerValue& a, TaskId task);

bool region_contains(std::string_view region, const BoundingBox& box);

struct TraceStep {
  int step;
  std::string function;
  std::string output_kind;
  std::size_t output_size;
};

nlohmann::json trace_to_json(const std::vector<TraceStep>& trace);

struct ExecutionScope {
  const Document* doc = nullptr;
  const Page* page = nullptr;  // null for document scope
  const DocumentGraphs* graphs = nullptr;
};

AnswerValue execute(const FunctionalProgram& prog, const ExecutionScope& scope, TaskId task,
                    std::vector<TraceStep>* trace = nullptr);

}  // namespace forge
