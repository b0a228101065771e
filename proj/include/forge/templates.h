#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/doc_model.h"
#include "forge/relgraph.h"

namespace forge {

enum class QuestionType {
  kExistence,
  kCounting,
  kStructuralUnderstanding,
  kObjectRecognition,
  kParentRelation,
  kChildRelation,
};

inline constexpr std::array kAllQuestionTypes = {
    QuestionType::kExistence,         QuestionType::kCounting,       QuestionType::kStructuralUnderstanding,
    QuestionType::kObjectRecognition, QuestionType::kParentRelation, QuestionType::kChildRelation};

TaskId task_of(QuestionType q);
std::string_view qtype_name(QuestionType q);
std::optional<QuestionType> parse_qtype(std::string_view s);

enum class SlotKind {
  kLabel,       // title | list | table | figure
  kFloatKind,   // table | figure
  kRegion,      // page half or quadrant
  kRelation,    // spatial relation relative to an anchor
  kNumber,      // 1..5
  kOrdinal,     // first | last
  kTitleText,   // verbatim title string
  kFloatLabel,  // "Table 2", "Figure 1"
  kCitation,    // citation key from the reference list
};

struct SlotSpec {
  std::string name;  // "E", "E1", "E2", "R", "pos", "num", "turn"
  SlotKind kind;
  bool plural = false;
};

// How a template's answer is derived; compile() expands each family into its
// function chain.
enum class ProgramFamily {
  kRegionExists,
  kRegionAbsent,
  kRelationExists,
  kRelationAbsent,
  kPageExists,
  kTitleExists,
  kRelationCount,
  kNumberMatch,
  kPageCount,
  kOrdinalSection,
  kRegionSection,
  kRegionObject,
  kChildSections,
  kFloatParents,
  kCitationParents,
};

struct QuestionTemplate {
  std::string template_id;
  TaskId task;
  QuestionType qtype;
  std::string pattern;
  ProgramFamily family;
  std::vector<SlotSpec> slots;

  const SlotSpec* slot(std::string_view name) const;
};

// slot -> value; std::map ordering is the canonical slot-lexicographic order.
using ParamBinding = std::map<std::string, std::string>;

std::string canonical_binding(const ParamBinding& b);

struct QuestionString {
  std::string text;
  std::string template_id;
  ParamBinding binding;
};

// Surface forms per relation. Prepositional forms fill "[R] the X";
// noun forms fill "on the [R] of X".
struct SynonymTable {
  std::map<std::string, std::vector<std::string>> prepositional;
  std::map<std::string, std::vector<std::string>> noun;

  static const SynonymTable& builtin();
};

class TemplateRegistry {
 public:
  explicit TemplateRegistry(std::vector<QuestionTemplate> templates);

  const std::vector<QuestionTemplate>& all() const { return templates_; }
  std::size_t size() const { return templates_.size(); }
  const QuestionTemplate* find(std::string_view id) const;
  std::vector<const QuestionTemplate*> for_task(TaskId task) const;
  std::size_t count(QuestionType q) const;

 private:
  std::vector<QuestionTemplate> templates_;
};

TemplateRegistry load_templates();
const TemplateRegistry& builtin_templates();

std::vector<std::string> label_values();
std::vector<std::string> region_values();

// All valid bindings for the scope, canonically ordered. page must be given
// for Task A/B templates and is ignored for Task C.
std::vector<ParamBinding> enumerate_bindings(const QuestionTemplate& tpl, const Document& doc, const Page* page,
                                             const DocumentGraphs& graphs);

QuestionString instantiate(const QuestionTemplate& tpl, const ParamBinding& binding, std::uint64_t seed,
                           const SynonymTable& synonyms = SynonymTable::builtin());

// Inverse of instantiate: recovers the binding from rendered text.
std::optional<ParamBinding> match_question(const QuestionTemplate& tpl, std::string_view text,
                                           const SynonymTable& synonyms = SynonymTable::builtin());

}  // namespace forge
