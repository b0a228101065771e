#include "forge/templates.h"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "forge/error.h"
#include "forge/hash.h"

namespace forge {

TaskId task_of(QuestionType q) {
  switch (q) {
    case QuestionType::kExistence:
    case QuestionType::kCounting: return TaskId::kA;
    case QuestionType::kStructuralUnderstanding:
    case QuestionType::kObjectRecognition: return TaskId::kB;
    case QuestionType::kParentRelation:
    case QuestionType::kChildRelation: return TaskId::kC;
  }
  return TaskId::kA;
}

std::string_view qtype_name(QuestionType q) {
  switch (q) {
    case QuestionType::kExistence: return "Existence";
    case QuestionType::kCounting: return "Counting";
    case QuestionType::kStructuralUnderstanding: return "StructuralUnderstanding";
    case QuestionType::kObjectRecognition: return "ObjectRecognition";
    case QuestionType::kParentRelation: return "ParentRelation";
    case QuestionType::kChildRelation: return "ChildRelation";
  }
  return "Existence";
}

std::optional<QuestionType> parse_qtype(std::string_view s) {
  for (auto q : kAllQuestionTypes) {
    if (qtype_name(q) == s) return q;
  }
  return std::nullopt;
}

const SlotSpec* QuestionTemplate::slot(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string canonical_binding(const ParamBinding& b) {
  std::string out;
  for (const auto& [k, v] : b) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in data

namespace {

using F = ProgramFamily;
using Q = QuestionType;
using K = SlotKind;

SlotSpec label(const char* name, bool plural = false) { return {name, K::kLabel, plural}; }
SlotSpec pos() { return {"pos", K::kRegion, false}; }
SlotSpec rel() { return {"R", K::kRelation, false}; }
SlotSpec title(const char* name) { return {name, K::kTitleText, false}; }

std::vector<QuestionTemplate> builtin_table() {
  const TaskId A = TaskId::kA, B = TaskId::kB, C = TaskId::kC;
  const std::vector<SlotSpec> e_pos = {label("E"), pos()};
  auto rel_slots = [](bool plural) { return std::vector<SlotSpec>{label("E1", plural), title("E2"), rel()}; };
  const std::vector<SlotSpec> e_num = {label("E"), {"num", K::kNumber, false}};
  const std::vector<SlotSpec> turn = {{"turn", K::kOrdinal, false}};
  const std::vector<SlotSpec> region = {pos()};
  const std::vector<SlotSpec> obj = {{"E", K::kFloatKind, false}, pos()};

  return {
      // Task A, existence
      {"A-EX-01", A, Q::kExistence, "Is there any [E] on the [pos] of this page?", F::kRegionExists, e_pos},
      {"A-EX-02", A, Q::kExistence, "Can you find any [E] on the [pos] of this page?", F::kRegionExists, e_pos},
      {"A-EX-03", A, Q::kExistence, "On the [pos] of this page, is there a [E]?", F::kRegionExists, e_pos},
      {"A-EX-04", A, Q::kExistence, "Is it correct that there is no [E] at the [pos]?", F::kRegionAbsent, e_pos},
      {"A-EX-05", A, Q::kExistence, "When you check the [pos] of this page, can you find any [E]?", F::kRegionExists,
       e_pos},
      {"A-EX-06", A, Q::kExistence, "Are there any [E1] are [R] the [E2]?", F::kRelationExists, rel_slots(true)},
      {"A-EX-07", A, Q::kExistence, "Can you find any [E1] [R] the [E2]?", F::kRelationExists, rel_slots(false)},
      {"A-EX-08", A, Q::kExistence, "Is there a [E1] found [R] the [E2]?", F::kRelationExists, rel_slots(false)},
      {"A-EX-09", A, Q::kExistence, "Is it correct that there is no [E1] [R] the [E2]?", F::kRelationAbsent,
       rel_slots(false)},
      {"A-EX-10", A, Q::kExistence, "Confirm if there are any [E1] [R] the [E2]?", F::kRelationExists,
       rel_slots(true)},
      {"A-EX-11", A, Q::kExistence, "When you check the page, is there any [E1] [R] the [E2]?", F::kRelationExists,
       rel_slots(false)},
      {"A-EX-12", A, Q::kExistence, "Is there any [E]?", F::kPageExists, {label("E")}},
      {"A-EX-13", A, Q::kExistence, "Are there any [E] on this page?", F::kPageExists, {label("E", true)}},
      {"A-EX-14", A, Q::kExistence, "Is there a [E] in this page?", F::kPageExists, {label("E")}},
      {"A-EX-15", A, Q::kExistence, "Can you find a [E] on this page?", F::kPageExists, {label("E")}},
      {"A-EX-16", A, Q::kExistence, "When you check this page, can you find any [E]?", F::kPageExists, {label("E")}},
      {"A-EX-17", A, Q::kExistence, "Is there a [E] on this page?", F::kTitleExists, {title("E")}},
      {"A-EX-18", A, Q::kExistence, "Can you find a [E] on this page?", F::kTitleExists, {title("E")}},
      {"A-EX-19", A, Q::kExistence, "Does this page include a [E]?", F::kTitleExists, {title("E")}},
      {"A-EX-20", A, Q::kExistence, "Can [E] be found on this page?", F::kTitleExists, {title("E")}},
      {"A-EX-21", A, Q::kExistence, "When you check this page, can you find [E]?", F::kTitleExists, {title("E")}},
      {"A-EX-22", A, Q::kExistence, "Confirm if there is [E] on this page.", F::kTitleExists, {title("E")}},
      // Task A, counting
      {"A-CT-01", A, Q::kCounting, "How many [E1] are [R] the [E2]?", F::kRelationCount, rel_slots(true)},
      {"A-CT-02", A, Q::kCounting, "What is the number of [E1] [R] the [E2]?", F::kRelationCount, rel_slots(true)},
      {"A-CT-03", A, Q::kCounting, "How many [E1] can you find on the [R] of [E2]?", F::kRelationCount,
       rel_slots(true)},
      {"A-CT-04", A, Q::kCounting, "Count the number of [E1] on the [R] of [E2].", F::kRelationCount,
       rel_slots(true)},
      {"A-CT-05", A, Q::kCounting, "When you check this page, how many [E1] can you find on the [R] of [E2]?",
       F::kRelationCount, rel_slots(true)},
      {"A-CT-06", A, Q::kCounting, "Can you find [num] [E](s) on the page?", F::kNumberMatch, e_num},
      {"A-CT-07", A, Q::kCounting, "Does this page include [num] [E](s)", F::kNumberMatch, e_num},
      {"A-CT-08", A, Q::kCounting, "Confirm if there are [num] [E](s) on this page.", F::kNumberMatch, e_num},
      {"A-CT-09", A, Q::kCounting, "Are there [num] [E](s) on this page?", F::kNumberMatch, e_num},
      {"A-CT-10", A, Q::kCounting, "Is there only [num] [E](s) on this page?", F::kNumberMatch, e_num},
      {"A-CT-11", A, Q::kCounting, "How many [E]s on this page?", F::kPageCount, {label("E")}},
      {"A-CT-12", A, Q::kCounting, "When you check this page, how many [E]s are on this page?", F::kPageCount,
       {label("E")}},
      {"A-CT-13", A, Q::kCounting, "What is the number of [E]s on this page?", F::kPageCount, {label("E")}},
      {"A-CT-14", A, Q::kCounting, "How many [E]s can be found on this page?", F::kPageCount, {label("E")}},
      // Task B, structural understanding
      {"B-SU-01", B, Q::kStructuralUnderstanding, "What is the [turn] section in this page?", F::kOrdinalSection,
       turn},
      {"B-SU-02", B, Q::kStructuralUnderstanding, "Can you describe the [turn] section of this page?",
       F::kOrdinalSection, turn},
      {"B-SU-03", B, Q::kStructuralUnderstanding, "What does the [turn] section include in this page?",
       F::kOrdinalSection, turn},
      {"B-SU-04", B, Q::kStructuralUnderstanding, "What is the main contents of the [turn] section in this page?",
       F::kOrdinalSection, turn},
      {"B-SU-05", B, Q::kStructuralUnderstanding,
       "When you check the [turn] section of this page, what information can you get?", F::kOrdinalSection, turn},
      {"B-SU-06", B, Q::kStructuralUnderstanding, "What is the [pos] section about?", F::kRegionSection, region},
      {"B-SU-07", B, Q::kStructuralUnderstanding, "What is the [pos] of the page about?", F::kRegionSection, region},
      {"B-SU-08", B, Q::kStructuralUnderstanding, "What is the topic of [pos] section?", F::kRegionSection, region},
      {"B-SU-09", B, Q::kStructuralUnderstanding, "Can you describe the main topic of the [pos] section?",
       F::kRegionSection, region},
      {"B-SU-10", B, Q::kStructuralUnderstanding, "When you check the [pos] of this page, what information can you get?",
       F::kRegionSection, region},
      // Task B, object recognition
      {"B-OR-01", B, Q::kObjectRecognition, "What is the [E] on the [pos] of the page?", F::kRegionObject, obj},
      {"B-OR-02", B, Q::kObjectRecognition, "What is the [pos] [E] about?", F::kRegionObject, obj},
      {"B-OR-03", B, Q::kObjectRecognition, "Can you describe the [E] on the [pos] of the page?", F::kRegionObject,
       obj},
      {"B-OR-04", B, Q::kObjectRecognition, "What information does the [pos] [E] contain?", F::kRegionObject, obj},
      {"B-OR-05", B, Q::kObjectRecognition, "When you check the [pos] [E], what information can you get?",
       F::kRegionObject, obj},
      // Task C, child relation
      {"C-CH-01", C, Q::kChildRelation, "What does the [E] include?", F::kChildSections, {title("E")}},
      {"C-CH-02", C, Q::kChildRelation, "What is the [E] about?", F::kChildSections, {title("E")}},
      {"C-CH-03", C, Q::kChildRelation, "What subsections are in the [E]?", F::kChildSections, {title("E")}},
      {"C-CH-04", C, Q::kChildRelation, "What subsections can be found in the [E]?", F::kChildSections,
       {title("E")}},
      {"C-CH-05", C, Q::kChildRelation, "When you check the [E], which subsections are included?", F::kChildSections,
       {title("E")}},
      // Task C, parent relation (floats)
      {"C-PA-01", C, Q::kParentRelation, "Which section does describe the [E] ?", F::kFloatParents,
       {{"E", K::kFloatLabel}}},
      {"C-PA-02", C, Q::kParentRelation, "Which section does include the description of the [E]?", F::kFloatParents,
       {{"E", K::kFloatLabel}}},
      {"C-PA-03", C, Q::kParentRelation, "Name out the section that include the [E].", F::kFloatParents,
       {{"E", K::kFloatLabel}}},
      {"C-PA-04", C, Q::kParentRelation, "Where can you find the [E]?", F::kFloatParents, {{"E", K::kFloatLabel}}},
      {"C-PA-05", C, Q::kParentRelation,
       "When you search for the description of [E], which sections do you need to check?", F::kFloatParents,
       {{"E", K::kFloatLabel}}},
      // Task C, parent relation (citations)
      {"C-PA-06", C, Q::kParentRelation, "Which section does include the [E]?", F::kCitationParents,
       {{"E", K::kCitation}}},
      {"C-PA-07", C, Q::kParentRelation, "Which section does cite the [E]?", F::kCitationParents,
       {{"E", K::kCitation}}},
      {"C-PA-08", C, Q::kParentRelation, "Where is the [E] cited in the document?", F::kCitationParents,
       {{"E", K::kCitation}}},
      {"C-PA-09", C, Q::kParentRelation, "Where can [E] be found in the document?", F::kCitationParents,
       {{"E", K::kCitation}}},
      {"C-PA-10", C, Q::kParentRelation,
       "When you search for the citation of [E], which sections can you find it?", F::kCitationParents,
       {{"E", K::kCitation}}},
  };
}

}  // namespace

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = [] {
    SynonymTable t;
    t.prepositional = {
        {"top", {"above", "upper", "on the top of"}},
        {"bottom", {"below", "under", "on the bottom of"}},
        {"left", {"left of", "on the left of"}},
        {"right", {"right of", "on the right of"}},
        {"top-left", {"on the top-left of"}},
        {"top-right", {"on the top-right of"}},
        {"bottom-left", {"on the bottom-left of"}},
        {"bottom-right", {"on the bottom-right of"}},
    };
    for (auto r : kAllRelations) {
      std::string name(relation_name(r));
      t.noun[name] = {name};
    }
    return t;
  }();
  return table;
}

TemplateRegistry::TemplateRegistry(std::vector<QuestionTemplate> templates) : templates_(std::move(templates)) {}

const QuestionTemplate* TemplateRegistry::find(std::string_view id) const {
  auto it = std::find_if(templates_.begin(), templates_.end(), [&](const auto& t) { return t.template_id == id; });
  return it != templates_.end() ? &*it : nullptr;
}

std::vector<const QuestionTemplate*> TemplateRegistry::for_task(TaskId task) const {
  std::vector<const QuestionTemplate*> out;
  for (const auto& t : templates_) {
    if (t.task == task) out.push_back(&t);
  }
  return out;
}

std::size_t TemplateRegistry::count(QuestionType q) const {
  return static_cast<std::size_t>(
      std::count_if(templates_.begin(), templates_.end(), [q](const auto& t) { return t.qtype == q; }));
}

TemplateRegistry load_templates() { return TemplateRegistry(builtin_table()); }

const TemplateRegistry& builtin_templates() {
  static const TemplateRegistry registry = load_templates();
  return registry;
}

std::vector<std::string> label_values() { return {"title", "list", "table", "figure"}; }

std::vector<std::string> region_values() {
  std::vector<std::string> out;
  for (auto r : kAllRelations) out.emplace_back(relation_name(r));
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

std::vector<std::string> title_texts_on(const Page& page) {
  std::vector<std::string> out;
  for (const auto& e : page.elements) {
    if (e.category == ElementCategory::kTitle && !e.text.empty()) out.push_back(e.text);
  }
  return out;
}

std::vector<std::string> slot_domain(const QuestionTemplate& tpl, const SlotSpec& slot, const Document& doc,
                                     const Page* page, const DocumentGraphs& graphs) {
  switch (slot.kind) {
    case K::kLabel: return label_values();
    case K::kFloatKind: return {"table", "figure"};
    case K::kRegion:
    case K::kRelation: return region_values();
    case K::kNumber: return {"1", "2", "3", "4", "5"};
    case K::kOrdinal: return {"first", "last"};
    case K::kTitleText: {
      std::set<std::string> out;
      if (tpl.family == F::kChildSections) {
        std::map<std::string, int> uses;
        for (const auto& p : doc.pages) {
          for (const auto& e : p.elements) ++uses[e.text];
        }
        for (const auto& p : doc.pages) {
          for (const auto& e : p.elements) {
            if (e.category != ElementCategory::kTitle || e.text.empty() || uses[e.text] != 1) continue;
            const auto& kids = graphs.logical.children(e.id);
            bool has_sub = std::any_of(kids.begin(), kids.end(), [&](const std::string& k) {
              return doc.find(k)->category == ElementCategory::kTitle;
            });
            if (has_sub) out.insert(e.text);
          }
        }
      } else if (tpl.family == F::kTitleExists) {
        std::map<std::string, int> on_page;
        for (const auto& t : title_texts_on(*page)) ++on_page[t];
        for (const auto& p : doc.pages) {
          for (const auto& t : title_texts_on(p)) {
            if (on_page[t] <= 1) out.insert(t);
          }
        }
      } else {
        // Anchor for LocateByText: must match exactly one element on the page.
        std::map<std::string, int> uses;
        for (const auto& e : page->elements) ++uses[e.text];
        for (const auto& t : title_texts_on(*page)) {
          if (uses[t] == 1) out.insert(t);
        }
      }
      return {out.begin(), out.end()};
    }
    case K::kFloatLabel: {
      std::set<std::string> refs(doc.references.begin(), doc.references.end());
      std::vector<std::string> out;
      for (const auto& [key, ids] : doc.mention_index) {
        if (!ids.empty() && !refs.count(key) && canonical_float_label(key) == key) out.push_back(key);
      }
      return out;
    }
    case K::kCitation: {
      std::set<std::string> out;
      for (const auto& r : doc.references) {
        auto it = doc.mention_index.find(r);
        if (it != doc.mention_index.end() && !it->second.empty()) out.insert(r);
      }
      return {out.begin(), out.end()};
    }
  }
  return {};
}

}  // namespace

std::vector<ParamBinding> enumerate_bindings(const QuestionTemplate& tpl, const Document& doc, const Page* page,
                                             const DocumentGraphs& graphs) {
  if (tpl.task != TaskId::kC && page == nullptr) return {};
  std::vector<ParamBinding> out{ParamBinding{}};
  for (const auto& slot : tpl.slots) {
    auto domain = slot_domain(tpl, slot, doc, page, graphs);
    std::vector<ParamBinding> next;
    next.reserve(out.size() * domain.size());
    for (const auto& partial : out) {
      for (const auto& v : domain) {
        auto b = partial;
        b[slot.name] = v;
        next.push_back(std::move(b));
      }
    }
    out = std::move(next);
  }
  if (tpl.slots.empty()) out.clear();
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Segment {
  bool is_slot;
  std::string text;  // literal text or slot name
};

std::vector<Segment> split_pattern(std::string_view pattern) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    auto open = pattern.find('[', i);
    if (open == std::string_view::npos) {
      out.push_back({false, std::string(pattern.substr(i))});
      break;
    }
    auto close = pattern.find(']', open);
    if (open > i) out.push_back({false, std::string(pattern.substr(i, open - i))});
    out.push_back({true, std::string(pattern.substr(open + 1, close - open - 1))});
    i = close + 1;
  }
  return out;
}

bool noun_relation_context(const QuestionTemplate& tpl) {
  return tpl.pattern.find("the [R] of") != std::string::npos;
}

bool quoted(const QuestionTemplate& tpl, const SlotSpec& s) {
  if (s.kind == K::kCitation) return true;
  return s.kind == K::kTitleText && tpl.task != TaskId::kC;
}

bool starts_with_vowel(std::string_view s) {
  for (char c : s) {
    if (c == '\'') continue;
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  }
  return false;
}

bool ends_with_article(std::string_view s) {
  return s == "a " || (s.size() >= 3 && s.substr(s.size() - 3) == " a ");
}

}  // namespace

QuestionString instantiate(const QuestionTemplate& tpl, const ParamBinding& binding, std::uint64_t seed,
                           const SynonymTable& synonyms) {
  auto rng = make_rng(seed, fnv1a(tpl.template_id));
  std::string text;
  for (const auto& seg : split_pattern(tpl.pattern)) {
    if (!seg.is_slot) {
      text += seg.text;
      continue;
    }
    const SlotSpec* spec = tpl.slot(seg.text);
    auto it = binding.find(seg.text);
    if (!spec || it == binding.end()) {
      throw Error(ErrorCode::kIncompleteBinding, tpl.template_id + " needs a value for [" + seg.text + "]");
    }
    std::string value = it->second;
    if (spec->kind == K::kRelation) {
      const auto& table = noun_relation_context(tpl) ? synonyms.noun : synonyms.prepositional;
      auto forms = table.find(value);
      if (forms == table.end() || forms->second.empty()) {
        throw Error(ErrorCode::kTypeMismatch, "no surface form for relation \"" + value + "\"");
      }
      value = forms->second[rng() % forms->second.size()];
    } else if ((spec->kind == K::kLabel || spec->kind == K::kFloatKind) && spec->plural) {
      value += "s";
    } else if (quoted(tpl, *spec)) {
      value = "'" + value + "'";
    }
    if (ends_with_article(text) && starts_with_vowel(value)) text.insert(text.size() - 1, "n");
    text += value;
  }
  return {text, tpl.template_id, binding};
}

namespace {

std::string regex_escape(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string alternation(std::vector<std::string> options) {
  std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  std::string out = "(";
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += '|';
    out += regex_escape(options[i]);
  }
  return out + ")";
}

}  // namespace

std::optional<ParamBinding> match_question(const QuestionTemplate& tpl, std::string_view text,
                                           const SynonymTable& synonyms) {
  std::string re = "^";
  std::vector<const SlotSpec*> groups;
  std::map<std::string, std::string> surface_to_relation;
  const auto& rel_table = noun_relation_context(tpl) ? synonyms.noun : synonyms.prepositional;
  for (const auto& [key, forms] : rel_table) {
    for (const auto& f : forms) surface_to_relation[f] = key;
  }

  auto segments = split_pattern(tpl.pattern);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (!seg.is_slot) {
      bool article = i + 1 < segments.size() && ends_with_article(seg.text);
      if (article) {
        re += regex_escape(seg.text.substr(0, seg.text.size() - 1)) + "n? ";
      } else {
        re += regex_escape(seg.text);
      }
      continue;
    }
    const SlotSpec* spec = tpl.slot(seg.text);
    if (!spec) return std::nullopt;
    groups.push_back(spec);
    switch (spec->kind) {
      case K::kLabel:
      case K::kFloatKind: {
        auto values = spec->kind == K::kLabel ? label_values() : std::vector<std::string>{"table", "figure"};
        if (spec->plural) {
          for (auto& v : values) v += "s";
        }
        re += alternation(values);
        break;
      }
      case K::kRegion: re += alternation(region_values()); break;
      case K::kRelation: {
        std::vector<std::string> forms;
        for (const auto& [f, _] : surface_to_relation) forms.push_back(f);
        re += alternation(forms);
        break;
      }
      case K::kNumber: re += "([1-5])"; break;
      case K::kOrdinal: re += "(first|last)"; break;
      default: re += quoted(tpl, *spec) ? "'(.+)'" : "(.+)"; break;
    }
  }
  re += "$";

  std::smatch m;
  std::string subject(text);
  if (!std::regex_match(subject, m, std::regex(re))) return std::nullopt;
  ParamBinding out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::string value = m[g + 1].str();
    const SlotSpec* spec = groups[g];
    if ((spec->kind == K::kLabel || spec->kind == K::kFloatKind) && spec->plural) value.pop_back();
    if (spec->kind == K::kRelation) value = surface_to_relation.at(value);
    auto [it, inserted] = out.emplace(spec->name, value);
    if (!inserted && it->second != value) return std::nullopt;
  }
  return out;
}

}  // namespace forge
