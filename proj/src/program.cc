#include "forge/program.h"

#include <algorithm>
#include <set>

#include "forge/error.h"

namespace forge {

std::string_view function_name(FunctionKind k) {
  switch (k) {
    case FunctionKind::kFilterCategory: return "filter_category";
    case FunctionKind::kFilterRegion: return "filter_region";
    case FunctionKind::kFilterText: return "filter_text";
    case FunctionKind::kLocateByText: return "locate_by_text";
    case FunctionKind::kRelatedByPosition: return "related_by_position";
    case FunctionKind::kCount: return "count";
    case FunctionKind::kExists: return "exists";
    case FunctionKind::kCompareCount: return "compare_count";
    case FunctionKind::kNthByReadingOrder: return "nth_by_reading_order";
    case FunctionKind::kDescribedBy: return "described_by";
    case FunctionKind::kParentSections: return "parent_sections";
    case FunctionKind::kChildSubsections: return "child_subsections";
  }
  return "unknown";
}

std::string_view value_kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::kElemSet: return "elem_set";
    case ValueKind::kElem: return "elem";
    case ValueKind::kInt: return "int";
    case ValueKind::kBool: return "bool";
  }
  return "unknown";
}

ValueKind input_kind(FunctionKind k) {
  switch (k) {
    case FunctionKind::kRelatedByPosition:
    case FunctionKind::kDescribedBy:
    case FunctionKind::kChildSubsections: return ValueKind::kElem;
    case FunctionKind::kCompareCount: return ValueKind::kInt;
    default: return ValueKind::kElemSet;
  }
}

ValueKind output_kind(FunctionKind k) {
  switch (k) {
    case FunctionKind::kLocateByText:
    case FunctionKind::kNthByReadingOrder:
    case FunctionKind::kDescribedBy: return ValueKind::kElem;
    case FunctionKind::kCount: return ValueKind::kInt;
    case FunctionKind::kExists:
    case FunctionKind::kCompareCount: return ValueKind::kBool;
    default: return ValueKind::kElemSet;
  }
}

// ---------------------------------------------------------------------------
// Compilation

std::vector<FunctionKind> program_skeleton(const QuestionTemplate& tpl) {
  using FK = FunctionKind;
  switch (tpl.family) {
    case ProgramFamily::kRegionExists: return {FK::kFilterCategory, FK::kFilterRegion, FK::kExists};
    case ProgramFamily::kRegionAbsent:
      return {FK::kFilterCategory, FK::kFilterRegion, FK::kCount, FK::kCompareCount};
    case ProgramFamily::kRelationExists:
      return {FK::kLocateByText, FK::kRelatedByPosition, FK::kFilterCategory, FK::kExists};
    case ProgramFamily::kRelationAbsent:
      return {FK::kLocateByText, FK::kRelatedByPosition, FK::kFilterCategory, FK::kCount, FK::kCompareCount};
    case ProgramFamily::kPageExists: return {FK::kFilterCategory, FK::kExists};
    case ProgramFamily::kTitleExists: return {FK::kFilterCategory, FK::kFilterText, FK::kExists};
    case ProgramFamily::kRelationCount:
      return {FK::kLocateByText, FK::kRelatedByPosition, FK::kFilterCategory, FK::kCount};
    case ProgramFamily::kNumberMatch: return {FK::kFilterCategory, FK::kCount, FK::kCompareCount};
    case ProgramFamily::kPageCount: return {FK::kFilterCategory, FK::kCount};
    case ProgramFamily::kOrdinalSection: return {FK::kFilterCategory, FK::kNthByReadingOrder, FK::kDescribedBy};
    case ProgramFamily::kRegionSection:
      return {FK::kFilterRegion, FK::kFilterCategory, FK::kNthByReadingOrder, FK::kDescribedBy};
    case ProgramFamily::kRegionObject:
      return {FK::kFilterCategory, FK::kFilterRegion, FK::kNthByReadingOrder, FK::kDescribedBy};
    case ProgramFamily::kChildSections: return {FK::kLocateByText, FK::kChildSubsections};
    case ProgramFamily::kFloatParents:
    case ProgramFamily::kCitationParents: return {FK::kParentSections};
  }
  return {};
}

namespace {

const std::string& bound(const QuestionTemplate& tpl, const ParamBinding& b, const char* slot) {
  auto it = b.find(slot);
  if (it == b.end()) throw Error(ErrorCode::kIncompleteBinding, tpl.template_id + " needs [" + slot + "]");
  return it->second;
}

void check_value(const QuestionTemplate& tpl, const SlotSpec& spec, const std::string& v) {
  auto one_of = [&](const std::vector<std::string>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      throw Error(ErrorCode::kTypeMismatch,
                  tpl.template_id + ": \"" + v + "\" is not a valid value for [" + spec.name + "]");
    }
  };
  switch (spec.kind) {
    case SlotKind::kLabel: one_of(label_values()); break;
    case SlotKind::kFloatKind: one_of({"table", "figure"}); break;
    case SlotKind::kRegion:
    case SlotKind::kRelation: one_of(region_values()); break;
    case SlotKind::kNumber: one_of({"1", "2", "3", "4", "5"}); break;
    case SlotKind::kOrdinal: one_of({"first", "last"}); break;
    default:
      if (v.empty()) throw Error(ErrorCode::kTypeMismatch, tpl.template_id + ": empty text for [" + spec.name + "]");
  }
}

}  // namespace

FunctionalProgram compile(const QuestionTemplate& tpl, const ParamBinding& binding) {
  using FK = FunctionKind;
  for (const auto& s : tpl.slots) check_value(tpl, s, bound(tpl, binding, s.name.c_str()));

  auto related = [&] {
    auto r = parse_relation(bound(tpl, binding, "R"));
    return Function{FK::kRelatedByPosition, std::string(relation_name(*r)), !is_diagonal(*r)};
  };
  auto f = [](FK k, std::string arg = {}) { return Function{k, std::move(arg)}; };
  auto compare = [](int n) { return Function{FK::kCompareCount, {}, false, n}; };

  FunctionalProgram p;
  p.scope = tpl.task == TaskId::kC ? ScopeKind::kDocument : ScopeKind::kPage;
  auto& s = p.steps;
  switch (tpl.family) {
    case ProgramFamily::kRegionExists:
      s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kFilterRegion, bound(tpl, binding, "pos")),
           f(FK::kExists)};
      break;
    case ProgramFamily::kRegionAbsent:
      s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kFilterRegion, bound(tpl, binding, "pos")),
           f(FK::kCount), compare(0)};
      break;
    case ProgramFamily::kRelationExists:
      s = {f(FK::kLocateByText, bound(tpl, binding, "E2")), related(),
           f(FK::kFilterCategory, bound(tpl, binding, "E1")), f(FK::kExists)};
      break;
    case ProgramFamily::kRelationAbsent:
      s = {f(FK::kLocateByText, bound(tpl, binding, "E2")), related(),
           f(FK::kFilterCategory, bound(tpl, binding, "E1")), f(FK::kCount), compare(0)};
      break;
    case ProgramFamily::kPageExists: s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kExists)}; break;
    case ProgramFamily::kTitleExists:
      s = {f(FK::kFilterCategory, "title"), f(FK::kFilterText, bound(tpl, binding, "E")), f(FK::kExists)};
      break;
    case ProgramFamily::kRelationCount:
      s = {f(FK::kLocateByText, bound(tpl, binding, "E2")), related(),
           f(FK::kFilterCategory, bound(tpl, binding, "E1")), f(FK::kCount)};
      break;
    case ProgramFamily::kNumberMatch:
      s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kCount),
           compare(std::stoi(bound(tpl, binding, "num")))};
      break;
    case ProgramFamily::kPageCount: s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kCount)}; break;
    case ProgramFamily::kOrdinalSection:
      s = {f(FK::kFilterCategory, "title"), f(FK::kNthByReadingOrder, bound(tpl, binding, "turn")),
           f(FK::kDescribedBy)};
      break;
    case ProgramFamily::kRegionSection:
      s = {f(FK::kFilterRegion, bound(tpl, binding, "pos")), f(FK::kFilterCategory, "title"),
           f(FK::kNthByReadingOrder, "first"), f(FK::kDescribedBy)};
      break;
    case ProgramFamily::kRegionObject:
      s = {f(FK::kFilterCategory, bound(tpl, binding, "E")), f(FK::kFilterRegion, bound(tpl, binding, "pos")),
           f(FK::kNthByReadingOrder, "first"), f(FK::kDescribedBy)};
      break;
    case ProgramFamily::kChildSections:
      s = {f(FK::kLocateByText, bound(tpl, binding, "E")), f(FK::kChildSubsections)};
      break;
    case ProgramFamily::kFloatParents:
    case ProgramFamily::kCitationParents: s = {f(FK::kParentSections, bound(tpl, binding, "E"))}; break;
  }
  type_check(p, tpl.task);
  return p;
}

void type_check(const FunctionalProgram& prog, TaskId task) {
  if (prog.steps.empty()) throw Error(ErrorCode::kTypeMismatch, "empty program");
  ValueKind current = ValueKind::kElemSet;  // the scope's elements
  for (std::size_t i = 0; i < prog.steps.size(); ++i) {
    const auto& step = prog.steps[i];
    if (input_kind(step.kind) != current) {
      throw Error(ErrorCode::kTypeMismatch, "step " + std::to_string(i) + " (" + std::string(function_name(step.kind)) +
                                                ") expects " + std::string(value_kind_name(input_kind(step.kind))) +
                                                ", got " + std::string(value_kind_name(current)));
    }
    if (step.kind == FunctionKind::kRelatedByPosition && prog.scope != ScopeKind::kPage) {
      throw Error(ErrorCode::kTypeMismatch, "related_by_position needs a page scope");
    }
    current = output_kind(step.kind);
  }
  bool legal = false;
  switch (task) {
    case TaskId::kA: legal = current == ValueKind::kBool || current == ValueKind::kInt; break;
    case TaskId::kB: legal = current == ValueKind::kElem; break;
    case TaskId::kC: legal = current == ValueKind::kElemSet; break;
  }
  if (!legal) {
    throw Error(ErrorCode::kTypeMismatch, "program ends in " + std::string(value_kind_name(current)) +
                                              ", not an answer kind for task " + std::string(task_name(task)));
  }
}

// ---------------------------------------------------------------------------
// Answers

AnswerValue AnswerValue::make_index_set(std::vector<int> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  AnswerValue a;
  a.kind = Kind::kIndexSet;
  a.indices = std::move(s);
  return a;
}

std::string AnswerValue::canonical() const {
  switch (kind) {
    case Kind::kToken: return token;
    case Kind::kIndex: return std::to_string(index);
    case Kind::kIndexSet: {
      std::string out;
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(indices[i]);
      }
      return out;
    }
    case Kind::kNa: return "na";
  }
  return "na";
}

std::string_view answer_kind_name(AnswerValue::Kind k) {
  switch (k) {
    case AnswerValue::Kind::kToken: return "token";
    case AnswerValue::Kind::kIndex: return "index";
    case AnswerValue::Kind::kIndexSet: return "index_set";
    case AnswerValue::Kind::kNa: return "na";
  }
  return "na";
}

nlohmann::json answer_to_json(const AnswerValue& a) {
  nlohmann::json j;
  j["kind"] = answer_kind_name(a.kind);
  switch (a.kind) {
    case AnswerValue::Kind::kToken: j["value"] = a.token; break;
    case AnswerValue::Kind::kIndex: j["value"] = a.index; break;
    case AnswerValue::Kind::kIndexSet: j["value"] = a.indices; break;
    case AnswerValue::Kind::kNa: j["value"] = nullptr; break;
  }
  return j;
}

AnswerValue answer_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::kSchemaViolation, "answer: " + why); };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw bad("expected {\"kind\", \"value\"}");
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json value = j.contains("value") ? j["value"] : nlohmann::json(nullptr);
  if (kind == "token") {
    if (!value.is_string()) throw bad("token value must be a string");
    return AnswerValue::make_token(value.get<std::string>());
  }
  if (kind == "index") {
    if (!value.is_number_integer()) throw bad("index value must be an integer");
    return AnswerValue::make_index(value.get<int>());
  }
  if (kind == "index_set") {
    if (!value.is_array()) throw bad("index_set value must be an array");
    std::vector<int> s;
    for (const auto& v : value) {
      if (!v.is_number_integer()) throw bad("index_set entries must be integers");
      s.push_back(v.get<int>());
    }
    return AnswerValue::make_index_set(std::move(s));
  }
  if (kind == "na") return AnswerValue::na();
  throw bad("unknown kind \"" + kind + "\"");
}

bool answer_in_space(const AnswerValue& a, TaskId task) {
  using K = AnswerValue::Kind;
  switch (task) {
    case TaskId::kA:
      return a.kind == K::kToken && std::find(kTokenAnswers.begin(), kTokenAnswers.end(), a.token) != kTokenAnswers.end();
    case TaskId::kB: return a.kind == K::kNa || (a.kind == K::kIndex && a.index >= 0 && a.index < kMaxPageElements);
    case TaskId::kC:
      if (a.kind == K::kNa) return true;
      return a.kind == K::kIndexSet && !a.indices.empty() &&
             std::all_of(a.indices.begin(), a.indices.end(),
                         [](int i) { return i >= 0 && i < kMaxDocumentElements; });
  }
  return false;
}

bool region_contains(std::string_view region, const BoundingBox& box) {
  const double cx = box.cx(), cy = box.cy();
  const bool top = cy < 0.5, bottom = cy > 0.5, left = cx < 0.5, right = cx > 0.5;
  if (region == "top") return top;
  if (region == "bottom") return bottom;
  if (region == "left") return left;
  if (region == "right") return right;
  if (region == "top-left") return top && left;
  if (region == "top-right") return top && right;
  if (region == "bottom-left") return bottom && left;
  if (region == "bottom-right") return bottom && right;
  throw Error(ErrorCode::kTypeMismatch, "unknown region \"" + std::string(region) + "\"");
}

nlohmann::json trace_to_json(const std::vector<TraceStep>& trace) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : trace) {
    j.push_back({{"step", t.step}, {"function", t.function}, {"output_kind", t.output_kind},
                 {"output_size", t.output_size}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

std::optional<ElementCategory> label_category(std::string_view label) {
  if (label == "title") return ElementCategory::kTitle;
  if (label == "list") return ElementCategory::kList;
  if (label == "table") return ElementCategory::kTable;
  if (label == "figure") return ElementCategory::kFigure;
  return std::nullopt;
}

class Interpreter {
 public:
  Interpreter(const ExecutionScope& scope) : scope_(scope), doc_(*scope.doc) {}

  Value initial() const {
    ElemSet s;
    if (scope_.page) {
      for (const auto& e : scope_.page->elements) s.ids.push_back(e.id);
    } else {
      for (const auto* e : doc_.elements_in_reading_order()) s.ids.push_back(e->id);
    }
    return s;
  }

  Value apply(const Function& fn, const Value& in) const {
    if (std::holds_alternative<NaValue>(in)) return in;
    switch (fn.kind) {
      case FunctionKind::kFilterCategory: {
        auto cat = label_category(fn.arg);
        if (!cat) throw Error(ErrorCode::kTypeMismatch, "unknown label \"" + fn.arg + "\"");
        return filter(in, [&](const DocElement& e) { return e.category == *cat; });
      }
      case FunctionKind::kFilterRegion:
        return filter(in, [&](const DocElement& e) { return region_contains(fn.arg, e.bbox); });
      case FunctionKind::kFilterText: return filter(in, [&](const DocElement& e) { return e.text == fn.arg; });
      case FunctionKind::kLocateByText: {
        auto hits = std::get<ElemSet>(filter(in, [&](const DocElement& e) { return e.text == fn.arg; }));
        if (hits.ids.size() != 1) {
          throw Error(ErrorCode::kAnchorNotFound, "\"" + fn.arg + "\" matched " + std::to_string(hits.ids.size()) +
                                                      " elements");
        }
        return Elem{hits.ids.front()};
      }
      case FunctionKind::kRelatedByPosition: {
        if (!scope_.page) throw Error(ErrorCode::kTypeMismatch, "related_by_position needs a page scope");
        auto rel = parse_relation(fn.arg);
        if (!rel) throw Error(ErrorCode::kTypeMismatch, "unknown relation \"" + fn.arg + "\"");
        const auto& graph = scope_.graphs->spatial.at(scope_.page->index);
        return ElemSet{query_related(graph, *scope_.page, std::get<Elem>(in).id, *rel, fn.coarse)};
      }
      case FunctionKind::kCount: return static_cast<std::int64_t>(std::get<ElemSet>(in).ids.size());
      case FunctionKind::kExists: return !std::get<ElemSet>(in).ids.empty();
      case FunctionKind::kCompareCount: return std::get<std::int64_t>(in) == fn.number;
      case FunctionKind::kNthByReadingOrder: {
        const auto& ids = std::get<ElemSet>(in).ids;
        if (ids.empty()) return NaValue{};
        if (fn.arg == "first") return Elem{ids.front()};
        if (fn.arg == "last") return Elem{ids.back()};
        throw Error(ErrorCode::kTypeMismatch, "unknown ordinal \"" + fn.arg + "\"");
      }
      case FunctionKind::kDescribedBy: return described_by(std::get<Elem>(in).id);
      case FunctionKind::kParentSections: return parent_sections(fn.arg);
      case FunctionKind::kChildSubsections: {
        ElemSet out;
        for (const auto& c : scope_.graphs->logical.children(std::get<Elem>(in).id)) {
          if (doc_.find(c)->category == ElementCategory::kTitle) out.ids.push_back(c);
        }
        return out;
      }
    }
    throw Error(ErrorCode::kTypeMismatch, "unhandled function");
  }

 private:
  template <typename Pred>
  Value filter(const Value& in, Pred pred) const {
    ElemSet out;
    for (const auto& id : std::get<ElemSet>(in).ids) {
      if (pred(*doc_.find(id))) out.ids.push_back(id);
    }
    return out;
  }

  Value described_by(const std::string& id) const {
    const DocElement& e = *doc_.find(id);
    switch (e.category) {
      case ElementCategory::kTitle: return Elem{id};
      case ElementCategory::kTable:
      case ElementCategory::kFigure: {
        auto p = scope_.graphs->logical.parent(id);
        if (p && *p != kRootId) {
          const DocElement& cap = *doc_.find(*p);
          if (cap.caption_of && *cap.caption_of == id) return Elem{*p};
        }
        return NaValue{};
      }
      default: {
        auto t = owning_title(scope_.graphs->logical, doc_, id);
        if (t) return Elem{*t};
        return NaValue{};
      }
    }
  }

  Value parent_sections(const std::string& label) const {
    std::set<std::string> titles;
    auto it = doc_.mention_index.find(label);
    if (it != doc_.mention_index.end()) {
      for (const auto& id : it->second) {
        if (auto t = owning_title(scope_.graphs->logical, doc_, id)) titles.insert(*t);
      }
    }
    ElemSet out{{titles.begin(), titles.end()}};
    std::sort(out.ids.begin(), out.ids.end(), [&](const std::string& a, const std::string& b) {
      return doc_.find(a)->doc_reading_index < doc_.find(b)->doc_reading_index;
    });
    return out;
  }

  const ExecutionScope& scope_;
  const Document& doc_;
};

std::size_t value_size(const Value& v) {
  if (const auto* s = std::get_if<ElemSet>(&v)) return s->ids.size();
  if (std::holds_alternative<NaValue>(v)) return 0;
  return 1;
}

std::string value_kind_label(const Value& v) {
  switch (v.index()) {
    case 0: return "elem_set";
    case 1: return "elem";
    case 2: return "int";
    case 3: return "bool";
    default: return "na";
  }
}

}  // namespace

AnswerValue execute(const FunctionalProgram& prog, const ExecutionScope& scope, TaskId task,
                    std::vector<TraceStep>* trace) {
  type_check(prog, task);
  if ((prog.scope == ScopeKind::kPage) != (scope.page != nullptr)) {
    throw Error(ErrorCode::kTypeMismatch, "program scope does not match execution scope");
  }
  Interpreter interp(scope);
  Value v = interp.initial();
  for (std::size_t i = 0; i < prog.steps.size(); ++i) {
    v = interp.apply(prog.steps[i], v);
    if (trace) {
      trace->push_back({static_cast<int>(i), std::string(function_name(prog.steps[i].kind)), value_kind_label(v),
                        value_size(v)});
    }
  }

  if (std::holds_alternative<NaValue>(v)) return AnswerValue::na();
  if (const auto* b = std::get_if<bool>(&v)) return AnswerValue::make_token(*b ? "yes" : "no");
  if (const auto* n = std::get_if<std::int64_t>(&v)) {
    if (*n > 5) throw Error(ErrorCode::kOverflowAnswer, "count " + std::to_string(*n) + " exceeds the answer space");
    return AnswerValue::make_token(std::to_string(*n));
  }
  if (const auto* e = std::get_if<Elem>(&v)) {
    const DocElement& el = *scope.doc->find(e->id);
    if (scope.page && el.page_index != scope.page->index) return AnswerValue::na();
    return AnswerValue::make_index(el.page_reading_index);
  }
  const auto& set = std::get<ElemSet>(v);
  if (set.ids.empty()) return AnswerValue::na();
  std::vector<int> idx;
  for (const auto& id : set.ids) idx.push_back(scope.doc->find(id)->doc_reading_index);
  return AnswerValue::make_index_set(std::move(idx));
}

}  // namespace forge
