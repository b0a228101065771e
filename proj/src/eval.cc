#include "forge/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "forge/dataset_io.h"
#include "forge/error.h"

namespace forge {

std::vector<Prediction> predictions_from_jsonl(std::string_view text, const std::string& source) {
  std::vector<Prediction> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kSchemaViolation, where + "not a JSON object");
    if (!j.contains("qid") || !j["qid"].is_string() || !j.contains("answer")) {
      throw Error(ErrorCode::kSchemaViolation, where + "expected {\"qid\", \"answer\"}");
    }
    try {
      out.push_back({j["qid"].get<std::string>(), answer_from_json(j["answer"])});
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaViolation, where + e.what());
    }
  }
  return out;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  return predictions_from_jsonl(read_text_file(path), path.string());
}

std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    nlohmann::ordered_json j;
    j["qid"] = p.qid;
    j["answer"] = answer_to_json(p.answer);
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

bool kind_legal(TaskId task, AnswerValue::Kind k) {
  using K = AnswerValue::Kind;
  switch (task) {
    case TaskId::kA: return k == K::kToken;
    case TaskId::kB: return k == K::kIndex || k == K::kNa;
    case TaskId::kC: return k == K::kIndexSet || k == K::kNa;
  }
  return false;
}

// Prediction for a gold record, nullopt when missing in lenient mode.
std::optional<AnswerValue> lookup(const QARecord& g, const std::map<std::string, AnswerValue>& preds,
                                  const EvalOptions& options) {
  auto it = preds.find(g.qid);
  if (it == preds.end()) {
    if (options.strict) throw Error(ErrorCode::kUnknownQid, "no prediction for qid " + g.qid);
    return std::nullopt;
  }
  if (!kind_legal(g.task, it->second.kind)) {
    throw Error(ErrorCode::kKindMismatch, "qid " + g.qid + ": answer kind " +
                                              std::string(answer_kind_name(it->second.kind)) +
                                              " is not valid for task " + std::string(task_name(g.task)));
  }
  return it->second;
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double f1_of(const Counts& c) {
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 200.0 * c.tp / denom;
}

struct F1Result {
  double macro = 0, micro = 0;
  std::vector<ClassScore> classes;
};

// pairs of (gold label, predicted label or nullopt for missing)
F1Result f1_scores(const std::vector<std::pair<std::string, std::optional<std::string>>>& pairs) {
  std::map<std::string, Counts> counts;
  for (const auto& [g, _] : pairs) counts[g];
  for (const auto& [g, p] : pairs) {
    if (p && *p == g) {
      ++counts[g].tp;
      continue;
    }
    ++counts[g].fn;
    if (p) {
      auto it = counts.find(*p);
      if (it != counts.end()) ++it->second.fp;
    }
  }
  F1Result r;
  Counts total;
  for (const auto& [label, c] : counts) {
    ClassScore s;
    s.label = label;
    s.support = c.tp + c.fn;
    s.precision = c.tp + c.fp == 0 ? 0.0 : 100.0 * c.tp / (c.tp + c.fp);
    s.recall = s.support == 0 ? 0.0 : 100.0 * c.tp / s.support;
    s.f1 = f1_of(c);
    r.macro += s.f1;
    r.classes.push_back(s);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  if (!counts.empty()) r.macro /= static_cast<double>(counts.size());
  r.micro = f1_of(total);
  return r;
}

}  // namespace

TaskEval score_task_ab(const std::vector<QARecord>& gold, const std::map<std::string, AnswerValue>& preds,
                       const EvalOptions& options) {
  TaskEval out;
  if (!gold.empty()) out.task = std::string(task_name(gold.front().task));
  std::map<std::string, std::vector<std::pair<std::string, std::optional<std::string>>>> by_qtype;
  std::vector<std::pair<std::string, std::optional<std::string>>> pairs;
  for (const auto& g : gold) {
    auto p = lookup(g, preds, options);
    if (!p) ++out.missing;
    if (p && p->kind == AnswerValue::Kind::kNa) ++out.na_predictions;
    std::optional<std::string> label;
    if (p) label = p->canonical();
    pairs.emplace_back(g.answer.canonical(), label);
    by_qtype[std::string(qtype_name(g.qtype))].emplace_back(g.answer.canonical(), label);
  }
  out.total = gold.size();
  auto all = f1_scores(pairs);
  out.macro_f1 = all.macro;
  out.micro_f1 = all.micro;
  out.classes = std::move(all.classes);
  out.score = options.averaging == Averaging::kMacro ? out.macro_f1 : out.micro_f1;
  for (const auto& [q, sub] : by_qtype) {
    auto r = f1_scores(sub);
    out.per_qtype[q] = options.averaging == Averaging::kMacro ? r.macro : r.micro;
  }
  return out;
}

TaskEval score_task_c(const std::vector<QARecord>& gold, const std::map<std::string, AnswerValue>& preds,
                      const EvalOptions& options) {
  TaskEval out;
  out.task = "C";
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_qtype;  // correct, total
  std::size_t correct = 0;
  for (const auto& g : gold) {
    auto p = lookup(g, preds, options);
    if (!p) ++out.missing;
    if (p && p->kind == AnswerValue::Kind::kNa) ++out.na_predictions;
    const bool ok = p && *p == g.answer;
    correct += ok;
    auto& q = by_qtype[std::string(qtype_name(g.qtype))];
    q.first += ok;
    ++q.second;
  }
  out.total = gold.size();
  out.score = gold.empty() ? 0.0 : 100.0 * correct / gold.size();
  for (const auto& [q, c] : by_qtype) out.per_qtype[q] = 100.0 * c.first / c.second;
  return out;
}

EvalReport evaluate(const std::vector<QARecord>& gold, const std::vector<Prediction>& preds,
                    const EvalOptions& options) {
  std::map<std::string, AnswerValue> by_qid;
  for (const auto& p : preds) by_qid[p.qid] = p.answer;
  std::set<std::string> gold_qids;
  std::map<TaskId, std::vector<QARecord>> by_task;
  for (const auto& g : gold) {
    gold_qids.insert(g.qid);
    by_task[g.task].push_back(g);
  }
  if (options.strict) {
    for (const auto& p : preds) {
      if (!gold_qids.count(p.qid)) throw Error(ErrorCode::kUnknownQid, "prediction for unknown qid " + p.qid);
    }
  }
  EvalReport report;
  for (const auto& [task, records] : by_task) {
    report.tasks[std::string(task_name(task))] =
        task == TaskId::kC ? score_task_c(records, by_qid, options) : score_task_ab(records, by_qid, options);
  }
  return report;
}

std::vector<Prediction> gold_predictions(const std::vector<QARecord>& gold) {
  std::vector<Prediction> out;
  out.reserve(gold.size());
  for (const auto& g : gold) out.push_back({g.qid, g.answer});
  return out;
}

BreakdownTable breakdown(const EvalReport& report) {
  static const std::array<std::pair<QuestionType, const char*>, 6> kColumns = {{
      {QuestionType::kExistence, "Existence"},
      {QuestionType::kCounting, "Counting"},
      {QuestionType::kStructuralUnderstanding, "Struct-UD"},
      {QuestionType::kObjectRecognition, "Obj-Reg"},
      {QuestionType::kParentRelation, "Parent"},
      {QuestionType::kChildRelation, "Child"},
  }};
  auto fmt = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return std::string(buf);
  };
  BreakdownTable t;
  for (const auto& [q, name] : kColumns) {
    t.header.push_back(name);
    std::string cell = "-";
    auto it = report.tasks.find(std::string(task_name(task_of(q))));
    if (it != report.tasks.end()) {
      auto c = it->second.per_qtype.find(std::string(qtype_name(q)));
      if (c != it->second.per_qtype.end()) cell = fmt(c->second);
    }
    t.cells.push_back(cell);
  }
  for (const char* task : {"A", "B", "C"}) {
    t.header.push_back(std::string("Task ") + task);
    auto it = report.tasks.find(task);
    t.cells.push_back(it == report.tasks.end() || it->second.total == 0 ? "-" : fmt(it->second.score));
  }
  return t;
}

std::string render_breakdown(const BreakdownTable& table) {
  std::string head, row;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::size_t w = std::max(table.header[i].size(), table.cells[i].size());
    if (i) {
      head += "  ";
      row += "  ";
    }
    head += std::string(w - table.header[i].size(), ' ') + table.header[i];
    row += std::string(w - table.cells[i].size(), ' ') + table.cells[i];
  }
  return head + "\n" + row + "\n";
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [task, t] : report.tasks) {
    nlohmann::ordered_json tj;
    tj["total"] = t.total;
    tj["score"] = t.score;
    if (task != "C") {
      tj["macro_f1"] = t.macro_f1;
      tj["micro_f1"] = t.micro_f1;
    }
    tj["missing"] = t.missing;
    tj["na_predictions"] = t.na_predictions;
    tj["per_qtype"] = nlohmann::ordered_json::object();
    for (const auto& [q, s] : t.per_qtype) tj["per_qtype"][q] = s;
    if (task != "C") {
      tj["classes"] = nlohmann::ordered_json::array();
      for (const auto& c : t.classes) {
        tj["classes"].push_back({{"label", c.label},
                                 {"precision", c.precision},
                                 {"recall", c.recall},
                                 {"f1", c.f1},
                                 {"support", c.support}});
      }
    }
    j[task] = std::move(tj);
  }
  return j;
}

}  // namespace forge
