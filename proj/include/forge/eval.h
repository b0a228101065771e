#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/generator.h"

namespace forge {

struct Prediction {
  std::string qid;
  AnswerValue answer;
};

std::vector<Prediction> predictions_from_jsonl(std::string_view text, const std::string& source = "<input>");
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
std::string predictions_to_jsonl(const std::vector<Prediction>& preds);

enum class Averaging { kMacro, kMicro };

struct EvalOptions {
  // Strict: every gold qid needs a prediction and every prediction a gold qid.
  // Lenient: a missing prediction counts as wrong.
  bool strict = true;
  Averaging averaging = Averaging::kMacro;
};

struct ClassScore {
  std::string label;  // canonical answer
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

struct TaskEval {
  std::string task;
  std::size_t total = 0;
  std::size_t missing = 0;
  std::size_t na_predictions = 0;
  double score = 0;  // F1 under the chosen averaging (A/B), accuracy (C); 0..100
  double macro_f1 = 0;
  double micro_f1 = 0;
  std::map<std::string, double> per_qtype;  // only qtypes present in gold
  std::vector<ClassScore> classes;          // Task A/B
};

struct EvalReport {
  std::map<std::string, TaskEval> tasks;  // only tasks present in gold
};

// gold must hold records of a single Task A or B.
TaskEval score_task_ab(const std::vector<QARecord>& gold, const std::map<std::string, AnswerValue>& preds,
                       const EvalOptions& options);
// gold must hold Task C records; exact set match.
TaskEval score_task_c(const std::vector<QARecord>& gold, const std::map<std::string, AnswerValue>& preds,
                      const EvalOptions& options);

EvalReport evaluate(const std::vector<QARecord>& gold, const std::vector<Prediction>& preds,
                    const EvalOptions& options);

// Perfect predictions for the gold set.
std::vector<Prediction> gold_predictions(const std::vector<QARecord>& gold);

inline constexpr std::array<const char*, 6> kBreakdownColumns = {"Existence", "Counting", "Struct-UD",
                                                                 "Obj-Reg",   "Parent",   "Child"};

struct BreakdownTable {
  std::vector<std::string> header;
  std::vector<std::string> cells;  // "-" where there are no questions
};

BreakdownTable breakdown(const EvalReport& report);
std::string render_breakdown(const BreakdownTable& table);
nlohmann::ordered_json report_to_json(const EvalReport& report);

}  // namespace forge
