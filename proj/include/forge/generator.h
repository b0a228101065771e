#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/doc_model.h"
#include "forge/program.h"
#include "forge/relgraph.h"
#include "forge/templates.h"

namespace forge {

struct QARecord {
  std::string qid;
  TaskId task = TaskId::kA;
  QuestionType qtype = QuestionType::kExistence;
  std::string doc_id;
  std::optional<int> page;  // absent for Task C
  std::string question;
  std::string template_id;
  ParamBinding binding;
  AnswerValue answer;

  bool operator==(const QARecord&) const = default;
};

struct GenConfig {
  std::vector<TaskId> tasks = {TaskId::kA, TaskId::kB, TaskId::kC};
  std::uint64_t seed = 0;
  // Bindings kept per template and scope; 0 keeps all.
  std::size_t per_template_cap = 0;
  // Fraction of NA-answered Task B questions kept.
  double na_rate = 0.1;
  // Worker count; 0 picks the hardware concurrency.
  int threads = 1;

  bool runs(TaskId t) const;
};

void validate_config(const GenConfig& cfg);
std::string config_hash(const GenConfig& cfg);

std::string make_qid(const std::string& doc_id, std::optional<int> page, const std::string& template_id,
                     const ParamBinding& binding);

// Task A/B questions for one page, ordered by (template_id, binding).
std::vector<QARecord> generate_page(const Page& page, const Document& doc, const DocumentGraphs& graphs,
                                    const TemplateRegistry& registry, const GenConfig& cfg);

// Task C questions over the whole document.
std::vector<QARecord> generate_document(const Document& doc, const DocumentGraphs& graphs,
                                        const TemplateRegistry& registry, const GenConfig& cfg);

struct TaskExclusion {
  TaskId task;
  Exclusion exclusion;
};

struct GenerationResult {
  std::vector<QARecord> records;
  std::vector<TaskExclusion> excluded;
  // task -> qtype -> count, for the tasks that ran.
  std::map<std::string, std::map<std::string, std::size_t>> counts;
};

// Documents must already be preprocessed. Output follows doc_id order.
GenerationResult generate_corpus(const std::vector<Document>& corpus, const TemplateRegistry& registry,
                                 const GenConfig& cfg);

nlohmann::json manifest_json(const GenerationResult& result, const GenConfig& cfg, const std::string& records_path);

}  // namespace forge
