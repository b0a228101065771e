#include "forge/generator.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <set>
#include <thread>

#include "forge/error.h"
#include "forge/hash.h"

namespace forge {

bool GenConfig::runs(TaskId t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }

void validate_config(const GenConfig& cfg) {
  if (!(cfg.na_rate >= 0.0 && cfg.na_rate <= 1.0)) {
    throw Error(ErrorCode::kMalformedInput, "NA retention rate must lie in [0,1]");
  }
  if (cfg.threads < 0) throw Error(ErrorCode::kMalformedInput, "thread count must be non-negative");
}

std::string config_hash(const GenConfig& cfg) {
  std::string tasks;
  for (auto t : cfg.tasks) tasks += task_name(t);
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.6f", cfg.na_rate);
  // threads is deliberately left out: it never changes the output.
  return hex64(hash_fields({tasks, std::to_string(cfg.seed), std::to_string(cfg.per_template_cap), rate}));
}

std::string make_qid(const std::string& doc_id, std::optional<int> page, const std::string& template_id,
                     const ParamBinding& binding) {
  const std::string page_field = page ? std::to_string(*page) : "-";
  return hex64(hash_fields({doc_id, page_field, template_id, canonical_binding(binding)}));
}

namespace {

std::vector<ParamBinding> capped(std::vector<ParamBinding> bindings, std::size_t cap, std::uint64_t seed,
                                 std::uint64_t salt) {
  if (cap == 0 || bindings.size() <= cap) return bindings;
  std::vector<std::size_t> idx(bindings.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto rng = make_rng(seed, salt);
  stable_shuffle(idx, rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<ParamBinding> out;
  out.reserve(cap);
  for (auto i : idx) out.push_back(std::move(bindings[i]));
  return out;
}

std::optional<QARecord> make_record(const QuestionTemplate& tpl, const ParamBinding& binding, const Document& doc,
                                    const Page* page, const DocumentGraphs& graphs, const GenConfig& cfg) {
  AnswerValue answer;
  try {
    const auto prog = compile(tpl, binding);
    answer = execute(prog, ExecutionScope{&doc, page, &graphs}, tpl.task);
  } catch (const Error&) {
    // Overflowing counts and unresolvable anchors are dropped.
    return std::nullopt;
  }

  QARecord r;
  r.task = tpl.task;
  r.qtype = tpl.qtype;
  r.doc_id = doc.doc_id;
  if (page) r.page = page->index;
  r.template_id = tpl.template_id;
  r.binding = binding;
  r.qid = make_qid(r.doc_id, r.page, r.template_id, r.binding);

  if (answer.kind == AnswerValue::Kind::kNa) {
    if (tpl.task == TaskId::kC) return std::nullopt;
    if (tpl.task == TaskId::kB) {
      const double draw = unit_interval(hash_fields({std::to_string(cfg.seed), "na", r.qid}));
      if (draw >= cfg.na_rate) return std::nullopt;
    }
  }
  r.answer = std::move(answer);
  r.question = instantiate(tpl, binding, hash_fields({std::to_string(cfg.seed), r.qid})).text;
  return r;
}

}  // namespace

std::vector<QARecord> generate_page(const Page& page, const Document& doc, const DocumentGraphs& graphs,
                                    const TemplateRegistry& registry, const GenConfig& cfg) {
  std::vector<QARecord> out;
  if (page.elements.empty() || static_cast<int>(page.elements.size()) > kMaxPageElements) return out;
  for (TaskId task : {TaskId::kA, TaskId::kB}) {
    if (!cfg.runs(task)) continue;
    for (const auto* tpl : registry.for_task(task)) {
      auto bindings = enumerate_bindings(*tpl, doc, &page, graphs);
      const auto salt = hash_fields({doc.doc_id, std::to_string(page.index), tpl->template_id});
      for (const auto& b : capped(std::move(bindings), cfg.per_template_cap, cfg.seed, salt)) {
        if (auto r = make_record(*tpl, b, doc, &page, graphs, cfg)) out.push_back(std::move(*r));
      }
    }
  }
  return out;
}

std::vector<QARecord> generate_document(const Document& doc, const DocumentGraphs& graphs,
                                        const TemplateRegistry& registry, const GenConfig& cfg) {
  std::vector<QARecord> out;
  if (!cfg.runs(TaskId::kC)) return out;
  const auto n = doc.element_count();
  if (n == 0 || static_cast<int>(n) > kMaxDocumentElements) return out;
  for (const auto* tpl : registry.for_task(TaskId::kC)) {
    auto bindings = enumerate_bindings(*tpl, doc, nullptr, graphs);
    const auto salt = hash_fields({doc.doc_id, "-", tpl->template_id});
    for (const auto& b : capped(std::move(bindings), cfg.per_template_cap, cfg.seed, salt)) {
      if (auto r = make_record(*tpl, b, doc, nullptr, graphs, cfg)) out.push_back(std::move(*r));
    }
  }
  return out;
}

namespace {

struct DocOutput {
  std::vector<QARecord> records;
  std::vector<TaskExclusion> excluded;
};

DocOutput generate_one(const Document& doc, const TemplateRegistry& registry, const GenConfig& cfg) {
  DocOutput out;
  const auto graphs = build_graphs(doc);

  std::set<int> ab_pages;
  for (TaskId task : {TaskId::kA, TaskId::kB}) {
    if (!cfg.runs(task)) continue;
    auto report = validate_for_generation(doc, task);
    for (auto& e : report.exclusions) out.excluded.push_back({task, std::move(e)});
    ab_pages.insert(report.eligible_pages.begin(), report.eligible_pages.end());
  }
  for (int p : ab_pages) {
    auto recs = generate_page(doc.pages[p], doc, graphs, registry, cfg);
    std::move(recs.begin(), recs.end(), std::back_inserter(out.records));
  }

  if (cfg.runs(TaskId::kC)) {
    auto report = validate_for_generation(doc, TaskId::kC);
    for (auto& e : report.exclusions) out.excluded.push_back({TaskId::kC, std::move(e)});
    if (!report.document_excluded) {
      auto recs = generate_document(doc, graphs, registry, cfg);
      std::move(recs.begin(), recs.end(), std::back_inserter(out.records));
    }
  }
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

GenerationResult generate_corpus(const std::vector<Document>& corpus, const TemplateRegistry& registry,
                                 const GenConfig& cfg) {
  validate_config(cfg);
  std::vector<const Document*> docs;
  for (const auto& d : corpus) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });
  for (std::size_t i = 1; i < docs.size(); ++i) {
    if (docs[i]->doc_id == docs[i - 1]->doc_id) {
      throw Error(ErrorCode::kDuplicateId, "document \"" + docs[i]->doc_id + "\" appears twice in the corpus");
    }
  }

  std::vector<DocOutput> outputs(docs.size());
  const int workers = std::min<int>(resolve_threads(cfg.threads), std::max<std::size_t>(docs.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) outputs[i] = generate_one(*docs[i], registry, cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < docs.size(); i = next++) {
          try {
            outputs[i] = generate_one(*docs[i], registry, cfg);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  GenerationResult result;
  for (TaskId task : cfg.tasks) {
    auto& row = result.counts[std::string(task_name(task))];
    for (auto q : kAllQuestionTypes) {
      if (task_of(q) == task) row[std::string(qtype_name(q))] = 0;
    }
  }
  for (auto& o : outputs) {
    for (auto& r : o.records) {
      ++result.counts[std::string(task_name(r.task))][std::string(qtype_name(r.qtype))];
      result.records.push_back(std::move(r));
    }
    std::move(o.excluded.begin(), o.excluded.end(), std::back_inserter(result.excluded));
  }
  return result;
}

nlohmann::json manifest_json(const GenerationResult& result, const GenConfig& cfg, const std::string& records_path) {
  nlohmann::json j;
  j["records"] = records_path;
  j["excluded"] = nlohmann::json::array();
  for (const auto& e : result.excluded) {
    nlohmann::json ej;
    ej["task"] = task_name(e.task);
    ej["doc_id"] = e.exclusion.doc_id;
    ej["page"] = e.exclusion.page ? nlohmann::json(*e.exclusion.page) : nlohmann::json(nullptr);
    ej["reason"] = e.exclusion.reason;
    j["excluded"].push_back(std::move(ej));
  }
  j["counts"] = result.counts;
  j["seed"] = cfg.seed;
  j["config_hash"] = config_hash(cfg);
  return j;
}

}  // namespace forge
