#include "forge/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "forge/balancer.h"
#include "forge/dataset_io.h"
#include "forge/error.h"
#include "forge/eval.h"
#include "forge/generator.h"

namespace forge {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slot_kind_name(SlotKind k) {
  switch (k) {
    case SlotKind::kLabel: return "label";
    case SlotKind::kFloatKind: return "float_kind";
    case SlotKind::kRegion: return "region";
    case SlotKind::kRelation: return "relation";
    case SlotKind::kNumber: return "number";
    case SlotKind::kOrdinal: return "ordinal";
    case SlotKind::kTitleText: return "title_text";
    case SlotKind::kFloatLabel: return "float_label";
    case SlotKind::kCitation: return "citation";
  }
  return "unknown";
}

int env_threads() {
  const char* v = std::getenv("FORGE_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) throw UsageError("FORGE_THREADS must be a non-negative integer");
  return static_cast<int>(n);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::string fmt_box(const BoundingBox& b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.3f,%.3f,%.3f,%.3f)", b.x0, b.y0, b.x1, b.y1);
  return buf;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string in, out;
};

void cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const auto corpus = load_corpus(a.in);
  nlohmann::ordered_json j;
  j["documents"] = nlohmann::ordered_json::array();
  j["excluded"] = nlohmann::ordered_json::array();
  for (const auto& doc : corpus) {
    std::size_t captions = 0;
    for (const auto* e : doc.elements_in_reading_order()) captions += e->caption_of.has_value();
    j["documents"].push_back({{"doc_id", doc.doc_id},
                              {"pages", doc.pages.size()},
                              {"elements", doc.element_count()},
                              {"captions", captions},
                              {"mention_keys", doc.mention_index.size()}});
    for (TaskId t : {TaskId::kA, TaskId::kB, TaskId::kC}) {
      for (const auto& e : validate_for_generation(doc, t).exclusions) {
        j["excluded"].push_back({{"task", task_name(t)},
                                 {"doc_id", e.doc_id},
                                 {"page", e.page ? nlohmann::ordered_json(*e.page) : nlohmann::ordered_json()},
                                 {"reason", e.reason}});
      }
    }
  }
  emit(a.out, j.dump(2) + "\n", out);
}

struct GenerateArgs {
  std::string in, out, manifest, tasks = "A,B,C";
  std::uint64_t seed = 0;
  double na_rate = 0.1;
  std::size_t cap = 0;
  int threads = -1;
};

std::vector<TaskId> parse_tasks(const std::string& spec) {
  std::vector<TaskId> tasks;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');) {
    auto t = parse_task(part);
    if (!t) throw UsageError("unknown task \"" + part + "\" (expected A, B or C)");
    if (std::find(tasks.begin(), tasks.end(), *t) == tasks.end()) tasks.push_back(*t);
  }
  if (tasks.empty()) throw UsageError("--tasks must name at least one task");
  std::sort(tasks.begin(), tasks.end());
  return tasks;
}

void cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  GenConfig cfg;
  cfg.tasks = parse_tasks(a.tasks);
  cfg.seed = a.seed;
  cfg.na_rate = a.na_rate;
  cfg.per_template_cap = a.cap;
  cfg.threads = a.threads >= 0 ? a.threads : env_threads();
  validate_config(cfg);

  const auto corpus = load_corpus(a.in);
  const auto result = generate_corpus(corpus, builtin_templates(), cfg);
  emit(a.out, records_to_jsonl(result.records), out);
  std::string manifest = a.manifest;
  if (manifest.empty() && !a.out.empty() && a.out != "-") manifest = a.out + ".manifest.json";
  if (!manifest.empty()) {
    write_file_atomic(manifest, manifest_json(result, cfg, a.out.empty() ? "-" : a.out).dump(2) + "\n");
  }
  err << "generated " << result.records.size() << " records from " << corpus.size() << " documents ("
      << result.excluded.size() << " exclusions)\n";
}

struct BalanceArgs {
  std::string in, out, report;
  std::uint64_t seed = 0;
  double answer_ratio = 1.5, param_ratio = 2.0;
};

void cmd_balance(const BalanceArgs& a, std::ostream& out, std::ostream& err) {
  BalanceConfig cfg{a.seed, a.answer_ratio, a.param_ratio};
  validate_config(cfg);
  const auto before = read_records(a.in);
  const auto after = balance(before, cfg);
  emit(a.out, records_to_jsonl(after), out);
  if (!a.report.empty()) write_file_atomic(a.report, report_to_json(balance_report(before, after)).dump(2) + "\n");
  err << "kept " << after.size() << " of " << before.size() << " records\n";
}

struct SplitArgs {
  std::string in, out;
  std::vector<double> ratios = {0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
};

void cmd_split(const SplitArgs& a, std::ostream& err) {
  if (a.ratios.size() != 3) throw UsageError("--ratios takes exactly three values (train,valid,test)");
  const auto records = read_records(a.in);
  const auto splits = split_corpus(records, a.ratios, a.seed);
  write_dataset(splits, a.out);
  for (const auto& s : splits) {
    err << s.name << ": " << s.doc_ids.size() << " documents, " << s.records.size() << " records\n";
  }
}

struct StatsArgs {
  std::string in, out;
};

void cmd_stats(const StatsArgs& a, std::ostream& out) {
  std::error_code ec;
  const DatasetStats stats = std::filesystem::is_directory(a.in, ec) ? compute_stats(read_dataset(a.in))
                                                                      : compute_stats(read_records(a.in));
  emit(a.out, stats_to_json(stats).dump(2) + "\n", out);
}

struct EvalArgs {
  std::string gold, pred, out, averaging = "macro";
  bool strict = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  EvalOptions opts;
  opts.strict = a.strict;
  if (a.averaging == "macro") {
    opts.averaging = Averaging::kMacro;
  } else if (a.averaging == "micro") {
    opts.averaging = Averaging::kMicro;
  } else {
    throw UsageError("--averaging must be macro or micro");
  }
  const auto gold = read_records(a.gold);
  const auto preds = read_predictions(a.pred);
  const auto report = evaluate(gold, preds, opts);
  if (!a.out.empty()) write_file_atomic(a.out, report_to_json(report).dump(2) + "\n");
  out << render_breakdown(breakdown(report));
}

struct InspectArgs {
  std::string in, doc, format = "text";
  int page = -1;
};

void inspect_page(const DocumentGraphs& graphs, const Page& page, std::ostream& out) {
  out << "page " << page.index << " (" << page.elements.size() << " elements)\n";
  for (const auto& e : page.elements) {
    out << "  [" << e.page_reading_index << "] " << e.id << " " << category_name(e.category) << " "
        << fmt_box(e.bbox);
    if (!e.text.empty()) out << " \"" << e.text << "\"";
    out << "\n";
  }
  out << "  spatial edges:\n";
  for (const auto& sg : graphs.spatial) {
    if (sg.page_index != page.index) continue;
    for (const auto& edge : sg.edges()) {
      out << "    " << edge.src << " -> " << edge.dst << " " << relation_name(edge.rel) << "\n";
    }
  }
  out << "  parent chains:\n";
  for (const auto& e : page.elements) {
    out << "    " << e.id;
    for (auto p = graphs.logical.parent(e.id); p; p = graphs.logical.parent(*p)) out << " > " << *p;
    out << "\n";
  }
}

void cmd_inspect(const InspectArgs& a, std::ostream& out) {
  if (a.format != "text" && a.format != "json") throw UsageError("--format must be text or json");
  const auto corpus = load_corpus(a.in);
  const Document* doc = nullptr;
  for (const auto& d : corpus) {
    if (d.doc_id == a.doc) doc = &d;
  }
  if (!doc) throw Error(ErrorCode::kUnknownDocument, "no document \"" + a.doc + "\"");
  const bool page_known = a.page < 0 || std::any_of(doc->pages.begin(), doc->pages.end(),
                                                     [&](const Page& p) { return p.index == a.page; });
  if (!page_known) {
    throw Error(ErrorCode::kUnknownPage, "document \"" + a.doc + "\" has no page " + std::to_string(a.page));
  }
  const auto graphs = build_graphs(*doc);
  std::optional<int> page;
  if (a.page >= 0) page = a.page;
  if (a.format == "json") {
    out << graph_dump(*doc, graphs, page).dump(2) << "\n";
    return;
  }
  out << "document " << doc->doc_id << "\n";
  for (const auto& p : doc->pages) {
    if (!page || p.index == *page) inspect_page(graphs, p, out);
  }
}

void cmd_templates_dump(const std::string& path, std::ostream& out) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& t : builtin_templates().all()) {
    nlohmann::ordered_json tj;
    tj["template_id"] = t.template_id;
    tj["task"] = task_name(t.task);
    tj["qtype"] = qtype_name(t.qtype);
    tj["pattern"] = t.pattern;
    tj["slots"] = nlohmann::ordered_json::array();
    for (const auto& s : t.slots) {
      tj["slots"].push_back({{"name", s.name}, {"kind", slot_kind_name(s.kind)}, {"plural", s.plural}});
    }
    tj["program"] = nlohmann::ordered_json::array();
    for (auto f : program_skeleton(t)) tj["program"].push_back(function_name(f));
    j.push_back(std::move(tj));
  }
  emit(path, j.dump(2) + "\n", out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question-answer dataset generator for annotated document layouts", "forge"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse and validate annotation files");
  c_ingest->add_option("--in", ingest.in, "Annotation file or directory")->required();
  c_ingest->add_option("--out", ingest.out, "Summary JSON (default: stdout)");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Generate question-answer records");
  c_gen->add_option("--in", gen.in, "Annotation file or directory")->required();
  c_gen->add_option("--tasks", gen.tasks, "Comma-separated tasks");
  c_gen->add_option("--seed", gen.seed, "Random seed")->required();
  c_gen->add_option("--out", gen.out, "Records JSONL (default: stdout)");
  c_gen->add_option("--manifest", gen.manifest, "Manifest JSON (default: <out>.manifest.json)");
  c_gen->add_option("--na-rate", gen.na_rate, "Fraction of NA-answered Task B questions kept");
  c_gen->add_option("--cap", gen.cap, "Bindings kept per template and scope (0 = all)");
  c_gen->add_option("--threads", gen.threads, "Worker count (0 = auto; default FORGE_THREADS)");

  BalanceArgs bal;
  auto* c_bal = app.add_subcommand("balance", "Down-sample records by answer and parameter distribution");
  c_bal->add_option("--in", bal.in, "Records JSONL")->required();
  c_bal->add_option("--out", bal.out, "Balanced JSONL (default: stdout)");
  c_bal->add_option("--seed", bal.seed, "Random seed")->required();
  c_bal->add_option("--answer-ratio", bal.answer_ratio, "Answer-class ratio bound");
  c_bal->add_option("--param-ratio", bal.param_ratio, "Parameter-combination ratio bound");
  c_bal->add_option("--report", bal.report, "Balance report JSON");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Split records into train/valid/test by document");
  c_split->add_option("--in", split.in, "Records JSONL")->required();
  c_split->add_option("--out", split.out, "Output directory")->required();
  c_split->add_option("--ratios", split.ratios, "train,valid,test")->delimiter(',');
  c_split->add_option("--seed", split.seed, "Random seed")->required();

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Dataset statistics");
  c_stats->add_option("--in", stats.in, "Dataset directory or records JSONL")->required();
  c_stats->add_option("--out", stats.out, "Report JSON (default: stdout)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Score predictions against gold records");
  c_eval->add_option("--gold", ev.gold, "Gold records JSONL")->required();
  c_eval->add_option("--pred", ev.pred, "Predictions JSONL")->required();
  c_eval->add_flag("--strict", ev.strict, "Fail on missing or unknown qids");
  c_eval->add_option("--averaging", ev.averaging, "macro or micro");
  c_eval->add_option("--out", ev.out, "Report JSON");

  InspectArgs insp;
  auto* c_insp = app.add_subcommand("inspect", "Show reading order, spatial edges and parent chains");
  c_insp->add_option("--in", insp.in, "Annotation file or directory")->required();
  c_insp->add_option("--doc", insp.doc, "Document id")->required();
  c_insp->add_option("--page", insp.page, "Page index (default: all pages)");
  c_insp->add_option("--format", insp.format, "text or json");

  std::string tpl_out;
  auto* c_tpl = app.add_subcommand("templates", "Template registry");
  c_tpl->require_subcommand(1);
  auto* c_tpl_dump = c_tpl->add_subcommand("dump", "Print every template as JSON");
  c_tpl_dump->add_option("--out", tpl_out, "Output JSON (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*c_ingest) cmd_ingest(ingest, out);
    if (*c_gen) cmd_generate(gen, out, err);
    if (*c_bal) cmd_balance(bal, out, err);
    if (*c_split) cmd_split(split, err);
    if (*c_stats) cmd_stats(stats, out);
    if (*c_eval) cmd_eval(ev, out);
    if (*c_insp) cmd_inspect(insp, out);
    if (*c_tpl_dump) cmd_templates_dump(tpl_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace forge
