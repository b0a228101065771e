#include "forge/dataset_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "forge/error.h"
#include "forge/hash.h"

namespace forge {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "cannot read " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kIoFailure, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, "cannot rename onto " + path.string());
  }
}

std::vector<Document> load_corpus(const fs::path& path) {
  std::error_code ec;
  std::vector<fs::path> files;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path, ec)) {
    files.push_back(path);
  } else {
    throw Error(ErrorCode::kIoFailure, "no such file or directory: " + path.string());
  }
  std::vector<Document> docs;
  docs.reserve(files.size());
  for (const auto& f : files) {
    try {
      docs.push_back(preprocess(parse_document(read_text_file(f))));
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.what());
    }
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Records

nlohmann::ordered_json record_to_json(const QARecord& r) {
  nlohmann::ordered_json j;
  j["qid"] = r.qid;
  j["task"] = task_name(r.task);
  j["qtype"] = qtype_name(r.qtype);
  j["doc_id"] = r.doc_id;
  j["page"] = r.page ? nlohmann::ordered_json(*r.page) : nlohmann::ordered_json(nullptr);
  j["question"] = r.question;
  j["template_id"] = r.template_id;
  j["bindings"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.binding) j["bindings"][k] = v;
  j["answer"] = answer_to_json(r.answer);
  return j;
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::kSchemaViolation, std::string("missing field \"") + name + "\"");
  return j[name];
}

std::string string_field(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) throw Error(ErrorCode::kSchemaViolation, std::string("\"") + name + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

QARecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, "record must be an object");
  QARecord r;
  r.qid = string_field(j, "qid");
  auto task = parse_task(string_field(j, "task"));
  if (!task) throw Error(ErrorCode::kSchemaViolation, "unknown task");
  r.task = *task;
  auto qtype = parse_qtype(string_field(j, "qtype"));
  if (!qtype || task_of(*qtype) != r.task) throw Error(ErrorCode::kSchemaViolation, "bad qtype for task");
  r.qtype = *qtype;
  r.doc_id = string_field(j, "doc_id");
  const auto& page = field(j, "page");
  if (page.is_number_integer()) {
    r.page = page.get<int>();
  } else if (!page.is_null()) {
    throw Error(ErrorCode::kSchemaViolation, "\"page\" must be an integer or null");
  }
  if (r.page.has_value() == (r.task == TaskId::kC)) {
    throw Error(ErrorCode::kSchemaViolation, "\"page\" must be set exactly for Task A/B");
  }
  r.question = string_field(j, "question");
  r.template_id = string_field(j, "template_id");
  const auto& b = field(j, "bindings");
  if (!b.is_object()) throw Error(ErrorCode::kSchemaViolation, "\"bindings\" must be an object");
  for (const auto& [k, v] : b.items()) {
    if (!v.is_string()) throw Error(ErrorCode::kSchemaViolation, "binding values must be strings");
    r.binding[k] = v.get<std::string>();
  }
  r.answer = answer_from_json(field(j, "answer"));
  return r;
}

std::string records_to_jsonl(const std::vector<QARecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<QARecord> records_from_jsonl(std::string_view text, const std::string& source) {
  std::vector<QARecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kSchemaViolation, source + ":" + std::to_string(line_no) + ": not valid JSON");
    }
    try {
      out.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaViolation, source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_records(const fs::path& path, const std::vector<QARecord>& records) {
  write_file_atomic(path, records_to_jsonl(records));
}

std::vector<QARecord> read_records(const fs::path& path) {
  return records_from_jsonl(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Splits

std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    rem[i] = quota - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

std::array<DatasetSplit, 3> split_corpus(const std::vector<QARecord>& records, const std::vector<double>& ratios,
                                         std::uint64_t seed) {
  if (ratios.size() != 3) throw Error(ErrorCode::kBadRatios, "exactly three ratios are required");
  double sum = 0;
  for (double r : ratios) {
    if (!(r > 0)) throw Error(ErrorCode::kBadRatios, "ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::kBadRatios, "ratios must sum to 1");

  std::set<std::string> unique;
  for (const auto& r : records) unique.insert(r.doc_id);
  std::vector<std::string> docs(unique.begin(), unique.end());
  auto rng = make_rng(seed, fnv1a("split"));
  stable_shuffle(docs, rng);

  const auto sizes = apportion(docs.size(), {ratios[0], ratios[1], ratios[2]});
  std::map<std::string, int> home;
  std::array<DatasetSplit, 3> splits;
  std::size_t at = 0;
  for (int i = 0; i < 3; ++i) {
    splits[i].name = kSplitNames[i];
    for (std::size_t k = 0; k < sizes[i]; ++k, ++at) {
      home[docs[at]] = i;
      splits[i].doc_ids.push_back(docs[at]);
    }
    std::sort(splits[i].doc_ids.begin(), splits[i].doc_ids.end());
  }
  for (const auto& r : records) splits[home.at(r.doc_id)].records.push_back(r);
  return splits;
}

void write_dataset(const std::array<DatasetSplit, 3>& splits, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());
  for (const auto& s : splits) write_records(dir / (s.name + ".jsonl"), s.records);
}

std::array<DatasetSplit, 3> read_dataset(const fs::path& dir) {
  std::array<DatasetSplit, 3> splits;
  for (int i = 0; i < 3; ++i) {
    splits[i].name = kSplitNames[i];
    splits[i].records = read_records(dir / (splits[i].name + ".jsonl"));
    std::set<std::string> ids;
    for (const auto& r : splits[i].records) ids.insert(r.doc_id);
    splits[i].doc_ids.assign(ids.begin(), ids.end());
  }
  return splits;
}

// ---------------------------------------------------------------------------
// Statistics

double round2(double x) { return std::round(x * 100.0) / 100.0; }

double average(std::size_t total, std::size_t units) {
  return units == 0 ? 0.0 : round2(static_cast<double>(total) / static_cast<double>(units));
}

double percentage(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : round2(100.0 * static_cast<double>(part) / static_cast<double>(whole));
}

namespace {

bool is_text_slot(SlotKind k) {
  return k == SlotKind::kTitleText || k == SlotKind::kFloatLabel || k == SlotKind::kCitation;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  if (from.empty()) return;
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::size_t token_count(const std::string& s) {
  std::istringstream in(s);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

std::vector<std::pair<std::string, std::size_t>> top_k(const std::map<std::string, std::size_t>& counts,
                                                       std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (v.size() > k) v.resize(k);
  return v;
}

}  // namespace

std::string question_pattern(const QARecord& r) {
  std::string q = r.question;
  const auto* tpl = builtin_templates().find(r.template_id);
  // Longer values first so a title never clobbers part of a longer one.
  std::vector<std::string> values;
  for (const auto& [slot, value] : r.binding) {
    const SlotSpec* spec = tpl ? tpl->slot(slot) : nullptr;
    if (spec && is_text_slot(spec->kind)) values.push_back(value);
  }
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& v : values) {
    replace_all(q, "'" + v + "'", "X");
    replace_all(q, v, "X");
  }
  return q;
}

DatasetStats compute_stats(const std::vector<QARecord>& records) {
  struct Acc {
    std::set<std::string> units;
    std::size_t questions = 0;
    std::size_t tokens = 0;
    std::set<std::string> distinct;
    std::map<std::string, std::size_t> qtypes;
    std::map<std::string, std::size_t> first_words;
    std::map<std::string, std::size_t> patterns;
  };
  std::map<std::string, Acc> acc;
  for (const auto& r : records) {
    auto& a = acc[std::string(task_name(r.task))];
    a.units.insert(r.page ? r.doc_id + '\x1f' + std::to_string(*r.page) : r.doc_id);
    ++a.questions;
    a.tokens += token_count(r.question);
    a.distinct.insert(r.question);
    ++a.qtypes[std::string(qtype_name(r.qtype))];
    std::istringstream in(r.question);
    std::string first;
    in >> first;
    ++a.first_words[first];
    ++a.patterns[question_pattern(r)];
  }

  DatasetStats stats;
  for (const auto& [task, a] : acc) {
    TaskStats t;
    t.units = a.units.size();
    t.questions = a.questions;
    t.avg_per_unit = average(a.questions, t.units);
    t.avg_length = average(a.tokens, a.questions);
    t.unique_ratio = percentage(a.distinct.size(), a.questions);
    for (auto q : kAllQuestionTypes) {
      if (task_name(task_of(q)) != task) continue;
      auto it = a.qtypes.find(std::string(qtype_name(q)));
      t.qtype_percent[std::string(qtype_name(q))] = percentage(it == a.qtypes.end() ? 0 : it->second, a.questions);
    }
    t.first_words = top_k(a.first_words, kTopFirstWords);
    t.patterns = top_k(a.patterns, kTopPatterns);
    stats.tasks[task] = std::move(t);
  }
  return stats;
}

DatasetStats compute_stats(const std::array<DatasetSplit, 3>& splits) {
  std::vector<QARecord> all;
  for (const auto& s : splits) all.insert(all.end(), s.records.begin(), s.records.end());
  return compute_stats(all);
}

nlohmann::ordered_json stats_to_json(const DatasetStats& stats) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [task, t] : stats.tasks) {
    nlohmann::ordered_json tj;
    tj[task == "C" ? "documents" : "pages"] = t.units;
    tj["questions"] = t.questions;
    tj["avg_questions_per_unit"] = t.avg_per_unit;
    tj["avg_question_length"] = t.avg_length;
    tj["unique_question_ratio"] = t.unique_ratio;
    tj["qtype_percent"] = nlohmann::ordered_json::object();
    for (const auto& [q, p] : t.qtype_percent) tj["qtype_percent"][q] = p;
    tj["first_words"] = nlohmann::ordered_json::array();
    for (const auto& [w, c] : t.first_words) tj["first_words"].push_back({{"word", w}, {"count", c}});
    tj["patterns"] = nlohmann::ordered_json::array();
    for (const auto& [p, c] : t.patterns) tj["patterns"].push_back({{"pattern", p}, {"count", c}});
    j[task] = std::move(tj);
  }
  return j;
}

}  // namespace forge
