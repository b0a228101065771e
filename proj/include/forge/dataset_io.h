#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forge/generator.h"

namespace forge {

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over path.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// One annotation file, or every *.json file of a directory in name order.
// Documents come back preprocessed.
std::vector<Document> load_corpus(const std::filesystem::path& path);

nlohmann::ordered_json record_to_json(const QARecord& r);
QARecord record_from_json(const nlohmann::json& j);

std::string records_to_jsonl(const std::vector<QARecord>& records);
std::vector<QARecord> records_from_jsonl(std::string_view text, const std::string& source = "<input>");
void write_records(const std::filesystem::path& path, const std::vector<QARecord>& records);
std::vector<QARecord> read_records(const std::filesystem::path& path);

struct DatasetSplit {
  std::string name;  // train | valid | test
  std::vector<QARecord> records;
  std::vector<std::string> doc_ids;  // sorted

  bool operator==(const DatasetSplit&) const = default;
};

inline constexpr std::array<const char*, 3> kSplitNames = {"train", "valid", "test"};

// Documents are shuffled with the seed and cut by largest-remainder rounding;
// records follow their document.
std::array<DatasetSplit, 3> split_corpus(const std::vector<QARecord>& records, const std::vector<double>& ratios,
                                         std::uint64_t seed);

// Largest-remainder apportionment of n items.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& ratios);

void write_dataset(const std::array<DatasetSplit, 3>& splits, const std::filesystem::path& dir);
std::array<DatasetSplit, 3> read_dataset(const std::filesystem::path& dir);

double round2(double x);
// Rounded to two decimals; 0 when the denominator is 0.
double average(std::size_t total, std::size_t units);
double percentage(std::size_t part, std::size_t whole);

struct TaskStats {
  std::size_t units = 0;  // pages for Task A/B, documents for Task C
  std::size_t questions = 0;
  double avg_per_unit = 0;
  double avg_length = 0;       // whitespace tokens
  double unique_ratio = 0;     // percent of distinct question strings
  std::map<std::string, double> qtype_percent;
  std::vector<std::pair<std::string, std::size_t>> first_words;
  std::vector<std::pair<std::string, std::size_t>> patterns;
};

struct DatasetStats {
  std::map<std::string, TaskStats> tasks;
};

inline constexpr std::size_t kTopFirstWords = 4;
inline constexpr std::size_t kTopPatterns = 15;

// Question text with text-valued bindings replaced by "X".
std::string question_pattern(const QARecord& r);

DatasetStats compute_stats(const std::vector<QARecord>& records);
DatasetStats compute_stats(const std::array<DatasetSplit, 3>& splits);
nlohmann::ordered_json stats_to_json(const DatasetStats& stats);

}  // namespace forge
