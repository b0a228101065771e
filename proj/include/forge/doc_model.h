#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace forge {

// Page-normalized box, y grows downward.
struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double cx() const { return 0.5 * (x0 + x1); }
  double cy() const { return 0.5 * (y0 + y1); }
  bool valid() const;

  bool operator==(const BoundingBox&) const = default;
};

enum class ElementCategory { kTitle, kText, kList, kTable, kFigure, kTableCaption, kFigureCaption };

std::string_view category_name(ElementCategory c);
std::optional<ElementCategory> parse_category(std::string_view name);

inline constexpr int kUnassigned = -1;

struct DocElement {
  std::string id;
  int page_index = 0;
  BoundingBox bbox;
  std::array<double, 4> source_bbox{};  // as given, in page units
  ElementCategory category = ElementCategory::kText;
  std::string text;
  std::optional<std::string> parent_id;
  // Float this caption belongs to, set by associate_captions.
  std::optional<std::string> caption_of;
  int page_reading_index = kUnassigned;
  int doc_reading_index = kUnassigned;

  bool operator==(const DocElement&) const = default;
};

struct Page {
  int index = 0;
  double width = 0;
  double height = 0;
  std::vector<DocElement> elements;

  bool operator==(const Page&) const = default;
};

class Document {
 public:
  std::string doc_id;
  std::vector<std::string> references;
  std::vector<Page> pages;
  std::map<std::string, std::set<std::string>> mention_index;

  // Location of an element as (page, position within page.elements).
  const DocElement* find(std::string_view id) const;
  std::size_t element_count() const;
  // All elements in doc reading order (page order when indices are unset).
  std::vector<const DocElement*> elements_in_reading_order() const;
  // Rebuilds the id lookup; call after mutating pages directly.
  void reindex();

  bool operator==(const Document& other) const {
    return doc_id == other.doc_id && references == other.references && pages == other.pages &&
           mention_index == other.mention_index;
  }

 private:
  std::unordered_map<std::string, std::pair<int, int>> by_id_;
};

Document parse_document(std::string_view raw);
Document document_from_json(const nlohmann::json& j);
nlohmann::json serialize_document(const Document& doc);

Page assign_reading_order(Page page);
Page associate_captions(Page page);
Document build_mention_index(Document doc);

// Reading order on every page, doc-level indices, captions and mentions.
Document preprocess(Document doc);

// Canonical label for "Table 2" / "fig. 2" style references, or nullopt.
std::optional<std::string> canonical_float_label(std::string_view text);
// Whole-token, case-insensitive containment.
bool contains_token(std::string_view haystack, std::string_view needle);

enum class TaskId { kA, kB, kC };

std::string_view task_name(TaskId t);
std::optional<TaskId> parse_task(std::string_view s);

inline constexpr int kMaxPageElements = 25;
inline constexpr int kMaxDocumentElements = 400;

struct Exclusion {
  std::string doc_id;
  std::optional<int> page;  // nullopt: whole document
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

struct ValidationReport {
  TaskId task = TaskId::kA;
  bool document_excluded = false;
  std::vector<int> eligible_pages;
  std::vector<Exclusion> exclusions;
};

ValidationReport validate_for_generation(const Document& doc, TaskId task);

}  // namespace forge
