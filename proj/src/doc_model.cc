#include "forge/doc_model.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <tuple>

#include "forge/error.h"

namespace forge {

namespace {

constexpr double kColumnGap = 0.25;
constexpr double kCaptionMaxDistance = 0.08;
constexpr double kDistanceSlack = 1e-12;

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedInput, what); }

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) malformed(where + ": missing \"" + key + "\"");
  return *it;
}

double require_positive_number(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_number()) malformed(where + ": \"" + key + "\" must be a number");
  double d = v.get<double>();
  if (!(d > 0) || !std::isfinite(d)) malformed(where + ": \"" + key + "\" must be positive");
  return d;
}

// Edge-to-edge gap between two boxes (0 when they touch or overlap).
double box_gap(const BoundingBox& a, const BoundingBox& b) {
  double dx = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
  double dy = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
  return std::hypot(dx, dy);
}

}  // namespace

bool BoundingBox::valid() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  return x0 < x1 && y0 < y1 && in01(x0) && in01(x1) && in01(y0) && in01(y1);
}

std::string_view category_name(ElementCategory c) {
  switch (c) {
    case ElementCategory::kTitle: return "title";
    case ElementCategory::kText: return "text";
    case ElementCategory::kList: return "list";
    case ElementCategory::kTable: return "table";
    case ElementCategory::kFigure: return "figure";
    case ElementCategory::kTableCaption: return "table_caption";
    case ElementCategory::kFigureCaption: return "figure_caption";
  }
  return "text";
}

std::optional<ElementCategory> parse_category(std::string_view name) {
  static constexpr std::array kAll = {ElementCategory::kTitle,        ElementCategory::kText,
                                      ElementCategory::kList,         ElementCategory::kTable,
                                      ElementCategory::kFigure,       ElementCategory::kTableCaption,
                                      ElementCategory::kFigureCaption};
  for (auto c : kAll) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view task_name(TaskId t) {
  switch (t) {
    case TaskId::kA: return "A";
    case TaskId::kB: return "B";
    case TaskId::kC: return "C";
  }
  return "A";
}

std::optional<TaskId> parse_task(std::string_view s) {
  if (s == "A" || s == "a") return TaskId::kA;
  if (s == "B" || s == "b") return TaskId::kB;
  if (s == "C" || s == "c") return TaskId::kC;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Document

const DocElement* Document::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return nullptr;
  return &pages[it->second.first].elements[it->second.second];
}

std::size_t Document::element_count() const {
  std::size_t n = 0;
  for (const auto& p : pages) n += p.elements.size();
  return n;
}

std::vector<const DocElement*> Document::elements_in_reading_order() const {
  std::vector<const DocElement*> out;
  out.reserve(element_count());
  for (const auto& p : pages) {
    for (const auto& e : p.elements) out.push_back(&e);
  }
  std::stable_sort(out.begin(), out.end(), [](const DocElement* a, const DocElement* b) {
    if (a->page_index != b->page_index) return a->page_index < b->page_index;
    return a->page_reading_index < b->page_reading_index;
  });
  return out;
}

void Document::reindex() {
  by_id_.clear();
  for (int p = 0; p < static_cast<int>(pages.size()); ++p) {
    for (int i = 0; i < static_cast<int>(pages[p].elements.size()); ++i) {
      by_id_[pages[p].elements[i].id] = {p, i};
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

Document parse_document(std::string_view raw) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  return document_from_json(j);
}

Document document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) malformed("document must be a JSON object");
  Document doc;
  const auto& id = require(j, "doc_id", "document");
  if (!id.is_string() || id.get<std::string>().empty()) malformed("doc_id must be a nonempty string");
  doc.doc_id = id.get<std::string>();

  if (auto it = j.find("references"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) malformed("references must be an array");
    for (const auto& r : *it) {
      if (!r.is_string()) malformed("references entries must be strings");
      doc.references.push_back(r.get<std::string>());
    }
  }

  const auto& pages = require(j, "pages", "document");
  if (!pages.is_array()) malformed("pages must be an array");
  std::set<std::string> seen;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const auto& pj = pages[p];
    std::string where = "page " + std::to_string(p);
    if (!pj.is_object()) malformed(where + ": must be an object");
    Page page;
    const auto& idx = require(pj, "index", where);
    if (!idx.is_number_integer() || idx.get<long long>() != static_cast<long long>(p)) {
      malformed(where + ": index must equal its position");
    }
    page.index = static_cast<int>(p);
    page.width = require_positive_number(pj, "width", where);
    page.height = require_positive_number(pj, "height", where);

    const auto& elems = require(pj, "elements", where);
    if (!elems.is_array()) malformed(where + ": elements must be an array");
    for (const auto& ej : elems) {
      if (!ej.is_object()) malformed(where + ": element must be an object");
      DocElement e;
      const auto& eid = require(ej, "id", where);
      if (!eid.is_string() || eid.get<std::string>().empty()) malformed(where + ": element id must be a nonempty string");
      e.id = eid.get<std::string>();
      std::string ewhere = where + " element " + e.id;

      const auto& cat = require(ej, "category", ewhere);
      if (!cat.is_string()) malformed(ewhere + ": category must be a string");
      auto parsed = parse_category(cat.get<std::string>());
      if (!parsed) malformed(ewhere + ": unknown category \"" + cat.get<std::string>() + "\"");
      e.category = *parsed;

      const auto& bb = require(ej, "bbox", ewhere);
      if (!bb.is_array() || bb.size() != 4) malformed(ewhere + ": bbox must be [x0,y0,x1,y1]");
      for (int k = 0; k < 4; ++k) {
        if (!bb[k].is_number()) malformed(ewhere + ": bbox entries must be numbers");
        e.source_bbox[k] = bb[k].get<double>();
      }
      const auto& s = e.source_bbox;
      if (!(s[0] < s[2]) || !(s[1] < s[3])) throw Error(ErrorCode::kInvalidBBox, ewhere + ": degenerate box");
      if (s[0] < 0 || s[1] < 0 || s[2] > page.width || s[3] > page.height) {
        throw Error(ErrorCode::kInvalidBBox, ewhere + ": box outside page");
      }
      e.bbox = {s[0] / page.width, s[1] / page.height, s[2] / page.width, s[3] / page.height};

      if (auto t = ej.find("text"); t != ej.end() && !t->is_null()) {
        if (!t->is_string()) malformed(ewhere + ": text must be a string");
        e.text = t->get<std::string>();
      }
      if (auto pid = ej.find("parent_id"); pid != ej.end() && !pid->is_null()) {
        if (!pid->is_string()) malformed(ewhere + ": parent_id must be a string or null");
        e.parent_id = pid->get<std::string>();
      }
      if (!seen.insert(e.id).second) throw Error(ErrorCode::kDuplicateId, "element id \"" + e.id + "\" repeated");
      e.page_index = page.index;
      page.elements.push_back(std::move(e));
    }
    doc.pages.push_back(std::move(page));
  }
  doc.reindex();
  return doc;
}

nlohmann::json serialize_document(const Document& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["references"] = doc.references;
  j["pages"] = nlohmann::json::array();
  for (const auto& p : doc.pages) {
    nlohmann::json pj;
    pj["index"] = p.index;
    pj["width"] = p.width;
    pj["height"] = p.height;
    pj["elements"] = nlohmann::json::array();
    for (const auto& e : p.elements) {
      nlohmann::json ej;
      ej["id"] = e.id;
      ej["category"] = category_name(e.category);
      ej["bbox"] = e.source_bbox;
      ej["text"] = e.text;
      ej["parent_id"] = e.parent_id ? nlohmann::json(*e.parent_id) : nlohmann::json(nullptr);
      pj["elements"].push_back(std::move(ej));
    }
    j["pages"].push_back(std::move(pj));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Reading order

Page assign_reading_order(Page page) {
  auto& elems = page.elements;
  const std::size_t n = elems.size();
  if (n == 0) return page;

  // Single-linkage clustering of x-centers into columns.
  std::vector<std::size_t> by_cx(n);
  std::iota(by_cx.begin(), by_cx.end(), 0);
  std::stable_sort(by_cx.begin(), by_cx.end(),
                   [&](std::size_t a, std::size_t b) { return elems[a].bbox.cx() < elems[b].bbox.cx(); });
  std::vector<int> column(n, 0);
  int col = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (elems[by_cx[k]].bbox.cx() - elems[by_cx[k - 1]].bbox.cx() > kColumnGap) ++col;
    column[by_cx[k]] = col;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = elems[a];
    const auto& eb = elems[b];
    return std::tie(column[a], ea.bbox.y0, ea.bbox.x0, ea.id) <
           std::tie(column[b], eb.bbox.y0, eb.bbox.x0, eb.id);
  });

  std::vector<DocElement> sorted;
  sorted.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    sorted.push_back(std::move(elems[order[k]]));
    sorted.back().page_reading_index = static_cast<int>(k);
  }
  elems = std::move(sorted);
  return page;
}

// ---------------------------------------------------------------------------
// Captions

Page associate_captions(Page page) {
  auto& elems = page.elements;

  struct Candidate {
    double distance;
    int anchor_order;
    int text_order;
    std::size_t anchor;
    std::size_t text;
  };
  auto order_of = [&](std::size_t i) {
    return elems[i].page_reading_index == kUnassigned ? static_cast<int>(i) : elems[i].page_reading_index;
  };
  auto accepts = [&](const DocElement& anchor, const DocElement& cand) {
    if (cand.caption_of) return false;
    if (cand.category == ElementCategory::kText) return true;
    if (anchor.category == ElementCategory::kTable) return cand.category == ElementCategory::kTableCaption;
    return cand.category == ElementCategory::kFigureCaption;
  };

  std::vector<Candidate> below, above;
  for (std::size_t a = 0; a < elems.size(); ++a) {
    const auto& anchor = elems[a];
    if (anchor.category != ElementCategory::kTable && anchor.category != ElementCategory::kFigure) continue;
    for (std::size_t t = 0; t < elems.size(); ++t) {
      if (t == a || !accepts(anchor, elems[t])) continue;
      double d = box_gap(anchor.bbox, elems[t].bbox);
      if (d > kCaptionMaxDistance + kDistanceSlack) continue;
      Candidate c{d, order_of(a), order_of(t), a, t};
      (elems[t].bbox.cy() > anchor.bbox.cy() ? below : above).push_back(c);
    }
  }
  auto by_rank = [](const Candidate& l, const Candidate& r) {
    return std::tie(l.distance, l.anchor_order, l.text_order) < std::tie(r.distance, r.anchor_order, r.text_order);
  };
  std::sort(below.begin(), below.end(), by_rank);
  std::sort(above.begin(), above.end(), by_rank);

  std::vector<bool> anchored(elems.size(), false), consumed(elems.size(), false);
  auto assign = [&](const std::vector<Candidate>& pool) {
    for (const auto& c : pool) {
      if (anchored[c.anchor] || consumed[c.text]) continue;
      anchored[c.anchor] = consumed[c.text] = true;
      auto& cap = elems[c.text];
      cap.category = elems[c.anchor].category == ElementCategory::kTable ? ElementCategory::kTableCaption
                                                                          : ElementCategory::kFigureCaption;
      cap.caption_of = elems[c.anchor].id;
    }
  };
  assign(below);
  assign(above);
  return page;
}

// ---------------------------------------------------------------------------
// Mentions

bool contains_token(std::string_view haystack, std::string_view needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (lower(haystack[i + k]) != lower(needle[k])) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    bool left_ok = i == 0 || !is_alnum(haystack[i - 1]) || !is_alnum(needle.front());
    std::size_t end = i + needle.size();
    bool right_ok = end == haystack.size() || !is_alnum(haystack[end]) || !is_alnum(needle.back());
    if (left_ok && right_ok) return true;
  }
  return false;
}

namespace {

// Scans for "table N", "figure N", "fig. N" at word boundaries.
void collect_float_labels(std::string_view text, std::set<std::string>& out) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 3> kPrefixes = {{
      {"table", "Table"}, {"figure", "Figure"}, {"fig.", "Figure"}}};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i > 0 && is_alnum(text[i - 1])) continue;
    for (const auto& [prefix, canon] : kPrefixes) {
      if (i + prefix.size() > text.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (lower(text[i + k]) != prefix[k]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      std::size_t j = i + prefix.size();
      std::size_t spaces = 0;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\n')) ++j, ++spaces;
      if (spaces == 0 && prefix.back() != '.') continue;
      std::size_t digits_start = j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == digits_start) continue;
      if (j < text.size() && is_alnum(text[j])) continue;
      out.insert(std::string(canon) + " " + std::string(text.substr(digits_start, j - digits_start)));
    }
  }
}

}  // namespace

std::optional<std::string> canonical_float_label(std::string_view text) {
  if (text.empty() || !std::isdigit(static_cast<unsigned char>(text.back()))) return std::nullopt;
  if (lower(text.front()) != 't' && lower(text.front()) != 'f') return std::nullopt;
  std::set<std::string> found;
  collect_float_labels(text, found);
  if (found.size() != 1) return std::nullopt;
  // The label must span the whole string: "Figure 3", not "Figure 3 and 4".
  const auto first_digit = text.find_first_of("0123456789");
  if (text.find_first_not_of("0123456789", first_digit) != std::string_view::npos) return std::nullopt;
  for (char c : text.substr(0, first_digit)) {
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '.' && c != ' ') return std::nullopt;
  }
  return *found.begin();
}

Document build_mention_index(Document doc) {
  doc.mention_index.clear();
  for (const auto& p : doc.pages) {
    for (const auto& e : p.elements) {
      if (e.category != ElementCategory::kText && e.category != ElementCategory::kList) continue;
      std::set<std::string> labels;
      collect_float_labels(e.text, labels);
      for (const auto& l : labels) doc.mention_index[l].insert(e.id);
      for (const auto& ref : doc.references) {
        if (contains_token(e.text, ref)) doc.mention_index[ref].insert(e.id);
      }
    }
  }
  return doc;
}

Document preprocess(Document doc) {
  int next = 0;
  for (auto& p : doc.pages) {
    p = associate_captions(assign_reading_order(std::move(p)));
    for (auto& e : p.elements) e.doc_reading_index = next++;
  }
  doc = build_mention_index(std::move(doc));
  doc.reindex();
  return doc;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_for_generation(const Document& doc, TaskId task) {
  ValidationReport report;
  report.task = task;
  const std::size_t total = doc.element_count();
  if (total == 0) {
    report.document_excluded = true;
    report.exclusions.push_back({doc.doc_id, std::nullopt, "no elements"});
    return report;
  }
  if (task == TaskId::kC) {
    if (total > static_cast<std::size_t>(kMaxDocumentElements)) {
      report.document_excluded = true;
      report.exclusions.push_back({doc.doc_id, std::nullopt,
                                   "document has " + std::to_string(total) + " elements (limit " +
                                       std::to_string(kMaxDocumentElements) + ")"});
      return report;
    }
    for (const auto& p : doc.pages) report.eligible_pages.push_back(p.index);
    return report;
  }
  for (const auto& p : doc.pages) {
    if (p.elements.empty()) {
      report.exclusions.push_back({doc.doc_id, p.index, "no elements"});
    } else if (p.elements.size() > static_cast<std::size_t>(kMaxPageElements)) {
      report.exclusions.push_back({doc.doc_id, p.index,
                                   "page has " + std::to_string(p.elements.size()) + " elements (limit " +
                                       std::to_string(kMaxPageElements) + ")"});
    } else {
      report.eligible_pages.push_back(p.index);
    }
  }
  return report;
}

}  // namespace forge
