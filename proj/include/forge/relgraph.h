#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "forge/doc_model.h"

namespace forge {

enum class SpatialRelation { kTop, kBottom, kLeft, kRight, kTopLeft, kTopRight, kBottomLeft, kBottomRight };

inline constexpr std::array kAllRelations = {
    SpatialRelation::kTop,     SpatialRelation::kBottom,   SpatialRelation::kLeft,       SpatialRelation::kRight,
    SpatialRelation::kTopLeft, SpatialRelation::kTopRight, SpatialRelation::kBottomLeft, SpatialRelation::kBottomRight};

SpatialRelation inverse(SpatialRelation r);
std::string_view relation_name(SpatialRelation r);  // "top", "bottom-left", ...
std::optional<SpatialRelation> parse_relation(std::string_view name);
bool is_diagonal(SpatialRelation r);

inline constexpr double kOverlapThreshold = 0.5;
inline constexpr double kDisplacementEpsilon = 1e-6;
// Absorbs rounding in overlap ratios so exact half-overlaps stay aligned.
inline constexpr double kOverlapSlack = 1e-9;

// Where b sits relative to a, or nullopt when the boxes overlap on both axes
// or the displacement is ambiguous.
std::optional<SpatialRelation> spatial_relation(const BoundingBox& a, const BoundingBox& b);

struct SpatialEdge {
  std::string src;
  std::string dst;
  SpatialRelation rel;

  bool operator==(const SpatialEdge&) const = default;
};

// Edge (src, dst, R) reads "dst is R of src".
class SpatialGraph {
 public:
  int page_index = 0;

  void add(std::string src, std::string dst, SpatialRelation rel);
  bool has_node(std::string_view id) const { return nodes_.count(std::string(id)) > 0; }
  void add_node(const std::string& id) { nodes_.emplace(id, std::vector<std::pair<std::string, SpatialRelation>>{}); }
  std::optional<SpatialRelation> relation(std::string_view src, std::string_view dst) const;
  // Sorted by (src, dst).
  std::vector<SpatialEdge> edges() const;
  const std::vector<std::pair<std::string, SpatialRelation>>& out_edges(std::string_view src) const;

  bool operator==(const SpatialGraph& other) const { return page_index == other.page_index && edges_ == other.edges_; }

 private:
  std::map<std::pair<std::string, std::string>, SpatialRelation> edges_;
  std::map<std::string, std::vector<std::pair<std::string, SpatialRelation>>> nodes_;
};

SpatialGraph build_spatial_graph(const Page& page);

// Ids b with edge (anchor, b, rel), in page reading order. Coarse mode widens
// a cardinal relation to its two adjacent diagonals.
std::vector<std::string> query_related(const SpatialGraph& graph, const Page& page, std::string_view anchor,
                                       SpatialRelation rel, bool coarse);

inline constexpr std::string_view kRootId = "__root__";

class LogicalGraph {
 public:
  std::string doc_id;
  // child -> parent; top-level elements map to kRootId.
  std::map<std::string, std::string> parent_of;

  // Direct children ordered by doc_reading_index.
  const std::vector<std::string>& children(std::string_view id) const;
  // nullopt only for the virtual root.
  std::optional<std::string> parent(std::string_view id) const;
  bool contains(std::string_view id) const;

  bool operator==(const LogicalGraph& other) const {
    return doc_id == other.doc_id && parent_of == other.parent_of;
  }

 private:
  friend LogicalGraph build_logical_graph(const Document& doc);
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
};

// Nesting depth from a numbering prefix: "2." -> 1, "2.3 Data" -> 2; titles
// without a prefix are level 1.
int title_level(std::string_view title);

LogicalGraph build_logical_graph(const Document& doc);

// Nearest Title ancestor of an element (not the element itself).
std::optional<std::string> owning_title(const LogicalGraph& graph, const Document& doc, std::string_view id);

struct DocumentGraphs {
  LogicalGraph logical;
  std::vector<SpatialGraph> spatial;  // one per page
};

DocumentGraphs build_graphs(const Document& doc);

// Dump with "spatial_edges" and "parent_of"; page restricts both to one page.
nlohmann::json graph_dump(const Document& doc, const DocumentGraphs& graphs, std::optional<int> page);

}  // namespace forge
