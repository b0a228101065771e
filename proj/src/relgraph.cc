#include "forge/relgraph.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "forge/error.h"

namespace forge {

SpatialRelation inverse(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::kTop: return SpatialRelation::kBottom;
    case SpatialRelation::kBottom: return SpatialRelation::kTop;
    case SpatialRelation::kLeft: return SpatialRelation::kRight;
    case SpatialRelation::kRight: return SpatialRelation::kLeft;
    case SpatialRelation::kTopLeft: return SpatialRelation::kBottomRight;
    case SpatialRelation::kBottomRight: return SpatialRelation::kTopLeft;
    case SpatialRelation::kTopRight: return SpatialRelation::kBottomLeft;
    case SpatialRelation::kBottomLeft: return SpatialRelation::kTopRight;
  }
  return r;
}

std::string_view relation_name(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::kTop: return "top";
    case SpatialRelation::kBottom: return "bottom";
    case SpatialRelation::kLeft: return "left";
    case SpatialRelation::kRight: return "right";
    case SpatialRelation::kTopLeft: return "top-left";
    case SpatialRelation::kTopRight: return "top-right";
    case SpatialRelation::kBottomLeft: return "bottom-left";
    case SpatialRelation::kBottomRight: return "bottom-right";
  }
  return "top";
}

std::optional<SpatialRelation> parse_relation(std::string_view name) {
  for (auto r : kAllRelations) {
    if (relation_name(r) == name) return r;
  }
  return std::nullopt;
}

bool is_diagonal(SpatialRelation r) {
  return r == SpatialRelation::kTopLeft || r == SpatialRelation::kTopRight || r == SpatialRelation::kBottomLeft ||
         r == SpatialRelation::kBottomRight;
}

std::optional<SpatialRelation> spatial_relation(const BoundingBox& a, const BoundingBox& b) {
  const double dx = b.cx() - a.cx();
  const double dy = b.cy() - a.cy();
  const double ox = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0)) / std::min(a.width(), b.width());
  const double oy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0)) / std::min(a.height(), b.height());
  const bool x_aligned = ox >= kOverlapThreshold - kOverlapSlack;
  const bool y_aligned = oy >= kOverlapThreshold - kOverlapSlack;

  if (x_aligned && y_aligned) return std::nullopt;
  if (x_aligned) {
    if (dy < -kDisplacementEpsilon) return SpatialRelation::kTop;
    if (dy > kDisplacementEpsilon) return SpatialRelation::kBottom;
    return std::nullopt;
  }
  if (y_aligned) {
    if (dx < -kDisplacementEpsilon) return SpatialRelation::kLeft;
    if (dx > kDisplacementEpsilon) return SpatialRelation::kRight;
    return std::nullopt;
  }
  if (std::abs(dx) <= kDisplacementEpsilon || std::abs(dy) <= kDisplacementEpsilon) return std::nullopt;
  if (dy < 0) return dx < 0 ? SpatialRelation::kTopLeft : SpatialRelation::kTopRight;
  return dx < 0 ? SpatialRelation::kBottomLeft : SpatialRelation::kBottomRight;
}

// ---------------------------------------------------------------------------
// SpatialGraph

void SpatialGraph::add(std::string src, std::string dst, SpatialRelation rel) {
  add_node(src);
  add_node(dst);
  auto [it, inserted] = edges_.emplace(std::make_pair(src, dst), rel);
  if (!inserted) return;
  nodes_[src].emplace_back(std::move(dst), rel);
}

std::optional<SpatialRelation> SpatialGraph::relation(std::string_view src, std::string_view dst) const {
  auto it = edges_.find({std::string(src), std::string(dst)});
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<SpatialEdge> SpatialGraph::edges() const {
  std::vector<SpatialEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, rel] : edges_) out.push_back({key.first, key.second, rel});
  return out;
}

const std::vector<std::pair<std::string, SpatialRelation>>& SpatialGraph::out_edges(std::string_view src) const {
  static const std::vector<std::pair<std::string, SpatialRelation>> kEmpty;
  auto it = nodes_.find(std::string(src));
  return it == nodes_.end() ? kEmpty : it->second;
}

SpatialGraph build_spatial_graph(const Page& page) {
  SpatialGraph g;
  g.page_index = page.index;
  for (const auto& a : page.elements) {
    g.add_node(a.id);
    for (const auto& b : page.elements) {
      if (&a == &b) continue;
      if (auto rel = spatial_relation(a.bbox, b.bbox)) g.add(a.id, b.id, *rel);
    }
  }
  return g;
}

namespace {

bool coarse_match(SpatialRelation query, SpatialRelation edge) {
  if (query == edge) return true;
  switch (query) {
    case SpatialRelation::kTop: return edge == SpatialRelation::kTopLeft || edge == SpatialRelation::kTopRight;
    case SpatialRelation::kBottom:
      return edge == SpatialRelation::kBottomLeft || edge == SpatialRelation::kBottomRight;
    case SpatialRelation::kLeft: return edge == SpatialRelation::kTopLeft || edge == SpatialRelation::kBottomLeft;
    case SpatialRelation::kRight:
      return edge == SpatialRelation::kTopRight || edge == SpatialRelation::kBottomRight;
    default: return false;
  }
}

}  // namespace

std::vector<std::string> query_related(const SpatialGraph& graph, const Page& page, std::string_view anchor,
                                       SpatialRelation rel, bool coarse) {
  if (!graph.has_node(anchor)) throw Error(ErrorCode::kUnknownElement, "no element \"" + std::string(anchor) + "\" on page");
  std::set<std::string, std::less<>> hits;
  for (const auto& [dst, edge_rel] : graph.out_edges(anchor)) {
    if (coarse ? coarse_match(rel, edge_rel) : rel == edge_rel) hits.insert(dst);
  }
  std::vector<std::string> out;
  for (const auto& e : page.elements) {
    if (hits.count(e.id)) out.push_back(e.id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LogicalGraph

const std::vector<std::string>& LogicalGraph::children(std::string_view id) const {
  static const std::vector<std::string> kNone;
  if (!contains(id)) throw Error(ErrorCode::kUnknownElement, "no element \"" + std::string(id) + "\" in graph");
  auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

std::optional<std::string> LogicalGraph::parent(std::string_view id) const {
  if (id == kRootId) return std::nullopt;
  auto it = parent_of.find(std::string(id));
  if (it == parent_of.end()) throw Error(ErrorCode::kUnknownElement, "no element \"" + std::string(id) + "\" in graph");
  return it->second;
}

bool LogicalGraph::contains(std::string_view id) const {
  return id == kRootId || parent_of.count(std::string(id)) > 0;
}

int title_level(std::string_view title) {
  std::size_t i = 0;
  while (i < title.size() && std::isspace(static_cast<unsigned char>(title[i]))) ++i;
  int components = 0;
  while (i < title.size() && std::isdigit(static_cast<unsigned char>(title[i]))) {
    while (i < title.size() && std::isdigit(static_cast<unsigned char>(title[i]))) ++i;
    ++components;
    if (i < title.size() && title[i] == '.') {
      ++i;
      continue;
    }
    break;
  }
  if (components == 0) return 1;
  // The prefix must be followed by whitespace (or end) to count as numbering.
  if (i < title.size() && !std::isspace(static_cast<unsigned char>(title[i]))) return 1;
  return components;
}

namespace {

void check_acyclic(const std::map<std::string, std::string>& parent_of) {
  // 0 = unvisited, 1 = on current path, 2 = done
  std::map<std::string, int> state;
  for (const auto& [start, _] : parent_of) {
    std::vector<std::string> path;
    std::string cur = start;
    while (cur != kRootId && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = parent_of.at(cur);
    }
    if (cur != kRootId && state[cur] == 1) {
      throw Error(ErrorCode::kCyclicParentInput, "parent chain through \"" + cur + "\" forms a cycle");
    }
    for (const auto& p : path) state[p] = 2;
  }
}

}  // namespace

LogicalGraph build_logical_graph(const Document& doc) {
  LogicalGraph g;
  g.doc_id = doc.doc_id;
  const auto ordered = doc.elements_in_reading_order();
  const bool explicit_parents =
      std::any_of(ordered.begin(), ordered.end(), [](const DocElement* e) { return e->parent_id.has_value(); });

  if (explicit_parents) {
    for (const auto* e : ordered) {
      if (!e->parent_id) {
        g.parent_of[e->id] = std::string(kRootId);
        continue;
      }
      if (!doc.find(*e->parent_id)) {
        throw Error(ErrorCode::kDanglingParent, "\"" + e->id + "\" names unknown parent \"" + *e->parent_id + "\"");
      }
      if (*e->parent_id == e->id) throw Error(ErrorCode::kCyclicParentInput, "\"" + e->id + "\" is its own parent");
      g.parent_of[e->id] = *e->parent_id;
    }
    check_acyclic(g.parent_of);
  } else {
    std::vector<std::pair<std::string, int>> open;  // title id, level
    for (const auto* e : ordered) {
      if (e->category == ElementCategory::kTitle) {
        const int level = title_level(e->text);
        while (!open.empty() && open.back().second >= level) open.pop_back();
        g.parent_of[e->id] = open.empty() ? std::string(kRootId) : open.back().first;
        open.emplace_back(e->id, level);
      } else {
        g.parent_of[e->id] = open.empty() ? std::string(kRootId) : open.back().first;
      }
    }
  }

  // A caption always owns its float.
  for (const auto* e : ordered) {
    if (!e->caption_of) continue;
    const std::string& f = *e->caption_of;
    const std::string float_parent = g.parent_of[f];
    g.parent_of[f] = e->id;
    if (g.parent_of[e->id] == f) g.parent_of[e->id] = float_parent == e->id ? std::string(kRootId) : float_parent;
  }
  if (explicit_parents) check_acyclic(g.parent_of);

  for (const auto* e : ordered) g.children_[g.parent_of[e->id]].push_back(e->id);
  return g;
}

std::optional<std::string> owning_title(const LogicalGraph& graph, const Document& doc, std::string_view id) {
  auto cur = graph.parent(id);
  while (cur && *cur != kRootId) {
    const auto* e = doc.find(*cur);
    if (e && e->category == ElementCategory::kTitle) return cur;
    cur = graph.parent(*cur);
  }
  return std::nullopt;
}

DocumentGraphs build_graphs(const Document& doc) {
  DocumentGraphs g;
  g.logical = build_logical_graph(doc);
  g.spatial.reserve(doc.pages.size());
  for (const auto& p : doc.pages) g.spatial.push_back(build_spatial_graph(p));
  return g;
}

nlohmann::json graph_dump(const Document& doc, const DocumentGraphs& graphs, std::optional<int> page) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  std::vector<SpatialEdge> edges;
  for (const auto& sg : graphs.spatial) {
    if (page && sg.page_index != *page) continue;
    auto es = sg.edges();
    edges.insert(edges.end(), es.begin(), es.end());
  }
  std::sort(edges.begin(), edges.end(),
            [](const SpatialEdge& a, const SpatialEdge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
  j["spatial_edges"] = nlohmann::json::array();
  for (const auto& e : edges) j["spatial_edges"].push_back({e.src, e.dst, relation_name(e.rel)});
  j["parent_of"] = nlohmann::json::object();
  for (const auto& [child, parent] : graphs.logical.parent_of) {
    if (page) {
      const auto* e = doc.find(child);
      if (!e || e->page_index != *page) continue;
    }
    j["parent_of"][child] = parent;
  }
  return j;
}

}  // namespace forge
