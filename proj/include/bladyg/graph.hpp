#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bladyg/util.hpp"

namespace bladyg {

using VertexId = std::uint64_t;

// Undirected edge in canonical form: u < v always holds after construction.
// Equality is unordered-pair equality by construction.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  Edge() = default;
  Edge(VertexId a, VertexId b) : u(std::min(a, b)), v(std::max(a, b)) {
    if (a == b) throw Error(ErrorCode::SelfLoop, "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
  }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    return static_cast<std::size_t>(mix64_pair(e.u, e.v));
  }
};

struct GraphUpdate {
  enum class Kind { AddEdge, RemoveEdge, AddVertex, RemoveVertex };

  Kind kind = Kind::AddEdge;
  VertexId u = 0;
  VertexId v = 0;  // unused for vertex updates

  static GraphUpdate add_edge(VertexId a, VertexId b) { return {Kind::AddEdge, a, b}; }
  static GraphUpdate remove_edge(VertexId a, VertexId b) { return {Kind::RemoveEdge, a, b}; }
  static GraphUpdate add_vertex(VertexId a) { return {Kind::AddVertex, a, 0}; }
  static GraphUpdate remove_vertex(VertexId a) { return {Kind::RemoveVertex, a, 0}; }

  bool is_edge_update() const { return kind == Kind::AddEdge || kind == Kind::RemoveEdge; }

  friend bool operator==(const GraphUpdate&, const GraphUpdate&) = default;
};

inline std::string to_string(const GraphUpdate& upd) {
  using K = GraphUpdate::Kind;
  switch (upd.kind) {
    case K::AddEdge: return "A " + std::to_string(upd.u) + " " + std::to_string(upd.v);
    case K::RemoveEdge: return "D " + std::to_string(upd.u) + " " + std::to_string(upd.v);
    case K::AddVertex: return "AV " + std::to_string(upd.u);
    case K::RemoveVertex: return "DV " + std::to_string(upd.u);
  }
  return {};
}

// In-memory undirected simple graph. Adjacency lists are kept sorted
// ascending so adj_less/adj_greater are prefix/suffix slices and iteration
// order is deterministic everywhere.
//
// Vertex and edge values are opaque byte strings; the graph stores them but
// never looks inside.
class Graph {
 public:
  bool has_vertex(VertexId u) const { return adj_.count(u) != 0; }

  bool has_edge(VertexId a, VertexId b) const {
    auto it = adj_.find(a);
    if (it == adj_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), b);
  }

  // Idempotent: adding a vertex that exists is a no-op.
  void add_vertex(VertexId u) { adj_.try_emplace(u); }

  // Unknown endpoints are created implicitly.
  void add_edge(VertexId a, VertexId b, std::string value = {}) {
    if (a == b) throw Error(ErrorCode::SelfLoop, "add_edge(" + std::to_string(a) + "," + std::to_string(b) + ")");
    if (has_edge(a, b))
      throw Error(ErrorCode::DuplicateEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) + ") exists");
    insert_sorted(adj_[a], b);
    insert_sorted(adj_[b], a);
    ++edge_count_;
    if (!value.empty()) edge_values_[Edge(a, b)] = std::move(value);
  }

  void remove_edge(VertexId a, VertexId b) {
    if (!has_edge(a, b))
      throw Error(ErrorCode::MissingEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    erase_sorted(adj_[a], b);
    erase_sorted(adj_[b], a);
    --edge_count_;
    edge_values_.erase(Edge(a, b));
  }

  // Removes the vertex and every incident edge.
  void remove_vertex(VertexId u) {
    auto it = adj_.find(u);
    if (it == adj_.end()) throw Error(ErrorCode::MissingVertex, "vertex " + std::to_string(u));
    for (VertexId w : it->second) {
      erase_sorted(adj_[w], u);
      edge_values_.erase(Edge(u, w));
      --edge_count_;
    }
    adj_.erase(it);
    vertex_values_.erase(u);
  }

  std::size_t degree(VertexId u) const { return neighbors(u).size(); }

  const std::vector<VertexId>& neighbors(VertexId u) const {
    auto it = adj_.find(u);
    if (it == adj_.end()) throw Error(ErrorCode::MissingVertex, "vertex " + std::to_string(u));
    return it->second;
  }

  // Neighbors w of u with w < u (prefix of the sorted adjacency list).
  std::span<const VertexId> adj_less(VertexId u) const {
    const auto& n = neighbors(u);
    auto cut = std::lower_bound(n.begin(), n.end(), u);
    return {n.data(), static_cast<std::size_t>(cut - n.begin())};
  }

  // Neighbors w of u with w > u.
  std::span<const VertexId> adj_greater(VertexId u) const {
    const auto& n = neighbors(u);
    auto cut = std::upper_bound(n.begin(), n.end(), u);
    return {n.data() + (cut - n.begin()), static_cast<std::size_t>(n.end() - cut)};
  }

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  // Ascending vertex iteration.
  template <typename F>
  void for_each_vertex(F&& f) const {
    for (const auto& [u, _] : adj_) f(u);
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(adj_.size());
    for (const auto& [u, _] : adj_) out.push_back(u);
    return out;
  }

  // Canonical ascending edge enumeration.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (const auto& [u, nbrs] : adj_)
      for (VertexId w : nbrs)
        if (u < w) out.push_back(Edge(u, w));
    return out;
  }

  void set_vertex_value(VertexId u, std::string value) {
    if (!has_vertex(u)) throw Error(ErrorCode::MissingVertex, "vertex " + std::to_string(u));
    vertex_values_[u] = std::move(value);
  }

  std::string vertex_value(VertexId u) const {
    auto it = vertex_values_.find(u);
    return it == vertex_values_.end() ? std::string{} : it->second;
  }

  std::string edge_value(VertexId a, VertexId b) const {
    auto it = edge_values_.find(Edge(a, b));
    return it == edge_values_.end() ? std::string{} : it->second;
  }

  // Applies one update, validating first so a rejected update never mutates.
  void apply(const GraphUpdate& upd) {
    using K = GraphUpdate::Kind;
    switch (upd.kind) {
      case K::AddEdge: add_edge(upd.u, upd.v); break;
      case K::RemoveEdge: remove_edge(upd.u, upd.v); break;
      case K::AddVertex: add_vertex(upd.u); break;
      case K::RemoveVertex: remove_vertex(upd.u); break;
    }
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adj_ == b.adj_;
  }

 private:
  static void insert_sorted(std::vector<VertexId>& v, VertexId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }

  static void erase_sorted(std::vector<VertexId>& v, VertexId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  }

  std::map<VertexId, std::vector<VertexId>> adj_;
  std::size_t edge_count_ = 0;
  std::unordered_map<VertexId, std::string> vertex_values_;
  std::unordered_map<Edge, std::string, EdgeHash> edge_values_;
};

// The inverse of an update, where defined. RemoveVertex is not invertible
// once incident edges are gone, so callers must capture those separately.
inline GraphUpdate inverse(const GraphUpdate& upd) {
  using K = GraphUpdate::Kind;
  switch (upd.kind) {
    case K::AddEdge: return GraphUpdate::remove_edge(upd.u, upd.v);
    case K::RemoveEdge: return GraphUpdate::add_edge(upd.u, upd.v);
    case K::AddVertex: return GraphUpdate::remove_vertex(upd.u);
    case K::RemoveVertex: return GraphUpdate::add_vertex(upd.u);
  }
  throw Error(ErrorCode::InvalidArgument, "bad update kind");
}

}  // namespace bladyg
