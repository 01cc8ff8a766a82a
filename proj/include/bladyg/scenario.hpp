#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bladyg/block.hpp"
#include "bladyg/graph.hpp"
#include "bladyg/partitioning.hpp"
#include "bladyg/util.hpp"

namespace bladyg {

enum class ScenarioKind { Inter, Intra };

inline const char* to_string(ScenarioKind k) {
  return k == ScenarioKind::Inter ? "inter" : "intra";
}

// n random non-existing edges whose endpoints lie in different blocks
// (inter) or the same block (intra) of the assignment-derived vertex
// ownership; reproducible per seed. The rejection loop is bounded so an
// impossible constraint (e.g. inter with K=1) reports instead of spinning.
inline std::vector<GraphUpdate> gen_scenario(const Graph& g, const PartitionAssignment& pa,
                                             ScenarioKind kind, std::size_t n,
                                             std::uint64_t seed) {
  std::map<VertexId, BlockId> owner = derive_owners(g, pa);
  std::vector<VertexId> verts = g.vertices();
  if (verts.size() < 2)
    throw Error(ErrorCode::InsufficientCandidates, "graph too small for a scenario");

  Rng rng(mix64(seed));
  std::vector<GraphUpdate> out;
  std::set<Edge> chosen;
  const std::size_t max_attempts = 1000 * (n + 16);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > max_attempts)
      throw Error(ErrorCode::InsufficientCandidates,
                  std::string("could not find ") + std::to_string(n) + " " +
                      to_string(kind) + "-block non-edges");
    VertexId u = verts[draw_index(rng, verts.size())];
    VertexId v = verts[draw_index(rng, verts.size())];
    if (u == v) continue;
    bool same = owner.at(u) == owner.at(v);
    if (kind == ScenarioKind::Inter && same) continue;
    if (kind == ScenarioKind::Intra && !same) continue;
    Edge e(u, v);
    if (g.has_edge(u, v) || chosen.count(e)) continue;
    chosen.insert(e);
    out.push_back(GraphUpdate::add_edge(e.u, e.v));
  }
  return out;
}

// The deletion phase of a scenario: the same edges, removed in insertion
// order.
inline std::vector<GraphUpdate> deletion_phase(const std::vector<GraphUpdate>& insertions) {
  std::vector<GraphUpdate> out;
  out.reserve(insertions.size());
  for (const GraphUpdate& upd : insertions) {
    if (upd.kind != GraphUpdate::Kind::AddEdge)
      throw Error(ErrorCode::InvalidArgument, "scenario must be insertions");
    out.push_back(GraphUpdate::remove_edge(upd.u, upd.v));
  }
  return out;
}

// Uniform G(n, m)-style random graph on ids [0, n); reproducible per seed.
inline Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  Graph g;
  for (VertexId u = 0; u < n; ++u) g.add_vertex(u);
  Rng rng(mix64(seed));
  std::size_t attempts = 0;
  while (g.edge_count() < m) {
    if (++attempts > 100 * (m + 16))
      throw Error(ErrorCode::InvalidArgument, "too many edges requested");
    VertexId u = draw_index(rng, n);
    VertexId v = draw_index(rng, n);
    if (u == v || g.has_edge(u, v)) continue;
    g.add_edge(u, v);
  }
  return g;
}

// G(n, p) random graph; reproducible per seed.
inline Graph random_graph_gnp(std::size_t n, double p, std::uint64_t seed) {
  Graph g;
  for (VertexId u = 0; u < n; ++u) g.add_vertex(u);
  Rng rng(mix64(seed));
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (draw_unit(rng) < p) g.add_edge(u, v);
  return g;
}

// Connected random graph: a random spanning tree plus extra random edges.
inline Graph connected_random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2 || m + 1 < n) throw Error(ErrorCode::InvalidArgument, "need m >= n-1, n >= 2");
  Graph g;
  for (VertexId u = 0; u < n; ++u) g.add_vertex(u);
  Rng rng(mix64(seed));
  for (VertexId u = 1; u < n; ++u) g.add_edge(u, draw_index(rng, u));
  std::size_t attempts = 0;
  while (g.edge_count() < m) {
    if (++attempts > 200 * (m + 16))
      throw Error(ErrorCode::InvalidArgument, "too many edges requested");
    VertexId u = draw_index(rng, n);
    VertexId v = draw_index(rng, n);
    if (u == v || g.has_edge(u, v)) continue;
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace bladyg
