#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "bladyg/graph.hpp"
#include "bladyg/partitioning.hpp"
#include "bladyg/prefix_tree.hpp"

namespace bladyg {

// Per-vertex algorithm state, attached at the vertex's owning block.
struct VertexState {
  std::uint64_t degree = 0;   // |adj(u)| over local + frontier edges
  std::uint32_t coreness = 0; // k(u)
  BlockId block = 0;          // owning block id
  PrefixTree clique_tree;     // T_u, maximal cliques rooted at u

  friend bool operator==(const VertexState&, const VertexState&) = default;
};

// Edge stub from an owned vertex to a vertex owned by another block.
struct FrontierEdge {
  VertexId local = 0;
  VertexId remote = 0;
  BlockId remote_block = 0;

  friend auto operator<=>(const FrontierEdge&, const FrontierEdge&) = default;
};

// One worker's share of the graph: the vertices it owns, the edges between
// owned vertices (local_graph), and stubs for edges that cross into other
// blocks. The owner of a vertex sees that vertex's full adjacency as
// local neighbors plus frontier remotes.
class Block {
 public:
  Block() = default;
  explicit Block(BlockId id) : block_id_(id) {}

  BlockId id() const { return block_id_; }

  Graph& local_graph() { return local_; }
  const Graph& local_graph() const { return local_; }

  bool owns(VertexId u) const { return local_.has_vertex(u); }

  // Adds an owned vertex with default state.
  void add_owned_vertex(VertexId u) {
    local_.add_vertex(u);
    auto& st = states_[u];
    st.block = block_id_;
    if (st.clique_tree.root() != u) st.clique_tree = PrefixTree(u);
  }

  void add_local_edge(VertexId u, VertexId v) { local_.add_edge(u, v); }
  void remove_local_edge(VertexId u, VertexId v) { local_.remove_edge(u, v); }

  void add_frontier_edge(VertexId local, VertexId remote, BlockId remote_block) {
    if (!owns(local)) add_owned_vertex(local);
    auto [it, inserted] = frontier_.insert({local, remote, remote_block});
    if (!inserted)
      throw Error(ErrorCode::DuplicateEdge,
                  "frontier edge (" + std::to_string(local) + "," + std::to_string(remote) + ")");
  }

  void remove_frontier_edge(VertexId local, VertexId remote) {
    auto it = find_frontier(local, remote);
    if (it == frontier_.end())
      throw Error(ErrorCode::MissingEdge,
                  "frontier edge (" + std::to_string(local) + "," + std::to_string(remote) + ")");
    frontier_.erase(it);
  }

  bool has_frontier_edge(VertexId local, VertexId remote) const {
    return find_frontier(local, remote) != frontier_.end();
  }

  BlockId frontier_block(VertexId local, VertexId remote) const {
    auto it = find_frontier(local, remote);
    if (it == frontier_.end())
      throw Error(ErrorCode::MissingEdge,
                  "frontier edge (" + std::to_string(local) + "," + std::to_string(remote) + ")");
    return it->remote_block;
  }

  const std::set<FrontierEdge>& frontier() const { return frontier_; }

  // Frontier stubs whose local endpoint is u, ascending by remote id.
  std::vector<FrontierEdge> frontier_of(VertexId u) const {
    std::vector<FrontierEdge> out;
    auto it = frontier_.lower_bound({u, 0, 0});
    for (; it != frontier_.end() && it->local == u; ++it) out.push_back(*it);
    return out;
  }

  bool has_any_edge(VertexId u, VertexId v) const {
    return (owns(u) && local_.has_edge(u, v)) || has_frontier_edge(u, v);
  }

  // Full adjacency of an owned vertex: local neighbors merged with frontier
  // remotes, ascending.
  std::vector<VertexId> full_neighbors(VertexId u) const {
    std::vector<VertexId> out = local_.neighbors(u);
    for (const FrontierEdge& fe : frontier_of(u)) out.push_back(fe.remote);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::uint64_t full_degree(VertexId u) const {
    return local_.degree(u) + frontier_of(u).size();
  }

  // Drops an owned vertex along with its local edges, frontier stubs and
  // state. Remote stubs pointing at u are the other blocks' business.
  void remove_owned_vertex(VertexId u) {
    local_.remove_vertex(u);
    auto it = frontier_.lower_bound({u, 0, 0});
    while (it != frontier_.end() && it->local == u) it = frontier_.erase(it);
    states_.erase(u);
  }

  VertexState& state(VertexId u) {
    auto it = states_.find(u);
    if (it == states_.end()) throw Error(ErrorCode::MissingVertex, "no state for " + std::to_string(u));
    return it->second;
  }

  const VertexState& state(VertexId u) const {
    auto it = states_.find(u);
    if (it == states_.end()) throw Error(ErrorCode::MissingVertex, "no state for " + std::to_string(u));
    return it->second;
  }

  bool has_state(VertexId u) const { return states_.count(u) != 0; }

  const std::map<VertexId, VertexState>& states() const { return states_; }
  std::map<VertexId, VertexState>& states() { return states_; }

 private:
  std::set<FrontierEdge>::const_iterator find_frontier(VertexId local, VertexId remote) const {
    auto it = frontier_.lower_bound({local, remote, 0});
    if (it != frontier_.end() && it->local == local && it->remote == remote) return it;
    return frontier_.end();
  }

  BlockId block_id_ = 0;
  Graph local_;
  std::set<FrontierEdge> frontier_;
  std::map<VertexId, VertexState> states_;
};

// Vertex ownership derived from an edge assignment: a vertex is owned by the
// block holding most of its incident edges (ties to the lower block id).
// Isolated vertices go to the block with the fewest owned vertices so far.
inline std::map<VertexId, BlockId> derive_owners(const Graph& g, const PartitionAssignment& pa) {
  std::map<VertexId, BlockId> owner;
  std::vector<std::size_t> owned_counts(pa.block_count(), 0);

  std::map<VertexId, std::vector<std::size_t>> incidence;
  for (const auto& [e, b] : pa.entries()) {
    for (VertexId x : {e.u, e.v}) {
      auto& counts = incidence[x];
      if (counts.empty()) counts.resize(pa.block_count(), 0);
      ++counts[b];
    }
  }

  for (VertexId u : g.vertices()) {
    auto it = incidence.find(u);
    BlockId best = 0;
    if (it == incidence.end()) {
      for (BlockId b = 1; b < pa.block_count(); ++b)
        if (owned_counts[b] < owned_counts[best]) best = b;
    } else {
      const auto& counts = it->second;
      for (BlockId b = 1; b < pa.block_count(); ++b)
        if (counts[b] > counts[best]) best = b;
    }
    owner[u] = best;
    ++owned_counts[best];
  }
  return owner;
}

// Splits a graph into K blocks given vertex ownership. Edges between
// co-owned vertices become local; edges across owners become a frontier stub
// on each side.
inline std::vector<Block> make_blocks(const Graph& g, const std::map<VertexId, BlockId>& owner,
                                      BlockId k) {
  std::vector<Block> blocks;
  blocks.reserve(k);
  for (BlockId b = 0; b < k; ++b) blocks.emplace_back(b);

  for (const auto& [u, b] : owner) {
    if (b >= k) throw Error(ErrorCode::InvalidArgument, "owner block out of range");
    blocks[b].add_owned_vertex(u);
  }

  for (const Edge& e : g.edges()) {
    BlockId bu = owner.at(e.u);
    BlockId bv = owner.at(e.v);
    if (bu == bv) {
      blocks[bu].add_local_edge(e.u, e.v);
    } else {
      blocks[bu].add_frontier_edge(e.u, e.v, bv);
      blocks[bv].add_frontier_edge(e.v, e.u, bu);
    }
  }
  return blocks;
}

inline std::vector<Block> make_blocks(const Graph& g, const PartitionAssignment& pa) {
  return make_blocks(g, derive_owners(g, pa), pa.block_count());
}

}  // namespace bladyg
