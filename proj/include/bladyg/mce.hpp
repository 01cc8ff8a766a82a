#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bladyg/prefix_tree.hpp"
#include "bladyg/runtime.hpp"

namespace bladyg {

using Clique = std::vector<VertexId>;  // members ascending
using CliqueSet = std::set<Clique>;

namespace detail {

inline std::vector<VertexId> intersect_sorted(const std::vector<VertexId>& a,
                                              const std::vector<VertexId>& b) {
  std::vector<VertexId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool clique_contains(const Clique& c, VertexId x) {
  return std::binary_search(c.begin(), c.end(), x);
}

// Bron-Kerbosch with pivoting. Emits every maximal clique, including
// singletons; callers filter by size.
inline void bk_pivot(std::vector<VertexId>& r, std::vector<VertexId> p, std::vector<VertexId> x,
                     const std::map<VertexId, std::vector<VertexId>>& adj,
                     std::vector<Clique>& out) {
  if (p.empty() && x.empty()) {
    Clique c = r;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  VertexId pivot = 0;
  std::size_t best = 0;
  bool have = false;
  for (const auto& cand : {std::cref(p), std::cref(x)})
    for (VertexId q : cand.get()) {
      std::size_t deg = intersect_sorted(p, adj.at(q)).size();
      if (!have || deg > best) {
        pivot = q;
        best = deg;
        have = true;
      }
    }
  std::vector<VertexId> expand;
  const auto& pivot_adj = adj.at(pivot);
  std::set_difference(p.begin(), p.end(), pivot_adj.begin(), pivot_adj.end(),
                      std::back_inserter(expand));
  for (VertexId v : expand) {
    const auto& na = adj.at(v);
    r.push_back(v);
    bk_pivot(r, intersect_sorted(p, na), intersect_sorted(x, na), adj, out);
    r.pop_back();
    p.erase(std::lower_bound(p.begin(), p.end(), v));
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

}  // namespace detail

// All maximal cliques (singletons included) of the graph given by an
// adjacency map whose keys are the vertex universe.
inline std::vector<Clique> maximal_cliques(const std::map<VertexId, std::vector<VertexId>>& adj) {
  std::vector<VertexId> p;
  p.reserve(adj.size());
  for (const auto& [v, _] : adj) p.push_back(v);
  std::vector<Clique> out;
  std::vector<VertexId> r;
  detail::bk_pivot(r, std::move(p), {}, adj, out);
  return out;
}

// Exact maximal clique set of a graph; cliques of size 1 are excluded by
// convention (bare edges count, isolated vertices do not).
inline CliqueSet batch_mce(const Graph& g) {
  std::map<VertexId, std::vector<VertexId>> adj;
  for (VertexId u : g.vertices()) adj[u] = g.neighbors(u);
  CliqueSet out;
  for (Clique& c : maximal_cliques(adj))
    if (c.size() >= 2) out.insert(std::move(c));
  return out;
}

// Each clique is stored once, in the tree rooted at its minimum member.
inline std::map<VertexId, PrefixTree> build_clique_trees(const CliqueSet& cliques) {
  std::map<VertexId, PrefixTree> trees;
  for (const Clique& c : cliques) {
    auto [it, inserted] = trees.try_emplace(c.front(), PrefixTree(c.front()));
    it->second.insert(c);
  }
  return trees;
}

struct MceDelta {
  CliqueSet removed;
  CliqueSet added;
};

// Distributed maximal clique maintenance. Every owned vertex u carries its
// prefix tree T_u (cliques rooted at u) in its state and a membership set
// M_u in the worker's index. The owner of an updated edge's first endpoint
// coordinates: it pulls the other endpoint's adjacency and membership set,
// pulls the adjacency it is missing, computes the removed/added cliques
// locally, and pushes tree/membership deltas to the owners that host them.
class MceAlgorithm : public Algorithm {
 public:
  static constexpr std::uint32_t kInitRequest = 1;
  static constexpr std::uint32_t kInitGraph = 2;
  static constexpr std::uint32_t kInitCliques = 3;
  static constexpr std::uint32_t kInitAck = 4;
  static constexpr std::uint32_t kBegin = 5;
  static constexpr std::uint32_t kFetchEndpoint = 6;   // W2W
  static constexpr std::uint32_t kEndpointData = 7;    // W2W
  static constexpr std::uint32_t kFetchAdj = 8;        // W2W
  static constexpr std::uint32_t kAdjData = 9;         // W2W
  static constexpr std::uint32_t kApplyDelta = 10;     // W2W
  static constexpr std::uint32_t kDeltaAck = 11;       // W2W
  static constexpr std::uint32_t kDone = 12;
  static constexpr std::uint32_t kAddVertex = 13;
  static constexpr std::uint32_t kQueryAdj = 14;
  static constexpr std::uint32_t kAdjReply = 15;
  static constexpr std::uint32_t kDropVertex = 16;
  static constexpr std::uint32_t kAck = 17;

  explicit MceAlgorithm(std::size_t worker_count)
      : m_index_(worker_count), pending_(worker_count) {}

  std::string name() const override { return "mce"; }

  const MceDelta& last_delta() const { return last_delta_; }

  void master_start(MasterContext& ctx) override {
    if (initialized_) {
      ctx.mark_done();
      return;
    }
    acks_ = 0;
    for (EndpointId w = 0; w < ctx.worker_count(); ++w) ctx.send_to_worker(w, kInitRequest);
  }

  void master_update(const GraphUpdate& upd, MasterContext& ctx) override {
    auto& owners = ctx.owners();
    switch (upd.kind) {
      case GraphUpdate::Kind::AddEdge:
      case GraphUpdate::Kind::RemoveEdge:
        begin_edge_op(upd, ctx);
        break;
      case GraphUpdate::Kind::AddVertex: {
        if (owners.known(upd.u)) {
          ctx.mark_done();
          return;
        }
        EndpointId w = owners.fewest_owned();
        owners.set_owner(upd.u, w);
        PayloadWriter pw;
        pw.vid(upd.u);
        phase_ = Phase::VertexAck;
        ctx.send_to_worker(w, kAddVertex, pw.take());
        break;
      }
      case GraphUpdate::Kind::RemoveVertex: {
        if (!owners.known(upd.u))
          throw Error(ErrorCode::MissingVertex, "vertex " + std::to_string(upd.u));
        removing_vertex_ = upd.u;
        removing_ = true;
        PayloadWriter pw;
        pw.vid(upd.u);
        phase_ = Phase::VertexAdj;
        ctx.send_to_worker(owners.owner_of(upd.u), kQueryAdj, pw.take());
        break;
      }
    }
  }

  void master_receive(const Message& msg, MasterContext& ctx) override {
    switch (msg.kind) {
      case kInitGraph: on_init_graph(msg, ctx); break;
      case kInitAck:
        if (++acks_ == ctx.worker_count()) {
          init_union_ = Graph{};
          initialized_ = true;
          ctx.mark_done();
        }
        break;
      case kDone: {
        PayloadReader pr(msg);
        last_delta_ = MceDelta{};
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) last_delta_.removed.insert(pr.vids());
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) last_delta_.added.insert(pr.vids());
        finish_op(ctx);
        break;
      }
      case kAdjReply: {
        PayloadReader pr(msg);
        for (VertexId w : pr.vids()) subqueue_.push_back(GraphUpdate::remove_edge(removing_vertex_, w));
        next_sub_op(ctx);
        break;
      }
      case kAck:
        if (phase_ == Phase::VertexDrop) {
          ctx.owners().erase(removing_vertex_);
          removing_ = false;
          ctx.mark_done();
        } else {
          ctx.mark_done();
        }
        break;
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected master message kind");
    }
  }

  void worker_receive(Block& block, const Message& msg, WorkerContext& ctx) override {
    const std::size_t self = static_cast<std::size_t>(block.id());
    if (self >= m_index_.size())
      throw Error(ErrorCode::InvalidArgument, "algorithm sized for fewer workers");
    switch (msg.kind) {
      case kInitRequest: {
        PayloadWriter pw;
        pw.u64(block.states().size());
        for (auto& [u, st] : block.states()) {
          st.degree = block.full_degree(u);
          pw.vid(u).vids(block.full_neighbors(u));
        }
        ctx.send_to_master(kInitGraph, pw.take());
        break;
      }
      case kInitCliques: {
        PayloadReader pr(msg);
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
          Clique c = pr.vids();
          block.state(c.front()).clique_tree.insert(c);
        }
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
          VertexId x = pr.vid();
          m_index_[self][x].insert(pr.vids());
        }
        ctx.send_to_master(kInitAck);
        break;
      }
      case kBegin: on_begin(block, msg, ctx); break;
      case kFetchEndpoint: {
        PayloadReader pr(msg);
        VertexId v = pr.vid();
        bool create = pr.u8();
        if (create) block.add_owned_vertex(v);
        PayloadWriter pw;
        auto nbrs = block.full_neighbors(v);
        pw.u64(nbrs.size());
        for (VertexId w : nbrs) {
          BlockId owner = block.local_graph().has_edge(v, w) ? block.id() : block.frontier_block(v, w);
          pw.vid(w).u32(owner);
        }
        const CliqueSet& mv = member_set(self, v);
        pw.u64(mv.size());
        for (const Clique& c : mv) pw.vids(c);
        ctx.send_to_worker(msg.from, kEndpointData, pw.take());
        break;
      }
      case kEndpointData: {
        PendingOp& op = pending_op(self);
        PayloadReader pr(msg);
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
          VertexId w = pr.vid();
          BlockId owner = pr.u32();
          op.adj_v.push_back(w);
          op.owner_map[w] = static_cast<EndpointId>(owner);
        }
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) op.mv.insert(pr.vids());
        prepare_gather(block, ctx);
        break;
      }
      case kFetchAdj: {
        PayloadReader pr(msg);
        PayloadWriter pw;
        std::vector<VertexId> wanted = pr.vids();
        pw.u64(wanted.size());
        for (VertexId w : wanted) pw.vid(w).vids(block.full_neighbors(w));
        ctx.send_to_worker(msg.from, kAdjData, pw.take());
        break;
      }
      case kAdjData: {
        PendingOp& op = pending_op(self);
        PayloadReader pr(msg);
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
          VertexId w = pr.vid();
          op.adj[w] = pr.vids();
        }
        if (--op.awaiting == 0) compute_and_apply(block, ctx);
        break;
      }
      case kApplyDelta: {
        apply_delta(block, msg);
        ctx.send_to_worker(msg.from, kDeltaAck);
        break;
      }
      case kDeltaAck: {
        PendingOp& op = pending_op(self);
        if (--op.awaiting == 0) finish_coordination(ctx);
        break;
      }
      case kAddVertex: {
        PayloadReader pr(msg);
        block.add_owned_vertex(pr.vid());
        ctx.send_to_master(kAck);
        break;
      }
      case kQueryAdj: {
        PayloadReader pr(msg);
        PayloadWriter pw;
        pw.vids(block.full_neighbors(pr.vid()));
        ctx.send_to_master(kAdjReply, pw.take());
        break;
      }
      case kDropVertex: {
        PayloadReader pr(msg);
        VertexId u = pr.vid();
        m_index_[self].erase(u);
        block.remove_owned_vertex(u);
        ctx.send_to_master(kAck);
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected worker message kind");
    }
  }

  std::string vertex_state_columns(const VertexState& st) const override {
    return std::to_string(st.degree);
  }

 private:
  enum class Phase { None, EdgeOp, VertexAdj, VertexDrop, VertexAck };

  struct PendingOp {
    VertexId u = 0, v = 0;
    bool adding = true;
    EndpointId owner_v = 0;
    bool create_u = false, create_v = false;
    std::vector<VertexId> adj_u, adj_v;  // pre-update full adjacency
    CliqueSet mu, mv;
    std::map<VertexId, EndpointId> owner_map;
    std::map<VertexId, std::vector<VertexId>> adj;  // gathered full adjacency
    int awaiting = 0;
    CliqueSet removed, added;
  };

  PendingOp& pending_op(std::size_t self) {
    if (!pending_[self])
      throw Error(ErrorCode::InvalidArgument, "no pending mce operation on worker");
    return *pending_[self];
  }

  const CliqueSet& member_set(std::size_t worker, VertexId x) const {
    static const CliqueSet empty;
    auto it = m_index_[worker].find(x);
    return it == m_index_[worker].end() ? empty : it->second;
  }

  // --- master side -----------------------------------------------------------

  void begin_edge_op(const GraphUpdate& upd, MasterContext& ctx) {
    auto& owners = ctx.owners();
    bool adding = upd.kind == GraphUpdate::Kind::AddEdge;
    bool create_u = !owners.known(upd.u);
    bool create_v = !owners.known(upd.v);
    if (!adding && (create_u || create_v))
      throw Error(ErrorCode::MissingEdge, "remove with unknown endpoint");
    if (create_u && create_v) {
      EndpointId w = owners.fewest_owned();
      owners.set_owner(upd.u, w);
      owners.set_owner(upd.v, w);
    } else if (create_u) {
      owners.set_owner(upd.u, owners.owner_of(upd.v));
    } else if (create_v) {
      owners.set_owner(upd.v, owners.owner_of(upd.u));
    }
    PayloadWriter pw;
    pw.vid(upd.u)
        .vid(upd.v)
        .u32(static_cast<std::uint32_t>(owners.owner_of(upd.v)))
        .u8(create_u)
        .u8(create_v)
        .u8(adding);
    phase_ = Phase::EdgeOp;
    ctx.send_to_worker(owners.owner_of(upd.u), kBegin, pw.take());
  }

  void finish_op(MasterContext& ctx) {
    if (!subqueue_.empty()) {
      next_sub_op(ctx);
      return;
    }
    if (removing_) {
      PayloadWriter pw;
      pw.vid(removing_vertex_);
      phase_ = Phase::VertexDrop;
      ctx.send_to_worker(ctx.owners().owner_of(removing_vertex_), kDropVertex, pw.take());
      return;
    }
    phase_ = Phase::None;
    ctx.mark_done();
  }

  void next_sub_op(MasterContext& ctx) {
    if (subqueue_.empty()) {
      PayloadWriter pw;
      pw.vid(removing_vertex_);
      phase_ = Phase::VertexDrop;
      ctx.send_to_worker(ctx.owners().owner_of(removing_vertex_), kDropVertex, pw.take());
      return;
    }
    GraphUpdate next = subqueue_.front();
    subqueue_.pop_front();
    begin_edge_op(next, ctx);
  }

  void on_init_graph(const Message& msg, MasterContext& ctx) {
    PayloadReader pr(msg);
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId u = pr.vid();
      init_union_.add_vertex(u);
      for (VertexId w : pr.vids())
        if (!init_union_.has_edge(u, w)) init_union_.add_edge(u, w);
    }
    if (++acks_ < ctx.worker_count()) return;

    CliqueSet cliques = batch_mce(init_union_);
    struct PerWorker {
      std::vector<Clique> tree;
      std::vector<std::pair<VertexId, Clique>> members;
    };
    std::map<EndpointId, PerWorker> by_owner;
    for (EndpointId w = 0; w < ctx.worker_count(); ++w) by_owner[w];
    for (const Clique& c : cliques) {
      by_owner[ctx.owners().owner_of(c.front())].tree.push_back(c);
      for (VertexId x : c) by_owner[ctx.owners().owner_of(x)].members.push_back({x, c});
    }
    acks_ = 0;
    for (const auto& [w, data] : by_owner) {
      PayloadWriter pw;
      pw.u64(data.tree.size());
      for (const Clique& c : data.tree) pw.vids(c);
      pw.u64(data.members.size());
      for (const auto& [x, c] : data.members) {
        pw.vid(x);
        pw.vids(c);
      }
      ctx.send_to_worker(w, kInitCliques, pw.take());
    }
  }

  // --- coordinator side --------------------------------------------------------

  void on_begin(Block& block, const Message& msg, WorkerContext& ctx) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    PayloadReader pr(msg);
    PendingOp op;
    op.u = pr.vid();
    op.v = pr.vid();
    op.owner_v = static_cast<EndpointId>(pr.u32());
    op.create_u = pr.u8();
    op.create_v = pr.u8();
    op.adding = pr.u8();

    if (op.create_u) block.add_owned_vertex(op.u);
    op.owner_map[op.u] = static_cast<EndpointId>(block.id());
    op.owner_map[op.v] = op.owner_v;
    op.adj_u = block.full_neighbors(op.u);
    for (VertexId w : op.adj_u)
      op.owner_map[w] = block.local_graph().has_edge(op.u, w)
                            ? static_cast<EndpointId>(block.id())
                            : static_cast<EndpointId>(block.frontier_block(op.u, w));
    op.mu = member_set(self, op.u);

    pending_[self] = std::move(op);

    PendingOp& p = *pending_[self];
    if (p.owner_v == static_cast<EndpointId>(block.id())) {
      if (p.create_v) block.add_owned_vertex(p.v);
      p.adj_v = block.full_neighbors(p.v);
      for (VertexId w : p.adj_v)
        p.owner_map.emplace(w, block.local_graph().has_edge(p.v, w)
                                   ? static_cast<EndpointId>(block.id())
                                   : static_cast<EndpointId>(block.frontier_block(p.v, w)));
      p.mv = member_set(self, p.v);
      prepare_gather(block, ctx);
    } else {
      PayloadWriter pw;
      pw.vid(p.v).u8(p.create_v);
      ctx.send_to_worker(p.owner_v, kFetchEndpoint, pw.take());
    }
  }

  void prepare_gather(Block& block, WorkerContext& ctx) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    PendingOp& op = pending_op(self);

    std::set<VertexId> gather;
    if (op.adding) {
      for (VertexId w : detail::intersect_sorted(op.adj_u, op.adj_v)) gather.insert(w);
    } else {
      for (const Clique& c : op.mu)
        if (detail::clique_contains(c, op.v)) {
          op.removed.insert(c);
          for (VertexId w : c) gather.insert(w);
        }
    }

    std::map<EndpointId, std::vector<VertexId>> remote;
    for (VertexId w : gather) {
      EndpointId owner = op.owner_map.at(w);
      if (owner == static_cast<EndpointId>(block.id()))
        op.adj[w] = block.full_neighbors(w);
      else
        remote[owner].push_back(w);
    }
    // The other endpoint's adjacency is already in hand.
    if (gather.count(op.u)) op.adj[op.u] = op.adj_u;
    if (gather.count(op.v)) op.adj[op.v] = op.adj_v;
    for (auto& [owner, wanted] : remote) {
      std::erase_if(wanted, [&](VertexId w) { return op.adj.count(w) != 0; });
    }
    std::erase_if(remote, [](const auto& kv) { return kv.second.empty(); });

    op.awaiting = static_cast<int>(remote.size());
    if (op.awaiting == 0) {
      compute_and_apply(block, ctx);
      return;
    }
    for (const auto& [owner, wanted] : remote) {
      PayloadWriter pw;
      pw.vids(wanted);
      ctx.send_to_worker(owner, kFetchAdj, pw.take());
    }
  }

  void compute_and_apply(Block& block, WorkerContext& ctx) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    PendingOp& op = pending_op(self);

    if (op.adding) {
      std::vector<VertexId> common = detail::intersect_sorted(op.adj_u, op.adj_v);

      // Cliques holding one endpoint and living inside the common
      // neighbourhood become non-maximal.
      std::vector<VertexId> universe = common;
      universe.push_back(op.u);
      universe.push_back(op.v);
      std::sort(universe.begin(), universe.end());
      for (const CliqueSet* m : {&op.mu, &op.mv})
        for (const Clique& c : *m)
          if (std::includes(universe.begin(), universe.end(), c.begin(), c.end()))
            op.removed.insert(c);

      // New maximal cliques are {u, v} extended by the maximal cliques of
      // the subgraph induced on the common neighbourhood.
      if (common.empty()) {
        op.added.insert(Clique{std::min(op.u, op.v), std::max(op.u, op.v)});
      } else {
        std::map<VertexId, std::vector<VertexId>> sub;
        for (VertexId w : common) sub[w] = detail::intersect_sorted(op.adj.at(w), common);
        for (Clique q : maximal_cliques(sub)) {
          q.push_back(op.u);
          q.push_back(op.v);
          std::sort(q.begin(), q.end());
          op.added.insert(std::move(q));
        }
      }
    } else {
      // Post-deletion adjacency: only the endpoint lists change.
      if (auto it = op.adj.find(op.u); it != op.adj.end()) std::erase(it->second, op.v);
      if (auto it = op.adj.find(op.v); it != op.adj.end()) std::erase(it->second, op.u);

      for (const Clique& c : op.removed) {
        for (VertexId drop : {op.u, op.v}) {
          Clique d;
          for (VertexId w : c)
            if (w != drop) d.push_back(w);
          if (d.size() < 2) continue;
          // d stays maximal iff no vertex neighbours every member.
          std::vector<VertexId> ext = op.adj.at(d.front());
          for (std::size_t i = 1; i < d.size() && !ext.empty(); ++i)
            ext = detail::intersect_sorted(ext, op.adj.at(d[i]));
          std::erase_if(ext, [&](VertexId x) { return detail::clique_contains(d, x); });
          if (ext.empty()) op.added.insert(std::move(d));
        }
      }
    }

    distribute_deltas(block, ctx);
  }

  struct DeltaOps {
    bool edge_op = false;
    std::vector<Clique> tree_insert, tree_erase;
    std::vector<std::pair<VertexId, Clique>> member_insert, member_erase;

    bool empty() const {
      return !edge_op && tree_insert.empty() && tree_erase.empty() && member_insert.empty() &&
             member_erase.empty();
    }
  };

  void distribute_deltas(Block& block, WorkerContext& ctx) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    PendingOp& op = pending_op(self);
    const EndpointId self_id = static_cast<EndpointId>(block.id());

    std::map<EndpointId, DeltaOps> ops;
    for (const Clique& c : op.removed) {
      ops[op.owner_map.at(c.front())].tree_erase.push_back(c);
      for (VertexId x : c) ops[op.owner_map.at(x)].member_erase.push_back({x, c});
    }
    for (const Clique& c : op.added) {
      ops[op.owner_map.at(c.front())].tree_insert.push_back(c);
      for (VertexId x : c) ops[op.owner_map.at(x)].member_insert.push_back({x, c});
    }

    // Structural edge update: the u side is ours, the v side belongs to
    // owner_v (possibly also us).
    if (op.owner_v == self_id) {
      if (op.adding) {
        block.add_local_edge(op.u, op.v);
        ++block.state(op.u).degree;
        ++block.state(op.v).degree;
      } else {
        block.remove_local_edge(op.u, op.v);
        --block.state(op.u).degree;
        --block.state(op.v).degree;
      }
    } else {
      if (op.adding) {
        block.add_frontier_edge(op.u, op.v, static_cast<BlockId>(op.owner_v));
        ++block.state(op.u).degree;
      } else {
        block.remove_frontier_edge(op.u, op.v);
        --block.state(op.u).degree;
      }
      ops[op.owner_v].edge_op = true;
    }

    // Apply our own share directly.
    if (auto it = ops.find(self_id); it != ops.end()) {
      apply_ops(block, it->second, op);
      ops.erase(it);
    }
    std::erase_if(ops, [](const auto& kv) { return kv.second.empty(); });

    op.awaiting = static_cast<int>(ops.size());
    if (op.awaiting == 0) {
      finish_coordination(ctx);
      return;
    }
    for (const auto& [owner, delta] : ops) {
      PayloadWriter pw;
      pw.u8(delta.edge_op);
      if (delta.edge_op)
        pw.vid(op.v).vid(op.u).u32(static_cast<std::uint32_t>(self_id)).u8(op.create_v).u8(op.adding);
      pw.u64(delta.tree_insert.size());
      for (const Clique& c : delta.tree_insert) pw.vids(c);
      pw.u64(delta.tree_erase.size());
      for (const Clique& c : delta.tree_erase) pw.vids(c);
      pw.u64(delta.member_insert.size());
      for (const auto& [x, c] : delta.member_insert) {
        pw.vid(x);
        pw.vids(c);
      }
      pw.u64(delta.member_erase.size());
      for (const auto& [x, c] : delta.member_erase) {
        pw.vid(x);
        pw.vids(c);
      }
      ctx.send_to_worker(owner, kApplyDelta, pw.take());
    }
  }

  void apply_ops(Block& block, const DeltaOps& delta, const PendingOp& op) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    for (const Clique& c : delta.tree_erase) block.state(c.front()).clique_tree.erase(c);
    for (const Clique& c : delta.tree_insert) block.state(c.front()).clique_tree.insert(c);
    for (const auto& [x, c] : delta.member_erase) {
      auto it = m_index_[self].find(x);
      if (it != m_index_[self].end()) it->second.erase(c);
    }
    for (const auto& [x, c] : delta.member_insert) m_index_[self][x].insert(c);
    (void)op;
  }

  void apply_delta(Block& block, const Message& msg) {
    const std::size_t self = static_cast<std::size_t>(block.id());
    PayloadReader pr(msg);
    if (pr.u8()) {
      VertexId local = pr.vid(), remote = pr.vid();
      BlockId remote_block = pr.u32();
      bool create = pr.u8(), adding = pr.u8();
      if (adding) {
        if (create) block.add_owned_vertex(local);
        block.add_frontier_edge(local, remote, remote_block);
        ++block.state(local).degree;
      } else {
        block.remove_frontier_edge(local, remote);
        --block.state(local).degree;
      }
    }
    // Erase before insert: a freshly added clique may be a prefix of a
    // removed one (e.g. C minus its largest member), and the tree stores
    // cliques as leaf paths.
    std::vector<Clique> inserts;
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) inserts.push_back(pr.vids());
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      Clique c = pr.vids();
      block.state(c.front()).clique_tree.erase(c);
    }
    for (const Clique& c : inserts) block.state(c.front()).clique_tree.insert(c);
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId x = pr.vid();
      m_index_[self][x].insert(pr.vids());
    }
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId x = pr.vid();
      Clique c = pr.vids();
      auto it = m_index_[self].find(x);
      if (it != m_index_[self].end()) it->second.erase(c);
    }
  }

  void finish_coordination(WorkerContext& ctx) {
    const std::size_t self = static_cast<std::size_t>(ctx.self());
    PendingOp& op = pending_op(self);
    PayloadWriter pw;
    pw.u64(op.removed.size());
    for (const Clique& c : op.removed) pw.vids(c);
    pw.u64(op.added.size());
    for (const Clique& c : op.added) pw.vids(c);
    ctx.send_to_master(kDone, pw.take());
    pending_[self].reset();
  }

  bool initialized_ = false;
  Phase phase_ = Phase::None;
  int acks_ = 0;
  Graph init_union_;
  std::deque<GraphUpdate> subqueue_;
  bool removing_ = false;
  VertexId removing_vertex_ = 0;
  MceDelta last_delta_;
  std::vector<std::map<VertexId, CliqueSet>> m_index_;
  std::vector<std::optional<PendingOp>> pending_;
};

// --- Standalone operations -------------------------------------------------------

// Single-update maintenance over blocks already initialized by `algo` (the
// algorithm instance owns the membership index, so it must be the same one
// that ran the batch phase).
inline MceDelta mce_insert_edge(std::vector<Block>& blocks, MceAlgorithm& algo, VertexId u,
                                VertexId v, JobMetrics* metrics = nullptr) {
  std::vector<GraphUpdate> upds{GraphUpdate::add_edge(u, v)};
  JobResult r = run_job(blocks, upds, algo);
  if (metrics) *metrics = r.metrics;
  return algo.last_delta();
}

inline MceDelta mce_delete_edge(std::vector<Block>& blocks, MceAlgorithm& algo, VertexId u,
                                VertexId v, JobMetrics* metrics = nullptr) {
  std::vector<GraphUpdate> upds{GraphUpdate::remove_edge(u, v)};
  JobResult r = run_job(blocks, upds, algo);
  if (metrics) *metrics = r.metrics;
  return algo.last_delta();
}

// Maintained clique set: the union of every owned vertex's tree paths.
inline CliqueSet cliques_of_blocks(const std::vector<Block>& blocks,
                                   std::size_t* total_paths = nullptr) {
  CliqueSet out;
  std::size_t count = 0;
  for (const Block& b : blocks)
    for (const auto& [u, st] : b.states())
      for (auto& path : st.clique_tree.paths()) {
        ++count;
        out.insert(std::move(path));
      }
  if (total_paths) *total_paths = count;
  return out;
}

// Text dump: one clique per line, members ascending, lines in ascending
// lexicographic order of the member sequences.
inline void dump_cliques(const CliqueSet& cliques, std::ostream& os) {
  for (const Clique& c : cliques) {
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    os << "\n";
  }
}

}  // namespace bladyg
