#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bladyg/runtime.hpp"

namespace bladyg {

using CorenessMap = std::map<VertexId, std::uint32_t>;

// Exact coreness by peeling: repeatedly remove the minimum-degree vertex,
// assigning its degree at removal time (Batagelj-Zaversnik bucket variant).
inline CorenessMap batch_coreness(const Graph& g) {
  const std::vector<VertexId> verts = g.vertices();
  const std::size_t n = verts.size();
  CorenessMap out;
  if (n == 0) return out;

  std::unordered_map<VertexId, std::size_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) index[verts[i]] = i;

  std::vector<std::size_t> deg(n);
  std::size_t maxd = 0;
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = g.degree(verts[i]);
    maxd = std::max(maxd, deg[i]);
  }

  std::vector<std::size_t> bin(maxd + 1, 0), pos(n), vert(n);
  for (std::size_t i = 0; i < n; ++i) ++bin[deg[i]];
  std::size_t start = 0;
  for (std::size_t d = 0; d <= maxd; ++d) {
    std::size_t num = bin[d];
    bin[d] = start;
    start += num;
  }
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = bin[deg[i]]++;
    vert[pos[i]] = i;
  }
  for (std::size_t d = maxd; d >= 1; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t vi = vert[i];
    for (VertexId w : g.neighbors(verts[vi])) {
      std::size_t wi = index[w];
      if (deg[wi] > deg[vi]) {
        std::size_t dw = deg[wi], pw = pos[wi], pf = bin[dw], vf = vert[pf];
        if (wi != vf) {
          pos[wi] = pf;
          vert[pw] = vf;
          pos[vf] = pw;
          vert[pf] = wi;
        }
        ++bin[dw];
        --deg[wi];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out[verts[i]] = static_cast<std::uint32_t>(deg[i]);
  return out;
}

// --- k-reachability token -----------------------------------------------------
// The cross-block search state travels as one message: a worker settles every
// pending vertex it owns, then forwards the token to the owner of the
// smallest still-pending vertex, or returns it to the master when none
// remain. The visited set doubles as the cycle terminator. Alongside the
// candidate set the token accumulates each candidate's full adjacency and the
// coreness of every vertex it examined, which is exactly what the master
// needs for the localized recomputation.

struct ReachToken {
  std::uint32_t kstar = 0;
  std::map<VertexId, BlockId> pending;  // vertex -> owner to examine it
  std::set<VertexId> visited;           // candidates (coreness == kstar)
  std::set<VertexId> rejected;
  std::map<VertexId, std::uint32_t> kmap;
  std::map<VertexId, std::vector<VertexId>> cand_adj;

  std::vector<std::uint8_t> encode() const {
    PayloadWriter pw;
    pw.u32(kstar);
    pw.u64(pending.size());
    for (const auto& [v, b] : pending) pw.vid(v).u32(b);
    pw.u64(visited.size());
    for (VertexId v : visited) pw.vid(v);
    pw.u64(rejected.size());
    for (VertexId v : rejected) pw.vid(v);
    pw.u64(kmap.size());
    for (const auto& [v, k] : kmap) pw.vid(v).u32(k);
    pw.u64(cand_adj.size());
    for (const auto& [v, adj] : cand_adj) pw.vid(v).vids(adj);
    return pw.take();
  }

  static ReachToken decode(const Message& msg) {
    PayloadReader pr(msg);
    ReachToken t;
    t.kstar = pr.u32();
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId v = pr.vid();
      t.pending[v] = pr.u32();
    }
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) t.visited.insert(pr.vid());
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) t.rejected.insert(pr.vid());
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId v = pr.vid();
      t.kmap[v] = pr.u32();
    }
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId v = pr.vid();
      t.cand_adj[v] = pr.vids();
    }
    return t;
  }
};

// Settles all pending vertices owned by this block, ascending. Returns the
// next owner to forward to, or nullopt when the traversal is complete.
inline std::optional<EndpointId> advance_reach_token(const Block& block, ReachToken& t) {
  for (;;) {
    std::optional<VertexId> next;
    for (const auto& [v, owner] : t.pending)
      if (owner == block.id()) {
        next = v;
        break;
      }
    if (!next) break;
    VertexId p = *next;
    t.pending.erase(p);
    if (t.visited.count(p) || t.rejected.count(p)) continue;

    const VertexState& st = block.state(p);
    t.kmap[p] = st.coreness;
    if (st.coreness != t.kstar) {
      t.rejected.insert(p);
      continue;
    }
    t.visited.insert(p);
    t.cand_adj[p] = block.full_neighbors(p);
    for (VertexId w : block.local_graph().neighbors(p)) {
      std::uint32_t kw = block.state(w).coreness;
      t.kmap[w] = kw;
      if (kw == t.kstar) {
        if (!t.visited.count(w) && !t.rejected.count(w)) t.pending.emplace(w, block.id());
      } else {
        t.rejected.insert(w);
      }
    }
    for (const FrontierEdge& fe : block.frontier_of(p)) {
      if (!t.visited.count(fe.remote) && !t.rejected.count(fe.remote) && !t.kmap.count(fe.remote))
        t.pending.emplace(fe.remote, fe.remote_block);
    }
  }
  if (t.pending.empty()) return std::nullopt;
  return static_cast<EndpointId>(t.pending.begin()->second);
}

// Exact recomputation over the candidate set with the rest of the graph
// frozen: iterated eviction of candidates whose support drops below the
// target level. For an insertion survivors rise to kstar+1; for a deletion
// evicted vertices fall to kstar-1. Either way no vertex moves by more than
// one, which is exactly the single-edge bound.
inline std::map<VertexId, std::uint32_t> recompute_candidates(
    const std::set<VertexId>& cands, const std::map<VertexId, std::vector<VertexId>>& adj,
    const std::map<VertexId, std::uint32_t>& kmap, std::uint32_t kstar, bool adding) {
  const std::uint32_t target = adding ? kstar + 1 : kstar;

  std::map<VertexId, std::uint32_t> support;
  std::set<VertexId> alive(cands);
  for (VertexId w : cands) {
    std::uint32_t s = 0;
    auto it = adj.find(w);
    if (it != adj.end())
      for (VertexId x : it->second) {
        if (cands.count(x)) ++s;
        else if (kmap.at(x) >= target) ++s;
      }
    support[w] = s;
  }

  std::deque<VertexId> evict;
  for (VertexId w : cands)
    if (support[w] < target) evict.push_back(w);
  while (!evict.empty()) {
    VertexId w = evict.front();
    evict.pop_front();
    if (!alive.count(w)) continue;
    alive.erase(w);
    auto it = adj.find(w);
    if (it == adj.end()) continue;
    for (VertexId x : it->second) {
      if (!alive.count(x)) continue;
      if (--support[x] < target) evict.push_back(x);
    }
  }

  std::map<VertexId, std::uint32_t> changed;
  if (adding) {
    for (VertexId w : alive) changed[w] = kstar + 1;
  } else {
    for (VertexId w : cands)
      if (!alive.count(w)) changed[w] = kstar - 1;
  }
  return changed;
}

// --- Distributed k-core maintenance --------------------------------------------

struct KcoreTrace {
  GraphUpdate upd;
  std::set<VertexId> candidates;
  std::map<VertexId, std::uint32_t> changed;
};

// Batch initialization plus exact incremental maintenance. Candidates for
// an insertion are the vertices k*-reachable from the lower-coreness
// endpoint (both endpoints when equal); deletions search symmetrically from
// the minimum side. Candidate recomputation is the master's job; the search
// itself runs block-to-block via the traveling token.
class KcoreAlgorithm : public Algorithm {
 public:
  static constexpr std::uint32_t kInitRequest = 1;
  static constexpr std::uint32_t kInitGraph = 2;
  static constexpr std::uint32_t kInitCoreness = 3;
  static constexpr std::uint32_t kInitAck = 4;
  static constexpr std::uint32_t kQuery = 5;
  static constexpr std::uint32_t kQueryReply = 6;
  static constexpr std::uint32_t kSearchToken = 7;
  static constexpr std::uint32_t kSearchResult = 8;
  static constexpr std::uint32_t kApplyLocalEdge = 9;
  static constexpr std::uint32_t kApplyFrontierEdge = 10;
  static constexpr std::uint32_t kApplyAck = 11;
  static constexpr std::uint32_t kSetCoreness = 12;
  static constexpr std::uint32_t kSetAck = 13;
  static constexpr std::uint32_t kAddVertex = 14;
  static constexpr std::uint32_t kQueryAdj = 15;
  static constexpr std::uint32_t kAdjReply = 16;
  static constexpr std::uint32_t kDropVertex = 17;
  static constexpr std::uint32_t kAck = 18;

  explicit KcoreAlgorithm(bool assume_initialized = false)
      : assume_initialized_(assume_initialized) {}

  std::string name() const override { return "kcore"; }

  const std::vector<KcoreTrace>& history() const { return history_; }
  const std::map<VertexId, std::uint32_t>& last_delta() const { return last_delta_; }

  void master_start(MasterContext& ctx) override {
    if (assume_initialized_) {
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
        begin_edge_op(upd, ctx, /*top_level=*/true);
        break;
      case GraphUpdate::Kind::AddVertex: {
        if (owners.known(upd.u)) {  // idempotent
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
          ctx.mark_done();
        }
        break;
      case kQueryReply: on_query_reply(msg, ctx); break;
      case kSearchResult: {
        ReachToken t = ReachToken::decode(msg);
        op_.candidates = t.visited;
        op_.cand_adj = std::move(t.cand_adj);
        op_.kmap = std::move(t.kmap);
        begin_apply(ctx);
        break;
      }
      case kApplyAck:
        if (++acks_ == expected_) finish_recompute(ctx);
        break;
      case kSetAck:
        if (++acks_ == expected_) finish_op(ctx);
        break;
      case kAdjReply: {
        PayloadReader pr(msg);
        std::vector<VertexId> nbrs = pr.vids();
        for (VertexId w : nbrs) subqueue_.push_back(GraphUpdate::remove_edge(removing_vertex_, w));
        next_sub_op(ctx);
        break;
      }
      case kAck:
        if (phase_ == Phase::VertexDrop) {
          ctx.owners().erase(removing_vertex_);
          removing_ = false;
          ctx.mark_done();
        } else {  // VertexAck (AddVertex)
          ctx.mark_done();
        }
        break;
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected master message kind");
    }
  }

  void worker_receive(Block& block, const Message& msg, WorkerContext& ctx) override {
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
      case kInitCoreness:
      case kSetCoreness: {
        PayloadReader pr(msg);
        for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
          VertexId u = pr.vid();
          block.state(u).coreness = pr.u32();
        }
        ctx.send_to_master(msg.kind == kInitCoreness ? kInitAck : kSetAck);
        break;
      }
      case kQuery: {
        PayloadReader pr(msg);
        VertexId u = pr.vid(), v = pr.vid();
        std::vector<VertexId> wanted = pr.vids();
        PayloadWriter pw;
        pw.u64(wanted.size());
        for (VertexId x : wanted) pw.vid(x).u32(block.state(x).coreness);
        bool exists = block.owns(u) ? block.has_any_edge(u, v)
                                    : (block.owns(v) && block.has_any_edge(v, u));
        pw.u8(exists);
        ctx.send_to_master(kQueryReply, pw.take());
        break;
      }
      case kSearchToken: {
        ReachToken t = ReachToken::decode(msg);
        auto next = advance_reach_token(block, t);
        if (next)
          ctx.send_to_worker(*next, kSearchToken, t.encode());
        else
          ctx.send_to_master(kSearchResult, t.encode());
        break;
      }
      case kApplyLocalEdge: {
        PayloadReader pr(msg);
        VertexId u = pr.vid(), v = pr.vid();
        bool create_u = pr.u8(), create_v = pr.u8(), adding = pr.u8();
        if (adding) {
          if (create_u) block.add_owned_vertex(u);
          if (create_v) block.add_owned_vertex(v);
          block.add_local_edge(u, v);
          ++block.state(u).degree;
          ++block.state(v).degree;
        } else {
          block.remove_local_edge(u, v);
          --block.state(u).degree;
          --block.state(v).degree;
        }
        ctx.send_to_master(kApplyAck);
        break;
      }
      case kApplyFrontierEdge: {
        PayloadReader pr(msg);
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
        ctx.send_to_master(kApplyAck);
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
        VertexId u = pr.vid();
        PayloadWriter pw;
        pw.vids(block.full_neighbors(u));
        ctx.send_to_master(kAdjReply, pw.take());
        break;
      }
      case kDropVertex: {
        PayloadReader pr(msg);
        block.remove_owned_vertex(pr.vid());
        ctx.send_to_master(kAck);
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected worker message kind");
    }
  }

  std::string vertex_state_columns(const VertexState& st) const override {
    return std::to_string(st.coreness);
  }

 protected:
  enum class Phase { None, Query, Search, Apply, Set, VertexAdj, VertexDrop, VertexAck };

  struct EdgeOp {
    VertexId u = 0, v = 0;
    bool adding = true;
    bool top_level = true;
    bool u_new = false, v_new = false;
    std::uint32_t ku = 0, kv = 0;
    bool exists = false;
    std::uint32_t kstar = 0;
    std::set<VertexId> candidates;
    std::map<VertexId, std::vector<VertexId>> cand_adj;
    std::map<VertexId, std::uint32_t> kmap;
    std::map<VertexId, std::uint32_t> changed;
  };

  void begin_edge_op(const GraphUpdate& upd, MasterContext& ctx, bool top_level) {
    auto& owners = ctx.owners();
    op_ = EdgeOp{};
    op_.u = upd.u;
    op_.v = upd.v;
    op_.adding = upd.kind == GraphUpdate::Kind::AddEdge;
    op_.top_level = top_level;
    op_.u_new = !owners.known(upd.u);
    op_.v_new = !owners.known(upd.v);
    if (!op_.adding && (op_.u_new || op_.v_new))
      throw Error(ErrorCode::MissingEdge, "remove with unknown endpoint");
    if (op_.u_new && op_.v_new) {
      EndpointId w = owners.fewest_owned();
      owners.set_owner(op_.u, w);
      owners.set_owner(op_.v, w);
    } else if (op_.u_new) {
      owners.set_owner(op_.u, owners.owner_of(op_.v));
    } else if (op_.v_new) {
      owners.set_owner(op_.v, owners.owner_of(op_.u));
    }

    std::map<EndpointId, std::vector<VertexId>> by_owner;
    if (!op_.u_new) by_owner[owners.owner_of(op_.u)].push_back(op_.u);
    if (!op_.v_new) by_owner[owners.owner_of(op_.v)].push_back(op_.v);
    if (by_owner.empty()) {
      after_query(ctx);
      return;
    }
    phase_ = Phase::Query;
    expected_ = static_cast<int>(by_owner.size());
    acks_ = 0;
    for (const auto& [w, wanted] : by_owner) {
      PayloadWriter pw;
      pw.vid(op_.u).vid(op_.v).vids(wanted);
      ctx.send_to_worker(w, kQuery, pw.take());
    }
  }

  void on_query_reply(const Message& msg, MasterContext& ctx) {
    PayloadReader pr(msg);
    for (std::uint64_t i = 0, n = pr.u64(); i < n; ++i) {
      VertexId x = pr.vid();
      std::uint32_t k = pr.u32();
      if (x == op_.u) op_.ku = k;
      if (x == op_.v) op_.kv = k;
    }
    op_.exists = op_.exists || pr.u8();
    if (++acks_ == expected_) after_query(ctx);
  }

  void after_query(MasterContext& ctx) {
    if (op_.adding && op_.exists)
      throw Error(ErrorCode::DuplicateEdge,
                  "edge (" + std::to_string(op_.u) + "," + std::to_string(op_.v) + ")");
    if (!op_.adding && !op_.exists)
      throw Error(ErrorCode::MissingEdge,
                  "edge (" + std::to_string(op_.u) + "," + std::to_string(op_.v) + ")");
    if (op_.u_new) op_.ku = 0;
    if (op_.v_new) op_.kv = 0;

    std::set<VertexId> roots;
    if (op_.ku < op_.kv) roots = {op_.u};
    else if (op_.kv < op_.ku) roots = {op_.v};
    else roots = {op_.u, op_.v};
    op_.kstar = std::min(op_.ku, op_.kv);

    if (op_.kstar == 0) {
      // Coreness 0 means isolated (or brand new): each root reaches only
      // itself, so the search collapses to the roots.
      op_.candidates = roots;
      for (VertexId r : roots) op_.cand_adj[r] = {};
      begin_apply(ctx);
      return;
    }

    ReachToken t;
    t.kstar = op_.kstar;
    for (VertexId r : roots) t.pending[r] = static_cast<BlockId>(ctx.owners().owner_of(r));
    phase_ = Phase::Search;
    ctx.send_to_worker(static_cast<EndpointId>(t.pending.begin()->second), kSearchToken, t.encode());
  }

  void begin_apply(MasterContext& ctx) {
    auto& owners = ctx.owners();
    EndpointId wu = owners.owner_of(op_.u);
    EndpointId wv = owners.owner_of(op_.v);
    phase_ = Phase::Apply;
    acks_ = 0;
    if (wu == wv) {
      PayloadWriter pw;
      pw.vid(op_.u).vid(op_.v).u8(op_.u_new).u8(op_.v_new).u8(op_.adding);
      ctx.send_to_worker(wu, kApplyLocalEdge, pw.take());
      expected_ = 1;
    } else {
      PayloadWriter a;
      a.vid(op_.u).vid(op_.v).u32(static_cast<std::uint32_t>(wv)).u8(op_.u_new).u8(op_.adding);
      ctx.send_to_worker(wu, kApplyFrontierEdge, a.take());
      PayloadWriter b;
      b.vid(op_.v).vid(op_.u).u32(static_cast<std::uint32_t>(wu)).u8(op_.v_new).u8(op_.adding);
      ctx.send_to_worker(wv, kApplyFrontierEdge, b.take());
      expected_ = 2;
    }
  }

  void finish_recompute(MasterContext& ctx) {
    // Patch the updated edge into the gathered (pre-update) adjacency and
    // make sure boundary endpoints carry a coreness entry.
    auto& adj = op_.cand_adj;
    if (op_.adding) {
      if (op_.candidates.count(op_.u)) adj[op_.u].push_back(op_.v);
      if (op_.candidates.count(op_.v)) adj[op_.v].push_back(op_.u);
    } else {
      if (op_.candidates.count(op_.u)) std::erase(adj[op_.u], op_.v);
      if (op_.candidates.count(op_.v)) std::erase(adj[op_.v], op_.u);
    }
    if (!op_.candidates.count(op_.u)) op_.kmap[op_.u] = op_.ku;
    if (!op_.candidates.count(op_.v)) op_.kmap[op_.v] = op_.kv;

    op_.changed = recompute_candidates(op_.candidates, adj, op_.kmap, op_.kstar, op_.adding);

    if (op_.changed.empty()) {
      finish_op(ctx);
      return;
    }
    std::map<EndpointId, std::vector<std::pair<VertexId, std::uint32_t>>> by_owner;
    for (const auto& [x, k] : op_.changed) by_owner[ctx.owners().owner_of(x)].push_back({x, k});
    phase_ = Phase::Set;
    acks_ = 0;
    expected_ = static_cast<int>(by_owner.size());
    for (const auto& [w, vals] : by_owner) {
      PayloadWriter pw;
      pw.u64(vals.size());
      for (const auto& [x, k] : vals) pw.vid(x).u32(k);
      ctx.send_to_worker(w, kSetCoreness, pw.take());
    }
  }

  void finish_op(MasterContext& ctx) {
    history_.push_back({op_.adding ? GraphUpdate::add_edge(op_.u, op_.v)
                                   : GraphUpdate::remove_edge(op_.u, op_.v),
                        op_.candidates, op_.changed});
    last_delta_ = op_.changed;
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
      // Vertex removal with no (remaining) incident edges: drop it.
      PayloadWriter pw;
      pw.vid(removing_vertex_);
      phase_ = Phase::VertexDrop;
      ctx.send_to_worker(ctx.owners().owner_of(removing_vertex_), kDropVertex, pw.take());
      return;
    }
    GraphUpdate next = subqueue_.front();
    subqueue_.pop_front();
    begin_edge_op(next, ctx, /*top_level=*/false);
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

    CorenessMap cores = batch_coreness(init_union_);
    std::map<EndpointId, std::vector<std::pair<VertexId, std::uint32_t>>> by_owner;
    for (EndpointId w = 0; w < ctx.worker_count(); ++w) by_owner[w];
    for (const auto& [u, k] : cores) by_owner[ctx.owners().owner_of(u)].push_back({u, k});
    acks_ = 0;
    for (const auto& [w, vals] : by_owner) {
      PayloadWriter pw;
      pw.u64(vals.size());
      for (const auto& [x, k] : vals) pw.vid(x).u32(k);
      ctx.send_to_worker(w, kInitCoreness, pw.take());
    }
  }

  bool assume_initialized_;
  Phase phase_ = Phase::None;
  EdgeOp op_;
  int acks_ = 0;
  int expected_ = 0;
  Graph init_union_;
  std::deque<GraphUpdate> subqueue_;
  bool removing_ = false;
  VertexId removing_vertex_ = 0;
  std::vector<KcoreTrace> history_;
  std::map<VertexId, std::uint32_t> last_delta_;
};

// --- Standalone operations ------------------------------------------------------

namespace detail {

class ReachProbe : public KcoreAlgorithm {
 public:
  ReachProbe(VertexId root, std::uint32_t kstar)
      : KcoreAlgorithm(true), root_(root), kstar_(kstar) {}

  std::string name() const override { return "k-reachable"; }

  void master_start(MasterContext& ctx) override {
    ReachToken t;
    t.kstar = kstar_;
    t.pending[root_] = static_cast<BlockId>(ctx.owners().owner_of(root_));
    ctx.send_to_worker(ctx.owners().owner_of(root_), kSearchToken, t.encode());
  }

  void master_update(const GraphUpdate&, MasterContext&) override {
    throw Error(ErrorCode::InvalidArgument, "probe accepts no updates");
  }

  void master_receive(const Message& msg, MasterContext& ctx) override {
    if (msg.kind != kSearchResult)
      throw Error(ErrorCode::InvalidArgument, "unexpected probe message");
    result_ = ReachToken::decode(msg).visited;
    ctx.mark_done();
  }

  const std::set<VertexId>& result() const { return result_; }

 private:
  VertexId root_;
  std::uint32_t kstar_;
  std::set<VertexId> result_;
};

}  // namespace detail

// Distributed k*-reachability from a root whose coreness is k*. Crosses
// blocks via W2W token forwards; metrics (message counts) are optional out.
inline std::set<VertexId> k_reachable(std::vector<Block>& blocks, VertexId root,
                                      std::uint32_t kstar, JobMetrics* metrics = nullptr) {
  detail::ReachProbe probe(root, kstar);
  JobResult r = run_job(blocks, {}, probe);
  if (metrics) *metrics = r.metrics;
  return probe.result();
}

// Candidate set for inserting (u, v): the k*-reachable set of the
// lower-coreness endpoint, the union of both endpoints' sets when equal.
inline std::set<VertexId> candidate_set(std::vector<Block>& blocks, VertexId u, VertexId v) {
  auto coreness_of = [&](VertexId x) -> std::uint32_t {
    for (const Block& b : blocks)
      if (b.has_state(x)) return b.state(x).coreness;
    return 0;
  };
  auto exists = [&](VertexId x) {
    for (const Block& b : blocks)
      if (b.has_state(x)) return true;
    return false;
  };
  std::uint32_t ku = coreness_of(u), kv = coreness_of(v);
  std::set<VertexId> roots;
  if (ku < kv) roots = {u};
  else if (kv < ku) roots = {v};
  else roots = {u, v};
  std::uint32_t kstar = std::min(ku, kv);

  std::set<VertexId> out;
  for (VertexId r : roots) {
    if (!exists(r)) continue;
    if (kstar == 0) {
      out.insert(r);
      continue;
    }
    auto reached = k_reachable(blocks, r, kstar);
    out.insert(reached.begin(), reached.end());
  }
  return out;
}

// Single-update maintenance entry points over already-initialized blocks.
// Both return the coreness delta (vertex -> new value).
inline std::map<VertexId, std::uint32_t> maintain_insert(std::vector<Block>& blocks, VertexId u,
                                                         VertexId v, JobMetrics* metrics = nullptr) {
  KcoreAlgorithm algo(/*assume_initialized=*/true);
  std::vector<GraphUpdate> upds{GraphUpdate::add_edge(u, v)};
  JobResult r = run_job(blocks, upds, algo);
  if (metrics) *metrics = r.metrics;
  return algo.last_delta();
}

inline std::map<VertexId, std::uint32_t> maintain_delete(std::vector<Block>& blocks, VertexId u,
                                                         VertexId v, JobMetrics* metrics = nullptr) {
  KcoreAlgorithm algo(/*assume_initialized=*/true);
  std::vector<GraphUpdate> upds{GraphUpdate::remove_edge(u, v)};
  JobResult r = run_job(blocks, upds, algo);
  if (metrics) *metrics = r.metrics;
  return algo.last_delta();
}

// Maintained coreness gathered from block states.
inline CorenessMap coreness_of_blocks(const std::vector<Block>& blocks) {
  CorenessMap out;
  for (const Block& b : blocks)
    for (const auto& [u, st] : b.states()) out[u] = st.coreness;
  return out;
}

// Text dump: lines "vertex_id coreness" ascending by id.
inline void dump_coreness(const CorenessMap& cores, std::ostream& os) {
  for (const auto& [u, k] : cores) os << u << " " << k << "\n";
}

}  // namespace bladyg
