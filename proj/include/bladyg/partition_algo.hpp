#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bladyg/partitioning.hpp"
#include "bladyg/runtime.hpp"

namespace bladyg {

// Blocks for the partition-maintenance job: block b's local graph is the
// subgraph induced by its edge partition E_b. Vertices replicate across
// blocks (V_i are the endpoints of E_i), so a vertex's state may exist in
// several blocks.
inline std::vector<Block> make_partition_blocks(const PartitionAssignment& pa) {
  std::vector<Block> blocks;
  blocks.reserve(pa.block_count());
  for (BlockId b = 0; b < pa.block_count(); ++b) blocks.emplace_back(b);
  for (const auto& [e, b] : pa.entries()) {
    blocks[b].add_owned_vertex(e.u);
    blocks[b].add_owned_vertex(e.v);
    blocks[b].add_local_edge(e.u, e.v);
  }
  return blocks;
}

// Distributed UB-Update maintenance of an edge partitioning. Insertions ask
// the blocks hosting either endpoint for their objective scores (M2W/W2M)
// and place the edge at the arg max; removals evict the edge from its block
// and then run the repartitioning-threshold poll across all workers.
class PartitionAlgorithm : public Algorithm {
 public:
  static constexpr std::uint32_t kScoreRequest = 1;   // u, v, share
  static constexpr std::uint32_t kScoreReply = 2;     // block, score
  static constexpr std::uint32_t kAssignEdge = 3;     // u, v
  static constexpr std::uint32_t kAssignAck = 4;
  static constexpr std::uint32_t kRemoveEdge = 5;     // u, v
  static constexpr std::uint32_t kRemoveAck = 6;
  static constexpr std::uint32_t kThresholdRequest = 7;  // total edges
  static constexpr std::uint32_t kThresholdReply = 8;    // score

  PartitionAlgorithm(PartitionAssignment pa, UbUpdateParams params = {}, double trigger = 1.5)
      : pa_(std::move(pa)), params_(params), trigger_(trigger) {}

  std::string name() const override { return "partition"; }

  const PartitionAssignment& assignment() const { return pa_; }
  const RepartitionDecision& last_decision() const { return decision_; }
  const std::vector<std::pair<Edge, BlockId>>& assignments_made() const { return placed_; }

  void master_update(const GraphUpdate& upd, MasterContext& ctx) override {
    switch (upd.kind) {
      case GraphUpdate::Kind::AddEdge: begin_insert(Edge(upd.u, upd.v), ctx); break;
      case GraphUpdate::Kind::RemoveEdge: {
        pending_removals_.clear();
        pending_removals_.push_back(Edge(upd.u, upd.v));
        begin_removals(ctx);
        break;
      }
      case GraphUpdate::Kind::AddVertex:
        // An isolated vertex is no one's endpoint; nothing to assign.
        ctx.mark_done();
        break;
      case GraphUpdate::Kind::RemoveVertex: {
        pending_removals_.clear();
        for (const auto& [e, b] : pa_.entries())
          if (e.u == upd.u || e.v == upd.u) pending_removals_.push_back(e);
        if (pending_removals_.empty()) {
          ctx.mark_done();
          return;
        }
        begin_removals(ctx);
        break;
      }
    }
  }

  void master_receive(const Message& msg, MasterContext& ctx) override {
    switch (msg.kind) {
      case kScoreReply: {
        PayloadReader pr(msg);
        BlockId b = pr.u32();
        scores_[b] = pr.f64();
        if (static_cast<int>(scores_.size()) < expected_) return;
        BlockId best = pick_best();
        PayloadWriter pw;
        pw.vid(op_edge_.u).vid(op_edge_.v);
        phase_ = Phase::Assign;
        ctx.send_to_worker(static_cast<EndpointId>(best), kAssignEdge, pw.take());
        break;
      }
      case kAssignAck: {
        PayloadReader pr(msg);
        BlockId b = pr.u32();
        pa_.assign(op_edge_, b);
        placed_.push_back({op_edge_, b});
        ctx.mark_done();
        break;
      }
      case kRemoveAck: {
        if (++received_ < expected_) return;
        begin_threshold_poll(ctx);
        break;
      }
      case kThresholdReply: {
        PayloadReader pr(msg);
        BlockId b = pr.u32();
        decision_.scores[b] = pr.f64();
        if (decision_.scores[b] > trigger_) decision_.repartition = true;
        if (++received_ == expected_) ctx.mark_done();
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected master message kind");
    }
  }

  void worker_receive(Block& block, const Message& msg, WorkerContext& ctx) override {
    switch (msg.kind) {
      case kScoreRequest: {
        PayloadReader pr(msg);
        VertexId u = pr.vid(), v = pr.vid();
        double share = pr.f64();
        std::size_t local = 0;
        const Graph& g = block.local_graph();
        for (VertexId x : {u, v})
          if (g.has_vertex(x)) local += g.degree(x);
        double penalty = (static_cast<double>(g.edge_count()) - share) / share;
        double score = params_.alpha * static_cast<double>(local) - params_.beta * penalty;
        PayloadWriter pw;
        pw.u32(block.id()).f64(score);
        ctx.send_to_master(kScoreReply, pw.take());
        break;
      }
      case kAssignEdge: {
        PayloadReader pr(msg);
        VertexId u = pr.vid(), v = pr.vid();
        block.add_owned_vertex(u);
        block.add_owned_vertex(v);
        block.add_local_edge(u, v);
        PayloadWriter pw;
        pw.u32(block.id());
        ctx.send_to_master(kAssignAck, pw.take());
        break;
      }
      case kRemoveEdge: {
        PayloadReader pr(msg);
        VertexId u = pr.vid(), v = pr.vid();
        block.remove_local_edge(u, v);
        // V_i holds exactly the endpoints of E_i.
        for (VertexId x : {u, v})
          if (block.local_graph().degree(x) == 0) block.remove_owned_vertex(x);
        ctx.send_to_master(kRemoveAck);
        break;
      }
      case kThresholdRequest: {
        PayloadReader pr(msg);
        double total = pr.f64();
        double score = total == 0.0
                           ? 0.0
                           : static_cast<double>(block.local_graph().edge_count()) *
                                 static_cast<double>(ctx.worker_count()) / total;
        PayloadWriter pw;
        pw.u32(block.id()).f64(score);
        ctx.send_to_master(kThresholdReply, pw.take());
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected worker message kind");
    }
  }

  std::string vertex_state_columns(const VertexState& st) const override {
    return std::to_string(st.block);
  }

 private:
  enum class Phase { None, Score, Assign, Remove, Threshold };

  void begin_insert(const Edge& e, MasterContext& ctx) {
    if (pa_.contains(e))
      throw Error(ErrorCode::DuplicateEdge,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") already assigned");
    op_edge_ = e;
    scores_.clear();
    std::vector<BlockId> candidates;
    for (BlockId b = 0; b < pa_.block_count(); ++b)
      if (pa_.block_has_vertex(b, e.u) || pa_.block_has_vertex(b, e.v)) candidates.push_back(b);
    if (candidates.empty())
      for (BlockId b = 0; b < pa_.block_count(); ++b) candidates.push_back(b);

    double share = static_cast<double>(pa_.total_edges()) / static_cast<double>(pa_.block_count());
    if (share <= 0.0) share = 1.0;
    phase_ = Phase::Score;
    expected_ = static_cast<int>(candidates.size());
    for (BlockId b : candidates) {
      PayloadWriter pw;
      pw.vid(e.u).vid(e.v).f64(share);
      ctx.send_to_worker(static_cast<EndpointId>(b), kScoreRequest, pw.take());
    }
  }

  BlockId pick_best() const {
    BlockId best = scores_.begin()->first;
    double best_score = scores_.begin()->second;
    for (const auto& [b, s] : scores_) {
      bool better = s > best_score ||
                    (s == best_score && (pa_.edge_count(b) < pa_.edge_count(best) ||
                                         (pa_.edge_count(b) == pa_.edge_count(best) && b < best)));
      if (better) {
        best = b;
        best_score = s;
      }
    }
    return best;
  }

  void begin_removals(MasterContext& ctx) {
    expected_ = 0;
    received_ = 0;
    phase_ = Phase::Remove;
    for (const Edge& e : pending_removals_) {
      BlockId b = pa_.block_of(e);  // MissingEdge if unassigned
      PayloadWriter pw;
      pw.vid(e.u).vid(e.v);
      ctx.send_to_worker(static_cast<EndpointId>(b), kRemoveEdge, pw.take());
      pa_.erase(e);
      ++expected_;
    }
  }

  void begin_threshold_poll(MasterContext& ctx) {
    phase_ = Phase::Threshold;
    expected_ = ctx.worker_count();
    received_ = 0;
    decision_ = RepartitionDecision{};
    decision_.trigger = trigger_;
    decision_.scores.assign(ctx.worker_count(), 0.0);
    PayloadWriter pw;
    pw.f64(static_cast<double>(pa_.total_edges()));
    auto payload = pw.take();
    for (EndpointId w = 0; w < ctx.worker_count(); ++w)
      ctx.send_to_worker(w, kThresholdRequest, payload);
  }

  PartitionAssignment pa_;
  UbUpdateParams params_;
  double trigger_;
  Phase phase_ = Phase::None;
  Edge op_edge_;
  std::map<BlockId, double> scores_;
  std::vector<Edge> pending_removals_;
  int expected_ = 0;
  int received_ = 0;
  RepartitionDecision decision_;
  std::vector<std::pair<Edge, BlockId>> placed_;
};

}  // namespace bladyg
