#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bladyg/runtime.hpp"

namespace bladyg {

// Distributed degree maintenance. The batch phase computes every owned
// vertex's degree locally (local + frontier edges); each edge update then
// touches exactly the owners of its endpoints: one M2W when both endpoints
// share a block, two when they do not, each answered by a W2M notification.
class DegreeAlgorithm : public Algorithm {
 public:
  static constexpr std::uint32_t kInitRequest = 1;
  static constexpr std::uint32_t kInitDone = 2;
  static constexpr std::uint32_t kApplyLocalEdge = 3;     // u, v, create_u, create_v, add-flag
  static constexpr std::uint32_t kApplyFrontierEdge = 4;  // local, remote, remote_block, create, add-flag
  static constexpr std::uint32_t kAck = 5;
  static constexpr std::uint32_t kAddVertex = 6;
  static constexpr std::uint32_t kRemoveVertex = 7;
  static constexpr std::uint32_t kRemoveVertexFrontier = 8;  // W2W: u, remotes on this block
  static constexpr std::uint32_t kRemoveDone = 9;            // forwarded block count
  static constexpr std::uint32_t kFrontierAck = 10;

  std::string name() const override { return "degree"; }

  void master_start(MasterContext& ctx) override {
    expected_ = ctx.worker_count();
    received_ = 0;
    for (EndpointId w = 0; w < ctx.worker_count(); ++w) ctx.send_to_worker(w, kInitRequest);
    if (expected_ == 0) ctx.mark_done();
  }

  void master_update(const GraphUpdate& upd, MasterContext& ctx) override {
    received_ = 0;
    expected_ = 0;
    auto& owners = ctx.owners();

    switch (upd.kind) {
      case GraphUpdate::Kind::AddEdge:
      case GraphUpdate::Kind::RemoveEdge: {
        const bool adding = upd.kind == GraphUpdate::Kind::AddEdge;
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
        EndpointId wu = owners.owner_of(upd.u);
        EndpointId wv = owners.owner_of(upd.v);
        if (wu == wv) {
          PayloadWriter pw;
          pw.vid(upd.u).vid(upd.v).u8(create_u).u8(create_v).u8(adding);
          ctx.send_to_worker(wu, kApplyLocalEdge, pw.take());
          expected_ = 1;
        } else {
          PayloadWriter a;
          a.vid(upd.u).vid(upd.v).u32(static_cast<std::uint32_t>(wv)).u8(create_u).u8(adding);
          ctx.send_to_worker(wu, kApplyFrontierEdge, a.take());
          PayloadWriter b;
          b.vid(upd.v).vid(upd.u).u32(static_cast<std::uint32_t>(wu)).u8(create_v).u8(adding);
          ctx.send_to_worker(wv, kApplyFrontierEdge, b.take());
          expected_ = 2;
        }
        break;
      }
      case GraphUpdate::Kind::AddVertex: {
        if (owners.known(upd.u)) {  // idempotent
          ctx.mark_done();
          return;
        }
        EndpointId w = owners.fewest_owned();
        owners.set_owner(upd.u, w);
        PayloadWriter pw;
        pw.vid(upd.u);
        ctx.send_to_worker(w, kAddVertex, pw.take());
        expected_ = 1;
        break;
      }
      case GraphUpdate::Kind::RemoveVertex: {
        if (!owners.known(upd.u))
          throw Error(ErrorCode::MissingVertex, "vertex " + std::to_string(upd.u));
        EndpointId w = owners.owner_of(upd.u);
        owners.erase(upd.u);
        PayloadWriter pw;
        pw.vid(upd.u);
        ctx.send_to_worker(w, kRemoveVertex, pw.take());
        expected_ = -1;  // learned from kRemoveDone
        break;
      }
    }
  }

  void master_receive(const Message& msg, MasterContext& ctx) override {
    switch (msg.kind) {
      case kInitDone:
      case kAck:
      case kFrontierAck:
        ++received_;
        break;
      case kRemoveDone: {
        PayloadReader pr(msg);
        expected_ = 1 + static_cast<int>(pr.u64());
        ++received_;
        break;
      }
      default:
        throw Error(ErrorCode::InvalidArgument, "unexpected master message kind");
    }
    if (expected_ >= 0 && received_ == expected_) ctx.mark_done();
  }

  void worker_receive(Block& block, const Message& msg, WorkerContext& ctx) override {
    switch (msg.kind) {
      case kInitRequest: {
        for (auto& [u, st] : block.states()) st.degree = block.full_degree(u);
        ctx.send_to_master(kInitDone);
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
        ctx.send_to_master(kAck);
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
        ctx.send_to_master(kAck);
        break;
      }
      case kAddVertex: {
        PayloadReader pr(msg);
        block.add_owned_vertex(pr.vid());
        ctx.send_to_master(kAck);
        break;
      }
      case kRemoveVertex: {
        PayloadReader pr(msg);
        VertexId u = pr.vid();
        for (VertexId w : block.local_graph().neighbors(u)) --block.state(w).degree;
        std::map<BlockId, std::vector<VertexId>> by_block;
        for (const FrontierEdge& fe : block.frontier_of(u)) by_block[fe.remote_block].push_back(fe.remote);
        block.remove_owned_vertex(u);
        for (const auto& [b, remotes] : by_block) {
          PayloadWriter pw;
          pw.vid(u).vids(remotes);
          ctx.send_to_worker(static_cast<EndpointId>(b), kRemoveVertexFrontier, pw.take());
        }
        PayloadWriter done;
        done.u64(by_block.size());
        ctx.send_to_master(kRemoveDone, done.take());
        break;
      }
      case kRemoveVertexFrontier: {
        PayloadReader pr(msg);
        VertexId u = pr.vid();
        for (VertexId v : pr.vids()) {
          block.remove_frontier_edge(v, u);
          --block.state(v).degree;
        }
        ctx.send_to_master(kFrontierAck);
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
  int expected_ = 0;
  int received_ = 0;
};

}  // namespace bladyg
