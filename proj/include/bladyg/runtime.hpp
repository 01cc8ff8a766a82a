#pragma once

#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bladyg/block.hpp"
#include "bladyg/graph.hpp"

namespace bladyg {

// The three legal message channels plus pure-local computation.
enum class ComputingMode : std::uint8_t { M2W, W2M, W2W, Local };

inline const char* to_string(ComputingMode m) {
  switch (m) {
    case ComputingMode::M2W: return "M2W";
    case ComputingMode::W2M: return "W2M";
    case ComputingMode::W2W: return "W2W";
    case ComputingMode::Local: return "Local";
  }
  return "?";
}

using EndpointId = std::int32_t;
inline constexpr EndpointId kMaster = -1;

inline bool mode_allows(ComputingMode mode, EndpointId from, EndpointId to) {
  switch (mode) {
    case ComputingMode::M2W: return from == kMaster && to != kMaster;
    case ComputingMode::W2M: return from != kMaster && to == kMaster;
    case ComputingMode::W2W: return from != kMaster && to != kMaster && from != to;
    case ComputingMode::Local: return false;
  }
  return false;
}

struct Message {
  std::uint64_t id = 0;
  ComputingMode mode = ComputingMode::Local;
  EndpointId from = kMaster;
  EndpointId to = kMaster;
  std::uint32_t kind = 0;
  std::vector<std::uint8_t> payload;
  std::uint64_t round = 0;  // stamped by the hub; asserts per-update serialization
};

// Reserved kind for the runtime's own control traffic.
inline constexpr std::uint32_t kShutdownKind = 0xffffffffu;

// --- Payload serialization --------------------------------------------------
// Hooks own their wire formats; these helpers write/read little-endian fixed
// width fields with length-prefixed sequences.

class PayloadWriter {
 public:
  PayloadWriter& u8(std::uint8_t x) {
    buf_.push_back(x);
    return *this;
  }
  PayloadWriter& u32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    return *this;
  }
  PayloadWriter& u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    return *this;
  }
  PayloadWriter& f64(double x) { return u64(std::bit_cast<std::uint64_t>(x)); }
  PayloadWriter& vid(VertexId x) { return u64(x); }
  PayloadWriter& vids(std::span<const VertexId> xs) {
    u64(xs.size());
    for (VertexId x : xs) u64(x);
    return *this;
  }

  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> data) : data_(data) {}
  explicit PayloadReader(const Message& msg) : data_(msg.payload) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return x;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return x;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  VertexId vid() { return u64(); }
  std::vector<VertexId> vids() {
    std::uint64_t n = u64();
    need(8 * n);
    std::vector<VertexId> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(u64());
    return out;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > data_.size()) throw Error(ErrorCode::ParseError, "payload underflow");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// --- Metrics ----------------------------------------------------------------

struct JobMetrics {
  std::uint64_t sent_m2w = 0;
  std::uint64_t sent_w2m = 0;
  std::uint64_t sent_w2w = 0;
  std::uint64_t mode_violation_deliveries = 0;  // channel-layer assertion; must stay 0
  std::uint64_t updates = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  double total_ms = 0.0;
  double insert_ms = 0.0;
  double delete_ms = 0.0;

  std::uint64_t messages_total() const { return sent_m2w + sent_w2m + sent_w2w; }
};

// Process-wide tally of delivery-side mode assertions, across every runtime
// instance. The acceptance suite requires this to remain zero.
inline std::atomic<std::uint64_t>& global_mode_violations() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

// --- Channel hub ------------------------------------------------------------
// FIFO per (from, to) channel, realized as one seq-ordered queue per receiver.
// send() validates the computing mode and endpoints; delivery re-validates
// and counts any violation that slipped through (there must be none).

class ChannelHub {
 public:
  explicit ChannelHub(int worker_count) : worker_count_(worker_count), inboxes_(worker_count + 1) {}

  int worker_count() const { return worker_count_; }

  // Returns the delivery receipt (message id).
  std::uint64_t send(Message msg) {
    validate_endpoint(msg.from);
    validate_endpoint(msg.to);
    if (!mode_allows(msg.mode, msg.from, msg.to))
      throw Error(ErrorCode::ModeViolation,
                  std::string(to_string(msg.mode)) + " from " + std::to_string(msg.from) + " to " +
                      std::to_string(msg.to));
    std::lock_guard lock(mu_);
    msg.id = next_id_++;
    msg.round = round_;
    if (msg.kind != kShutdownKind) count_send(msg.mode);  // control traffic is not algorithm traffic
    auto& box = inboxes_[index_of(msg.to)];
    std::uint64_t id = msg.id;
    box.queue.push_back(std::move(msg));
    box.cv.notify_one();
    return id;
  }

  // Lowest-sequence message across all inboxes; the deterministic scheduler's
  // delivery rule (equivalent to global send order).
  std::optional<Message> pop_lowest() {
    std::lock_guard lock(mu_);
    int best = -1;
    for (std::size_t i = 0; i < inboxes_.size(); ++i) {
      auto& q = inboxes_[i].queue;
      if (q.empty()) continue;
      if (best < 0 || q.front().id < inboxes_[best].queue.front().id) best = static_cast<int>(i);
    }
    if (best < 0) return std::nullopt;
    Message msg = std::move(inboxes_[best].queue.front());
    inboxes_[best].queue.pop_front();
    return deliver(std::move(msg));
  }

  // Blocking receive for one endpoint (concurrent scheduler). Returns nullopt
  // when the hub is shut down or a failure is flagged.
  std::optional<Message> pop_for(EndpointId who) {
    auto& box = inboxes_[index_of(who)];
    std::unique_lock lock(mu_);
    box.cv.wait(lock, [&] { return !box.queue.empty() || stop_ || failed_; });
    if (box.queue.empty()) return std::nullopt;
    Message msg = std::move(box.queue.front());
    box.queue.pop_front();
    return deliver(std::move(msg));
  }

  bool empty() const {
    std::lock_guard lock(mu_);
    for (const auto& box : inboxes_)
      if (!box.queue.empty()) return false;
    return true;
  }

  void set_round(std::uint64_t r) {
    std::lock_guard lock(mu_);
    round_ = r;
  }

  void flag_failure() {
    std::lock_guard lock(mu_);
    failed_ = true;
    for (auto& box : inboxes_) box.cv.notify_all();
  }

  void shutdown() {
    std::lock_guard lock(mu_);
    stop_ = true;
    for (auto& box : inboxes_) box.cv.notify_all();
  }

  JobMetrics metrics() const {
    std::lock_guard lock(mu_);
    return metrics_;
  }

  void add_round_time(GraphUpdate::Kind kind, double ms) {
    std::lock_guard lock(mu_);
    ++metrics_.updates;
    metrics_.total_ms += ms;
    if (kind == GraphUpdate::Kind::AddEdge || kind == GraphUpdate::Kind::AddVertex) {
      ++metrics_.inserts;
      metrics_.insert_ms += ms;
    } else {
      ++metrics_.deletes;
      metrics_.delete_ms += ms;
    }
  }

 private:
  struct Inbox {
    std::deque<Message> queue;
    std::condition_variable cv;
  };

  void validate_endpoint(EndpointId e) const {
    if (e != kMaster && (e < 0 || e >= worker_count_))
      throw Error(ErrorCode::UnknownEndpoint, "endpoint " + std::to_string(e));
  }

  std::size_t index_of(EndpointId e) const { return e == kMaster ? 0 : static_cast<std::size_t>(e) + 1; }

  void count_send(ComputingMode mode) {
    switch (mode) {
      case ComputingMode::M2W: ++metrics_.sent_m2w; break;
      case ComputingMode::W2M: ++metrics_.sent_w2m; break;
      case ComputingMode::W2W: ++metrics_.sent_w2w; break;
      case ComputingMode::Local: break;
    }
  }

  Message deliver(Message msg) {
    // Channel-layer assertion: a delivered message must satisfy its mode.
    if (!mode_allows(msg.mode, msg.from, msg.to)) {
      ++metrics_.mode_violation_deliveries;
      ++global_mode_violations();
    }
    return msg;
  }

  int worker_count_;
  mutable std::mutex mu_;
  std::vector<Inbox> inboxes_;
  std::uint64_t next_id_ = 1;
  std::uint64_t round_ = 0;
  bool stop_ = false;
  bool failed_ = false;
  JobMetrics metrics_;
};

// --- Hook contexts ----------------------------------------------------------

// Master-side vertex ownership directory; runtime state shared by algorithms.
class OwnerDirectory {
 public:
  void reset(int worker_count) {
    owner_.clear();
    owned_counts_.assign(worker_count, 0);
  }

  bool known(VertexId u) const { return owner_.count(u) != 0; }

  EndpointId owner_of(VertexId u) const {
    auto it = owner_.find(u);
    if (it == owner_.end()) throw Error(ErrorCode::MissingVertex, "no owner for " + std::to_string(u));
    return it->second;
  }

  void set_owner(VertexId u, EndpointId w) {
    auto [it, inserted] = owner_.try_emplace(u, w);
    if (!inserted) {
      --owned_counts_[it->second];
      it->second = w;
    }
    ++owned_counts_[w];
  }

  void erase(VertexId u) {
    auto it = owner_.find(u);
    if (it == owner_.end()) return;
    --owned_counts_[it->second];
    owner_.erase(it);
  }

  EndpointId fewest_owned() const {
    EndpointId best = 0;
    for (EndpointId w = 1; w < static_cast<EndpointId>(owned_counts_.size()); ++w)
      if (owned_counts_[w] < owned_counts_[best]) best = w;
    return best;
  }

  const std::map<VertexId, EndpointId>& all() const { return owner_; }

 private:
  std::map<VertexId, EndpointId> owner_;
  std::vector<std::size_t> owned_counts_;
};

class MasterContext {
 public:
  MasterContext(int worker_count, std::function<void(Message)> sink)
      : worker_count_(worker_count), sink_(std::move(sink)) {
    owners_.reset(worker_count);
  }

  int worker_count() const { return worker_count_; }

  void send_to_worker(EndpointId w, std::uint32_t kind, std::vector<std::uint8_t> payload = {}) {
    if (local_mode_)
      throw Error(ErrorCode::ModeViolation, "Local computation may not emit messages");
    Message msg;
    msg.mode = ComputingMode::M2W;
    msg.from = kMaster;
    msg.to = w;
    msg.kind = kind;
    msg.payload = std::move(payload);
    sink_(std::move(msg));
  }

  void mark_done() { done_ = true; }
  bool done() const { return done_; }
  void reset_done() { done_ = false; }

  OwnerDirectory& owners() { return owners_; }
  const OwnerDirectory& owners() const { return owners_; }

  // Scopes a Local-mode computation: emission is forbidden inside.
  class LocalScope {
   public:
    explicit LocalScope(MasterContext& ctx) : ctx_(ctx) { ctx_.local_mode_ = true; }
    ~LocalScope() { ctx_.local_mode_ = false; }
    LocalScope(const LocalScope&) = delete;
    LocalScope& operator=(const LocalScope&) = delete;

   private:
    MasterContext& ctx_;
  };

 private:
  int worker_count_;
  std::function<void(Message)> sink_;
  bool done_ = false;
  bool local_mode_ = false;
  OwnerDirectory owners_;
};

class WorkerContext {
 public:
  WorkerContext(EndpointId self, int worker_count, std::function<void(Message)> sink)
      : self_(self), worker_count_(worker_count), sink_(std::move(sink)) {}

  EndpointId self() const { return self_; }
  int worker_count() const { return worker_count_; }

  void send_to_master(std::uint32_t kind, std::vector<std::uint8_t> payload = {}) {
    Message msg;
    msg.mode = ComputingMode::W2M;
    msg.from = self_;
    msg.to = kMaster;
    msg.kind = kind;
    msg.payload = std::move(payload);
    sink_(std::move(msg));
  }

  void send_to_worker(EndpointId w, std::uint32_t kind, std::vector<std::uint8_t> payload = {}) {
    Message msg;
    msg.mode = ComputingMode::W2W;
    msg.from = self_;
    msg.to = w;
    msg.kind = kind;
    msg.payload = std::move(payload);
    if (!mode_allows(msg.mode, msg.from, msg.to))
      throw Error(ErrorCode::ModeViolation, "W2W from " + std::to_string(self_) + " to " + std::to_string(w));
    sink_(std::move(msg));
  }

 private:
  EndpointId self_;
  int worker_count_;
  std::function<void(Message)> sink_;
};

// --- Algorithm hook contract --------------------------------------------------

class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;

  // Batch phase kickoff. The default has no batch phase and finishes at once.
  virtual void master_start(MasterContext& ctx) { ctx.mark_done(); }

  // One incremental update. The master emits whatever M2W traffic the update
  // needs and calls ctx.mark_done() once every notification is accounted.
  virtual void master_update(const GraphUpdate& upd, MasterContext& ctx) = 0;

  // W2M handler.
  virtual void master_receive(const Message& msg, MasterContext& ctx) = 0;

  // M2W / W2W handler; may mutate only the passed block.
  virtual void worker_receive(Block& block, const Message& msg, WorkerContext& ctx) = 0;

  // Columns after the vertex id in snapshot files.
  virtual std::string vertex_state_columns(const VertexState& st) const {
    return std::to_string(st.degree);
  }
};

// --- Execution plans ------------------------------------------------------------
// An ordered list of local and distant computations. A distant step sends one
// M2W message and holds the plan until the target's W2M notifications arrive;
// a local step runs master-side (Local mode, no messages). Step i+1 never
// starts before step i has completed.

struct PlanStep {
  EndpointId target = kMaster;  // worker id, or kMaster for a local step
  std::uint32_t kind = 0;
  std::vector<std::uint8_t> args;
  int notifications = 1;  // W2M completions that finish a distant step
  std::function<void(MasterContext&)> local;  // local computation, target == kMaster

  static PlanStep distant(EndpointId worker, std::uint32_t kind,
                          std::vector<std::uint8_t> args = {}, int notifications = 1) {
    PlanStep s;
    s.target = worker;
    s.kind = kind;
    s.args = std::move(args);
    s.notifications = notifications;
    return s;
  }

  static PlanStep local_step(std::function<void(MasterContext&)> fn) {
    PlanStep s;
    s.local = std::move(fn);
    return s;
  }
};

class ExecutionPlan {
 public:
  ExecutionPlan() = default;
  explicit ExecutionPlan(std::vector<PlanStep> steps) : steps_(std::move(steps)) {}

  void push(PlanStep step) { steps_.push_back(std::move(step)); }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }
  const std::vector<PlanStep>& steps() const { return steps_; }

 private:
  std::vector<PlanStep> steps_;
};

// Algorithm adapter that executes one ExecutionPlan per update. Subclasses
// supply the plan and the worker-side hook; the adapter sequences the steps
// and marks the round done after the last one.
class PlanDrivenAlgorithm : public Algorithm {
 public:
  void master_update(const GraphUpdate& upd, MasterContext& ctx) override {
    plan_ = plan_update(upd, ctx);
    cursor_ = 0;
    pending_ = 0;
    advance(ctx);
  }

  void master_receive(const Message& msg, MasterContext& ctx) override {
    on_notification(msg, ctx);
    if (--pending_ == 0) advance(ctx);
  }

 protected:
  virtual ExecutionPlan plan_update(const GraphUpdate& upd, MasterContext& ctx) = 0;

  // Distant-step notifications pass through here before the plan advances.
  virtual void on_notification(const Message&, MasterContext&) {}

 private:
  void advance(MasterContext& ctx) {
    while (cursor_ < plan_.size()) {
      const PlanStep& step = plan_.steps()[cursor_++];
      if (step.target == kMaster) {
        if (step.local) {
          MasterContext::LocalScope scope(ctx);
          step.local(ctx);
        }
        continue;  // local steps complete synchronously
      }
      pending_ = step.notifications;
      ctx.send_to_worker(step.target, step.kind, step.args);
      if (pending_ > 0) return;
    }
    ctx.mark_done();
  }

  ExecutionPlan plan_;
  std::size_t cursor_ = 0;
  int pending_ = 0;
};

// --- Job results --------------------------------------------------------------

struct JobResult {
  std::vector<std::pair<VertexId, VertexState>> vertices;  // ascending by id
  std::vector<Edge> edges;                                 // canonical ascending
  JobMetrics metrics;
};

inline void collect_result(const std::vector<Block>& blocks, JobResult& out) {
  std::map<VertexId, VertexState> vertices;
  std::set<Edge> edges;
  for (const Block& b : blocks) {
    for (const auto& [u, st] : b.states()) vertices.emplace(u, st);
    for (const Edge& e : b.local_graph().edges()) edges.insert(e);
    for (const FrontierEdge& fe : b.frontier()) edges.insert(Edge(fe.local, fe.remote));
  }
  out.vertices.assign(vertices.begin(), vertices.end());
  out.edges.assign(edges.begin(), edges.end());
}

// --- Single-step drivers (testing surface) -------------------------------------

// Runs the worker hook over an inbox, collecting the mode-checked outbox.
inline std::vector<Message> step_worker(Block& block, std::span<const Message> inbox,
                                        Algorithm& algo, int worker_count) {
  std::vector<Message> outbox;
  WorkerContext ctx(static_cast<EndpointId>(block.id()), worker_count,
                    [&](Message m) { outbox.push_back(std::move(m)); });
  for (const Message& msg : inbox) {
    if (msg.to != static_cast<EndpointId>(block.id()))
      throw Error(ErrorCode::UnknownEndpoint, "message not addressed to this block");
    algo.worker_receive(block, msg, ctx);
  }
  return outbox;
}

struct MasterStep {
  std::vector<Message> outbox;
  bool done = false;
};

inline MasterStep step_master(Algorithm& algo, std::span<const Message> inbox,
                              MasterContext& ctx) {
  MasterStep out;
  for (const Message& msg : inbox) {
    if (msg.to != kMaster) throw Error(ErrorCode::UnknownEndpoint, "message not addressed to master");
    algo.master_receive(msg, ctx);
  }
  out.done = ctx.done();
  return out;
}

// --- run_job --------------------------------------------------------------------

enum class SchedulerKind { Deterministic, Concurrent };

struct JobOptions {
  SchedulerKind scheduler = SchedulerKind::Deterministic;
};

namespace detail {

class JobDriver {
 public:
  JobDriver(std::vector<Block>& blocks, Algorithm& algo, const JobOptions& opts)
      : blocks_(blocks), algo_(algo), opts_(opts), hub_(static_cast<int>(blocks.size())) {
    worker_ctxs_.reserve(blocks.size());
    for (std::size_t w = 0; w < blocks.size(); ++w)
      worker_ctxs_.emplace_back(static_cast<EndpointId>(w), static_cast<int>(blocks.size()),
                                [this](Message m) { hub_.send(std::move(m)); });
    master_ctx_.emplace(static_cast<int>(blocks.size()),
                        [this](Message m) { hub_.send(std::move(m)); });
    for (const Block& b : blocks_)
      for (const auto& [u, _] : b.states()) master_ctx_->owners().set_owner(u, b.id());
  }

  JobResult run(std::span<const GraphUpdate> updates) {
    if (opts_.scheduler == SchedulerKind::Deterministic)
      run_deterministic(updates);
    else
      run_concurrent(updates);

    JobResult result;
    collect_result(blocks_, result);
    result.metrics = hub_.metrics();
    return result;
  }

 private:
  using Clock = std::chrono::steady_clock;

  void fail(const std::string& where, const std::exception& cause, const GraphUpdate* upd) {
    std::string what = where + ": " + cause.what();
    if (upd) what += " (update: " + to_string(*upd) + ")";
    throw Error(ErrorCode::HookFailure, what);
  }

  void dispatch(const Message& msg, const GraphUpdate* upd) {
    if (msg.to == kMaster) {
      try {
        algo_.master_receive(msg, *master_ctx_);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ModeViolation || e.code() == ErrorCode::UnknownEndpoint) throw;
        fail("master hook", e, upd);
      } catch (const std::exception& e) {
        fail("master hook", e, upd);
      }
    } else {
      try {
        algo_.worker_receive(blocks_[msg.to], msg, worker_ctxs_[msg.to]);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ModeViolation || e.code() == ErrorCode::UnknownEndpoint) throw;
        fail("worker " + std::to_string(msg.to), e, upd);
      } catch (const std::exception& e) {
        fail("worker " + std::to_string(msg.to), e, upd);
      }
    }
  }

  void drain_round(const GraphUpdate* upd, std::uint64_t round) {
    while (auto msg = hub_.pop_lowest()) {
      if (msg->round != round)
        throw Error(ErrorCode::HookFailure, "message from round " + std::to_string(msg->round) +
                                                " delivered in round " + std::to_string(round));
      dispatch(*msg, upd);
    }
    if (!master_ctx_->done())
      throw Error(ErrorCode::HookFailure,
                  "protocol stalled: channels empty but round not complete" +
                      (upd ? " (update: " + to_string(*upd) + ")" : std::string()));
  }

  void run_deterministic(std::span<const GraphUpdate> updates) {
    hub_.set_round(0);
    master_ctx_->reset_done();
    try {
      algo_.master_start(*master_ctx_);
    } catch (const std::exception& e) {
      fail("master start", e, nullptr);
    }
    drain_round(nullptr, 0);

    std::uint64_t round = 1;
    for (const GraphUpdate& upd : updates) {
      hub_.set_round(round);
      master_ctx_->reset_done();
      auto t0 = Clock::now();
      try {
        algo_.master_update(upd, *master_ctx_);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ModeViolation || e.code() == ErrorCode::UnknownEndpoint) throw;
        fail("master update", e, &upd);
      } catch (const std::exception& e) {
        fail("master update", e, &upd);
      }
      drain_round(&upd, round);
      hub_.add_round_time(upd.kind, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      ++round;
    }
  }

  void run_concurrent(std::span<const GraphUpdate> updates) {
    std::vector<std::thread> threads;
    std::mutex err_mu;
    std::optional<Error> worker_error;

    auto record_error = [&](Error e) {
      {
        std::lock_guard lock(err_mu);
        if (!worker_error) worker_error = std::move(e);
      }
      hub_.flag_failure();
    };

    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      threads.emplace_back([this, w, &record_error] {
        EndpointId self = static_cast<EndpointId>(w);
        while (auto msg = hub_.pop_for(self)) {
          if (msg->kind == kShutdownKind) return;
          try {
            algo_.worker_receive(blocks_[w], *msg, worker_ctxs_[w]);
          } catch (const Error& e) {
            record_error(e);
            return;
          } catch (const std::exception& e) {
            record_error(Error(ErrorCode::HookFailure, "worker " + std::to_string(w) + ": " + e.what()));
            return;
          }
        }
      });
    }

    auto check_failed = [&]() -> bool {
      std::lock_guard lock(err_mu);
      return worker_error.has_value();
    };

    auto finish = [&](bool send_shutdown) {
      if (send_shutdown) {
        for (std::size_t w = 0; w < blocks_.size(); ++w) {
          Message msg;
          msg.mode = ComputingMode::M2W;
          msg.from = kMaster;
          msg.to = static_cast<EndpointId>(w);
          msg.kind = kShutdownKind;
          hub_.send(std::move(msg));
        }
      }
      hub_.shutdown();
      for (auto& t : threads) t.join();
    };

    auto master_loop = [&](const GraphUpdate* upd) {
      while (!master_ctx_->done()) {
        if (check_failed()) return;
        auto msg = hub_.pop_for(kMaster);
        if (!msg) return;  // failure flagged
        dispatch(*msg, upd);
      }
    };

    try {
      master_ctx_->reset_done();
      algo_.master_start(*master_ctx_);
      master_loop(nullptr);
      std::uint64_t round = 1;
      for (const GraphUpdate& upd : updates) {
        if (check_failed()) break;
        hub_.set_round(round++);
        master_ctx_->reset_done();
        auto t0 = Clock::now();
        algo_.master_update(upd, *master_ctx_);
        master_loop(&upd);
        hub_.add_round_time(upd.kind, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      }
    } catch (...) {
      finish(false);
      throw;
    }

    bool failed = check_failed();
    finish(!failed);
    if (failed) {
      std::lock_guard lock(err_mu);
      throw *worker_error;
    }
    if (!hub_.empty())
      throw Error(ErrorCode::HookFailure, "channels not quiescent after final update");
  }

  std::vector<Block>& blocks_;
  Algorithm& algo_;
  JobOptions opts_;
  ChannelHub hub_;
  std::vector<WorkerContext> worker_ctxs_;
  std::optional<MasterContext> master_ctx_;
};

}  // namespace detail

// Runs a job: batch phase, then each update fully processed before the next
// begins. Blocks are mutated in place; the result carries the final vertex
// and edge lists plus message metrics.
inline JobResult run_job(std::vector<Block>& blocks, std::span<const GraphUpdate> updates,
                         Algorithm& algo, const JobOptions& opts = {}) {
  if (blocks.empty()) throw Error(ErrorCode::InvalidArgument, "no blocks");
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].id() != i)
      throw Error(ErrorCode::InvalidArgument, "block ids must form a contiguous range [0, K)");
  detail::JobDriver driver(blocks, algo, opts);
  return driver.run(updates);
}

}  // namespace bladyg
