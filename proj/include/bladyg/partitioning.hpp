#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bladyg/graph.hpp"
#include "bladyg/util.hpp"

namespace bladyg {

using BlockId = std::uint32_t;

// Edge -> block map with per-block accounting. Disjointness holds by
// construction (it is a map); cover is checked against a graph on demand.
// V_i tracks exactly the endpoints of E_i via per-vertex incidence counts.
class PartitionAssignment {
 public:
  PartitionAssignment() = default;
  explicit PartitionAssignment(BlockId block_count)
      : block_count_(block_count),
        edge_counts_(block_count, 0),
        vertex_incidence_(block_count) {
    if (block_count < 1) throw Error(ErrorCode::InvalidArgument, "block count must be >= 1");
  }

  BlockId block_count() const { return block_count_; }

  bool contains(const Edge& e) const { return edge_block_.count(e) != 0; }

  BlockId block_of(const Edge& e) const {
    auto it = edge_block_.find(e);
    if (it == edge_block_.end()) throw Error(ErrorCode::MissingEdge, "unassigned edge");
    return it->second;
  }

  // Insert-or-move. Every call counts as one assignment mutation.
  void assign(const Edge& e, BlockId b) {
    check_block(b);
    auto [it, inserted] = edge_block_.try_emplace(e, b);
    if (!inserted) {
      if (it->second == b) { ++mutations_; return; }
      detach(e, it->second);
      it->second = b;
    }
    attach(e, b);
    ++mutations_;
  }

  void erase(const Edge& e) {
    auto it = edge_block_.find(e);
    if (it == edge_block_.end()) throw Error(ErrorCode::MissingEdge, "unassigned edge");
    detach(e, it->second);
    edge_block_.erase(it);
    ++mutations_;
  }

  std::size_t edge_count(BlockId b) const { check_block(b); return edge_counts_[b]; }
  std::size_t total_edges() const { return edge_block_.size(); }

  std::size_t vertex_count(BlockId b) const { check_block(b); return vertex_incidence_[b].size(); }

  bool block_has_vertex(BlockId b, VertexId u) const {
    check_block(b);
    return vertex_incidence_[b].count(u) != 0;
  }

  std::vector<VertexId> block_vertices(BlockId b) const {
    check_block(b);
    std::vector<VertexId> out;
    out.reserve(vertex_incidence_[b].size());
    for (const auto& [u, _] : vertex_incidence_[b]) out.push_back(u);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Cumulative count of assignment writes (assign + erase). The incremental
  // vs naive benchmarks compare exactly this.
  std::uint64_t mutations() const { return mutations_; }
  void reset_mutations() { mutations_ = 0; }

  // Cover: every edge of g assigned. Disjointness is structural.
  bool covers(const Graph& g) const {
    if (g.edge_count() != edge_block_.size()) return false;
    for (const Edge& e : g.edges())
      if (!contains(e)) return false;
    return true;
  }

  // Canonical ascending (u, v, block) triples.
  std::vector<std::pair<Edge, BlockId>> entries() const {
    std::vector<std::pair<Edge, BlockId>> out(edge_block_.begin(), edge_block_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

 private:
  void check_block(BlockId b) const {
    if (b >= block_count_) throw Error(ErrorCode::InvalidArgument, "block id out of range");
  }

  void attach(const Edge& e, BlockId b) {
    ++edge_counts_[b];
    ++vertex_incidence_[b][e.u];
    ++vertex_incidence_[b][e.v];
  }

  void detach(const Edge& e, BlockId b) {
    --edge_counts_[b];
    for (VertexId x : {e.u, e.v}) {
      auto vit = vertex_incidence_[b].find(x);
      if (--vit->second == 0) vertex_incidence_[b].erase(vit);
    }
  }

  BlockId block_count_ = 0;
  std::unordered_map<Edge, BlockId, EdgeHash> edge_block_;
  std::vector<std::size_t> edge_counts_;
  std::vector<std::unordered_map<VertexId, std::size_t>> vertex_incidence_;
  std::uint64_t mutations_ = 0;
};

// Diffusion funding bookkeeping for DFEP. Balances are held per
// (partition, vertex); refunds are granted per partition and spread over its
// boundary vertices.
struct FundingState {
  std::vector<std::unordered_map<VertexId, double>> balances;
  std::vector<double> refunds_granted;
  std::uint64_t rounds = 0;

  explicit FundingState(BlockId k = 0) : balances(k), refunds_granted(k, 0.0) {}

  double balance(BlockId p, VertexId u) const {
    auto it = balances[p].find(u);
    return it == balances[p].end() ? 0.0 : it->second;
  }

  void add(BlockId p, VertexId u, double amount) {
    if (amount == 0.0) return;
    double& b = balances[p][u];
    b += amount;
    if (b < 0.0) throw Error(ErrorCode::InvalidArgument, "negative funding balance");
  }
};

struct DfepParams {
  // A partition stops buying once another edge would push it past
  // balance_cap * |E| / K. Cover stays feasible because the cap is floored
  // at ceil(|E| / K).
  double balance_cap = 1.2;
};

struct RepartitionDecision {
  std::vector<double> scores;  // per-worker imbalance score |E_i| * K / |E|
  double trigger = 1.5;
  bool repartition = false;
};

// --- Initial partitioning -------------------------------------------------

// block(e) = mix64_pair(min, max) mod K. Deterministic across runs and
// platforms; the mix is the documented splitmix64 finalizer from util.hpp.
inline BlockId hash_block(const Edge& e, BlockId k) {
  return static_cast<BlockId>(mix64_pair(e.u, e.v) % k);
}

inline PartitionAssignment hash_partition(const Graph& g, BlockId k) {
  PartitionAssignment pa(k);
  for (const Edge& e : g.edges()) pa.assign(e, hash_block(e, k));
  return pa;
}

inline PartitionAssignment random_partition(const Graph& g, BlockId k, std::uint64_t seed) {
  PartitionAssignment pa(k);
  Rng rng(mix64(seed));
  for (const Edge& e : g.edges()) pa.assign(e, static_cast<BlockId>(draw_index(rng, k)));
  return pa;
}

// Diffusion-based edge partitioning. Each partition starts from one random
// seed vertex funded with |E|/K; funded vertices buy incident unassigned
// edges at unit cost; leftovers plus a refund inversely proportional to
// partition size are redistributed over each partition's boundary vertices.
// Rounds repeat until every edge is bought. If no partition can reach an
// unassigned edge (disconnected graph or capped neighbors), the smallest
// partition teleports to the smallest unassigned edge.
inline std::pair<PartitionAssignment, FundingState> dfep_partition(const Graph& g, BlockId k,
                                                                   std::uint64_t seed,
                                                                   const DfepParams& params = {}) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "block count must be >= 1");
  if (g.vertex_count() < k)
    throw Error(ErrorCode::InvalidArgument, "fewer vertices than partitions");

  PartitionAssignment pa(k);
  FundingState fs(k);

  const double total_edges = static_cast<double>(g.edge_count());
  const double share = total_edges / static_cast<double>(k);
  const std::size_t cap_edges =
      std::max<std::size_t>(static_cast<std::size_t>(std::ceil(share)),
                            static_cast<std::size_t>(params.balance_cap * share));

  std::vector<VertexId> verts = g.vertices();
  Rng rng(mix64(seed));
  for (BlockId p = 0; p < k; ++p) {
    std::size_t i = static_cast<std::size_t>(draw_index(rng, verts.size() - p));
    std::swap(verts[i], verts[verts.size() - 1 - p]);
    fs.add(p, verts[verts.size() - 1 - p], share);
  }

  // Membership of a vertex in a partition's territory, for funding purposes:
  // it holds or held funding, or is an endpoint of a bought edge.
  std::vector<std::set<VertexId>> territory(k);
  for (BlockId p = 0; p < k; ++p)
    for (const auto& [u, _] : fs.balances[p]) territory[p].insert(u);

  std::unordered_set<Edge, EdgeHash> unassigned;
  for (const Edge& e : g.edges()) unassigned.insert(e);

  auto buy = [&](BlockId p, const Edge& e) {
    pa.assign(e, p);
    unassigned.erase(e);
    territory[p].insert(e.u);
    territory[p].insert(e.v);
  };

  while (!unassigned.empty()) {
    ++fs.rounds;
    std::size_t before = unassigned.size();

    // Spend phase: funded vertices buy adjacent unassigned edges, ascending.
    for (BlockId p = 0; p < k; ++p) {
      std::vector<VertexId> funded;
      funded.reserve(fs.balances[p].size());
      for (const auto& [u, b] : fs.balances[p])
        if (b >= 1.0) funded.push_back(u);
      std::sort(funded.begin(), funded.end());

      for (VertexId u : funded) {
        double& bal = fs.balances[p][u];
        if (!g.has_vertex(u)) continue;
        for (VertexId w : g.neighbors(u)) {
          if (bal < 1.0) break;
          if (pa.edge_count(p) >= cap_edges) break;
          Edge e(u, w);
          if (!unassigned.count(e)) continue;
          bal -= 1.0;
          buy(p, e);
        }
      }
    }

    // Refund phase: pool leftovers, add the size-inverse refund, spread the
    // pool over boundary vertices (territory members with an unassigned
    // incident edge).
    double mean_size = 0.0;
    for (BlockId p = 0; p < k; ++p) mean_size += static_cast<double>(pa.edge_count(p));
    mean_size /= static_cast<double>(k);

    for (BlockId p = 0; p < k; ++p) {
      double pool = 0.0;
      for (auto& [u, b] : fs.balances[p]) pool += b;
      fs.balances[p].clear();

      std::vector<VertexId> boundary;
      std::size_t adjacent_unassigned = 0;
      for (VertexId u : territory[p]) {
        if (!g.has_vertex(u)) continue;
        std::size_t local = 0;
        for (VertexId w : g.neighbors(u))
          if (unassigned.count(Edge(u, w))) ++local;
        if (local > 0) {
          boundary.push_back(u);
          adjacent_unassigned += local;
        }
      }
      if (boundary.empty() || pa.edge_count(p) >= cap_edges) continue;

      double own = std::max<double>(1.0, static_cast<double>(pa.edge_count(p)));
      double refund = share * (std::max(mean_size, 1.0) / own);
      refund = std::max(refund, 1.0);
      // No point funding more purchases than reachable edges.
      refund = std::min(refund, static_cast<double>(adjacent_unassigned));
      fs.refunds_granted[p] += refund;
      pool += refund;

      double each = pool / static_cast<double>(boundary.size());
      for (VertexId u : boundary) fs.add(p, u, each);
    }

    if (unassigned.size() == before) {
      // Stall: teleport the smallest partition to the smallest unassigned edge.
      BlockId smallest = 0;
      for (BlockId p = 1; p < k; ++p)
        if (pa.edge_count(p) < pa.edge_count(smallest)) smallest = p;
      Edge pick = *std::min_element(unassigned.begin(), unassigned.end());
      buy(smallest, pick);
      fs.add(smallest, pick.u, share);
    }
  }
  return {std::move(pa), std::move(fs)};
}

// --- Incremental maintenance ----------------------------------------------

struct UbUpdateParams {
  double alpha = 1.0;  // weight of the locality term (neighbors already in B)
  double beta = 1.0;   // weight of the balance penalty (|E_B| - |E|/K) / (|E|/K)
};

// score(B) = alpha * |{edges incident to u or v already placed in B}|
//          - beta  * (|E_B| - |E|/K) / (|E|/K)
// The locality term is the degree of u plus the degree of v inside G[E_B],
// which a worker can evaluate from its own block alone.
inline double ub_update_score(const Graph& g, const PartitionAssignment& pa, BlockId b,
                              VertexId u, VertexId v, const UbUpdateParams& params = {}) {
  std::size_t local_neighbors = 0;
  for (VertexId x : {u, v}) {
    if (!g.has_vertex(x)) continue;
    for (VertexId w : g.neighbors(x)) {
      Edge e(x, w);
      if (pa.contains(e) && pa.block_of(e) == b) ++local_neighbors;
    }
  }
  double share = static_cast<double>(pa.total_edges()) / static_cast<double>(pa.block_count());
  if (share <= 0.0) share = 1.0;
  double balance_penalty = (static_cast<double>(pa.edge_count(b)) - share) / share;
  return params.alpha * static_cast<double>(local_neighbors) - params.beta * balance_penalty;
}

// UB-Update block choice for a new edge (u, v). Candidates are the blocks
// whose vertex sets already contain u or v; with no known endpoint every
// block is a candidate and the score degenerates to the balance term. Ties
// break toward the smaller block, then the lower id.
inline BlockId choose_block_ub(const Graph& g, const PartitionAssignment& pa, VertexId u,
                               VertexId v, const UbUpdateParams& params = {}) {
  std::vector<BlockId> candidates;
  for (BlockId b = 0; b < pa.block_count(); ++b)
    if (pa.block_has_vertex(b, u) || pa.block_has_vertex(b, v)) candidates.push_back(b);
  if (candidates.empty())
    for (BlockId b = 0; b < pa.block_count(); ++b) candidates.push_back(b);

  BlockId best = candidates.front();
  double best_score = ub_update_score(g, pa, best, u, v, params);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    BlockId b = candidates[i];
    double s = ub_update_score(g, pa, b, u, v, params);
    bool better = s > best_score ||
                  (s == best_score && (pa.edge_count(b) < pa.edge_count(best) ||
                                       (pa.edge_count(b) == pa.edge_count(best) && b < best)));
    if (better) {
      best = b;
      best_score = s;
    }
  }
  return best;
}

// Local (non message-passing) form of the UB-Update assignment. g must
// already contain the new edge's endpoints' adjacency *excluding* (u,v)
// itself or including it; the score only reads neighborhoods, so either
// works as long as calls are consistent.
inline BlockId assign_update(const Graph& g, PartitionAssignment& pa, FundingState& fs,
                             VertexId u, VertexId v, const UbUpdateParams& params = {}) {
  BlockId b = choose_block_ub(g, pa, u, v, params);
  pa.assign(Edge(u, v), b);
  (void)fs;  // UB-Update does not consume funding; sizes live in pa
  return b;
}

inline RepartitionDecision check_repartition(const PartitionAssignment& pa, double trigger = 1.5) {
  RepartitionDecision d;
  d.trigger = trigger;
  double total = static_cast<double>(pa.total_edges());
  double k = static_cast<double>(pa.block_count());
  for (BlockId b = 0; b < pa.block_count(); ++b) {
    double score = total == 0.0 ? 0.0 : static_cast<double>(pa.edge_count(b)) * k / total;
    d.scores.push_back(score);
    if (score > trigger) d.repartition = true;
  }
  return d;
}

enum class PartitionMethod { Hash, Random, Dfep };
enum class UpdateStrategy { Incremental, Naive };

inline const char* to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::Hash: return "hash";
    case PartitionMethod::Random: return "random";
    case PartitionMethod::Dfep: return "dfep";
  }
  return "?";
}

inline const char* to_string(UpdateStrategy s) {
  return s == UpdateStrategy::Incremental ? "incremental" : "naive";
}

inline PartitionAssignment run_partition_method(const Graph& g, BlockId k, PartitionMethod m,
                                                std::uint64_t seed) {
  switch (m) {
    case PartitionMethod::Hash: return hash_partition(g, k);
    case PartitionMethod::Random: return random_partition(g, k, seed);
    case PartitionMethod::Dfep: return dfep_partition(g, k, seed).first;
  }
  throw Error(ErrorCode::InvalidArgument, "bad partition method");
}

// Naive: discard the assignment and re-run the method on the full graph.
// Incremental: keep the assignment and place only unassigned edges via
// UB-Update. Returns the new assignment; pa.mutations() on the result counts
// the assignment writes the strategy performed.
inline PartitionAssignment repartition(const Graph& g, PartitionAssignment pa, BlockId k,
                                       UpdateStrategy strategy, PartitionMethod method,
                                       std::uint64_t seed,
                                       const UbUpdateParams& params = {}) {
  if (strategy == UpdateStrategy::Naive) {
    PartitionAssignment fresh = run_partition_method(g, k, method, seed);
    return fresh;
  }
  pa.reset_mutations();
  FundingState fs(k);
  for (const Edge& e : g.edges())
    if (!pa.contains(e)) assign_update(g, pa, fs, e.u, e.v, params);
  return pa;
}

// Text dump: lines "u v block_id" in canonical ascending edge order.
inline void dump_assignment(const PartitionAssignment& pa, std::ostream& os) {
  for (const auto& [e, b] : pa.entries())
    os << e.u << " " << e.v << " " << b << "\n";
}

}  // namespace bladyg
