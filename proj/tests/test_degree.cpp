#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "bladyg/degree.hpp"
#include "bladyg/partitioning.hpp"
#include "bladyg/scenario.hpp"

using namespace bladyg;

namespace {

// The two-partition example graph: worker 1 holds {1,2,3}, worker 2 holds
// {4,5,6}; one edge crosses the cut.
Graph example_graph() {
  Graph g;
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(1, 3);
  g.add_edge(3, 4);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(4, 6);
  return g;
}

std::vector<Block> example_blocks(const Graph& g) {
  std::map<VertexId, BlockId> owner{{1, 0}, {2, 0}, {3, 0}, {4, 1}, {5, 1}, {6, 1}};
  return make_blocks(g, owner, 2);
}

std::map<VertexId, std::uint64_t> degrees_of(const JobResult& r) {
  std::map<VertexId, std::uint64_t> out;
  for (const auto& [u, st] : r.vertices) out[u] = st.degree;
  return out;
}

}  // namespace

TEST_CASE("degree init matches the single-machine count") {
  Graph g = example_graph();
  auto blocks = example_blocks(g);
  DegreeAlgorithm algo;
  JobResult r = run_job(blocks, {}, algo);

  auto deg = degrees_of(r);
  for (VertexId u : g.vertices()) CHECK(deg.at(u) == g.degree(u));
}

TEST_CASE("degree init on an empty graph produces no states") {
  Graph g;
  std::map<VertexId, BlockId> owner;
  auto blocks = make_blocks(g, owner, 2);
  DegreeAlgorithm algo;
  JobResult r = run_job(blocks, {}, algo);
  CHECK(r.vertices.empty());
  CHECK(r.edges.empty());
}

TEST_CASE("degree init with K=1 reduces to the local case") {
  Graph g = example_graph();
  auto blocks = make_blocks(g, hash_partition(g, 1));
  DegreeAlgorithm algo;
  JobResult r = run_job(blocks, {}, algo);
  auto deg = degrees_of(r);
  for (VertexId u : g.vertices()) CHECK(deg.at(u) == g.degree(u));
}

TEST_CASE("cross-block insertion exchanges exactly 2 M2W and 2 W2M") {
  Graph g = example_graph();
  auto blocks = example_blocks(g);
  DegreeAlgorithm algo;
  std::vector<GraphUpdate> updates{GraphUpdate::add_edge(4, 1)};
  JobResult r = run_job(blocks, updates, algo);

  const int k = 2;  // init costs K M2W + K W2M
  CHECK(r.metrics.sent_m2w == static_cast<std::uint64_t>(k) + 2);
  CHECK(r.metrics.sent_w2m == static_cast<std::uint64_t>(k) + 2);
  CHECK(r.metrics.sent_w2w == 0);

  auto deg = degrees_of(r);
  CHECK(deg.at(4) == 4);  // 3 -> 4
  CHECK(deg.at(1) == 3);  // 2 -> 3
}

TEST_CASE("intra-block insertion needs half the messages of inter-block") {
  Graph g = example_graph();
  g.add_vertex(7);
  std::map<VertexId, BlockId> owner{{1, 0}, {2, 0}, {3, 0}, {7, 0}, {4, 1}, {5, 1}, {6, 1}};

  auto run_counts = [&](GraphUpdate upd) {
    auto blocks = make_blocks(g, owner, 2);
    DegreeAlgorithm algo;
    std::vector<GraphUpdate> updates{upd};
    JobResult r = run_job(blocks, updates, algo);
    return r.metrics.messages_total() - 2 * 2;  // subtract init traffic
  };

  CHECK(run_counts(GraphUpdate::add_edge(1, 7)) == 2);  // 1 M2W + 1 W2M
  CHECK(run_counts(GraphUpdate::add_edge(7, 4)) == 4);  // 2 M2W + 2 W2M
}

TEST_CASE("a single increment message updates state and notifies once") {
  Graph g = example_graph();
  auto blocks = example_blocks(g);
  DegreeAlgorithm algo;
  // batch phase first
  Message init;
  init.mode = ComputingMode::M2W;
  init.from = kMaster;
  init.to = 1;
  init.kind = DegreeAlgorithm::kInitRequest;
  step_worker(blocks[1], std::span<const Message>(&init, 1), algo, 2);
  REQUIRE(blocks[1].state(4).degree == 3);

  // "increment the degree of node 4": the worker-1 half of inserting (4,1)
  PayloadWriter pw;
  pw.vid(4).vid(1).u32(0).u8(false).u8(true);
  Message apply;
  apply.mode = ComputingMode::M2W;
  apply.from = kMaster;
  apply.to = 1;
  apply.kind = DegreeAlgorithm::kApplyFrontierEdge;
  apply.payload = pw.take();
  auto outbox = step_worker(blocks[1], std::span<const Message>(&apply, 1), algo, 2);
  CHECK(blocks[1].state(4).degree == 4);
  REQUIRE(outbox.size() == 1);
  CHECK(outbox[0].mode == ComputingMode::W2M);
  CHECK(outbox[0].kind == DegreeAlgorithm::kAck);
}

TEST_CASE("insert then remove restores all degrees") {
  Graph g = example_graph();
  auto blocks = example_blocks(g);
  DegreeAlgorithm algo;
  std::vector<GraphUpdate> updates{GraphUpdate::add_edge(4, 1), GraphUpdate::remove_edge(4, 1)};
  JobResult r = run_job(blocks, updates, algo);
  auto deg = degrees_of(r);
  for (VertexId u : g.vertices()) CHECK(deg.at(u) == g.degree(u));
  CHECK(r.edges.size() == g.edge_count());
}

TEST_CASE("decrement of a missing edge surfaces MissingEdge") {
  Graph g = example_graph();
  auto blocks = example_blocks(g);
  DegreeAlgorithm algo;
  std::vector<GraphUpdate> updates{GraphUpdate::remove_edge(1, 5)};
  try {
    run_job(blocks, updates, algo);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HookFailure);
    CHECK(std::string(e.what()).find("MissingEdge") != std::string::npos);
  }
}

TEST_CASE("random update stream keeps degrees equal to a recount") {
  Rng rng(mix64(2024));
  Graph g = random_graph(30, 60, 99);
  auto pa = random_partition(g, 3, 1);
  auto blocks = make_blocks(g, pa);
  DegreeAlgorithm algo;

  // Build a valid 50-step stream against a shadow copy.
  Graph shadow = g;
  std::vector<GraphUpdate> updates;
  while (updates.size() < 50) {
    std::uint64_t dice = draw_index(rng, 100);
    if (dice < 18) {
      VertexId u = 200 + draw_index(rng, 20);
      if (shadow.has_vertex(u)) continue;
      shadow.add_vertex(u);
      updates.push_back(GraphUpdate::add_vertex(u));
    } else if (dice < 30 && shadow.vertex_count() > 2) {
      auto verts = shadow.vertices();
      VertexId u = verts[draw_index(rng, verts.size())];
      shadow.remove_vertex(u);
      updates.push_back(GraphUpdate::remove_vertex(u));
    } else if (dice < 70) {
      auto verts = shadow.vertices();
      VertexId u = verts[draw_index(rng, verts.size())];
      VertexId v = verts[draw_index(rng, verts.size())];
      if (u == v || shadow.has_edge(u, v)) continue;
      shadow.add_edge(u, v);
      updates.push_back(GraphUpdate::add_edge(u, v));
    } else {
      if (shadow.edge_count() == 0) continue;
      auto edges = shadow.edges();
      Edge e = edges[draw_index(rng, edges.size())];
      shadow.remove_edge(e.u, e.v);
      updates.push_back(GraphUpdate::remove_edge(e.u, e.v));
    }
  }

  JobResult r = run_job(blocks, updates, algo);

  // Oracle: rebuild the graph from the surviving edges and recount.
  Graph rebuilt;
  for (const auto& [u, st] : r.vertices) rebuilt.add_vertex(u);
  for (const Edge& e : r.edges) rebuilt.add_edge(e.u, e.v);
  REQUIRE(rebuilt == shadow);
  auto deg = degrees_of(r);
  REQUIRE(deg.size() == shadow.vertex_count());
  for (VertexId u : shadow.vertices()) CHECK(deg.at(u) == shadow.degree(u));
  CHECK(r.metrics.mode_violation_deliveries == 0);
}
