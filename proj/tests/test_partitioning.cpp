#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "bladyg/partition_algo.hpp"
#include "bladyg/partitioning.hpp"
#include "bladyg/scenario.hpp"

using namespace bladyg;

namespace {

Graph triangle(VertexId a, VertexId b, VertexId c) {
  Graph g;
  g.add_edge(a, b);
  g.add_edge(b, c);
  g.add_edge(a, c);
  return g;
}

bool cover_and_disjoint(const PartitionAssignment& pa, const Graph& g) {
  // Disjointness is structural (one block per edge); cover is checked.
  return pa.covers(g);
}

// Independent re-evaluation of the documented hash: splitmix64 finalizer
// over the canonical pair.
std::uint64_t oracle_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("hash partition") {
  Graph t = triangle(1, 2, 3);

  SECTION("K=1 puts everything in block 0") {
    auto pa = hash_partition(t, 1);
    for (const auto& [e, b] : pa.entries()) CHECK(b == 0);
    CHECK(cover_and_disjoint(pa, t));
  }
  SECTION("deterministic across calls") {
    auto a = hash_partition(t, 3);
    auto b = hash_partition(t, 3);
    CHECK(a.entries() == b.entries());
  }
  SECTION("triangle K=3 sizes sum to 3 and match the documented mix") {
    auto pa = hash_partition(t, 3);
    std::size_t sum = 0;
    for (BlockId b = 0; b < 3; ++b) {
      CHECK(pa.edge_count(b) <= 3);
      sum += pa.edge_count(b);
    }
    CHECK(sum == 3);
    for (const auto& [e, b] : pa.entries()) {
      std::uint64_t h = oracle_mix(oracle_mix(e.u) ^ (e.v + 0x9e3779b97f4a7c15ULL));
      CHECK(b == h % 3);
    }
  }
}

TEST_CASE("random partition") {
  SECTION("K=1 any seed") {
    Graph t = triangle(1, 2, 3);
    for (std::uint64_t seed : {0ULL, 7ULL, 99ULL}) {
      auto pa = random_partition(t, 1, seed);
      for (const auto& [e, b] : pa.entries()) CHECK(b == 0);
    }
  }
  SECTION("same seed reproduces, different seed differs") {
    Graph g = random_graph(200, 800, 5);
    auto a = random_partition(g, 4, 11);
    auto b = random_partition(g, 4, 11);
    CHECK(a.entries() == b.entries());
    auto c = random_partition(g, 4, 12);
    CHECK(a.entries() != c.entries());
  }
  SECTION("10000 edges over K=4 stay within 4 sigma of the binomial mean") {
    Graph g = random_graph(1200, 10000, 3);
    auto pa = random_partition(g, 4, 17);
    double mean = 10000.0 / 4.0;
    double sigma = std::sqrt(10000.0 * 0.25 * 0.75);
    for (BlockId b = 0; b < 4; ++b)
      CHECK(std::abs(static_cast<double>(pa.edge_count(b)) - mean) <= 4.0 * sigma);
    CHECK(cover_and_disjoint(pa, g));
  }
}

TEST_CASE("dfep partition") {
  SECTION("K=1 floods the whole graph") {
    Graph g = connected_random_graph(40, 80, 1);
    auto [pa, fs] = dfep_partition(g, 1, 9);
    CHECK(pa.edge_count(0) == g.edge_count());
    CHECK(cover_and_disjoint(pa, g));
    CHECK(fs.rounds >= 1);
  }
  SECTION("fewer vertices than partitions rejected") {
    Graph g = triangle(1, 2, 3);
    CHECK_THROWS_AS(dfep_partition(g, 4, 0), Error);
  }
  SECTION("two disjoint triangles, seeds one per triangle") {
    Graph g;
    for (auto [a, b] : {std::pair{1, 2}, {2, 3}, {1, 3}, {11, 12}, {12, 13}, {11, 13}})
      g.add_edge(a, b);
    // find a seed whose two start vertices land in different triangles
    for (std::uint64_t seed = 0;; ++seed) {
      REQUIRE(seed < 64);
      auto [pa, fs] = dfep_partition(g, 2, seed);
      if (pa.edge_count(0) != 3 || pa.edge_count(1) != 3) continue;
      BlockId left = pa.block_of(Edge(1, 2));
      bool separated = pa.block_of(Edge(2, 3)) == left && pa.block_of(Edge(1, 3)) == left &&
                       pa.block_of(Edge(11, 12)) != left;
      if (!separated) continue;
      // perfectly balanced and each partition is one whole triangle
      CHECK(pa.block_of(Edge(11, 13)) == pa.block_of(Edge(11, 12)));
      CHECK(pa.block_of(Edge(12, 13)) == pa.block_of(Edge(11, 12)));
      break;
    }
  }
  SECTION("balance cap holds on a connected random graph") {
    Graph g = connected_random_graph(300, 1000, 21);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto [pa, fs] = dfep_partition(g, 4, seed);
      CHECK(cover_and_disjoint(pa, g));
      double cap = 1.2 * 1000.0 / 4.0;
      for (BlockId b = 0; b < 4; ++b) CHECK(static_cast<double>(pa.edge_count(b)) <= cap);
      // every round buys at least one edge
      CHECK(fs.rounds <= g.edge_count());
    }
  }
  SECTION("disconnected graphs terminate via teleport") {
    Graph g;
    for (VertexId base : {0ULL, 100ULL, 200ULL, 300ULL}) {
      g.add_edge(base, base + 1);
      g.add_edge(base + 1, base + 2);
      g.add_edge(base, base + 2);
    }
    auto [pa, fs] = dfep_partition(g, 2, 4);
    CHECK(cover_and_disjoint(pa, g));
  }
}

TEST_CASE("UB-Update block choice") {
  SECTION("locality dominates when the block is not overweight") {
    Graph g;
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(4, 5);
    PartitionAssignment pa(3);
    pa.assign(Edge(1, 2), 2);
    pa.assign(Edge(2, 3), 2);
    pa.assign(Edge(4, 5), 0);
    g.add_edge(1, 3);
    FundingState fs(3);
    CHECK(assign_update(g, pa, fs, 1, 3) == 2);
    CHECK(pa.block_of(Edge(1, 3)) == 2);
  }
  SECTION("equal connectivity breaks toward the smaller block") {
    Graph g;
    PartitionAssignment pa(2);
    for (VertexId i = 1; i <= 10; ++i) {
      g.add_edge(0, i);
      pa.assign(Edge(0, i), 0);
    }
    for (VertexId j = 21; j <= 30; ++j) {
      g.add_edge(20, j);
      pa.assign(Edge(20, j), 1);
    }
    for (VertexId k = 41; k <= 130; ++k) {
      g.add_edge(40, k);
      pa.assign(Edge(40, k), 1);
    }
    // u=0 lives in block 0 (size 10), v=20 in block 1 (size 100), both with
    // local degree 10: the balance term decides.
    g.add_edge(0, 20);
    CHECK(choose_block_ub(g, pa, 0, 20) == 0);
  }
  SECTION("both endpoints new goes to the smallest block") {
    Graph g;
    PartitionAssignment pa(3);
    g.add_edge(1, 2);
    pa.assign(Edge(1, 2), 0);
    g.add_edge(3, 4);
    pa.assign(Edge(3, 4), 0);
    g.add_edge(5, 6);
    pa.assign(Edge(5, 6), 1);
    g.add_edge(900, 901);
    CHECK(choose_block_ub(g, pa, 900, 901) == 2);
  }
  SECTION("never selects a third block when endpoints are known") {
    Rng rng(mix64(77));
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(30, 60, 100 + trial);
      auto pa = random_partition(g, 4, trial);
      // pick a non-edge between two existing vertices
      VertexId u = 0, v = 0;
      do {
        u = draw_index(rng, 30);
        v = draw_index(rng, 30);
      } while (u == v || g.has_edge(u, v));
      std::set<BlockId> allowed;
      for (BlockId b = 0; b < 4; ++b)
        if (pa.block_has_vertex(b, u) || pa.block_has_vertex(b, v)) allowed.insert(b);
      g.add_edge(u, v);
      BlockId chosen = choose_block_ub(g, pa, u, v);
      if (!allowed.empty()) CHECK(allowed.count(chosen) == 1);
    }
  }
}

TEST_CASE("repartition threshold") {
  SECTION("balanced blocks keep") {
    PartitionAssignment pa(4);
    VertexId next = 0;
    for (BlockId b = 0; b < 4; ++b)
      for (int i = 0; i < 25; ++i) {
        pa.assign(Edge(next, next + 1), b);
        next += 2;
      }
    auto d = check_repartition(pa, 1.5);
    CHECK_FALSE(d.repartition);
  }
  SECTION("one block holding everything triggers") {
    PartitionAssignment pa(4);
    VertexId next = 0;
    for (int i = 0; i < 40; ++i) {
      pa.assign(Edge(next, next + 1), 2);
      next += 2;
    }
    CHECK(check_repartition(pa, 1.5).repartition);
  }
  SECTION("sizes 30/25/25/20 with tau 1.15") {
    PartitionAssignment pa(4);
    VertexId next = 0;
    auto fill = [&](BlockId b, int count) {
      for (int i = 0; i < count; ++i) {
        pa.assign(Edge(next, next + 1), b);
        next += 2;
      }
    };
    fill(0, 30);
    fill(1, 25);
    fill(2, 25);
    fill(3, 20);
    auto d = check_repartition(pa, 1.15);
    CHECK(d.repartition);
    CHECK(d.scores[0] == Catch::Approx(1.2));
    CHECK_FALSE(check_repartition(pa, 1.5).repartition);
  }
}

TEST_CASE("repartition strategies") {
  Graph g = random_graph(80, 400, 8);

  SECTION("incremental with nothing new changes nothing") {
    auto pa = hash_partition(g, 4);
    auto before = pa.entries();
    auto after = repartition(g, std::move(pa), 4, UpdateStrategy::Incremental,
                             PartitionMethod::Hash, 0);
    CHECK(after.entries() == before);
    CHECK(after.mutations() == 0);
  }
  SECTION("naive is deterministic per seed") {
    auto pa = random_partition(g, 4, 1);
    auto a = repartition(g, pa, 4, UpdateStrategy::Naive, PartitionMethod::Random, 33);
    auto b = repartition(g, pa, 4, UpdateStrategy::Naive, PartitionMethod::Random, 33);
    CHECK(a.entries() == b.entries());
    CHECK(a.mutations() == g.edge_count());
  }
  SECTION("90/10: incremental touches exactly the held-out edges") {
    auto edges = g.edges();
    std::size_t held = edges.size() / 10;
    Graph base;
    for (VertexId u : g.vertices()) base.add_vertex(u);
    for (std::size_t i = 0; i < edges.size() - held; ++i) base.add_edge(edges[i].u, edges[i].v);

    auto pa = random_partition(base, 4, 2);
    auto before = pa.entries();
    auto after = repartition(g, std::move(pa), 4, UpdateStrategy::Incremental,
                             PartitionMethod::Random, 2);
    CHECK(after.mutations() == held);
    CHECK(cover_and_disjoint(after, g));
    // previously assigned edges keep their blocks
    for (const auto& [e, b] : before) CHECK(after.block_of(e) == b);
  }
}

TEST_CASE("block vertex sets track exactly the endpoints of assigned edges") {
  PartitionAssignment pa(2);
  pa.assign(Edge(1, 2), 0);
  pa.assign(Edge(2, 3), 0);
  CHECK(pa.block_has_vertex(0, 2));
  CHECK(pa.vertex_count(0) == 3);

  pa.erase(Edge(1, 2));
  CHECK(pa.block_has_vertex(0, 2));  // still an endpoint of (2,3)
  CHECK_FALSE(pa.block_has_vertex(0, 1));

  pa.erase(Edge(2, 3));
  CHECK_FALSE(pa.block_has_vertex(0, 2));
  CHECK(pa.vertex_count(0) == 0);

  // moving an edge between blocks moves its endpoints
  pa.assign(Edge(4, 5), 0);
  pa.assign(Edge(4, 5), 1);
  CHECK_FALSE(pa.block_has_vertex(0, 4));
  CHECK(pa.block_has_vertex(1, 4));
}

TEST_CASE("assignment dump format") {
  Graph g;
  g.add_edge(2, 1);
  g.add_edge(1, 3);
  auto pa = hash_partition(g, 2);
  std::ostringstream os;
  dump_assignment(pa, os);
  std::ostringstream expect;
  expect << "1 2 " << hash_block(Edge(1, 2), 2) << "\n1 3 " << hash_block(Edge(1, 3), 2) << "\n";
  CHECK(os.str() == expect.str());
}

TEST_CASE("distributed assignment flow matches the pure UB-Update choice") {
  Rng rng(mix64(4242));
  for (int trial = 0; trial < 8; ++trial) {
    Graph g = random_graph(40, 100, 800 + trial);
    auto pa = random_partition(g, 4, trial);

    // Shadow state for the pure route.
    Graph pure_g = g;
    PartitionAssignment pure_pa = pa;
    FundingState fs(4);

    // Distributed route.
    auto blocks = make_partition_blocks(pa);
    PartitionAlgorithm algo(pa);

    std::vector<GraphUpdate> updates;
    Graph gen = g;
    while (updates.size() < 15) {
      VertexId u = draw_index(rng, 45), v = draw_index(rng, 45);
      if (u == v || (gen.has_vertex(u) && gen.has_vertex(v) && gen.has_edge(u, v))) continue;
      gen.add_edge(u, v);
      updates.push_back(GraphUpdate::add_edge(u, v));
    }

    run_job(blocks, updates, algo);
    for (const GraphUpdate& upd : updates) {
      pure_g.add_edge(upd.u, upd.v);
      assign_update(pure_g, pure_pa, fs, upd.u, upd.v);
    }

    CHECK(algo.assignment().entries() == pure_pa.entries());
    CHECK(algo.assignment().covers(pure_g));
  }
}

TEST_CASE("distributed removal runs the threshold poll") {
  Graph g = random_graph(30, 80, 4);
  auto pa = random_partition(g, 4, 9);
  auto blocks = make_partition_blocks(pa);
  PartitionAlgorithm algo(pa, {}, 1.5);

  auto edges = g.edges();
  std::vector<GraphUpdate> updates{GraphUpdate::remove_edge(edges[0].u, edges[0].v)};
  JobResult r = run_job(blocks, updates, algo);

  Graph after = g;
  after.remove_edge(edges[0].u, edges[0].v);
  CHECK(algo.assignment().covers(after));

  // every worker reported its imbalance score
  const RepartitionDecision& d = algo.last_decision();
  REQUIRE(d.scores.size() == 4);
  PartitionAssignment expect_pa = pa;
  expect_pa.erase(edges[0]);
  auto expect = check_repartition(expect_pa, 1.5);
  CHECK(d.repartition == expect.repartition);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d.scores[i] == Catch::Approx(expect.scores[i]));
  // threshold poll = K requests + K replies on top of the removal pair
  CHECK(r.metrics.sent_m2w == 1 + 4);
  CHECK(r.metrics.sent_w2m == 1 + 4);
}

TEST_CASE("vertex removal evicts all incident edges from their blocks") {
  Graph g = random_graph(20, 50, 6);
  auto pa = random_partition(g, 3, 2);
  auto blocks = make_partition_blocks(pa);
  PartitionAlgorithm algo(pa);

  VertexId victim = g.vertices()[3];
  std::vector<GraphUpdate> updates{GraphUpdate::remove_vertex(victim)};
  run_job(blocks, updates, algo);

  Graph after = g;
  after.remove_vertex(victim);
  CHECK(algo.assignment().covers(after));
  CHECK(algo.assignment().total_edges() == after.edge_count());
}

TEST_CASE("cover and disjointness hold under random update streams") {
  Rng rng(mix64(123));
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_graph(40, 120, 500 + trial);
    auto pa = random_partition(g, 4, trial);
    FundingState fs(4);
    for (int step = 0; step < 60; ++step) {
      bool insert = draw_index(rng, 100) < 60 || g.edge_count() == 0;
      if (insert) {
        VertexId u = draw_index(rng, 50), v = draw_index(rng, 50);
        if (u == v || (g.has_vertex(u) && g.has_vertex(v) && g.has_edge(u, v))) continue;
        g.add_edge(u, v);
        assign_update(g, pa, fs, u, v);
      } else {
        auto edges = g.edges();
        Edge e = edges[draw_index(rng, edges.size())];
        g.remove_edge(e.u, e.v);
        pa.erase(e);
      }
      CHECK(pa.covers(g));
    }
  }
}
