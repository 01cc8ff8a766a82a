// Acceptance suite: one pass/fail line per criterion.
//
//   bladyg_acceptance           runs every criterion
//   bladyg_acceptance 2 5 9     runs a subset
//
// Criterion 1 needs the SNAP ego-Facebook edge list (facebook_combined.txt,
// 4,039 nodes / 88,234 edges). It is looked up at $BLADYG_EGO_FACEBOOK, then
// data/facebook_combined.txt, then data/ego-facebook.txt. Without the file
// the criterion fails and says so; everything else is self-contained.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bladyg/bladyg.hpp"

using namespace bladyg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

// --- criterion 1: ego-Facebook max coreness --------------------------------

fs::path find_ego_facebook() {
  if (const char* env = std::getenv("BLADYG_EGO_FACEBOOK"); env && fs::exists(env)) return env;
  for (const char* cand : {"data/facebook_combined.txt", "data/ego-facebook.txt"})
    if (fs::exists(cand)) return cand;
  return {};
}

void criterion_1() {
  fs::path path = find_ego_facebook();
  require(!path.empty(),
          "ego-Facebook dataset not found; set BLADYG_EGO_FACEBOOK or place "
          "facebook_combined.txt under data/");
  auto t0 = Clock::now();
  Graph g = read_edge_list(path);
  require(g.vertex_count() == 4039, "expected 4039 vertices, got " + std::to_string(g.vertex_count()));
  require(g.edge_count() == 88234, "expected 88234 edges, got " + std::to_string(g.edge_count()));
  CorenessMap cores = batch_coreness(g);
  std::uint32_t maxk = 0;
  for (const auto& [u, k] : cores) maxk = std::max(maxk, k);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  require(maxk == 115, "max coreness " + std::to_string(maxk) + ", expected 115");
  require(secs < 60.0, "took " + std::to_string(secs) + " s, budget 60 s");
}

// --- criteria 2 + 3: k-core maintenance oracle and candidate soundness ------

void kcore_stream_suite(bool check_oracle, bool check_candidates) {
  std::size_t checked_steps = 0;
  for (int gi = 0; gi < 100; ++gi) {
    std::size_t n = 20 + static_cast<std::size_t>(gi % 9) * 10;  // 20..100
    Graph g = random_graph_gnp(n, 0.1, 10'000 + gi);
    auto blocks = make_blocks(g, random_partition(g, 4, gi));
    KcoreAlgorithm algo;
    run_job(blocks, {}, algo);

    Graph shadow = g;
    Rng rng(mix64(77'000 + gi));
    int steps = 0;
    while (steps < 50) {
      bool insert = shadow.edge_count() == 0 || draw_index(rng, 100) < 55;
      GraphUpdate upd{};
      if (insert) {
        VertexId u = draw_index(rng, n), v = draw_index(rng, n);
        if (u == v || shadow.has_edge(u, v)) continue;
        upd = GraphUpdate::add_edge(u, v);
      } else {
        auto edges = shadow.edges();
        Edge e = edges[draw_index(rng, edges.size())];
        upd = GraphUpdate::remove_edge(e.u, e.v);
      }
      CorenessMap before = coreness_of_blocks(blocks);
      shadow.apply(upd);
      std::vector<GraphUpdate> one{upd};
      run_job(blocks, one, algo);
      ++steps;
      ++checked_steps;

      CorenessMap after = coreness_of_blocks(blocks);
      if (check_oracle) {
        CorenessMap expect = batch_coreness(shadow);
        require(after == expect, "coreness mismatch at graph " + std::to_string(gi) + " step " +
                                     std::to_string(steps) + " (" + to_string(upd) + ")");
      }
      if (check_candidates) {
        const KcoreTrace& trace = algo.history().back();
        for (const auto& [u, k] : after) {
          auto it = before.find(u);
          bool changed = it == before.end() || it->second != k;
          if (changed)
            require(trace.candidates.count(u) == 1,
                    "vertex " + std::to_string(u) + " changed outside the candidate set at graph " +
                        std::to_string(gi) + " step " + std::to_string(steps));
        }
      }
      for (const auto& [u, k] : after) {
        auto it = before.find(u);
        std::uint32_t kb = it == before.end() ? 0 : it->second;
        std::int64_t delta = static_cast<std::int64_t>(k) - kb;
        require(delta >= -1 && delta <= 1,
                "coreness of " + std::to_string(u) + " moved by more than one level");
      }
    }
  }
  require(checked_steps == 100 * 50, "expected 5000 steps");
  require(global_mode_violations() == 0, "mode violation recorded");
}

void criterion_2() {
  auto t0 = Clock::now();
  kcore_stream_suite(/*check_oracle=*/true, /*check_candidates=*/false);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  require(secs < 300.0, "took " + std::to_string(secs) + " s, budget 300 s");
}

void criterion_3() { kcore_stream_suite(/*check_oracle=*/false, /*check_candidates=*/true); }

// --- criterion 4: maximal clique maintenance oracle --------------------------

void criterion_4() {
  const double probs[] = {0.10, 0.15, 0.20, 0.25};
  for (int gi = 0; gi < 50; ++gi) {
    std::size_t n = 10 + static_cast<std::size_t>(gi % 7) * 5;  // 10..40
    Graph g = random_graph_gnp(n, probs[gi % 4], 20'000 + gi);
    auto blocks = make_blocks(g, random_partition(g, 4, gi));
    MceAlgorithm algo(blocks.size());
    run_job(blocks, {}, algo);

    Graph shadow = g;
    Rng rng(mix64(88'000 + gi));
    int steps = 0;
    while (steps < 30) {
      bool insert = shadow.edge_count() == 0 || draw_index(rng, 100) < 55;
      GraphUpdate upd{};
      if (insert) {
        VertexId u = draw_index(rng, n), v = draw_index(rng, n);
        if (u == v || shadow.has_edge(u, v)) continue;
        upd = GraphUpdate::add_edge(u, v);
      } else {
        auto edges = shadow.edges();
        Edge e = edges[draw_index(rng, edges.size())];
        upd = GraphUpdate::remove_edge(e.u, e.v);
      }
      shadow.apply(upd);
      std::vector<GraphUpdate> one{upd};
      run_job(blocks, one, algo);
      ++steps;
      require(cliques_of_blocks(blocks) == batch_mce(shadow),
              "clique set mismatch at graph " + std::to_string(gi) + " step " +
                  std::to_string(steps) + " (" + to_string(upd) + ")");
    }
  }
  require(global_mode_violations() == 0, "mode violation recorded");
}

// --- criterion 5: partitioning invariants and mutation counts ----------------

void criterion_5() {
  for (PartitionMethod method :
       {PartitionMethod::Hash, PartitionMethod::Random, PartitionMethod::Dfep}) {
    for (int gi = 0; gi < 3; ++gi) {
      Graph g = connected_random_graph(120 + 40 * gi, 500 + 150 * gi, 30'000 + gi);

      // 90/10 split, deterministic
      auto edges = g.edges();
      Rng rng(mix64(31'000 + gi));
      for (std::size_t i = edges.size(); i > 1; --i)
        std::swap(edges[i - 1], edges[draw_index(rng, i)]);
      std::size_t held = edges.size() / 10;
      Graph base;
      for (VertexId u : g.vertices()) base.add_vertex(u);
      for (std::size_t i = 0; i < edges.size() - held; ++i) base.add_edge(edges[i].u, edges[i].v);

      const BlockId k = 4;
      PartitionAssignment pa = run_partition_method(base, k, method, gi);
      require(pa.covers(base), std::string(to_string(method)) + ": initial cover failed");

      // IncrementalPart: assign only the new edges, checking invariants
      // after every single update.
      PartitionAssignment inc = pa;
      inc.reset_mutations();
      FundingState fs(k);
      Graph cur = base;
      auto before = pa.entries();
      for (std::size_t i = edges.size() - held; i < edges.size(); ++i) {
        cur.add_edge(edges[i].u, edges[i].v);
        assign_update(cur, inc, fs, edges[i].u, edges[i].v);
        require(inc.covers(cur), std::string(to_string(method)) + ": cover lost mid-stream");
      }
      require(inc.mutations() == held, std::string(to_string(method)) + ": incremental mutations " +
                                           std::to_string(inc.mutations()) + " != |delta| " +
                                           std::to_string(held));
      for (const auto& [e, b] : before)
        require(inc.block_of(e) == b, "incremental reassigned an existing edge");

      // NaivePart: full restart on the final graph.
      PartitionAssignment naive = run_partition_method(g, k, method, gi);
      require(naive.covers(g), std::string(to_string(method)) + ": naive cover failed");
      require(naive.mutations() == g.edge_count(),
              std::string(to_string(method)) + ": naive mutations " +
                  std::to_string(naive.mutations()) + " != |E| " + std::to_string(g.edge_count()));
    }
  }
}

// --- criterion 6: DFEP balance and termination --------------------------------

void criterion_6() {
  for (int gi = 0; gi < 20; ++gi) {
    std::size_t m = 1000 + static_cast<std::size_t>(gi) * (9000 / 19);
    std::size_t n = std::max<std::size_t>(m / 4, 32);
    Graph g = connected_random_graph(n, m, 40'000 + gi);
    for (BlockId k : {2u, 4u, 8u}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [pa, fsd] = dfep_partition(g, k, seed);
        require(pa.covers(g), "dfep did not cover (termination/cover failure)");
        double cap = 1.2 * static_cast<double>(m) / static_cast<double>(k);
        for (BlockId b = 0; b < k; ++b)
          require(static_cast<double>(pa.edge_count(b)) <= cap,
                  "block " + std::to_string(b) + " holds " + std::to_string(pa.edge_count(b)) +
                      " > cap " + std::to_string(cap) + " (m=" + std::to_string(m) +
                      ", K=" + std::to_string(k) + ", seed=" + std::to_string(seed) + ")");
        require(fsd.rounds <= m, "funding rounds exceeded edge count");
      }
    }
  }
}

// --- criterion 7: intra vs inter message counts --------------------------------

void criterion_7() {
  Graph g = connected_random_graph(1200, 3000, 50'000);
  const BlockId k = 8;
  for (std::uint64_t repeat = 0; repeat < 5; ++repeat) {
    auto pa = random_partition(g, k, repeat);

    auto run_messages = [&](ScenarioKind kind, bool kcore) -> std::uint64_t {
      auto inserts = gen_scenario(g, pa, kind, 1000, 60'000 + repeat);
      auto blocks = make_blocks(g, pa);
      JobResult r;
      if (kcore) {
        KcoreAlgorithm algo;
        r = run_job(blocks, inserts, algo);
      } else {
        DegreeAlgorithm algo;
        r = run_job(blocks, inserts, algo);
      }
      return r.metrics.messages_total();
    };

    for (bool kcore : {false, true}) {
      std::uint64_t intra = run_messages(ScenarioKind::Intra, kcore);
      std::uint64_t inter = run_messages(ScenarioKind::Inter, kcore);
      require(intra < inter, std::string(kcore ? "kcore" : "degree") + " repeat " +
                                 std::to_string(repeat) + ": intra " + std::to_string(intra) +
                                 " !< inter " + std::to_string(inter));
    }
  }
}

// --- criterion 8: deterministic-scheduler reproducibility ----------------------

struct SnapshotBytes {
  std::string vertices, edges, extra;
};

SnapshotBytes run_kcore_snapshot(const Graph& g, const std::vector<GraphUpdate>& updates,
                                 std::uint64_t seed, const fs::path& dir, JobMetrics& metrics) {
  auto blocks = make_blocks(g, random_partition(g, 4, seed));
  KcoreAlgorithm algo;
  JobResult r = run_job(blocks, updates, algo, {SchedulerKind::Deterministic});
  metrics = r.metrics;
  write_snapshot(r, algo, dir);
  {
    std::ofstream os(dir / "coreness.txt", std::ios::trunc);
    dump_coreness(coreness_of_blocks(blocks), os);
  }
  return {read_file(dir / "vertices.txt"), read_file(dir / "edges.txt"),
          read_file(dir / "coreness.txt")};
}

void criterion_8() {
  Graph g = random_graph(200, 600, 9);
  auto pa = random_partition(g, 4, 3);
  auto inserts = gen_scenario(g, pa, ScenarioKind::Inter, 30, 4);
  std::vector<GraphUpdate> updates = inserts;
  for (const GraphUpdate& d : deletion_phase(inserts)) updates.push_back(d);

  fs::path tmp = fs::temp_directory_path() / "bladyg_acceptance_c8";
  fs::remove_all(tmp);
  JobMetrics m1, m2;
  SnapshotBytes a = run_kcore_snapshot(g, updates, 3, tmp / "a", m1);
  SnapshotBytes b = run_kcore_snapshot(g, updates, 3, tmp / "b", m2);
  require(a.vertices == b.vertices, "vertices.txt differs between identical runs");
  require(a.edges == b.edges, "edges.txt differs between identical runs");
  require(a.extra == b.extra, "coreness.txt differs between identical runs");
  require(m1.sent_m2w == m2.sent_m2w && m1.sent_w2m == m2.sent_w2m && m1.sent_w2w == m2.sent_w2w,
          "per-mode message counts differ between identical runs");
  fs::remove_all(tmp);
}

// --- criterion 9: mode safety ----------------------------------------------------

void criterion_9() {
  std::uint64_t start = global_mode_violations();

  // A composite workload across every algorithm and both schedulers.
  Graph g = random_graph(80, 240, 5);
  auto pa = random_partition(g, 4, 5);
  auto inserts = gen_scenario(g, pa, ScenarioKind::Inter, 20, 6);
  std::vector<GraphUpdate> updates = inserts;
  for (const GraphUpdate& d : deletion_phase(inserts)) updates.push_back(d);

  for (SchedulerKind sched : {SchedulerKind::Deterministic, SchedulerKind::Concurrent}) {
    {
      auto blocks = make_blocks(g, pa);
      DegreeAlgorithm algo;
      JobResult r = run_job(blocks, updates, algo, {sched});
      require(r.metrics.mode_violation_deliveries == 0, "degree job recorded a violation");
    }
    {
      auto blocks = make_blocks(g, pa);
      KcoreAlgorithm algo;
      JobResult r = run_job(blocks, updates, algo, {sched});
      require(r.metrics.mode_violation_deliveries == 0, "kcore job recorded a violation");
    }
    {
      auto blocks = make_blocks(g, pa);
      MceAlgorithm algo(blocks.size());
      JobResult r = run_job(blocks, updates, algo, {sched});
      require(r.metrics.mode_violation_deliveries == 0, "mce job recorded a violation");
    }
    {
      auto blocks = make_partition_blocks(pa);
      PartitionAlgorithm algo(pa);
      JobResult r = run_job(blocks, updates, algo, {sched});
      require(r.metrics.mode_violation_deliveries == 0, "partition job recorded a violation");
    }
  }

  require(global_mode_violations() == start && start == 0,
          "channel-layer assertion fired " + std::to_string(global_mode_violations()) + " times");
}

struct Criterion {
  int number;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "ego-Facebook max coreness 115", criterion_1},
      {2, "k-core maintenance equals peeling on 100 graphs x 50 steps", criterion_2},
      {3, "every coreness change lies in the candidate set", criterion_3},
      {4, "clique maintenance equals recomputation on 50 graphs x 30 steps", criterion_4},
      {5, "cover/disjointness + incremental |delta| vs naive |E|", criterion_5},
      {6, "DFEP terminates with max block <= 1.2 |E|/K", criterion_6},
      {7, "intra scenario needs fewer messages than inter, every repeat", criterion_7},
      {8, "deterministic scheduler reproduces snapshots byte-for-byte", criterion_8},
      {9, "zero channel-layer mode violations", criterion_9},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    auto t0 = Clock::now();
    try {
      c.run();
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      std::ostringstream line;
      line << "[PASS] criterion " << c.number << ": " << c.name << " (" << secs << " s)";
      std::cout << line.str() << "\n";
    } catch (const Failure& f) {
      ++failures;
      std::cout << "[FAIL] criterion " << c.number << ": " << c.name << " -- " << f.detail << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] criterion " << c.number << ": " << c.name << " -- unexpected error: "
                << e.what() << "\n";
    }
  }
  return failures;
}
