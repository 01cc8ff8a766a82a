// Command-line front end: batch + incremental jobs over edge-list graphs,
// update scenario generation, and CSV benchmark output.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bladyg/bladyg.hpp"

namespace fs = std::filesystem;
using namespace bladyg;

namespace {

int log_level() {
  static int level = [] {
    const char* v = std::getenv("BLADYG_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s == "2" || s == "debug") return 2;
    if (s == "1" || s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[bladyg] " << msg << "\n";
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Options {
  std::string input;
  std::string updates_file;
  std::string algorithm = "degree";
  std::string partitioner = "hash";
  unsigned workers = 4;
  std::uint64_t seed = 1;
  std::string strategy = "incremental";
  std::string scenario = "auto";  // inter | intra | file | auto
  std::size_t scenario_size = 1000;
  unsigned repeats = 5;
  std::string metrics_file;
  std::string snapshot_dir;
  std::string scenario_out;
  double holdout = 0.10;
  bool deterministic = false;
};

PartitionMethod parse_method(const std::string& s) {
  if (s == "hash") return PartitionMethod::Hash;
  if (s == "random") return PartitionMethod::Random;
  if (s == "dfep") return PartitionMethod::Dfep;
  throw Error(ErrorCode::InvalidArgument, "unknown partitioner " + s);
}

// Held-out split for the 90/10 protocol: a seed-stable shuffle of the
// canonical edge list; the tail becomes the update stream.
std::pair<Graph, std::vector<GraphUpdate>> holdout_split(const Graph& g, double fraction,
                                                         std::uint64_t seed) {
  std::vector<Edge> edges = g.edges();
  Rng rng(mix64(seed ^ 0x9010ULL));
  for (std::size_t i = edges.size(); i > 1; --i)
    std::swap(edges[i - 1], edges[draw_index(rng, i)]);
  std::size_t held = static_cast<std::size_t>(static_cast<double>(edges.size()) * fraction);
  Graph base;
  for (VertexId u : g.vertices()) base.add_vertex(u);
  for (std::size_t i = 0; i < edges.size() - held; ++i) base.add_edge(edges[i].u, edges[i].v);
  std::vector<GraphUpdate> updates;
  for (std::size_t i = edges.size() - held; i < edges.size(); ++i)
    updates.push_back(GraphUpdate::add_edge(edges[i].u, edges[i].v));
  return {std::move(base), std::move(updates)};
}

Graph apply_all(const Graph& g, const std::vector<GraphUpdate>& updates) {
  Graph out = g;
  for (const GraphUpdate& upd : updates) out.apply(upd);
  return out;
}

// The post-run snapshot must pass the algorithm's own batch oracle before
// metrics are reported.
void verify_result(const std::string& algorithm, const Graph& final_graph,
                   const std::vector<Block>& blocks, const JobResult& result) {
  if (algorithm == "degree") {
    for (const auto& [u, st] : result.vertices)
      if (st.degree != final_graph.degree(u))
        throw Error(ErrorCode::InvalidArgument,
                    "degree oracle mismatch at vertex " + std::to_string(u));
  } else if (algorithm == "kcore") {
    if (batch_coreness(final_graph) != coreness_of_blocks(blocks))
      throw Error(ErrorCode::InvalidArgument, "coreness oracle mismatch");
  } else if (algorithm == "mce") {
    if (cliques_of_blocks(blocks) != batch_mce(final_graph))
      throw Error(ErrorCode::InvalidArgument, "clique oracle mismatch");
  }
}

struct RunOutput {
  JobResult result;
  std::vector<Block> blocks;
  double pt_ms = 0.0;
  double ut_ms = 0.0;
  std::uint64_t mutations = 0;
  std::optional<RepartitionDecision> decision;
};

RunOutput run_once(const Options& opt, const Graph& base, const std::vector<GraphUpdate>& updates,
                   std::uint64_t seed) {
  RunOutput out;
  JobOptions jopts;
  jopts.scheduler = opt.deterministic ? SchedulerKind::Deterministic : SchedulerKind::Concurrent;

  PartitionMethod method = parse_method(opt.partitioner);
  auto t0 = Clock::now();
  PartitionAssignment pa = run_partition_method(base, opt.workers, method, seed);
  out.pt_ms = ms_since(t0);
  log_info("partitioned " + std::to_string(base.edge_count()) + " edges into " +
           std::to_string(opt.workers) + " blocks in " + std::to_string(out.pt_ms) + " ms");

  const Graph final_graph = apply_all(base, updates);

  if (opt.algorithm == "partition") {
    if (opt.strategy == "naive") {
      // NaivePart: drop the assignment and rebuild from scratch.
      auto t1 = Clock::now();
      PartitionAssignment fresh = run_partition_method(final_graph, opt.workers, method, seed);
      out.ut_ms = ms_since(t1);
      out.mutations = fresh.mutations();
      out.blocks = make_partition_blocks(fresh);
      collect_result(out.blocks, out.result);
      out.decision = check_repartition(fresh);
      if (!fresh.covers(final_graph))
        throw Error(ErrorCode::InvalidArgument, "assignment does not cover the graph");
      return out;
    }
    pa.reset_mutations();
    out.blocks = make_partition_blocks(pa);
    PartitionAlgorithm algo(pa);
    out.result = run_job(out.blocks, updates, algo, jopts);
    out.ut_ms = out.result.metrics.total_ms;
    out.mutations = algo.assignment().mutations();
    out.decision = algo.last_decision();
    if (!algo.assignment().covers(final_graph))
      throw Error(ErrorCode::InvalidArgument, "assignment does not cover the graph");
    return out;
  }

  // Property-maintenance algorithms; the edge assignment is maintained
  // alongside per --strategy so the partitioning cost of the stream shows
  // up in the metrics row for any algorithm.
  out.blocks = make_blocks(base, pa);
  std::unique_ptr<Algorithm> algo;
  if (opt.algorithm == "degree") algo = std::make_unique<DegreeAlgorithm>();
  else if (opt.algorithm == "kcore") algo = std::make_unique<KcoreAlgorithm>();
  else if (opt.algorithm == "mce") algo = std::make_unique<MceAlgorithm>(out.blocks.size());
  else throw Error(ErrorCode::InvalidArgument, "unknown algorithm " + opt.algorithm);

  out.result = run_job(out.blocks, updates, *algo, jopts);
  out.ut_ms = out.result.metrics.total_ms;  // update time excludes the batch phase

  if (opt.strategy == "naive") {
    PartitionAssignment fresh = run_partition_method(final_graph, opt.workers, method, seed);
    out.mutations = fresh.mutations();
  } else {
    pa.reset_mutations();
    Graph shadow = base;
    FundingState fs(opt.workers);
    for (const GraphUpdate& upd : updates) {
      if (upd.kind == GraphUpdate::Kind::AddEdge) {
        shadow.apply(upd);
        assign_update(shadow, pa, fs, upd.u, upd.v);
      } else if (upd.kind == GraphUpdate::Kind::RemoveEdge) {
        shadow.apply(upd);
        pa.erase(Edge(upd.u, upd.v));
      } else if (upd.kind == GraphUpdate::Kind::RemoveVertex) {
        std::vector<Edge> incident;
        for (VertexId w : shadow.neighbors(upd.u)) incident.push_back(Edge(upd.u, w));
        shadow.apply(upd);
        for (const Edge& e : incident) pa.erase(e);
      } else {
        shadow.apply(upd);
      }
    }
    out.mutations = pa.mutations();
  }

  verify_result(opt.algorithm, final_graph, out.blocks, out.result);
  return out;
}

void write_snapshot_files(const Options& opt, const RunOutput& run) {
  if (opt.snapshot_dir.empty()) return;
  fs::path dir(opt.snapshot_dir);
  if (opt.algorithm == "degree") {
    write_snapshot(run.result, DegreeAlgorithm(), dir);
  } else if (opt.algorithm == "kcore") {
    write_snapshot(run.result, KcoreAlgorithm(), dir);
    std::ofstream os(dir / "coreness.txt", std::ios::trunc);
    dump_coreness(coreness_of_blocks(run.blocks), os);
  } else if (opt.algorithm == "mce") {
    write_snapshot(run.result, MceAlgorithm(run.blocks.size()), dir);
    std::ofstream os(dir / "cliques.txt", std::ios::trunc);
    dump_cliques(cliques_of_blocks(run.blocks), os);
  } else {
    PartitionAlgorithm formatter{PartitionAssignment(opt.workers)};
    write_snapshot(run.result, formatter, dir);
    PartitionAssignment dumped(opt.workers);
    for (const Block& b : run.blocks)
      for (const Edge& e : b.local_graph().edges()) dumped.assign(e, b.id());
    std::ofstream os(dir / "assignment.txt", std::ios::trunc);
    dump_assignment(dumped, os);
  }
  log_info("snapshot written to " + opt.snapshot_dir);
}

int run_main(const Options& opt) {
  Graph input = read_edge_list(fs::path(opt.input));
  log_info("loaded " + opt.input + ": " + std::to_string(input.vertex_count()) + " vertices, " +
           std::to_string(input.edge_count()) + " edges");

  std::string scenario = opt.scenario;
  if (scenario == "auto") scenario = opt.updates_file.empty() ? "holdout" : "file";
  if (scenario == "file" && opt.updates_file.empty())
    throw Error(ErrorCode::InvalidArgument, "--scenario file requires --updates");

  for (unsigned repeat = 0; repeat < opt.repeats; ++repeat) {
    std::uint64_t seed = opt.seed + repeat;

    Graph base;
    std::vector<GraphUpdate> updates;
    if (scenario == "holdout") {
      std::tie(base, updates) = holdout_split(input, opt.holdout, seed);
    } else if (scenario == "file") {
      base = input;
      updates = read_updates_validated(fs::path(opt.updates_file), base);
    } else {
      base = input;
      PartitionAssignment pa =
          run_partition_method(base, opt.workers, parse_method(opt.partitioner), seed);
      ScenarioKind kind = scenario == "inter" ? ScenarioKind::Inter : ScenarioKind::Intra;
      auto inserts = gen_scenario(base, pa, kind, opt.scenario_size, seed);
      auto deletes = deletion_phase(inserts);
      updates = inserts;
      updates.insert(updates.end(), deletes.begin(), deletes.end());
      if (!opt.scenario_out.empty()) {
        std::ofstream os(opt.scenario_out, std::ios::trunc);
        write_updates(updates, os);
      }
    }

    RunOutput run = run_once(opt, base, updates, seed);

    MetricsRecord rec;
    rec.dataset = fs::path(opt.input).stem().string();
    rec.algorithm = opt.algorithm;
    rec.partitioner = opt.partitioner;
    rec.workers = static_cast<int>(opt.workers);
    rec.scenario = scenario;
    rec.strategy = opt.strategy;
    rec.repeat = static_cast<int>(repeat);
    rec.seed = seed;
    rec.fill_from(run.result.metrics);
    rec.pt_ms = run.pt_ms;
    rec.ut_ms = run.ut_ms;
    rec.mutations = run.mutations;
    if (!opt.metrics_file.empty()) append_metrics(rec, fs::path(opt.metrics_file));

    std::cout << "repeat " << repeat << ": PT " << rec.pt_ms << " ms, UT " << rec.ut_ms
              << " ms, AIT " << rec.ait_ms << " ms, ADT " << rec.adt_ms << " ms, messages "
              << run.result.metrics.messages_total() << " (m2w " << rec.msg_m2w << ", w2m "
              << rec.msg_w2m << ", w2w " << rec.msg_w2w << "), mutations " << rec.mutations
              << "\n";
    if (run.decision && !run.decision->scores.empty()) {
      std::cout << "repartition check: " << (run.decision->repartition ? "repartition" : "keep")
                << " (trigger " << run.decision->trigger << ")\n";
    }

    if (repeat + 1 == opt.repeats) write_snapshot_files(opt, run);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bladyg: block-centric processing of large dynamic graphs"};
  Options opt;

  app.add_option("--input", opt.input, "edge-list file (u v per line, # comments)")->required();
  app.add_option("--updates", opt.updates_file, "update stream file (A/D/AV/DV lines)");
  app.add_option("--algorithm", opt.algorithm, "degree|kcore|mce|partition")
      ->check(CLI::IsMember({"degree", "kcore", "mce", "partition"}));
  app.add_option("--partitioner", opt.partitioner, "hash|random|dfep")
      ->check(CLI::IsMember({"hash", "random", "dfep"}));
  app.add_option("--workers", opt.workers, "number of worker blocks K")->check(CLI::Range(1, 1024));
  app.add_option("--seed", opt.seed, "base RNG seed (repeat r uses seed+r)");
  app.add_option("--strategy", opt.strategy, "incremental|naive")
      ->check(CLI::IsMember({"incremental", "naive"}));
  app.add_option("--scenario", opt.scenario,
                 "inter|intra|file (default: file with --updates, else 90/10 holdout)")
      ->check(CLI::IsMember({"inter", "intra", "file", "auto"}));
  app.add_option("--scenario-size", opt.scenario_size, "edges per generated scenario");
  app.add_option("--repeats", opt.repeats, "benchmark repetitions")->check(CLI::Range(1, 1000));
  app.add_option("--metrics", opt.metrics_file, "append CSV rows here");
  app.add_option("--snapshot", opt.snapshot_dir, "write vertices.txt/edges.txt + dumps here");
  app.add_option("--scenario-out", opt.scenario_out, "also write the generated scenario stream");
  app.add_option("--holdout", opt.holdout, "held-out edge fraction for the default protocol")
      ->check(CLI::Range(0.0, 0.9));
  app.add_flag("--deterministic", opt.deterministic, "single-threaded deterministic scheduler");

  CLI11_PARSE(app, argc, argv);

  try {
    return run_main(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
