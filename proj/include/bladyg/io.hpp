#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bladyg/graph.hpp"
#include "bladyg/runtime.hpp"

namespace bladyg {

// SNAP-style edge list: one "u v" pair per line, '#' comments skipped,
// extra columns ignored, duplicate lines (either direction) collapsed.
inline Graph read_edge_list(std::istream& is, const std::string& name = "<stream>") {
  Graph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::istringstream ls(line);
    VertexId u = 0, v = 0;
    if (!(ls >> u >> v))
      throw Error(ErrorCode::ParseError, name + ":" + std::to_string(lineno) + ": expected 'u v'");
    if (u == v)
      throw Error(ErrorCode::ParseError,
                  name + ":" + std::to_string(lineno) + ": self-loop " + std::to_string(u));
    if (!g.has_edge(u, v)) g.add_edge(u, v);
  }
  return g;
}

inline Graph read_edge_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return read_edge_list(is, path.filename().string());
}

// Update stream: one update per line, applied in file order.
//   A u v   insert edge
//   D u v   remove edge
//   AV u    insert vertex
//   DV u    remove vertex
inline std::optional<GraphUpdate> parse_update(const std::string& line, const std::string& name,
                                               std::size_t lineno) {
  std::size_t first = line.find_first_not_of(" \t\r");
  if (first == std::string::npos || line[first] == '#') return std::nullopt;
  std::istringstream ls(line);
  std::string tag;
  ls >> tag;
  VertexId u = 0, v = 0;
  auto fail = [&]() -> Error {
    return Error(ErrorCode::ParseError, name + ":" + std::to_string(lineno) + ": bad update line");
  };
  if (tag == "A" || tag == "D") {
    if (!(ls >> u >> v)) throw fail();
    return tag == "A" ? GraphUpdate::add_edge(u, v) : GraphUpdate::remove_edge(u, v);
  }
  if (tag == "AV" || tag == "DV") {
    if (!(ls >> u)) throw fail();
    return tag == "AV" ? GraphUpdate::add_vertex(u) : GraphUpdate::remove_vertex(u);
  }
  throw fail();
}

// Lazy line-by-line reader.
class UpdateReader {
 public:
  explicit UpdateReader(const std::filesystem::path& path)
      : is_(path), name_(path.filename().string()) {
    if (!is_) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  }

  std::optional<GraphUpdate> next() {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      if (auto upd = parse_update(line, name_, lineno_)) return upd;
    }
    return std::nullopt;
  }

  std::size_t line() const { return lineno_; }

 private:
  std::ifstream is_;
  std::string name_;
  std::size_t lineno_ = 0;
};

inline std::vector<GraphUpdate> read_updates(const std::filesystem::path& path) {
  UpdateReader reader(path);
  std::vector<GraphUpdate> out;
  while (auto upd = reader.next()) out.push_back(*upd);
  return out;
}

// Streams the file while applying each update to a scratch copy of the
// graph, so an invalid update (say, deleting an absent edge) surfaces with
// its line number attached.
inline std::vector<GraphUpdate> read_updates_validated(const std::filesystem::path& path,
                                                       const Graph& against) {
  UpdateReader reader(path);
  Graph scratch = against;
  std::vector<GraphUpdate> out;
  while (auto upd = reader.next()) {
    try {
      scratch.apply(*upd);
    } catch (const Error& e) {
      throw Error(e.code(),
                  path.filename().string() + ":" + std::to_string(reader.line()) + ": " + e.what());
    }
    out.push_back(*upd);
  }
  return out;
}

inline void write_updates(const std::vector<GraphUpdate>& updates, std::ostream& os) {
  for (const GraphUpdate& upd : updates) os << to_string(upd) << "\n";
}

// Snapshot: vertices.txt carries "id <state columns>" (columns are the
// algorithm's choice), edges.txt carries canonical "u v" lines. Both sorted,
// '\n' terminated, byte-deterministic.
inline void write_snapshot(const JobResult& result, const Algorithm& algo,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream vs(dir / "vertices.txt", std::ios::trunc);
    if (!vs) throw Error(ErrorCode::ParseError, "cannot write " + (dir / "vertices.txt").string());
    for (const auto& [u, st] : result.vertices) vs << u << " " << algo.vertex_state_columns(st) << "\n";
  }
  {
    std::ofstream es(dir / "edges.txt", std::ios::trunc);
    if (!es) throw Error(ErrorCode::ParseError, "cannot write " + (dir / "edges.txt").string());
    for (const Edge& e : result.edges) es << e.u << " " << e.v << "\n";
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace bladyg
