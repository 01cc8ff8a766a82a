#pragma once

#include <map>
#include <span>
#include <vector>

#include "bladyg/graph.hpp"

namespace bladyg {

// Trie over vertex ids, rooted at one vertex. Every stored root-to-leaf path
// is a maximal clique whose minimum member is the root; path vertices are
// strictly ascending, so children maps are ordered and enumeration is
// deterministic. Maximal cliques are never prefixes of one another, which is
// why leaves alone terminate paths.
class PrefixTree {
 public:
  PrefixTree() = default;
  explicit PrefixTree(VertexId root) : root_(root) {}

  VertexId root() const { return root_; }
  bool empty() const { return top_.children.empty(); }
  std::size_t clique_count() const { return count_; }

  // clique must be sorted ascending, start at the root, and have >= 2
  // members (single vertices are not stored cliques).
  void insert(std::span<const VertexId> clique) {
    if (clique.size() < 2 || clique.front() != root_)
      throw Error(ErrorCode::InvalidArgument, "clique does not start at tree root");
    Node* n = &top_;
    for (std::size_t i = 1; i < clique.size(); ++i) n = &n->children[clique[i]];
    ++count_;
  }

  // Removes one stored clique, pruning emptied branches. Returns false if
  // the path is not present.
  bool erase(std::span<const VertexId> clique) {
    if (clique.size() < 2 || clique.front() != root_) return false;
    if (!erase_rec(top_, clique, 1)) return false;
    --count_;
    return true;
  }

  bool contains(std::span<const VertexId> clique) const {
    if (clique.size() < 2 || clique.front() != root_) return false;
    const Node* n = &top_;
    for (std::size_t i = 1; i < clique.size(); ++i) {
      auto it = n->children.find(clique[i]);
      if (it == n->children.end()) return false;
      n = &it->second;
    }
    return n->children.empty();
  }

  // All root-to-leaf paths in ascending lexicographic order.
  std::vector<std::vector<VertexId>> paths() const {
    std::vector<std::vector<VertexId>> out;
    std::vector<VertexId> cur{root_};
    walk(top_, cur, out);
    return out;
  }

  friend bool operator==(const PrefixTree& a, const PrefixTree& b) {
    return a.root_ == b.root_ && a.paths() == b.paths();
  }

 private:
  struct Node {
    std::map<VertexId, Node> children;
  };

  static bool erase_rec(Node& n, std::span<const VertexId> clique, std::size_t i) {
    if (i == clique.size()) return n.children.empty();
    auto it = n.children.find(clique[i]);
    if (it == n.children.end()) return false;
    if (!erase_rec(it->second, clique, i + 1)) return false;
    if (i + 1 == clique.size() || it->second.children.empty()) n.children.erase(it);
    return true;
  }

  void walk(const Node& n, std::vector<VertexId>& cur,
            std::vector<std::vector<VertexId>>& out) const {
    if (n.children.empty()) {
      if (cur.size() > 1) out.push_back(cur);
      return;
    }
    for (const auto& [v, child] : n.children) {
      cur.push_back(v);
      walk(child, cur, out);
      cur.pop_back();
    }
  }

  VertexId root_ = 0;
  Node top_;
  std::size_t count_ = 0;
};

// Enumerates a tree's cliques.
inline std::vector<std::vector<VertexId>> tree_paths(const PrefixTree& t) { return t.paths(); }

}  // namespace bladyg
