#include <catch2/catch_amalgamated.hpp>

#include "bladyg/prefix_tree.hpp"

using namespace bladyg;

TEST_CASE("empty tree has no paths") {
  PrefixTree t(1);
  CHECK(t.paths().empty());
  CHECK(t.empty());
}

TEST_CASE("single path") {
  PrefixTree t(1);
  std::vector<VertexId> c{1, 2, 3};
  t.insert(c);
  auto paths = t.paths();
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == c);
  CHECK(t.contains(c));
  CHECK(t.clique_count() == 1);
}

TEST_CASE("paths enumerate in ascending lexicographic order") {
  PrefixTree t(1);
  t.insert(std::vector<VertexId>{1, 4});
  t.insert(std::vector<VertexId>{1, 2, 3});
  auto paths = t.paths();
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == std::vector<VertexId>{1, 2, 3});
  CHECK(paths[1] == std::vector<VertexId>{1, 4});
}

TEST_CASE("erase prunes shared branches correctly") {
  PrefixTree t(1);
  t.insert(std::vector<VertexId>{1, 2, 3});
  t.insert(std::vector<VertexId>{1, 2, 5});
  CHECK(t.erase(std::vector<VertexId>{1, 2, 3}));
  CHECK_FALSE(t.contains(std::vector<VertexId>{1, 2, 3}));
  CHECK(t.contains(std::vector<VertexId>{1, 2, 5}));
  CHECK_FALSE(t.erase(std::vector<VertexId>{1, 9}));
  CHECK(t.erase(std::vector<VertexId>{1, 2, 5}));
  CHECK(t.empty());
  CHECK(t.clique_count() == 0);
}

TEST_CASE("wrong root rejected") {
  PrefixTree t(2);
  CHECK_THROWS_AS(t.insert(std::vector<VertexId>{1, 2}), Error);
  CHECK_FALSE(t.contains(std::vector<VertexId>{1, 2}));
}
