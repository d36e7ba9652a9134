#include <doctest.h>

#include <ctbn/errors.hpp>
#include <ctbn/state_indexer.hpp>

using namespace ctbn;

namespace {

VariableSpec var(const std::string& name, std::initializer_list<std::string> values) {
  return VariableSpec{name, values};
}

} // namespace

TEST_CASE("first-listed variable is the most significant digit") {
  StateIndexer zw{{var("Z", {"z1", "z2"}), var("W", {"w1", "w2"})}};
  // ordering: (z1,w1), (z1,w2), (z2,w1), (z2,w2)
  CHECK(zw.index_of({0, 0}) == 0);
  CHECK(zw.index_of({0, 1}) == 1);
  CHECK(zw.index_of({1, 0}) == 2);
  CHECK(zw.index_of({1, 1}) == 3);
  CHECK(zw.assignment_of(2) == std::vector<int>{1, 0});
  CHECK(zw.label(1) == "(z1, w2)");
}

TEST_CASE("mixed radix with a three-state variable") {
  StateIndexer ix{{var("A", {"a1", "a2"}), var("B", {"b1", "b2", "b3"})}};
  CHECK(ix.size() == 6);
  CHECK(ix.index_of({1, 2}) == 5);
  CHECK(ix.index_of({1, 0}) == 3);
  CHECK(ix.digit(4, 0) == 1);
  CHECK(ix.digit(4, 1) == 1);
  CHECK(ix.with_digit(4, 1, 2) == 5);
}

TEST_CASE("projection onto a sub-space") {
  StateIndexer big{{var("X", {"x1", "x2"}), var("Y", {"y1", "y2"}), var("Z", {"z1", "z2"})}};
  StateIndexer sub{{var("Z", {"z1", "z2"}), var("X", {"x1", "x2"})}};
  // (x2, y1, z1) = index 4 -> (z1, x2) = index 1
  CHECK(big.project(4, sub) == 1);
  // (x1, y2, z2) = index 3 -> (z2, x1) = index 2
  CHECK(big.project(3, sub) == 2);
}

TEST_CASE("empty indexer has a single (empty) state") {
  StateIndexer empty;
  CHECK(empty.size() == 1);
  CHECK(empty.num_variables() == 0);
}

TEST_CASE("merge keeps first-argument order and drops duplicates") {
  auto merged = merge_variables({var("A", {"a1", "a2"}), var("B", {"b1", "b2"})},
                                {var("B", {"b1", "b2"}), var("C", {"c1", "c2"})});
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].name == "A");
  CHECK(merged[1].name == "B");
  CHECK(merged[2].name == "C");
}

TEST_CASE("merge rejects conflicting domains") {
  CHECK_THROWS_AS(merge_variables({var("A", {"a1", "a2"})}, {var("A", {"a1", "a2", "a3"})}),
                  ValidationError);
}
